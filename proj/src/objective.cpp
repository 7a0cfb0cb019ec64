#include "hudn/objective.hpp"

#include "hudn/hgsage.hpp"
#include "hudn/io_util.hpp"

#include <cmath>

namespace hudn {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr real kProbFloor = 1e-12;

void check_rows_one(const Mat& x, bool hard) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    real rowsum = 0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      real v = x(i, j);
      if (v < 0) throw input_error("allocation: negative association entry");
      if (hard && v != 0 && v != 1)
        throw input_error("allocation: hard entries must be 0 or 1");
      rowsum += v;
    }
    if (hard ? (rowsum != 1) : (std::abs(rowsum - 1) > 1e-9))
      throw input_error("allocation: each UE must associate with exactly one BS");
  }
}

// B / max(K_j, 1) per column, loads from the hard association
RowVec bandwidth_share(const Mat& x_hard, double bandwidth) {
  RowVec share(x_hard.cols());
  for (Eigen::Index j = 0; j < x_hard.cols(); ++j) {
    real load = x_hard.col(j).sum();
    share(j) = static_cast<real>(bandwidth) / std::max(load, real(1));
  }
  return share;
}

Mat effective_rate_matrix(const Mat& x_hard, const Vec& p, const Mat& gains,
                          double bandwidth, double sigma2) {
  Mat s = sinr_matrix(gains, p, sigma2);
  RowVec share = bandwidth_share(x_hard, bandwidth);
  // multiply by the reciprocal so the value matches the tape route bit for bit
  Mat gamma(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      gamma(i, j) = share(j) * static_cast<real>(std::log1p(static_cast<double>(s(i, j))) *
                                                 (1.0 / kLn2));
  return gamma;
}

}  // namespace

void check_allocation(const Allocation& alloc, const Vec& p_max) {
  if (alloc.x.rows() == 0 || alloc.x.cols() == 0) throw input_error("allocation: empty");
  if (alloc.p.size() != alloc.x.cols())
    throw input_error("allocation: power vector size mismatch");
  check_rows_one(alloc.x, alloc.hard);
  if (p_max.size() != 0 && p_max.size() != alloc.p.size())
    throw input_error("allocation: p_max size mismatch");
  for (Eigen::Index j = 0; j < alloc.p.size(); ++j) {
    if (!(alloc.p(j) > 0)) throw input_error("allocation: powers must be > 0");
    if (p_max.size() != 0 && alloc.p(j) > p_max(j))
      throw input_error("allocation: power exceeds p_max");
  }
}

Mat sinr_matrix(const Mat& gains, const Vec& p, double sigma2) {
  if (p.size() != gains.cols()) throw input_error("sinr: power vector size mismatch");
  if (!(sigma2 > 0)) throw input_error("sinr: sigma2 must be > 0");
  for (Eigen::Index j = 0; j < p.size(); ++j)
    if (p(j) < 0) throw input_error("sinr: negative power");
  Mat recv = gains.array().rowwise() * p.transpose().array();
  Vec total = recv.rowwise().sum();
  Mat s(gains.rows(), gains.cols());
  for (Eigen::Index i = 0; i < gains.rows(); ++i)
    for (Eigen::Index j = 0; j < gains.cols(); ++j)
      s(i, j) = recv(i, j) / (total(i) - recv(i, j) + static_cast<real>(sigma2));
  return s;
}

double sinr(const Mat& gains, const Vec& p, double sigma2, int ue, int bs) {
  if (ue < 0 || ue >= gains.rows() || bs < 0 || bs >= gains.cols())
    throw input_error("sinr: index out of range");
  return static_cast<double>(sinr_matrix(gains, p, sigma2)(ue, bs));
}

double effective_rate(int ue, int bs, const Mat& x_hard, const Vec& p, const Mat& gains,
                      double bandwidth, double sigma2) {
  if (ue < 0 || ue >= x_hard.rows() || bs < 0 || bs >= x_hard.cols())
    throw input_error("effective_rate: index out of range");
  real load = x_hard.col(bs).sum();
  if (x_hard(ue, bs) == 1 && load < 1)
    throw input_error("effective_rate: inconsistent loads");
  if (x_hard(ue, bs) != 1) throw input_error("effective_rate: UE not served by this BS");
  double s = sinr(gains, p, sigma2, ue, bs);
  return bandwidth / static_cast<double>(load) * (std::log1p(s) * (1.0 / kLn2));
}

RateReport rate_report(const Mat& x_hard, const Vec& p, const Mat& gains, double bandwidth,
                       double sigma2) {
  check_rows_one(x_hard, true);
  Mat gamma = effective_rate_matrix(x_hard, p, gains, bandwidth, sigma2);
  RateReport r;
  r.sigma2 = sigma2;
  r.bandwidth = bandwidth;
  r.loads = VecI::Zero(x_hard.cols());
  r.ue_rates.resize(x_hard.rows());
  for (Eigen::Index i = 0; i < x_hard.rows(); ++i) {
    Eigen::Index serving = 0;
    x_hard.row(i).maxCoeff(&serving);
    r.loads(serving) += 1;
    r.ue_rates(i) = gamma(i, serving);
  }
  Mat served = (x_hard.array() * gamma.array()).matrix();
  r.total = served.sum();
  return r;
}

double sum_rate(const Allocation& alloc, const Mat& gains, double bandwidth, double sigma2,
                const Vec& p_max) {
  check_allocation(alloc, p_max);
  Mat xh = alloc.hard ? alloc.x : harden(alloc.x);
  return rate_report(xh, alloc.p, gains, bandwidth, sigma2).total;
}

void write_rate_report_csv(const RateReport& report, const std::vector<int>& ue_ids,
                           const std::string& path) {
  std::string out = "ue_grid_index,rate_bits\n";
  for (Eigen::Index i = 0; i < report.ue_rates.size(); ++i) {
    int id = i < static_cast<Eigen::Index>(ue_ids.size())
                 ? ue_ids[static_cast<std::size_t>(i)]
                 : static_cast<int>(i);
    out += format_int(id) + "," + format_real(static_cast<double>(report.ue_rates(i))) + "\n";
  }
  write_text_file(path, out);
}

Var supervised_loss(Tape& tape, Var x_soft, const Mat& labels) {
  const Mat& xv = tape.value(x_soft);
  if (xv.rows() != labels.rows() || xv.cols() != labels.cols())
    throw input_error("supervised_loss: shape mismatch");
  for (Eigen::Index i = 0; i < labels.rows(); ++i) {
    real rowsum = 0;
    for (Eigen::Index j = 0; j < labels.cols(); ++j) {
      if (labels(i, j) != 0 && labels(i, j) != 1)
        throw input_error("supervised_loss: labels must be one-hot");
      rowsum += labels(i, j);
    }
    if (rowsum != 1) throw input_error("supervised_loss: labels must be one-hot");
  }
  Var ln = log(clamp_min(x_soft, kProbFloor));
  return scale(sum(cmul(tape.constant(labels), ln)), real(-1));
}

Var entropy_loss(Tape& tape, Var z, const Mat& mask) {
  const Mat& zv = tape.value(z);
  if (zv.rows() != mask.rows() || zv.cols() != mask.cols())
    throw input_error("entropy_loss: mask shape mismatch");
  Var e = masked_softmax_t(z, mask, real(1));
  Var ln = log(clamp_min(e, kProbFloor));
  return scale(sum(cmul(e, ln)), real(-1));
}

TwoPathFrozen freeze_two_path(const Mat& x_soft_value, const Vec& p_value, const Mat& gains,
                              double bandwidth, double sigma2) {
  TwoPathFrozen f;
  f.x_hard = harden(x_soft_value);
  f.gamma = effective_rate_matrix(f.x_hard, p_value, gains, bandwidth, sigma2);
  Mat weighted = (x_soft_value.array() * f.gamma.array()).matrix();
  f.assoc_value = weighted.sum();
  return f;
}

Var two_path_rate(Tape& tape, Var x_soft, Var p, const Mat& gains, double bandwidth,
                  double sigma2, const TwoPathFrozen* frozen) {
  const Mat& xv = tape.value(x_soft);
  const Mat& pv = tape.value(p);
  if (pv.cols() != 1 || pv.rows() != gains.cols())
    throw input_error("two_path_rate: power must be J x 1");
  if (xv.rows() != gains.rows() || xv.cols() != gains.cols())
    throw input_error("two_path_rate: association shape mismatch");
  if (!(sigma2 > 0)) throw input_error("two_path_rate: sigma2 must be > 0");

  const int k = static_cast<int>(gains.rows());
  const int j = static_cast<int>(gains.cols());
  Mat x_hard = frozen ? frozen->x_hard : harden(xv);

  // per-link rates as a function of p, association held fixed
  Mat share_row = bandwidth_share(x_hard, bandwidth);
  Mat share(k, j);
  for (int i = 0; i < k; ++i) share.row(i) = share_row;
  Var recv = cmul(tape.constant(gains), tile_rows(transpose(p), k));
  Var den = add_scalar(sub(tile_cols(rowsum(recv), j), recv), static_cast<real>(sigma2));
  Var snr = cdiv(recv, den);
  Var gamma = cmul(tape.constant(share), scale(log1p(snr), real(1.0 / kLn2)));

  Var power_path = sum(cmul(tape.constant(x_hard), gamma));
  if (frozen) {
    Var assoc = sum(cmul(x_soft, tape.constant(frozen->gamma)));
    Var base = tape.constant_scalar(static_cast<real>(frozen->assoc_value));
    return add(power_path, sub(assoc, base));
  }
  Var assoc = sum(cmul(x_soft, stop_gradient(gamma)));
  return add(power_path, sub(assoc, stop_gradient(assoc)));
}

LossVars grl_loss(Tape& tape, Var x_soft, Var p, const Mat& labels, const Mat& gains,
                  double w_s, double w_r, double bandwidth, double sigma2,
                  const TwoPathFrozen* frozen) {
  if (w_s < 0 || w_r < 0) throw input_error("loss weights must be >= 0");
  LossVars out;
  out.supervised = supervised_loss(tape, x_soft, labels);
  out.rate = two_path_rate(tape, x_soft, p, gains, bandwidth, sigma2, frozen);
  out.total = add(scale(out.supervised, static_cast<real>(w_s)),
                  scale(out.rate, static_cast<real>(-w_r)));
  return out;
}

LossVars srl_loss(Tape& tape, Var x_soft, Var p, Var z, const Mat& mask, const Mat& labels,
                  const Mat& gains, double w_s, double w_r, double w_e, double bandwidth,
                  double sigma2, const TwoPathFrozen* frozen) {
  if (w_e < 0) throw input_error("loss weights must be >= 0");
  LossVars out = grl_loss(tape, x_soft, p, labels, gains, w_s, w_r, bandwidth, sigma2, frozen);
  out.entropy = entropy_loss(tape, z, mask);
  out.total = sub(out.total, scale(out.entropy, static_cast<real>(w_e)));
  return out;
}

}  // namespace hudn
