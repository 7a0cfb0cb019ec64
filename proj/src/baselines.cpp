#include "hudn/baselines.hpp"

#include <cmath>
#include <limits>

namespace hudn {

void BaselineConfig::validate() const {
  if (max_outer_iters < 1 || power_cycles_cap < 1 || golden_iters < 1)
    throw config_error("iteration caps must be >= 1");
  if (power_grid_levels < 1) throw config_error("power_grid_levels must be >= 1");
  if (convergence_eps < 0) throw config_error("convergence_eps must be >= 0");
  if (enumeration_budget < 1) throw config_error("enumeration_budget must be >= 1");
}

namespace {

constexpr double kUtilityGuard = 1e-30;

Mat assoc_to_matrix(const std::vector<int>& assoc, int j) {
  Mat x = Mat::Zero(static_cast<Eigen::Index>(assoc.size()), j);
  for (std::size_t i = 0; i < assoc.size(); ++i) x(static_cast<Eigen::Index>(i), assoc[i]) = 1;
  return x;
}

std::vector<int> max_sinr_assoc(const Mat& gains, const Vec& p, double sigma2) {
  Mat s = sinr_matrix(gains, p, sigma2);
  std::vector<int> assoc(static_cast<std::size_t>(gains.rows()));
  for (Eigen::Index i = 0; i < gains.rows(); ++i) {
    Eigen::Index best = 0;
    s.row(i).maxCoeff(&best);  // first maximum: ties to lowest index
    assoc[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return assoc;
}

double sweep_objective(const std::vector<int>& assoc, const Mat& gains, const Vec& p,
                       double sigma2, double bandwidth, bool log_util) {
  Mat x = assoc_to_matrix(assoc, static_cast<int>(gains.cols()));
  RateReport r = rate_report(x, p, gains, bandwidth, sigma2);
  if (!log_util) return r.total;
  double u = 0;
  for (Eigen::Index i = 0; i < r.ue_rates.size(); ++i)
    u += std::log(static_cast<double>(r.ue_rates(i)) + kUtilityGuard);
  return u;
}

// single-UE reassignment sweeps, ascending UE order, strict improvement only
BaselineResult association_sweep(const Mat& gains, const Vec& p, double sigma2,
                                 double bandwidth, bool log_util,
                                 const BaselineConfig& config, const Mat* initial_x) {
  config.validate();
  const int k = static_cast<int>(gains.rows());
  const int j = static_cast<int>(gains.cols());
  std::vector<int> assoc;
  if (initial_x) {
    if (initial_x->rows() != k || initial_x->cols() != j)
      throw input_error("association_sweep: bad initial association");
    assoc.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      Eigen::Index serving = 0;
      initial_x->row(i).maxCoeff(&serving);
      assoc[static_cast<std::size_t>(i)] = static_cast<int>(serving);
    }
  } else {
    assoc = max_sinr_assoc(gains, p, sigma2);
  }

  BaselineResult out;
  double best = sweep_objective(assoc, gains, p, sigma2, bandwidth, log_util);
  out.objective_trace.push_back(best);
  bool cap = true;
  for (int sweep = 0; sweep < config.max_outer_iters; ++sweep) {
    bool changed = false;
    for (int i = 0; i < k; ++i) {
      int cur = assoc[static_cast<std::size_t>(i)];
      int pick = cur;
      double pick_obj = best;
      for (int cand = 0; cand < j; ++cand) {
        if (cand == cur) continue;
        assoc[static_cast<std::size_t>(i)] = cand;
        double obj = sweep_objective(assoc, gains, p, sigma2, bandwidth, log_util);
        if (obj > pick_obj) {
          pick_obj = obj;
          pick = cand;
        }
      }
      assoc[static_cast<std::size_t>(i)] = pick;
      if (pick != cur) {
        best = pick_obj;
        out.objective_trace.push_back(best);
        changed = true;
      }
    }
    if (!changed) {
      cap = false;
      break;
    }
  }
  out.cap_reached = cap;
  out.alloc.x = assoc_to_matrix(assoc, j);
  out.alloc.p = p;
  out.alloc.hard = true;
  return out;
}

double power_objective(const Mat& x_hard, const Vec& p, const Mat& gains, double bandwidth,
                       double sigma2, PowerObjective objective) {
  if (objective == PowerObjective::sum_rate)
    return rate_report(x_hard, p, gains, bandwidth, sigma2).total;
  return log_utility(x_hard, p, gains, bandwidth, sigma2);
}

}  // namespace

double log_utility(const Mat& x_hard, const Vec& p, const Mat& gains, double bandwidth,
                   double sigma2) {
  RateReport r = rate_report(x_hard, p, gains, bandwidth, sigma2);
  double u = 0;
  for (Eigen::Index i = 0; i < r.ue_rates.size(); ++i)
    u += std::log(static_cast<double>(r.ue_rates(i)) + kUtilityGuard);
  return u;
}

BaselineResult marap(const Mat& gains, const Vec& p_max, double sigma2, double bandwidth) {
  if (gains.rows() == 0 || gains.cols() == 0) throw input_error("marap: empty gains");
  (void)bandwidth;
  BaselineResult out;
  out.alloc.x = assoc_to_matrix(max_sinr_assoc(gains, p_max, sigma2),
                                static_cast<int>(gains.cols()));
  out.alloc.p = p_max;
  out.alloc.hard = true;
  return out;
}

BaselineResult msua(const Mat& gains, const Vec& p, double sigma2, double bandwidth,
                    const BaselineConfig& config, const Mat* initial_x) {
  return association_sweep(gains, p, sigma2, bandwidth, true, config, initial_x);
}

Vec power_coordinate_ascent(const Mat& x_hard, const Mat& gains, const Vec& p_init,
                            const Vec& p_max, double sigma2, double bandwidth,
                            PowerObjective objective, const BaselineConfig& config,
                            bool* cap_reached, std::vector<double>* trace) {
  config.validate();
  const int j = static_cast<int>(gains.cols());
  if (p_init.size() != j || p_max.size() != j)
    throw input_error("power_coordinate_ascent: size mismatch");
  Vec lo = power_floor(p_max);
  Vec p = p_init;
  for (int b = 0; b < j; ++b)
    if (p(b) < lo(b) || p(b) > p_max(b))
      throw input_error("power_coordinate_ascent: start outside feasible box");

  double best = power_objective(x_hard, p, gains, bandwidth, sigma2, objective);
  if (trace) trace->push_back(best);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  bool cap = true;
  for (int cycle = 0; cycle < config.power_cycles_cap; ++cycle) {
    double cycle_start = best;
    for (int b = 0; b < j; ++b) {
      // golden-section probes plus both endpoints; keep the best point seen,
      // never accept a non-improving move
      double a = lo(b), c = p_max(b);
      double cand_p = p(b);
      double cand_v = best;
      auto consider = [&](double q) {
        Vec trial = p;
        trial(b) = q;
        double v = power_objective(x_hard, trial, gains, bandwidth, sigma2, objective);
        if (v > cand_v) {
          cand_v = v;
          cand_p = q;
        }
      };
      consider(a);
      consider(c);
      double x1 = c - gr * (c - a);
      double x2 = a + gr * (c - a);
      Vec trial = p;
      trial(b) = x1;
      double f1 = power_objective(x_hard, trial, gains, bandwidth, sigma2, objective);
      trial(b) = x2;
      double f2 = power_objective(x_hard, trial, gains, bandwidth, sigma2, objective);
      if (f1 > cand_v) { cand_v = f1; cand_p = x1; }
      if (f2 > cand_v) { cand_v = f2; cand_p = x2; }
      for (int it = 0; it < config.golden_iters; ++it) {
        if (f1 >= f2) {
          c = x2;
          x2 = x1;
          f2 = f1;
          x1 = c - gr * (c - a);
          trial = p;
          trial(b) = x1;
          f1 = power_objective(x_hard, trial, gains, bandwidth, sigma2, objective);
          if (f1 > cand_v) { cand_v = f1; cand_p = x1; }
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (c - a);
          trial = p;
          trial(b) = x2;
          f2 = power_objective(x_hard, trial, gains, bandwidth, sigma2, objective);
          if (f2 > cand_v) { cand_v = f2; cand_p = x2; }
        }
      }
      if (cand_v > best) {
        best = cand_v;
        p(b) = cand_p;
        if (trace) trace->push_back(best);
      }
    }
    double denom = std::max(std::abs(cycle_start), 1e-300);
    if ((best - cycle_start) / denom < config.convergence_eps) {
      cap = false;
      break;
    }
  }
  if (cap_reached) *cap_reached = cap;
  return p;
}

namespace {

BaselineResult alternate_assoc_power(const Mat& gains, const Vec& p_max, double sigma2,
                                     double bandwidth, bool log_util,
                                     const BaselineConfig& config) {
  config.validate();
  PowerObjective pobj = log_util ? PowerObjective::log_utility : PowerObjective::sum_rate;
  Vec p = p_max;
  BaselineResult assoc = association_sweep(gains, p, sigma2, bandwidth, log_util, config,
                                           nullptr);
  BaselineResult out;
  out.cap_reached = assoc.cap_reached;
  Mat x = assoc.alloc.x;
  double best = power_objective(x, p, gains, bandwidth, sigma2, pobj);
  out.objective_trace.push_back(best);
  bool cap = true;
  for (int round = 0; round < config.max_outer_iters; ++round) {
    bool stage_cap = false;
    p = power_coordinate_ascent(x, gains, p, p_max, sigma2, bandwidth, pobj, config,
                                &stage_cap);
    out.cap_reached = out.cap_reached || stage_cap;
    BaselineResult again =
        association_sweep(gains, p, sigma2, bandwidth, log_util, config, &x);
    out.cap_reached = out.cap_reached || again.cap_reached;
    x = again.alloc.x;
    double now = power_objective(x, p, gains, bandwidth, sigma2, pobj);
    out.objective_trace.push_back(now);
    double denom = std::max(std::abs(best), 1e-300);
    if ((now - best) / denom < config.convergence_eps) {
      best = std::max(best, now);
      cap = false;
      break;
    }
    best = now;
  }
  out.cap_reached = out.cap_reached || cap;
  out.alloc.x = x;
  out.alloc.p = p;
  out.alloc.hard = true;
  return out;
}

}  // namespace

BaselineResult msuapc(const Mat& gains, const Vec& p_max, double sigma2, double bandwidth,
                      const BaselineConfig& config) {
  return alternate_assoc_power(gains, p_max, sigma2, bandwidth, true, config);
}

BaselineResult uamwser(const Mat& gains, const Vec& p_max, double sigma2, double bandwidth,
                       const BaselineConfig& config) {
  return association_sweep(gains, p_max, sigma2, bandwidth, false, config, nullptr);
}

BaselineResult juapcmwser(const Mat& gains, const Vec& p_max, double sigma2,
                          double bandwidth, const BaselineConfig& config) {
  return alternate_assoc_power(gains, p_max, sigma2, bandwidth, false, config);
}

Mat gen_labels(const Mat& gains, const Vec& p_max, double sigma2, double bandwidth,
               const BaselineConfig& config) {
  return msua(gains, p_max, sigma2, bandwidth, config).alloc.x;
}

OracleResult brute_force_oracle(const Mat& gains, const Vec& p_max, double sigma2,
                                double bandwidth, int levels, double budget) {
  const int k = static_cast<int>(gains.rows());
  const int j = static_cast<int>(gains.cols());
  if (k == 0 || j == 0) throw input_error("oracle: empty instance");
  if (levels < 1) throw input_error("oracle: levels must be >= 1");
  double combos = std::pow(static_cast<double>(j), k) * std::pow(static_cast<double>(levels), j);
  if (combos > budget) throw input_error("oracle: enumeration budget exceeded");

  // log-spaced levels from the power floor up to p_max, p_max always included
  std::vector<Vec> grid(static_cast<std::size_t>(levels));
  for (int l = 0; l < levels; ++l) {
    double expo = levels == 1 ? 0.0 : -6.0 * (levels - 1 - l) / (levels - 1);
    grid[static_cast<std::size_t>(l)] = (p_max.array() * std::pow(10.0, expo)).matrix();
  }

  OracleResult best;
  best.best_rate = -std::numeric_limits<double>::infinity();
  std::vector<int> plevel(static_cast<std::size_t>(j), 0);
  std::vector<int> assoc(static_cast<std::size_t>(k), 0);
  Vec p(j);
  for (;;) {
    for (int b = 0; b < j; ++b) p(b) = grid[static_cast<std::size_t>(plevel[static_cast<std::size_t>(b)])](b);
    Mat s = sinr_matrix(gains, p, sigma2);
    Mat cap_bits = (s.array().log1p() * (1.0 / 0.69314718055994530942)).matrix();
    std::fill(assoc.begin(), assoc.end(), 0);
    for (;;) {
      VecI loads = VecI::Zero(j);
      for (int i = 0; i < k; ++i) loads(assoc[static_cast<std::size_t>(i)]) += 1;
      double r = 0;
      for (int i = 0; i < k; ++i) {
        int b = assoc[static_cast<std::size_t>(i)];
        r += bandwidth / loads(b) * static_cast<double>(cap_bits(i, b));
      }
      ++best.evaluations;
      if (r > best.best_rate) {
        best.best_rate = r;
        best.alloc.x = assoc_to_matrix(assoc, j);
        best.alloc.p = p;
        best.alloc.hard = true;
      }
      int d = 0;
      while (d < k && ++assoc[static_cast<std::size_t>(d)] == j) {
        assoc[static_cast<std::size_t>(d)] = 0;
        ++d;
      }
      if (d == k) break;
    }
    int d = 0;
    while (d < j && ++plevel[static_cast<std::size_t>(d)] == levels) {
      plevel[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == j) break;
  }
  return best;
}

}  // namespace hudn
