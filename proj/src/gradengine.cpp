#include "hudn/gradengine.hpp"

#include "hudn/io_util.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace hudn {

Var Tape::leaf(Mat value, bool needs_grad) {
  if (!value.allFinite()) throw numeric_error("leaf: non-finite value");
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::constant_scalar(real v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return constant(std::move(m));
}

const Mat& Tape::value(Var v) const {
  if (v.tape != this || v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
    throw input_error("value: unknown node");
  return nodes_[static_cast<std::size_t>(v.id)].value;
}

const Mat& Tape::grad(Var v) const {
  if (v.tape != this || v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
    throw input_error("grad: unknown node");
  const Node& n = nodes_[static_cast<std::size_t>(v.id)];
  if (n.grad.size() == 0) throw input_error("grad: no gradient (run backward first)");
  return n.grad;
}

bool Tape::needs_grad(Var v) const {
  if (v.tape != this || v.id < 0 || v.id >= static_cast<int>(nodes_.size())) return false;
  return nodes_[static_cast<std::size_t>(v.id)].needs_grad;
}

Var Tape::emit(Mat value, const std::vector<Var>& parents, const char* op) {
  if (!value.allFinite()) throw numeric_error(std::string(op) + ": non-finite result");
  Node n;
  n.value = std::move(value);
  for (Var p : parents) {
    if (p.tape != this) throw input_error(std::string(op) + ": foreign operand");
    if (needs_grad(p)) n.needs_grad = true;
  }
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::attach_pull(Var v, std::function<void()> pull) {
  nodes_[static_cast<std::size_t>(v.id)].pull = std::move(pull);
}

Mat& Tape::grad_acc(Var v) { return nodes_[static_cast<std::size_t>(v.id)].grad; }

void Tape::backward(Var loss) {
  if (loss.tape != this || loss.id < 0 || loss.id >= static_cast<int>(nodes_.size()))
    throw input_error("backward: unknown node");
  const Mat& lv = nodes_[static_cast<std::size_t>(loss.id)].value;
  if (lv.rows() != 1 || lv.cols() != 1) throw input_error("backward: loss must be scalar");
  for (auto& n : nodes_) {
    if (n.needs_grad)
      n.grad = Mat::Zero(n.value.rows(), n.value.cols());
    else
      n.grad.resize(0, 0);
  }
  Node& top = nodes_[static_cast<std::size_t>(loss.id)];
  if (top.grad.size() == 0) top.grad = Mat::Zero(1, 1);
  top.grad(0, 0) = 1;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.needs_grad && n.pull) n.pull();
  }
}

namespace {

Tape& tape_of(Var a, const char* op) {
  if (!a.valid()) throw input_error(std::string(op) + ": invalid operand");
  return *a.tape;
}

void check_pair(Var a, Var b, const char* op) {
  if (!a.valid() || !b.valid() || a.tape != b.tape)
    throw input_error(std::string(op) + ": operands from different tapes");
}

void check_same_shape(const Mat& x, const Mat& y, const char* op) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw input_error(std::string(op) + ": shape mismatch");
}

}  // namespace

Var add(Var a, Var b) {
  check_pair(a, b, "add");
  Tape& t = *a.tape;
  check_same_shape(t.value(a), t.value(b), "add");
  Var out = t.emit(t.value(a) + t.value(b), {a, b}, "add");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, a, b, out] {
      const Mat& g = t.grad(out);
      if (t.needs_grad(a)) t.grad_acc(a) += g;
      if (t.needs_grad(b)) t.grad_acc(b) += g;
    });
  return out;
}

Var sub(Var a, Var b) {
  check_pair(a, b, "sub");
  Tape& t = *a.tape;
  check_same_shape(t.value(a), t.value(b), "sub");
  Var out = t.emit(t.value(a) - t.value(b), {a, b}, "sub");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, a, b, out] {
      const Mat& g = t.grad(out);
      if (t.needs_grad(a)) t.grad_acc(a) += g;
      if (t.needs_grad(b)) t.grad_acc(b) -= g;
    });
  return out;
}

Var cmul(Var a, Var b) {
  check_pair(a, b, "cmul");
  Tape& t = *a.tape;
  check_same_shape(t.value(a), t.value(b), "cmul");
  Var out = t.emit((t.value(a).array() * t.value(b).array()).matrix(), {a, b}, "cmul");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, a, b, out] {
      const Mat& g = t.grad(out);
      if (t.needs_grad(a)) t.grad_acc(a).array() += g.array() * t.value(b).array();
      if (t.needs_grad(b)) t.grad_acc(b).array() += g.array() * t.value(a).array();
    });
  return out;
}

Var cdiv(Var a, Var b) {
  check_pair(a, b, "cdiv");
  Tape& t = *a.tape;
  check_same_shape(t.value(a), t.value(b), "cdiv");
  Var out = t.emit((t.value(a).array() / t.value(b).array()).matrix(), {a, b}, "cdiv");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, a, b, out] {
      const Mat& g = t.grad(out);
      if (t.needs_grad(a)) t.grad_acc(a).array() += g.array() / t.value(b).array();
      if (t.needs_grad(b))
        t.grad_acc(b).array() -=
            g.array() * t.value(out).array() / t.value(b).array();
    });
  return out;
}

Var matmul(Var a, Var b) {
  check_pair(a, b, "matmul");
  Tape& t = *a.tape;
  if (t.value(a).cols() != t.value(b).rows()) throw input_error("matmul: shape mismatch");
  Var out = t.emit(t.value(a) * t.value(b), {a, b}, "matmul");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, a, b, out] {
      const Mat& g = t.grad(out);
      if (t.needs_grad(a)) t.grad_acc(a) += g * t.value(b).transpose();
      if (t.needs_grad(b)) t.grad_acc(b) += t.value(a).transpose() * g;
    });
  return out;
}

Var transpose(Var a) {
  Tape& t = tape_of(a, "transpose");
  Var out = t.emit(t.value(a).transpose(), {a}, "transpose");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, a, out] { t.grad_acc(a) += t.grad(out).transpose(); });
  return out;
}

Var scale(Var a, real c) {
  Tape& t = tape_of(a, "scale");
  Var out = t.emit(t.value(a) * c, {a}, "scale");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, a, c, out] { t.grad_acc(a) += t.grad(out) * c; });
  return out;
}

Var add_scalar(Var a, real c) {
  Tape& t = tape_of(a, "add_scalar");
  Var out = t.emit((t.value(a).array() + c).matrix(), {a}, "add_scalar");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, a, out] { t.grad_acc(a) += t.grad(out); });
  return out;
}

Var add_rowvec(Var x, Var r) {
  check_pair(x, r, "add_rowvec");
  Tape& t = *x.tape;
  const Mat& xv = t.value(x);
  const Mat& rv = t.value(r);
  if (rv.rows() != 1 || rv.cols() != xv.cols())
    throw input_error("add_rowvec: shape mismatch");
  Mat v = xv;
  v.rowwise() += rv.row(0);
  Var out = t.emit(std::move(v), {x, r}, "add_rowvec");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, r, out] {
      const Mat& g = t.grad(out);
      if (t.needs_grad(x)) t.grad_acc(x) += g;
      if (t.needs_grad(r)) t.grad_acc(r) += g.colwise().sum();
    });
  return out;
}

Var concat_cols(Var a, Var b) {
  check_pair(a, b, "concat_cols");
  Tape& t = *a.tape;
  const Mat &av = t.value(a), &bv = t.value(b);
  if (av.rows() != bv.rows()) throw input_error("concat_cols: row mismatch");
  Mat v(av.rows(), av.cols() + bv.cols());
  v << av, bv;
  Var out = t.emit(std::move(v), {a, b}, "concat_cols");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, a, b, out, na = av.cols(), nb = bv.cols()] {
      const Mat& g = t.grad(out);
      if (t.needs_grad(a)) t.grad_acc(a) += g.leftCols(na);
      if (t.needs_grad(b)) t.grad_acc(b) += g.rightCols(nb);
    });
  return out;
}

Var concat_rows(Var a, Var b) {
  check_pair(a, b, "concat_rows");
  Tape& t = *a.tape;
  const Mat &av = t.value(a), &bv = t.value(b);
  if (av.cols() != bv.cols()) throw input_error("concat_rows: column mismatch");
  Mat v(av.rows() + bv.rows(), av.cols());
  v << av, bv;
  Var out = t.emit(std::move(v), {a, b}, "concat_rows");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, a, b, out, na = av.rows(), nb = bv.rows()] {
      const Mat& g = t.grad(out);
      if (t.needs_grad(a)) t.grad_acc(a) += g.topRows(na);
      if (t.needs_grad(b)) t.grad_acc(b) += g.bottomRows(nb);
    });
  return out;
}

Var tile_rows(Var x, int times) {
  Tape& t = tape_of(x, "tile_rows");
  if (times < 1) throw input_error("tile_rows: times must be >= 1");
  const Mat& xv = t.value(x);
  Var out = t.emit(xv.replicate(times, 1), {x}, "tile_rows");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out, times, n = xv.rows(), m = xv.cols()] {
      const Mat& g = t.grad(out);
      Mat& gx = t.grad_acc(x);
      for (int k = 0; k < times; ++k) gx += g.block(k * n, 0, n, m);
    });
  return out;
}

Var tile_cols(Var x, int times) {
  Tape& t = tape_of(x, "tile_cols");
  if (times < 1) throw input_error("tile_cols: times must be >= 1");
  const Mat& xv = t.value(x);
  if (xv.cols() != 1) throw input_error("tile_cols: operand must be a column");
  Var out = t.emit(xv.replicate(1, times), {x}, "tile_cols");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out] { t.grad_acc(x) += t.grad(out).rowwise().sum(); });
  return out;
}

Var repeat_rows_each(Var x, int times) {
  Tape& t = tape_of(x, "repeat_rows_each");
  if (times < 1) throw input_error("repeat_rows_each: times must be >= 1");
  const Mat& xv = t.value(x);
  Mat v(xv.rows() * times, xv.cols());
  for (Eigen::Index i = 0; i < xv.rows(); ++i)
    for (int k = 0; k < times; ++k) v.row(i * times + k) = xv.row(i);
  Var out = t.emit(std::move(v), {x}, "repeat_rows_each");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out, times, n = xv.rows()] {
      const Mat& g = t.grad(out);
      Mat& gx = t.grad_acc(x);
      for (Eigen::Index i = 0; i < n; ++i)
        for (int k = 0; k < times; ++k) gx.row(i) += g.row(i * times + k);
    });
  return out;
}

namespace {

Mat reshape_rm(const Mat& x, Eigen::Index rows, Eigen::Index cols) {
  Mat v(rows, cols);
  Eigen::Index q = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j, ++q) v(q / cols, q % cols) = x(i, j);
  return v;
}

}  // namespace

Var reshape_rowmajor(Var x, int rows, int cols) {
  Tape& t = tape_of(x, "reshape_rowmajor");
  const Mat& xv = t.value(x);
  if (static_cast<Eigen::Index>(rows) * cols != xv.size())
    throw input_error("reshape_rowmajor: element count mismatch");
  Var out = t.emit(reshape_rm(xv, rows, cols), {x}, "reshape_rowmajor");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out, n = xv.rows(), m = xv.cols()] {
      t.grad_acc(x) += reshape_rm(t.grad(out), n, m);
    });
  return out;
}

Var rowsum(Var x) {
  Tape& t = tape_of(x, "rowsum");
  Var out = t.emit(t.value(x).rowwise().sum(), {x}, "rowsum");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out, m = t.value(x).cols()] {
      t.grad_acc(x) += t.grad(out) * Mat::Ones(1, m);
    });
  return out;
}

Var colsum(Var x) {
  Tape& t = tape_of(x, "colsum");
  Var out = t.emit(t.value(x).colwise().sum(), {x}, "colsum");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out, n = t.value(x).rows()] {
      t.grad_acc(x) += Mat::Ones(n, 1) * t.grad(out);
    });
  return out;
}

Var sum(Var x) {
  Tape& t = tape_of(x, "sum");
  Mat v(1, 1);
  v(0, 0) = t.value(x).sum();
  Var out = t.emit(std::move(v), {x}, "sum");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out] { t.grad_acc(x).array() += t.grad(out)(0, 0); });
  return out;
}

Var mean_rows(Var x) {
  Tape& t = tape_of(x, "mean_rows");
  const Mat& xv = t.value(x);
  if (xv.rows() == 0) throw input_error("mean_rows: empty operand");
  Var out = t.emit(xv.colwise().mean(), {x}, "mean_rows");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out, n = xv.rows()] {
      t.grad_acc(x) += Mat::Ones(n, 1) * (t.grad(out) / static_cast<real>(n));
    });
  return out;
}

Var relu(Var x) {
  Tape& t = tape_of(x, "relu");
  Var out = t.emit(t.value(x).cwiseMax(real(0)), {x}, "relu");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out] {
      t.grad_acc(x).array() +=
          t.grad(out).array() * (t.value(x).array() > real(0)).cast<real>();
    });
  return out;
}

Var sigmoid(Var x) {
  Tape& t = tape_of(x, "sigmoid");
  Mat v = t.value(x);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    real z = v.data()[i];
    v.data()[i] = z >= 0 ? real(1) / (real(1) + std::exp(-z))
                         : std::exp(z) / (real(1) + std::exp(z));
  }
  Var out = t.emit(std::move(v), {x}, "sigmoid");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out] {
      const auto s = t.value(out).array();
      t.grad_acc(x).array() += t.grad(out).array() * s * (real(1) - s);
    });
  return out;
}

Var log(Var x) {
  Tape& t = tape_of(x, "log");
  Var out = t.emit(t.value(x).array().log().matrix(), {x}, "log");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out] {
      t.grad_acc(x).array() += t.grad(out).array() / t.value(x).array();
    });
  return out;
}

Var log1p(Var x) {
  Tape& t = tape_of(x, "log1p");
  Var out = t.emit(t.value(x).array().log1p().matrix(), {x}, "log1p");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out] {
      t.grad_acc(x).array() += t.grad(out).array() / (real(1) + t.value(x).array());
    });
  return out;
}

Var clamp_min(Var x, real floor) {
  Tape& t = tape_of(x, "clamp_min");
  Var out = t.emit(t.value(x).cwiseMax(floor), {x}, "clamp_min");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out, floor] {
      t.grad_acc(x).array() +=
          t.grad(out).array() * (t.value(x).array() > floor).cast<real>();
    });
  return out;
}

Var l2_normalize_rows(Var x) {
  Tape& t = tape_of(x, "l2_normalize_rows");
  const Mat& xv = t.value(x);
  Mat v = xv;
  Vec norms(xv.rows());
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    real n = xv.row(i).norm();
    norms(i) = n;
    if (n > 0) v.row(i) /= n;  // zero rows pass through as zero
  }
  Var out = t.emit(std::move(v), {x}, "l2_normalize_rows");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out, norms] {
      const Mat& g = t.grad(out);
      const Mat& y = t.value(out);
      Mat& gx = t.grad_acc(x);
      for (Eigen::Index i = 0; i < y.rows(); ++i) {
        real n = norms(i);
        if (n <= 0) continue;
        real dot = g.row(i).dot(y.row(i));
        gx.row(i) += (g.row(i) - dot * y.row(i)) / n;
      }
    });
  return out;
}

Var stop_gradient(Var x) {
  Tape& t = tape_of(x, "stop_gradient");
  return t.emit(t.value(x), {}, "stop_gradient");
}

Var row_standardize(Var x, real eps) {
  Tape& t = tape_of(x, "row_standardize");
  if (eps <= 0) throw input_error("row_standardize: eps must be > 0");
  const Mat& xv = t.value(x);
  if (xv.cols() == 0) throw input_error("row_standardize: empty rows");
  Mat v(xv.rows(), xv.cols());
  Vec sdev(xv.rows());
  const real m = static_cast<real>(xv.cols());
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    real mu = xv.row(i).mean();
    real var = (xv.row(i).array() - mu).square().sum() / m;
    real s = std::sqrt(var + eps);
    sdev(i) = s;
    v.row(i) = (xv.row(i).array() - mu) / s;
  }
  Var out = t.emit(std::move(v), {x}, "row_standardize");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, x, out, sdev] {
      const Mat& g = t.grad(out);
      const Mat& y = t.value(out);
      Mat& gx = t.grad_acc(x);
      for (Eigen::Index i = 0; i < y.rows(); ++i) {
        real gm = g.row(i).mean();
        real gym = (g.row(i).array() * y.row(i).array()).mean();
        gx.row(i) +=
            ((g.row(i).array() - gm - y.row(i).array() * gym) / sdev(i)).matrix();
      }
    });
  return out;
}

Var masked_softmax_t(Var z, const Mat& mask, real temperature) {
  Tape& t = tape_of(z, "softmax_t");
  if (temperature <= 0) throw input_error("softmax_t: temperature must be > 0");
  const Mat& zv = t.value(z);
  check_same_shape(zv, mask, "softmax_t");
  Mat v = Mat::Zero(zv.rows(), zv.cols());
  for (Eigen::Index i = 0; i < zv.rows(); ++i) {
    real zmax = -std::numeric_limits<real>::infinity();
    for (Eigen::Index j = 0; j < zv.cols(); ++j)
      if (mask(i, j) != 0 && zv(i, j) > zmax) zmax = zv(i, j);
    if (zmax == -std::numeric_limits<real>::infinity())
      throw input_error("softmax_t: row with no unmasked entries");
    real total = 0;
    for (Eigen::Index j = 0; j < zv.cols(); ++j) {
      if (mask(i, j) == 0) continue;
      real e = std::exp((zv(i, j) - zmax) / temperature);
      v(i, j) = e;
      total += e;
    }
    v.row(i) /= total;
  }
  Var out = t.emit(std::move(v), {z}, "softmax_t");
  if (t.needs_grad(out))
    t.attach_pull(out, [&t, z, out, temperature] {
      const Mat& g = t.grad(out);
      const Mat& xv = t.value(out);
      Mat& gz = t.grad_acc(z);
      for (Eigen::Index i = 0; i < xv.rows(); ++i) {
        real inner = g.row(i).dot(xv.row(i));
        gz.row(i).array() +=
            xv.row(i).array() * (g.row(i).array() - inner) / temperature;
      }
    });
  return out;
}

Var softmax_t(Var z, real temperature) {
  Tape& t = tape_of(z, "softmax_t");
  return masked_softmax_t(z, Mat::Ones(t.value(z).rows(), t.value(z).cols()), temperature);
}

// ---- parameters / optimizer / checkpoints ----

int ParamSet::add(const std::string& name, Mat value) {
  if (index_.count(name)) throw input_error("duplicate parameter: " + name);
  int id = static_cast<int>(values_.size());
  names_.push_back(name);
  values_.push_back(std::move(value));
  index_[name] = id;
  return id;
}

int ParamSet::index_of(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

Mat& ParamSet::operator[](const std::string& name) {
  int i = index_of(name);
  if (i < 0) throw input_error("unknown parameter: " + name);
  return values_[static_cast<std::size_t>(i)];
}

const Mat& ParamSet::operator[](const std::string& name) const {
  int i = index_of(name);
  if (i < 0) throw input_error("unknown parameter: " + name);
  return values_[static_cast<std::size_t>(i)];
}

std::vector<Mat> zeros_like(const ParamSet& params) {
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(params.size()));
  for (int i = 0; i < params.size(); ++i)
    out.push_back(Mat::Zero(params.value(i).rows(), params.value(i).cols()));
  return out;
}

Adam::Adam(const ParamSet& shape, AdamConfig config) : cfg_(config) {
  for (int i = 0; i < shape.size(); ++i) {
    m_.push_back(Mat::Zero(shape.value(i).rows(), shape.value(i).cols()));
    v_.push_back(Mat::Zero(shape.value(i).rows(), shape.value(i).cols()));
  }
}

void Adam::step(ParamSet& params, const std::vector<Mat>& grads, double lr) {
  if (lr < 0) throw input_error("adam: negative learning rate");
  if (grads.size() != static_cast<std::size_t>(params.size()))
    throw input_error("adam: gradient count mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i)
    if (!grads[i].allFinite()) throw numeric_error("adam: non-finite gradient");
  ++t_;
  const real b1 = static_cast<real>(cfg_.beta1);
  const real b2 = static_cast<real>(cfg_.beta2);
  const real c1 = real(1) - static_cast<real>(std::pow(cfg_.beta1, t_));
  const real c2 = real(1) - static_cast<real>(std::pow(cfg_.beta2, t_));
  for (int i = 0; i < params.size(); ++i) {
    auto& m = m_[static_cast<std::size_t>(i)];
    auto& v = v_[static_cast<std::size_t>(i)];
    const Mat& g = grads[static_cast<std::size_t>(i)];
    m = b1 * m + (real(1) - b1) * g;
    v = (b2 * v.array() + (real(1) - b2) * g.array().square()).matrix();
    params.value(i).array() -=
        static_cast<real>(lr) * (m.array() / c1) /
        ((v.array() / c2).sqrt() + static_cast<real>(cfg_.eps));
  }
}

namespace {
constexpr char kCkptMagic[8] = {'H', 'U', 'D', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCkptVersion = 1;
}  // namespace

void save_checkpoint(const ParamSet& params, const std::string& path) {
  std::string out;
  out.append(kCkptMagic, sizeof(kCkptMagic));
  put_u32(out, kCkptVersion);
  put_u64(out, static_cast<std::uint64_t>(params.size()));
  for (int i = 0; i < params.size(); ++i) {
    const std::string& name = params.name(i);
    const Mat& m = params.value(i);
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_u64(out, static_cast<std::uint64_t>(m.rows()));
    put_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, static_cast<double>(m(r, c)));
  }
  write_text_file(path, out);
}

ParamSet load_checkpoint(const std::string& path) {
  std::string bytes = read_text_file(path);
  if (bytes.size() < sizeof(kCkptMagic) ||
      std::string_view(bytes).substr(0, 8) != std::string_view(kCkptMagic, 8))
    throw input_error("not a checkpoint file: " + path);
  std::size_t pos = sizeof(kCkptMagic);
  if (take_u32(bytes, pos) != kCkptVersion)
    throw input_error("unsupported checkpoint version");
  std::uint64_t count = take_u64(bytes, pos);
  ParamSet params;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t len = take_u32(bytes, pos);
    if (pos + len > bytes.size()) throw input_error("truncated checkpoint");
    std::string name = bytes.substr(pos, len);
    pos += len;
    std::uint64_t rows = take_u64(bytes, pos);
    std::uint64_t cols = take_u64(bytes, pos);
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::uint64_t r = 0; r < rows; ++r)
      for (std::uint64_t c = 0; c < cols; ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            static_cast<real>(take_f64(bytes, pos));
    params.add(name, std::move(m));
  }
  if (pos != bytes.size()) throw input_error("trailing bytes in checkpoint");
  return params;
}

}  // namespace hudn
