#pragma once

#include "hudn/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace hudn {

class Tape;

// Handle to a tape node; cheap to copy.
struct Var {
  Tape* tape = nullptr;
  int id = -1;
  bool valid() const { return tape != nullptr && id >= 0; }
};

// Define-by-run reverse-mode tape over dense matrices. Vectors are n x 1,
// scalars 1 x 1. Every op validates shapes and rejects non-finite results.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Mat value, bool needs_grad = false);
  Var constant(Mat value) { return leaf(std::move(value), false); }
  Var constant_scalar(real v);

  const Mat& value(Var v) const;
  const Mat& grad(Var v) const;  // valid after backward
  bool needs_grad(Var v) const;

  // Seeds d(loss)/d(loss) = 1 and accumulates exact vector-Jacobian products
  // into every reachable node that needs gradients. loss must be 1 x 1.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

  // Implementation hooks for op definitions; not part of the modeling API.
  Var emit(Mat value, const std::vector<Var>& parents, const char* op);
  void attach_pull(Var v, std::function<void()> pull);
  Mat& grad_acc(Var v);  // zero-initialized during backward

 private:
  struct Node {
    Mat value;
    Mat grad;
    bool needs_grad = false;
    std::function<void()> pull;  // empty for leaves
  };
  std::vector<Node> nodes_;
};

// ---- primitive ops ----
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var cmul(Var a, Var b);          // elementwise product
Var cdiv(Var a, Var b);          // elementwise quotient
Var matmul(Var a, Var b);
Var transpose(Var a);
Var scale(Var a, real c);
Var add_scalar(Var a, real c);
Var add_rowvec(Var x, Var r);    // r is 1 x m, broadcast over rows
Var concat_cols(Var a, Var b);
Var concat_rows(Var a, Var b);
Var tile_rows(Var x, int times);        // stack x vertically
Var tile_cols(Var x, int times);        // x is n x 1, replicate columns
Var repeat_rows_each(Var x, int times); // each row repeated `times` consecutively
Var reshape_rowmajor(Var x, int rows, int cols);
Var rowsum(Var x);    // n x 1
Var colsum(Var x);    // 1 x m
Var sum(Var x);       // 1 x 1
Var mean_rows(Var x); // 1 x m, mean over rows
Var relu(Var x);
Var sigmoid(Var x);
Var log(Var x);
Var log1p(Var x);
Var clamp_min(Var x, real floor);  // gradient passes only where x > floor
Var l2_normalize_rows(Var x);      // zero rows stay zero
Var stop_gradient(Var x);
// Per-row (x - mean) / sqrt(var + eps); population variance.
Var row_standardize(Var x, real eps);
// Row-wise softmax of z / temperature over entries where mask != 0; masked
// entries are exactly zero in value and gradient.
Var masked_softmax_t(Var z, const Mat& mask, real temperature);
Var softmax_t(Var z, real temperature);

// ---- parameter collection ----
class ParamSet {
 public:
  int add(const std::string& name, Mat value);
  int index_of(const std::string& name) const;  // -1 when absent
  int size() const { return static_cast<int>(values_.size()); }
  const std::string& name(int i) const { return names_[static_cast<std::size_t>(i)]; }
  Mat& value(int i) { return values_[static_cast<std::size_t>(i)]; }
  const Mat& value(int i) const { return values_[static_cast<std::size_t>(i)]; }
  Mat& operator[](const std::string& name);
  const Mat& operator[](const std::string& name) const;

 private:
  std::vector<std::string> names_;
  std::vector<Mat> values_;
  std::unordered_map<std::string, int> index_;
};

std::vector<Mat> zeros_like(const ParamSet& params);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(const ParamSet& shape, AdamConfig config = {});
  void step(ParamSet& params, const std::vector<Mat>& grads, double lr);
  long step_count() const { return t_; }

 private:
  std::vector<Mat> m_, v_;
  long t_ = 0;
  AdamConfig cfg_;
};

// versioned binary checkpoint: named manifest + row-major 64-bit floats
void save_checkpoint(const ParamSet& params, const std::string& path);
ParamSet load_checkpoint(const std::string& path);

}  // namespace hudn
