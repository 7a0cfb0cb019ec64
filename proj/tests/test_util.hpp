#pragma once

#include "hudn/gradengine.hpp"
#include "hudn/rng.hpp"
#include "hudn/types.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace hudn::testutil {

inline Mat random_mat(Rng& rng, int rows, int cols, double lo = -1.0, double hi = 1.0) {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = static_cast<real>(rng.uniform(lo, hi));
  return m;
}

// Central-difference gradient oracle. `build` must construct the same scalar
// loss from the given leaf values on a fresh tape every call; returns the max
// relative error over all leaf coordinates (or a probe subset).
struct FdCheck {
  double step = 1e-6;
  double rel_floor = 1e-8;  // denominators below this count as agreement
  int max_probes_per_leaf = 0;  // 0 probes every coordinate
  std::uint64_t probe_seed = 7;
};

using BuildFn = std::function<Var(Tape&, std::vector<Var>&)>;

inline double max_fd_error(std::vector<Mat> leaf_values, const BuildFn& build,
                           const FdCheck& opt = {}) {
  Tape base;
  std::vector<Var> leaves;
  for (const Mat& v : leaf_values) leaves.push_back(base.leaf(v, true));
  Var loss = build(base, leaves);
  base.backward(loss);
  std::vector<Mat> analytic;
  for (Var l : leaves) analytic.push_back(base.grad(l));
  double loss0 = static_cast<double>(base.value(loss)(0, 0));

  auto eval_at = [&](const std::vector<Mat>& vals) {
    Tape t;
    std::vector<Var> ls;
    for (const Mat& v : vals) ls.push_back(t.leaf(v, false));
    Var out = build(t, ls);
    return static_cast<double>(t.value(out)(0, 0));
  };

  Rng probe_rng(opt.probe_seed);
  double worst = 0;
  for (std::size_t l = 0; l < leaf_values.size(); ++l) {
    const Eigen::Index n = leaf_values[l].size();
    std::vector<Eigen::Index> coords;
    if (opt.max_probes_per_leaf <= 0 || n <= opt.max_probes_per_leaf) {
      for (Eigen::Index c = 0; c < n; ++c) coords.push_back(c);
    } else {
      for (int k = 0; k < opt.max_probes_per_leaf; ++k)
        coords.push_back(static_cast<Eigen::Index>(
            probe_rng.below(static_cast<std::uint64_t>(n))));
    }
    for (Eigen::Index c : coords) {
      std::vector<Mat> plus = leaf_values, minus = leaf_values;
      plus[l].data()[c] += static_cast<real>(opt.step);
      minus[l].data()[c] -= static_cast<real>(opt.step);
      double fd = (eval_at(plus) - eval_at(minus)) / (2 * opt.step);
      double an = static_cast<double>(analytic[l].data()[c]);
      double denom = std::max(std::abs(fd), std::abs(an));
      double floor = opt.rel_floor * (1.0 + std::abs(loss0));
      if (denom < floor) continue;
      worst = std::max(worst, std::abs(fd - an) / denom);
    }
  }
  return worst;
}

}  // namespace hudn::testutil
