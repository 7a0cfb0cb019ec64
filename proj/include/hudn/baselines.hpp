#pragma once

#include "hudn/objective.hpp"
#include "hudn/types.hpp"

#include <cstdint>
#include <vector>

namespace hudn {

struct BaselineConfig {
  int max_outer_iters = 50;       // association sweeps / alternation rounds
  int power_grid_levels = 5;      // oracle power grid
  double convergence_eps = 1e-9;  // relative improvement cutoff
  int power_cycles_cap = 200;
  int golden_iters = 80;
  double enumeration_budget = 1e7;

  void validate() const;
};

struct BaselineResult {
  Allocation alloc;
  bool cap_reached = false;
  std::vector<double> objective_trace;  // value after each accepted stage
};

// p_floor used everywhere a power may go low
inline Vec power_floor(const Vec& p_max) { return 1e-6 * p_max; }

// max-SINR association at maximum power
BaselineResult marap(const Mat& gains, const Vec& p_max, double sigma2, double bandwidth);

// log-utility association at fixed powers: greedy max-SINR start, then
// single-UE reassignment sweeps in ascending UE order accepting strictly
// improving moves
BaselineResult msua(const Mat& gains, const Vec& p, double sigma2, double bandwidth,
                    const BaselineConfig& config = {},
                    const Mat* initial_x = nullptr);

enum class PowerObjective { sum_rate, log_utility };

// cyclic per-BS golden-section search on [p_floor, p_max]
Vec power_coordinate_ascent(const Mat& x_hard, const Mat& gains, const Vec& p_init,
                            const Vec& p_max, double sigma2, double bandwidth,
                            PowerObjective objective, const BaselineConfig& config = {},
                            bool* cap_reached = nullptr,
                            std::vector<double>* trace = nullptr);

BaselineResult msuapc(const Mat& gains, const Vec& p_max, double sigma2, double bandwidth,
                      const BaselineConfig& config = {});
BaselineResult uamwser(const Mat& gains, const Vec& p_max, double sigma2, double bandwidth,
                       const BaselineConfig& config = {});
BaselineResult juapcmwser(const Mat& gains, const Vec& p_max, double sigma2,
                          double bandwidth, const BaselineConfig& config = {});

// supervised labels: log-utility association at max power
Mat gen_labels(const Mat& gains, const Vec& p_max, double sigma2, double bandwidth,
               const BaselineConfig& config = {});

struct OracleResult {
  Allocation alloc;
  double best_rate = 0;
  std::int64_t evaluations = 0;
};

// exhaustive max over one-hot associations x log-spaced power grids
OracleResult brute_force_oracle(const Mat& gains, const Vec& p_max, double sigma2,
                                double bandwidth, int levels, double budget = 1e7);

double log_utility(const Mat& x_hard, const Vec& p, const Mat& gains, double bandwidth,
                   double sigma2);

}  // namespace hudn
