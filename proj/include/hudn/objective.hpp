#pragma once

#include "hudn/gradengine.hpp"
#include "hudn/types.hpp"

#include <string>

namespace hudn {

struct Allocation {
  Mat x;           // K x J association matrix
  Vec p;           // J transmit powers, W
  bool hard = true;
};

struct RateReport {
  Vec ue_rates;          // bit/s, per event UE
  double total = 0;      // bit/s
  VecI loads;            // users per BS
  double sigma2 = 0;
  double bandwidth = 0;

  double total_per_hz() const { return bandwidth > 0 ? total / bandwidth : 0; }
};

// single-association rows (exactly one 1 for hard x, sum 1 for soft) and
// 0 < p <= p_max; throws input_error
void check_allocation(const Allocation& alloc, const Vec& p_max);

Mat sinr_matrix(const Mat& gains, const Vec& p, double sigma2);
double sinr(const Mat& gains, const Vec& p, double sigma2, int ue, int bs);

// (B / K_j) * log2(1 + SINR_ij) for the serving BS j of UE i
double effective_rate(int ue, int bs, const Mat& x_hard, const Vec& p, const Mat& gains,
                      double bandwidth, double sigma2);

RateReport rate_report(const Mat& x_hard, const Vec& p, const Mat& gains, double bandwidth,
                       double sigma2);

// Soft allocations are hardened for the load terms.
double sum_rate(const Allocation& alloc, const Mat& gains, double bandwidth, double sigma2,
                const Vec& p_max = Vec());

void write_rate_report_csv(const RateReport& report, const std::vector<int>& ue_ids,
                           const std::string& path);

// ---- differentiable losses ----

// -sum_ij y_ij ln x_ij with x clamped at 1e-12
Var supervised_loss(Tape& tape, Var x_soft, const Mat& labels);

// -sum e ln e with e the temperature-1 masked softmax of z
Var entropy_loss(Tape& tape, Var z, const Mat& mask);

// Captured constants that pin the straight-through surrogate at a base point,
// making central finite differences of the loss a valid gradient oracle.
struct TwoPathFrozen {
  Mat x_hard;
  Mat gamma;           // effective rates at the base point
  double assoc_value;  // sum(x_soft0 * gamma)
};

TwoPathFrozen freeze_two_path(const Mat& x_soft_value, const Vec& p_value, const Mat& gains,
                              double bandwidth, double sigma2);

// Forward value equals sum_rate on the hardened association. The power path
// differentiates through the rates with the association held fixed; the
// association path differentiates x_soft against detached per-link rates.
Var two_path_rate(Tape& tape, Var x_soft, Var p, const Mat& gains, double bandwidth,
                  double sigma2, const TwoPathFrozen* frozen = nullptr);

struct LossVars {
  Var total;
  Var supervised;
  Var rate;     // two-path rate term
  Var entropy;  // invalid unless the entropy weight is used
};

LossVars grl_loss(Tape& tape, Var x_soft, Var p, const Mat& labels, const Mat& gains,
                  double w_s, double w_r, double bandwidth, double sigma2,
                  const TwoPathFrozen* frozen = nullptr);

LossVars srl_loss(Tape& tape, Var x_soft, Var p, Var z, const Mat& mask, const Mat& labels,
                  const Mat& gains, double w_s, double w_r, double w_e, double bandwidth,
                  double sigma2, const TwoPathFrozen* frozen = nullptr);

}  // namespace hudn
