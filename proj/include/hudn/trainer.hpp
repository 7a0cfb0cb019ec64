#pragma once

#include "hudn/baselines.hpp"
#include "hudn/hgsage.hpp"
#include "hudn/objective.hpp"
#include "hudn/radiomap.hpp"
#include "hudn/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hudn {

struct TrainConfig {
  int steps = 1000;             // outer training steps
  int batch = 64;               // events per step
  double lr = 1e-4;
  double lr_decay = 0.99;
  int window = 100;             // rate-memory window
  double temperature = 0.1;
  double w_s = 100;             // supervised weight
  double w_r = 1;               // rate weight
  double w_e = 1e-2;            // entropy weight (fine-tuning only)
  double srl_w_s = 1;           // smaller supervised weight while fine-tuning
  double srl_rel_bound = 1e-3;  // convergence: |r_n - r_prev| < bound * r_prev
  int srl_step_cap = 5000;
  int k_active = 120;
  int hidden = 64;
  double detect_threshold = 1e-11;
  std::uint64_t seed = 0;
  int checkpoint_interval = 0;  // steps between snapshots; 0 disables

  void validate() const;
};

struct SystemParams {
  Vec p_max;         // per site
  double sigma2 = 0;
  double bandwidth = 0;
};

SystemParams system_params(const Scenario& scenario, double sigma2, double bandwidth);

// thermal noise power for a bandwidth and receiver noise figure
double thermal_noise_w(double bandwidth_hz, double noise_figure_db);

// Append-only per-sample rate history; the running mean is over the last
// `window` entries once that many exist, otherwise over all of them.
class RateMemory {
 public:
  void push(double rate) { rates_.push_back(rate); }
  double window_mean(int window) const;
  std::size_t size() const { return rates_.size(); }

 private:
  std::vector<double> rates_;
};

struct TrainLogRow {
  int step = 0;
  double r_n = 0;
  double r_b = 0;
  double eta = 0;
  double l_s = 0;
  double l_total = 0;
};

struct TrainResult {
  ModelParams params;
  std::vector<TrainLogRow> log;
  bool converged = false;
  int steps_run = 0;
};

// Multi-event training: per step, sample a batch of events, accumulate the
// semi-supervised loss, push hard-evaluated rates into memory; update only
// when the windowed rate improves on the best seen, otherwise decay the
// learning rate.
TrainResult grl_train(const RadioMap& map, const Scenario& scenario,
                      const SystemParams& sys, const TrainConfig& config,
                      const std::string& checkpoint_dir = "");

// Single-event fine-tuning with the entropy term; stops when consecutive
// windowed rates differ by less than the relative bound (or at the step cap)
// and returns the parameters that achieved the best hard rate, so the result
// never falls below the starting point.
TrainResult srl_train(const RadioMap& map, const Scenario& scenario,
                      const SystemParams& sys, const Event& event,
                      const ModelParams& start, const TrainConfig& config);

struct EvalReport {
  RateReport rates;
  Allocation alloc;
  double seconds = 0;  // graph build + forward + hardening
};

std::vector<EvalReport> evaluate(const ModelParams& params, const RadioMap& map,
                                 const SystemParams& sys,
                                 const std::vector<Event>& events,
                                 const TrainConfig& config);

void write_train_log_csv(const std::vector<TrainLogRow>& log, const std::string& path);

// labels for one event (log-utility association at max power)
Mat event_labels(const Mat& gains, const SystemParams& sys);

}  // namespace hudn
