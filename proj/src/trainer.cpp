#include "hudn/trainer.hpp"

#include "hudn/io_util.hpp"
#include "hudn/rng.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

namespace hudn {

void TrainConfig::validate() const {
  if (steps < 0) throw config_error("steps must be >= 0");
  if (batch < 1) throw config_error("batch must be >= 1");
  if (lr < 0) throw config_error("learning rate must be >= 0");
  if (lr_decay <= 0 || lr_decay > 1) throw config_error("lr_decay must be in (0, 1]");
  if (window < 1) throw config_error("window must be >= 1");
  if (temperature <= 0) throw config_error("temperature must be > 0");
  if (w_s < 0 || w_r < 0 || w_e < 0 || srl_w_s < 0)
    throw config_error("loss weights must be >= 0");
  if (srl_rel_bound <= 0) throw config_error("srl_rel_bound must be > 0");
  if (srl_step_cap < 1) throw config_error("srl_step_cap must be >= 1");
  if (k_active < 1) throw config_error("k_active must be >= 1");
  if (hidden < 1) throw config_error("hidden must be >= 1");
  if (checkpoint_interval < 0) throw config_error("checkpoint_interval must be >= 0");
}

SystemParams system_params(const Scenario& scenario, double sigma2, double bandwidth) {
  if (!(sigma2 > 0)) throw config_error("sigma2 must be > 0");
  if (!(bandwidth > 0)) throw config_error("bandwidth must be > 0");
  SystemParams sys;
  sys.sigma2 = sigma2;
  sys.bandwidth = bandwidth;
  sys.p_max.resize(scenario.n_sites());
  for (int j = 0; j < scenario.n_sites(); ++j)
    sys.p_max(j) = static_cast<real>(scenario.sites[static_cast<std::size_t>(j)].p_max);
  return sys;
}

double thermal_noise_w(double bandwidth_hz, double noise_figure_db) {
  if (!(bandwidth_hz > 0)) throw config_error("bandwidth must be > 0");
  return std::pow(
      10.0, (-174.0 + noise_figure_db + 10.0 * std::log10(bandwidth_hz) - 30.0) / 10.0);
}

double RateMemory::window_mean(int window) const {
  if (window < 1) throw input_error("window must be >= 1");
  if (rates_.empty()) return 0;
  std::size_t n = std::min<std::size_t>(rates_.size(), static_cast<std::size_t>(window));
  double acc = 0;
  for (std::size_t i = rates_.size() - n; i < rates_.size(); ++i) acc += rates_[i];
  return acc / static_cast<double>(n);
}

Mat event_labels(const Mat& gains, const SystemParams& sys) {
  return gen_labels(gains, sys.p_max, sys.sigma2, sys.bandwidth);
}

namespace {

// Rates inside training (memory, logs, loss) are per unit bandwidth so the
// loss weights keep their intended balance for any configured bandwidth.
constexpr double kUnitBandwidth = 1.0;

struct EventContext {
  Mat gains;
  HeteroGraph graph;
  Mat labels;
};

EventContext prepare_event(const RadioMap& map, const Event& event, const SystemParams& sys,
                           const TrainConfig& config) {
  EventContext item;
  item.gains = event_gains(map, event);
  GraphBuildOptions opts;
  opts.detect_threshold = config.detect_threshold;
  item.graph = build_graph(map, event, opts);
  item.labels = event_labels(item.gains, sys);
  return item;
}

double hard_rate_per_hz(const Mat& x_soft, const Vec& p, const Mat& gains,
                        const SystemParams& sys) {
  Allocation alloc{harden(x_soft), p, true};
  return sum_rate(alloc, gains, kUnitBandwidth, sys.sigma2, sys.p_max);
}

void write_checkpoint_if(const std::string& dir, const std::string& stem,
                         const ModelParams& params) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  save_model(params, (std::filesystem::path(dir) / (stem + ".ckpt")).string());
}

}  // namespace

TrainResult grl_train(const RadioMap& map, const Scenario& scenario,
                      const SystemParams& sys, const TrainConfig& config,
                      const std::string& checkpoint_dir) {
  config.validate();
  if (config.k_active > map.n_grid())
    throw config_error("k_active exceeds the candidate grid");

  ModelDims dims{map.n_sites(), config.k_active, config.hidden};
  ModelParams params = init_params(dims, derive_seed(config.seed, "grl-init"));
  Adam adam(params.set);
  RateMemory memory;

  TrainResult result;
  result.log.reserve(static_cast<std::size_t>(config.steps));
  double eta = config.lr;
  double r_b = 0;

  for (int step = 1; step <= config.steps; ++step) {
    std::vector<Mat> grads = zeros_like(params.set);
    double batch_loss = 0;
    double batch_ls = 0;
    for (int b = 0; b < config.batch; ++b) {
      Event event = sample_event(
          scenario, config.k_active,
          derive_seed(config.seed, "grl-event", static_cast<std::uint64_t>(step),
                      static_cast<std::uint64_t>(b)));
      EventContext item = prepare_event(map, event, sys, config);

      Tape tape;
      ForwardVars fwd =
          model_forward(tape, item.graph, params, sys.p_max, config.temperature);
      LossVars loss = grl_loss(tape, fwd.x_soft, fwd.p, item.labels, item.gains, config.w_s,
                               config.w_r, kUnitBandwidth, sys.sigma2);
      double lv = static_cast<double>(tape.value(loss.total)(0, 0));
      if (!std::isfinite(lv)) {
        write_checkpoint_if(checkpoint_dir, "diagnostic", params);
        throw numeric_error("grl_train: non-finite loss");
      }
      batch_loss += lv;
      batch_ls += static_cast<double>(tape.value(loss.supervised)(0, 0));
      tape.backward(loss.total);
      for (int i = 0; i < params.set.size(); ++i)
        grads[static_cast<std::size_t>(i)] +=
            tape.grad(fwd.param_leaves[static_cast<std::size_t>(i)]);

      memory.push(hard_rate_per_hz(tape.value(fwd.x_soft), tape.value(fwd.p), item.gains, sys));
    }

    double r_n = memory.window_mean(config.window);
    if (r_n > r_b) {
      for (auto& g : grads) g /= static_cast<real>(config.batch);
      adam.step(params.set, grads, eta);
      r_b = r_n;
    } else {
      eta *= config.lr_decay;
    }

    result.log.push_back(TrainLogRow{step, r_n, r_b, eta, batch_ls / config.batch,
                                     batch_loss / config.batch});
    if (config.checkpoint_interval > 0 && step % config.checkpoint_interval == 0)
      write_checkpoint_if(checkpoint_dir, "grl_step" + std::to_string(step), params);
  }
  result.params = std::move(params);
  result.steps_run = config.steps;
  result.converged = true;
  return result;
}

TrainResult srl_train(const RadioMap& map, const Scenario& scenario,
                      const SystemParams& sys, const Event& event,
                      const ModelParams& start, const TrainConfig& config) {
  config.validate();
  (void)scenario;
  if (event.k() != start.dims.k_active)
    throw input_error("srl_train: event size does not match model dims");
  if (map.n_sites() != start.dims.n_sites)
    throw input_error("srl_train: radio map does not match model dims");

  EventContext item = prepare_event(map, event, sys, config);

  ModelParams params = start;
  Adam adam(params.set);
  RateMemory memory;

  // best-snapshot contract: never return parameters worse than the start
  double best_rate;
  {
    Tape tape;
    ForwardVars fwd =
        model_forward(tape, item.graph, params, sys.p_max, config.temperature, false);
    best_rate = hard_rate_per_hz(tape.value(fwd.x_soft), tape.value(fwd.p), item.gains, sys);
  }
  ModelParams best = params;

  TrainResult result;
  double r_prev = std::numeric_limits<double>::quiet_NaN();
  for (int step = 1; step <= config.srl_step_cap; ++step) {
    Tape tape;
    ForwardVars fwd =
        model_forward(tape, item.graph, params, sys.p_max, config.temperature);
    LossVars loss =
        srl_loss(tape, fwd.x_soft, fwd.p, fwd.z, fwd.mask, item.labels, item.gains,
                 config.srl_w_s, config.w_r, config.w_e, kUnitBandwidth, sys.sigma2);
    double lv = static_cast<double>(tape.value(loss.total)(0, 0));
    if (!std::isfinite(lv)) throw numeric_error("srl_train: non-finite loss");
    tape.backward(loss.total);
    std::vector<Mat> grads;
    grads.reserve(static_cast<std::size_t>(params.set.size()));
    for (int i = 0; i < params.set.size(); ++i)
      grads.push_back(tape.grad(fwd.param_leaves[static_cast<std::size_t>(i)]));
    adam.step(params.set, grads, config.lr);

    double rate;
    {
      Tape eval;
      ForwardVars out =
          model_forward(eval, item.graph, params, sys.p_max, config.temperature, false);
      rate = hard_rate_per_hz(eval.value(out.x_soft), eval.value(out.p), item.gains, sys);
    }
    memory.push(rate);
    if (rate > best_rate) {
      best_rate = rate;
      best = params;
    }

    double r_n = memory.window_mean(config.window);
    result.log.push_back(
        TrainLogRow{step, r_n, std::isnan(r_prev) ? 0.0 : r_prev, config.lr,
                    static_cast<double>(tape.value(loss.supervised)(0, 0)), lv});
    result.steps_run = step;
    if (memory.size() >= static_cast<std::size_t>(config.window) && !std::isnan(r_prev)) {
      double bound = config.srl_rel_bound * std::max(std::abs(r_prev), 1e-300);
      if (std::abs(r_n - r_prev) < bound) {
        result.converged = true;
        break;
      }
    }
    if (memory.size() >= static_cast<std::size_t>(config.window)) r_prev = r_n;
  }
  result.params = std::move(best);
  return result;
}

std::vector<EvalReport> evaluate(const ModelParams& params, const RadioMap& map,
                                 const SystemParams& sys, const std::vector<Event>& events,
                                 const TrainConfig& config) {
  std::vector<EvalReport> reports;
  reports.reserve(events.size());
  for (const Event& event : events) {
    auto t0 = std::chrono::steady_clock::now();
    GraphBuildOptions opts;
    opts.detect_threshold = config.detect_threshold;
    HeteroGraph graph = build_graph(map, event, opts);
    Tape tape;
    ForwardVars fwd =
        model_forward(tape, graph, params, sys.p_max, config.temperature, false);
    Allocation alloc{harden(tape.value(fwd.x_soft)), tape.value(fwd.p), true};
    auto t1 = std::chrono::steady_clock::now();

    EvalReport rep;
    rep.seconds = std::chrono::duration<double>(t1 - t0).count();
    rep.alloc = alloc;
    Mat gains = event_gains(map, event);
    check_allocation(alloc, sys.p_max);
    rep.rates = rate_report(alloc.x, alloc.p, gains, sys.bandwidth, sys.sigma2);
    reports.push_back(std::move(rep));
  }
  return reports;
}

void write_train_log_csv(const std::vector<TrainLogRow>& log, const std::string& path) {
  std::string out = "step,r_n,r_b,eta,L_s,L_total\n";
  for (const auto& row : log)
    out += format_int(row.step) + "," + format_real(row.r_n) + "," + format_real(row.r_b) +
           "," + format_real(row.eta) + "," + format_real(row.l_s) + "," +
           format_real(row.l_total) + "\n";
  write_text_file(path, out);
}

}  // namespace hudn
