#include "hudn/experiment.hpp"

#include "hudn/io_util.hpp"

namespace hudn {

double ExperimentConfig::sigma2() const {
  return sigma2_w > 0 ? sigma2_w : thermal_noise_w(bandwidth, noise_figure_db);
}

void ExperimentConfig::validate() const {
  scenario.validate();
  pathloss.validate();
  train.validate();
  baseline.validate();
  if (!(bandwidth > 0)) throw config_error("bandwidth must be > 0");
  if (sigma2_w < 0) throw config_error("sigma2_w must be >= 0");
  if (workers < 1) throw config_error("workers must be >= 1");
  if (output_dir.empty()) throw config_error("output_dir must be set");
}

namespace {

double opt_real(const KvFile& f, const std::string& sec, const std::string& key, double dflt) {
  return f.has(sec, key) ? f.get_real(sec, key) : dflt;
}

int opt_int(const KvFile& f, const std::string& sec, const std::string& key, int dflt) {
  return f.has(sec, key) ? static_cast<int>(f.get_int(sec, key)) : dflt;
}

std::uint64_t opt_u64(const KvFile& f, const std::string& sec, const std::string& key,
                      std::uint64_t dflt) {
  return f.has(sec, key) ? f.get_u64(sec, key) : dflt;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  KvFile f = KvFile::parse(text);
  ExperimentConfig c;

  c.output_dir = f.get_or("experiment", "output_dir", c.output_dir);
  c.root_seed = opt_u64(f, "experiment", "root_seed", c.root_seed);
  c.workers = opt_int(f, "experiment", "workers", c.workers);

  auto& s = c.scenario;
  s.side_length = opt_real(f, "scenario", "side_length", s.side_length);
  s.n_macro = opt_int(f, "scenario", "n_macro", s.n_macro);
  s.n_small = opt_int(f, "scenario", "n_small", s.n_small);
  s.n_buildings = opt_int(f, "scenario", "n_buildings", s.n_buildings);
  s.building_width = opt_real(f, "scenario", "building_width", s.building_width);
  s.building_length = opt_real(f, "scenario", "building_length", s.building_length);
  s.building_height = opt_real(f, "scenario", "building_height", s.building_height);
  s.grid_resolution = opt_real(f, "scenario", "grid_resolution", s.grid_resolution);
  s.macro_bs_height = opt_real(f, "scenario", "macro_bs_height", s.macro_bs_height);
  s.small_bs_height = opt_real(f, "scenario", "small_bs_height", s.small_bs_height);
  s.ue_height = opt_real(f, "scenario", "ue_height", s.ue_height);
  s.macro_power_w = opt_real(f, "scenario", "macro_power_w", s.macro_power_w);
  s.small_power_w = opt_real(f, "scenario", "small_power_w", s.small_power_w);
  s.seed = opt_u64(f, "scenario", "seed", c.root_seed);

  auto& pl = c.pathloss;
  pl.d_los = opt_real(f, "pathloss", "d_los", pl.d_los);
  pl.d_nlos = opt_real(f, "pathloss", "d_nlos", pl.d_nlos);
  pl.theta_los = opt_real(f, "pathloss", "theta_los", pl.theta_los);
  pl.theta_nlos = opt_real(f, "pathloss", "theta_nlos", pl.theta_nlos);

  c.bandwidth = opt_real(f, "radio", "bandwidth_hz", c.bandwidth);
  c.noise_figure_db = opt_real(f, "radio", "noise_figure_db", c.noise_figure_db);
  c.sigma2_w = opt_real(f, "radio", "sigma2_w", c.sigma2_w);

  auto& t = c.train;
  t.steps = opt_int(f, "train", "steps", t.steps);
  t.batch = opt_int(f, "train", "batch", t.batch);
  t.lr = opt_real(f, "train", "lr", t.lr);
  t.lr_decay = opt_real(f, "train", "lr_decay", t.lr_decay);
  t.window = opt_int(f, "train", "window", t.window);
  t.temperature = opt_real(f, "train", "temperature", t.temperature);
  t.w_s = opt_real(f, "train", "w_s", t.w_s);
  t.w_r = opt_real(f, "train", "w_r", t.w_r);
  t.w_e = opt_real(f, "train", "w_e", t.w_e);
  t.srl_w_s = opt_real(f, "train", "srl_w_s", t.srl_w_s);
  t.srl_rel_bound = opt_real(f, "train", "srl_rel_bound", t.srl_rel_bound);
  t.srl_step_cap = opt_int(f, "train", "srl_step_cap", t.srl_step_cap);
  t.k_active = opt_int(f, "train", "k_active", t.k_active);
  t.hidden = opt_int(f, "train", "hidden", t.hidden);
  t.detect_threshold = opt_real(f, "train", "detect_threshold", t.detect_threshold);
  t.checkpoint_interval = opt_int(f, "train", "checkpoint_interval", t.checkpoint_interval);
  t.seed = opt_u64(f, "train", "seed", c.root_seed);

  auto& b = c.baseline;
  b.max_outer_iters = opt_int(f, "baseline", "max_outer_iters", b.max_outer_iters);
  b.power_grid_levels = opt_int(f, "baseline", "power_grid_levels", b.power_grid_levels);
  b.convergence_eps = opt_real(f, "baseline", "convergence_eps", b.convergence_eps);
  b.power_cycles_cap = opt_int(f, "baseline", "power_cycles_cap", b.power_cycles_cap);
  b.golden_iters = opt_int(f, "baseline", "golden_iters", b.golden_iters);
  b.enumeration_budget = opt_real(f, "baseline", "enumeration_budget", b.enumeration_budget);

  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  try {
    return parse_experiment_config(read_text_file(path));
  } catch (const input_error& e) {
    throw config_error(std::string("config: ") + e.what());
  }
}

std::string serialize_experiment_config(const ExperimentConfig& c) {
  KvFile f;
  f.add_section("experiment");
  f.set("experiment", "output_dir", c.output_dir);
  f.set("experiment", "root_seed", format_u64(c.root_seed));
  f.set("experiment", "workers", format_int(c.workers));

  const auto& s = c.scenario;
  f.add_section("scenario");
  f.set("scenario", "side_length", format_real(s.side_length));
  f.set("scenario", "n_macro", format_int(s.n_macro));
  f.set("scenario", "n_small", format_int(s.n_small));
  f.set("scenario", "n_buildings", format_int(s.n_buildings));
  f.set("scenario", "building_width", format_real(s.building_width));
  f.set("scenario", "building_length", format_real(s.building_length));
  f.set("scenario", "building_height", format_real(s.building_height));
  f.set("scenario", "grid_resolution", format_real(s.grid_resolution));
  f.set("scenario", "macro_bs_height", format_real(s.macro_bs_height));
  f.set("scenario", "small_bs_height", format_real(s.small_bs_height));
  f.set("scenario", "ue_height", format_real(s.ue_height));
  f.set("scenario", "macro_power_w", format_real(s.macro_power_w));
  f.set("scenario", "small_power_w", format_real(s.small_power_w));
  f.set("scenario", "seed", format_u64(s.seed));

  const auto& pl = c.pathloss;
  f.add_section("pathloss");
  f.set("pathloss", "d_los", format_real(pl.d_los));
  f.set("pathloss", "d_nlos", format_real(pl.d_nlos));
  f.set("pathloss", "theta_los", format_real(pl.theta_los));
  f.set("pathloss", "theta_nlos", format_real(pl.theta_nlos));

  f.add_section("radio");
  f.set("radio", "bandwidth_hz", format_real(c.bandwidth));
  f.set("radio", "noise_figure_db", format_real(c.noise_figure_db));
  f.set("radio", "sigma2_w", format_real(c.sigma2_w));

  const auto& t = c.train;
  f.add_section("train");
  f.set("train", "steps", format_int(t.steps));
  f.set("train", "batch", format_int(t.batch));
  f.set("train", "lr", format_real(t.lr));
  f.set("train", "lr_decay", format_real(t.lr_decay));
  f.set("train", "window", format_int(t.window));
  f.set("train", "temperature", format_real(t.temperature));
  f.set("train", "w_s", format_real(t.w_s));
  f.set("train", "w_r", format_real(t.w_r));
  f.set("train", "w_e", format_real(t.w_e));
  f.set("train", "srl_w_s", format_real(t.srl_w_s));
  f.set("train", "srl_rel_bound", format_real(t.srl_rel_bound));
  f.set("train", "srl_step_cap", format_int(t.srl_step_cap));
  f.set("train", "k_active", format_int(t.k_active));
  f.set("train", "hidden", format_int(t.hidden));
  f.set("train", "detect_threshold", format_real(t.detect_threshold));
  f.set("train", "checkpoint_interval", format_int(t.checkpoint_interval));
  f.set("train", "seed", format_u64(t.seed));

  const auto& b = c.baseline;
  f.add_section("baseline");
  f.set("baseline", "max_outer_iters", format_int(b.max_outer_iters));
  f.set("baseline", "power_grid_levels", format_int(b.power_grid_levels));
  f.set("baseline", "convergence_eps", format_real(b.convergence_eps));
  f.set("baseline", "power_cycles_cap", format_int(b.power_cycles_cap));
  f.set("baseline", "golden_iters", format_int(b.golden_iters));
  f.set("baseline", "enumeration_budget", format_real(b.enumeration_budget));
  return f.serialize();
}

}  // namespace hudn
