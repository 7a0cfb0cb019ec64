#pragma once

#include "hudn/baselines.hpp"
#include "hudn/radiomap.hpp"
#include "hudn/scenario.hpp"
#include "hudn/trainer.hpp"

#include <cstdint>
#include <string>

namespace hudn {

struct ExperimentConfig {
  ScenarioConfig scenario;
  PathLossParams pathloss;
  TrainConfig train;
  BaselineConfig baseline;
  double bandwidth = 20e6;
  double noise_figure_db = 9.0;
  double sigma2_w = 0;  // 0 means thermal noise for (bandwidth, noise figure)
  std::string output_dir = "out";
  std::uint64_t root_seed = 0;
  int workers = 1;

  double sigma2() const;
  void validate() const;
};

// Sections: [experiment] [scenario] [pathloss] [radio] [train] [baseline].
// Every key is optional and falls back to the built-in default.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string serialize_experiment_config(const ExperimentConfig& config);

}  // namespace hudn
