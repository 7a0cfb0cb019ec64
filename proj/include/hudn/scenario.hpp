#pragma once

#include "hudn/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hudn {

enum class Tier { macro, small };

// Axis-aligned box obstacle. origin is the min-x/min-y corner; the box spans
// [origin.x, origin.x + width] x [origin.y, origin.y + length] x [0, height].
struct Building {
  Eigen::Vector2d origin{0, 0};
  double width = 0;
  double length = 0;
  double height = 0;

  bool contains_xy(double x, double y) const {
    return x >= origin.x() && x <= origin.x() + width && y >= origin.y() &&
           y <= origin.y() + length;
  }
};

struct BsSite {
  int id = 0;
  Tier tier = Tier::small;
  Eigen::Vector3d position{0, 0, 0};
  double p_max = 0;  // W, linear scale
};

struct ScenarioConfig {
  double side_length = 200.0;
  int n_macro = 5;
  int n_small = 100;
  int n_buildings = 20;
  double building_width = 20.0;
  double building_length = 20.0;
  double building_height = 30.0;
  double grid_resolution = 5.0;   // UE candidate pitch; must divide side_length
  double macro_bs_height = 25.0;
  double small_bs_height = 10.0;
  double ue_height = 1.5;
  double macro_power_w = 100.0;   // 50 dBm
  double small_power_w = 0.1;     // 20 dBm
  std::uint64_t seed = 0;

  int grid_per_side() const;      // side_length / grid_resolution
  void validate() const;          // throws config_error
};

struct Scenario {
  ScenarioConfig config;
  std::vector<Building> buildings;
  std::vector<BsSite> sites;                 // macros first, ids 0..J-1
  std::vector<Eigen::Vector3d> grid;         // row-major: x index outer, y inner

  int n_sites() const { return static_cast<int>(sites.size()); }
  int n_grid() const { return static_cast<int>(grid.size()); }
};

// Active-UE set for one adjustment frame; grid indices, ascending.
struct Event {
  std::vector<int> active_ue;
  int k() const { return static_cast<int>(active_ue.size()); }
};

Scenario generate_scenario(const ScenarioConfig& config);

Event sample_event(const Scenario& scenario, int k_active, std::uint64_t seed);

std::string serialize_scenario(const Scenario& s);
Scenario parse_scenario(const std::string& text);
std::uint64_t scenario_digest(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace hudn
