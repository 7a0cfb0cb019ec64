#pragma once

#include "hudn/scenario.hpp"
#include "hudn/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hudn {

struct PathLossParams {
  double d_los = 10.38;     // gain at unit distance, line of sight (linear)
  double d_nlos = 14.54;
  double theta_los = 2.09;  // path-loss exponents
  double theta_nlos = 3.75;

  void validate() const;
};

// Large-scale channel gains, grid point x site, linear scale.
struct RadioMap {
  Mat gains;
  std::uint64_t scenario_digest = 0;

  int n_grid() const { return static_cast<int>(gains.rows()); }
  int n_sites() const { return static_cast<int>(gains.cols()); }
};

// True iff the open segment tx-rx intersects any building box; touching a
// box surface counts as blocked, an endpoint lying on a surface does not.
bool los_blocked(const Eigen::Vector3d& tx, const Eigen::Vector3d& rx,
                 const std::vector<Building>& buildings);

double path_gain(double distance, bool los, const PathLossParams& params);

// Distances below 1 m are clamped to 1 m; an exactly coincident pair is an error.
RadioMap build_radio_map(const Scenario& scenario, const PathLossParams& params,
                         int workers = 1);

void save_radio_map(const RadioMap& map, const std::string& path);
RadioMap load_radio_map(const std::string& path);
RadioMap load_radio_map(const std::string& path, std::uint64_t expect_digest);
void export_radio_map_csv(const RadioMap& map, const std::string& path);

// K_a x J gain submatrix for the active UEs of an event
Mat event_gains(const RadioMap& map, const Event& event);

}  // namespace hudn
