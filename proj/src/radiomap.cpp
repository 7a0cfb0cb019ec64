#include "hudn/radiomap.hpp"

#include "hudn/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace hudn {

void PathLossParams::validate() const {
  if (d_los <= 0 || d_nlos <= 0) throw config_error("unit-distance gains must be > 0");
  if (theta_los <= 0 || theta_nlos <= 0) throw config_error("path-loss exponents must be > 0");
  if (theta_nlos <= theta_los)
    throw config_error("NLoS exponent must exceed LoS exponent");
}

bool los_blocked(const Eigen::Vector3d& tx, const Eigen::Vector3d& rx,
                 const std::vector<Building>& buildings) {
  const Eigen::Vector3d d = rx - tx;
  for (const auto& b : buildings) {
    const double lo[3] = {b.origin.x(), b.origin.y(), 0.0};
    const double hi[3] = {b.origin.x() + b.width, b.origin.y() + b.length, b.height};
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    bool miss = false;
    for (int a = 0; a < 3 && !miss; ++a) {
      if (d[a] == 0.0) {
        if (tx[a] < lo[a] || tx[a] > hi[a]) miss = true;
      } else {
        double t1 = (lo[a] - tx[a]) / d[a];
        double t2 = (hi[a] - tx[a]) / d[a];
        if (t1 > t2) std::swap(t1, t2);
        tmin = std::max(tmin, t1);
        tmax = std::min(tmax, t2);
        if (tmin > tmax) miss = true;
      }
    }
    // closed box against the open segment (0, 1)
    if (!miss && tmax > 0.0 && tmin < 1.0) return true;
  }
  return false;
}

double path_gain(double distance, bool los, const PathLossParams& params) {
  if (distance <= 0) throw input_error("path_gain: distance must be > 0");
  return los ? params.d_los * std::pow(distance, -params.theta_los)
             : params.d_nlos * std::pow(distance, -params.theta_nlos);
}

RadioMap build_radio_map(const Scenario& scenario, const PathLossParams& params,
                         int workers) {
  params.validate();
  const int rows = scenario.n_grid();
  const int cols = scenario.n_sites();
  RadioMap map;
  map.gains.resize(rows, cols);
  map.scenario_digest = scenario_digest(scenario);

  auto fill_rows = [&](int r0, int r1) {
    for (int i = r0; i < r1; ++i) {
      const Eigen::Vector3d& ue = scenario.grid[static_cast<std::size_t>(i)];
      for (int j = 0; j < cols; ++j) {
        const Eigen::Vector3d& bs = scenario.sites[static_cast<std::size_t>(j)].position;
        double w = (ue - bs).norm();
        if (w == 0.0) throw input_error("grid point coincides with a site");
        bool los = !los_blocked(bs, ue, scenario.buildings);
        map.gains(i, j) = static_cast<real>(path_gain(std::max(w, 1.0), los, params));
      }
    }
  };

  if (workers <= 1 || rows < 2) {
    fill_rows(0, rows);
  } else {
    int n = std::min(workers, rows);
    std::vector<std::thread> pool;
    int chunk = (rows + n - 1) / n;
    std::exception_ptr err;
    std::mutex err_mutex;
    for (int t = 0; t < n; ++t) {
      int r0 = t * chunk;
      int r1 = std::min(rows, r0 + chunk);
      pool.emplace_back([&, r0, r1] {
        try {
          fill_rows(r0, r1);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
  return map;
}

namespace {
constexpr char kMagic[8] = {'H', 'U', 'D', 'N', 'R', 'M', 'A', 'P'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_radio_map(const RadioMap& map, const std::string& path) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  put_u64(out, map.scenario_digest);
  put_u64(out, static_cast<std::uint64_t>(map.gains.rows()));
  put_u64(out, static_cast<std::uint64_t>(map.gains.cols()));
  for (Eigen::Index i = 0; i < map.gains.rows(); ++i)
    for (Eigen::Index j = 0; j < map.gains.cols(); ++j)
      put_f64(out, static_cast<double>(map.gains(i, j)));
  write_text_file(path, out);
}

RadioMap load_radio_map(const std::string& path) {
  std::string bytes = read_text_file(path);
  if (bytes.size() < sizeof(kMagic) || std::string_view(bytes).substr(0, 8) !=
                                           std::string_view(kMagic, sizeof(kMagic)))
    throw input_error("not a radio-map file: " + path);
  std::size_t pos = sizeof(kMagic);
  std::uint32_t version = take_u32(bytes, pos);
  if (version != kVersion) throw input_error("unsupported radio-map version");
  RadioMap map;
  map.scenario_digest = take_u64(bytes, pos);
  std::uint64_t rows = take_u64(bytes, pos);
  std::uint64_t cols = take_u64(bytes, pos);
  if (rows > (1ULL << 32) || cols > (1ULL << 32)) throw input_error("corrupt shape header");
  std::size_t need = pos + static_cast<std::size_t>(rows * cols) * 8;
  if (bytes.size() != need) throw input_error("truncated radio-map file");
  map.gains.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::uint64_t i = 0; i < rows; ++i)
    for (std::uint64_t j = 0; j < cols; ++j)
      map.gains(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<real>(take_f64(bytes, pos));
  return map;
}

RadioMap load_radio_map(const std::string& path, std::uint64_t expect_digest) {
  RadioMap map = load_radio_map(path);
  if (map.scenario_digest != expect_digest)
    throw input_error("radio map digest mismatch: " + path);
  return map;
}

void export_radio_map_csv(const RadioMap& map, const std::string& path) {
  std::string out = "grid_index,site_id,gain\n";
  for (Eigen::Index i = 0; i < map.gains.rows(); ++i)
    for (Eigen::Index j = 0; j < map.gains.cols(); ++j)
      out += format_int(i) + "," + format_int(j) + "," +
             format_real(static_cast<double>(map.gains(i, j))) + "\n";
  write_text_file(path, out);
}

Mat event_gains(const RadioMap& map, const Event& event) {
  Mat g(event.k(), map.n_sites());
  for (int i = 0; i < event.k(); ++i) {
    int idx = event.active_ue[static_cast<std::size_t>(i)];
    if (idx < 0 || idx >= map.n_grid()) throw input_error("event index out of range");
    g.row(i) = map.gains.row(idx);
  }
  return g;
}

}  // namespace hudn
