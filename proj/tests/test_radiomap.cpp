#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hudn/io_util.hpp"
#include "hudn/radiomap.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace hudn;

namespace {

std::string tmp_path(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "hudn_radiomap_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

Building unit_box(double ox, double oy, double w, double l, double h) {
  Building b;
  b.origin = {ox, oy};
  b.width = w;
  b.length = l;
  b.height = h;
  return b;
}

Scenario tiny_scenario() {
  ScenarioConfig c;
  c.side_length = 100;
  c.n_macro = 1;
  c.n_small = 2;
  c.n_buildings = 2;
  c.building_width = 10;
  c.building_length = 10;
  c.building_height = 20;
  c.grid_resolution = 25;
  c.seed = 3;
  return generate_scenario(c);
}

}  // namespace

TEST_CASE("no buildings means nothing blocks") {
  CHECK_FALSE(los_blocked({0, 0, 0}, {1, 1, 1}, {}));
}

TEST_CASE("a segment through a box center is blocked") {
  std::vector<Building> b{unit_box(10, 10, 10, 10, 30)};
  CHECK(los_blocked({0, 15, 1}, {40, 15, 1}, b));
}

TEST_CASE("a segment grazing along a box face is blocked") {
  std::vector<Building> b{unit_box(0, 0, 10, 10, 10)};
  // runs inside the plane x = 0, crossing the face of the box
  CHECK(los_blocked({0, -5, 5}, {0, 15, 5}, b));
}

TEST_CASE("an endpoint touching the surface alone does not block") {
  std::vector<Building> b{unit_box(0, 0, 10, 10, 10)};
  // transmitter on the roof, receiver outside and above: only t = 0 touches
  CHECK_FALSE(los_blocked({5, 5, 10}, {25, 5, 12}, b));
  // but looking down through the box it is blocked
  CHECK(los_blocked({5, 5, 10}, {5, 5, -1}, b));
}

TEST_CASE("a segment above the box clears it") {
  std::vector<Building> b{unit_box(10, 10, 10, 10, 30)};
  CHECK_FALSE(los_blocked({0, 15, 40}, {40, 15, 35}, b));
}

TEST_CASE("unit-distance path gains match the configured constants") {
  PathLossParams p;
  CHECK(path_gain(1.0, true, p) == doctest::Approx(10.38));
  CHECK(path_gain(1.0, false, p) == doctest::Approx(14.54));
}

TEST_CASE("path gain at 100 m line of sight") {
  PathLossParams p;
  double expect = 10.38 * std::pow(100.0, -2.09);
  CHECK(path_gain(100.0, true, p) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect == doctest::Approx(6.86e-4).epsilon(1e-2));
}

TEST_CASE("nonpositive distances are rejected") {
  PathLossParams p;
  CHECK_THROWS_AS(path_gain(0.0, true, p), input_error);
  CHECK_THROWS_AS(path_gain(-2.0, false, p), input_error);
}

TEST_CASE("parameter validation") {
  PathLossParams p;
  p.theta_nlos = 1.0;  // below the LoS exponent
  CHECK_THROWS_AS(p.validate(), config_error);
  p = PathLossParams{};
  p.d_los = 0;
  CHECK_THROWS_AS(p.validate(), config_error);
}

TEST_CASE("single-entry map equals the direct path gain") {
  Scenario s;
  ScenarioConfig c;
  c.side_length = 100;
  c.n_macro = 1;
  c.n_small = 0;
  c.n_buildings = 0;
  c.grid_resolution = 100;
  s.config = c;
  BsSite site;
  site.id = 0;
  site.tier = Tier::macro;
  site.position = {0, 0, 10};
  site.p_max = 100;
  s.sites = {site};
  s.grid = {{30, 40, 10}};  // distance exactly 50
  PathLossParams p;
  RadioMap map = build_radio_map(s, p);
  REQUIRE(map.gains.rows() == 1);
  REQUIRE(map.gains.cols() == 1);
  CHECK(map.gains(0, 0) == doctest::Approx(path_gain(50.0, true, p)).epsilon(1e-15));
}

TEST_CASE("paper-sized map has the right shape and positive finite gains") {
  ScenarioConfig c;
  c.seed = 1;
  Scenario s = generate_scenario(c);
  RadioMap map = build_radio_map(s, PathLossParams{});
  CHECK(map.n_grid() == 1600);
  CHECK(map.n_sites() == 105);
  CHECK(map.gains.allFinite());
  CHECK((map.gains.array() > 0).all());
}

TEST_CASE("gains decay monotonically along a building-free ray") {
  Scenario s;
  ScenarioConfig c;
  c.side_length = 1000;
  c.n_macro = 1;
  c.n_small = 0;
  c.n_buildings = 0;
  c.grid_resolution = 1000;
  s.config = c;
  BsSite site;
  site.position = {0, 0, 10};
  site.p_max = 1;
  s.sites = {site};
  for (int k = 1; k <= 20; ++k) s.grid.push_back({10.0 * k, 0, 1.5});
  RadioMap map = build_radio_map(s, PathLossParams{});
  for (int k = 1; k < 20; ++k) CHECK(map.gains(k, 0) < map.gains(k - 1, 0));
}

TEST_CASE("distances under a metre are clamped") {
  Scenario s = tiny_scenario();
  s.grid = {s.sites[0].position + Eigen::Vector3d{0.25, 0, 0}};
  RadioMap map = build_radio_map(s, PathLossParams{});
  CHECK(map.gains(0, 0) == doctest::Approx(path_gain(1.0, true, PathLossParams{})));
}

TEST_CASE("a grid point exactly on a site is an error") {
  Scenario s = tiny_scenario();
  s.grid = {s.sites[0].position};
  CHECK_THROWS_AS(build_radio_map(s, PathLossParams{}), input_error);
}

TEST_CASE("parallel construction matches sequential") {
  Scenario s = tiny_scenario();
  RadioMap a = build_radio_map(s, PathLossParams{}, 1);
  RadioMap b = build_radio_map(s, PathLossParams{}, 4);
  CHECK(a.gains == b.gains);
  CHECK(a.scenario_digest == b.scenario_digest);
}

TEST_CASE("save and load round-trip bit-exactly") {
  Scenario s = tiny_scenario();
  RadioMap map = build_radio_map(s, PathLossParams{});
  std::string path = tmp_path("roundtrip.bin");
  save_radio_map(map, path);
  RadioMap back = load_radio_map(path);
  CHECK(back.scenario_digest == map.scenario_digest);
  CHECK(back.gains == map.gains);
  RadioMap checked = load_radio_map(path, scenario_digest(s));
  CHECK(checked.gains == map.gains);
}

TEST_CASE("digest mismatches and truncation are detected") {
  Scenario s = tiny_scenario();
  RadioMap map = build_radio_map(s, PathLossParams{});
  std::string path = tmp_path("digest.bin");
  save_radio_map(map, path);
  CHECK_THROWS_AS(load_radio_map(path, map.scenario_digest + 1), input_error);

  std::string bytes = read_text_file(path);
  write_text_file(tmp_path("short.bin"), bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(load_radio_map(tmp_path("short.bin")), input_error);
  write_text_file(tmp_path("junk.bin"), "definitely not a radio map");
  CHECK_THROWS_AS(load_radio_map(tmp_path("junk.bin")), input_error);
}

TEST_CASE("an empty map still round-trips") {
  RadioMap map;
  map.gains.resize(0, 3);
  map.scenario_digest = 99;
  std::string path = tmp_path("empty.bin");
  save_radio_map(map, path);
  RadioMap back = load_radio_map(path);
  CHECK(back.gains.rows() == 0);
  CHECK(back.gains.cols() == 3);
  CHECK(back.scenario_digest == 99);
}

TEST_CASE("csv export lists every entry") {
  Scenario s = tiny_scenario();
  RadioMap map = build_radio_map(s, PathLossParams{});
  std::string path = tmp_path("map.csv");
  export_radio_map_csv(map, path);
  auto rows = read_csv(path);
  CHECK(rows.size() == 1 + static_cast<std::size_t>(map.gains.size()));
  CHECK(rows[0] == std::vector<std::string>{"grid_index", "site_id", "gain"});
}

TEST_CASE("event gain extraction picks the right rows") {
  Scenario s = tiny_scenario();
  RadioMap map = build_radio_map(s, PathLossParams{});
  Event e;
  e.active_ue = {1, 3};
  Mat g = event_gains(map, e);
  CHECK(g.rows() == 2);
  CHECK(g.row(0) == map.gains.row(1));
  CHECK(g.row(1) == map.gains.row(3));
}
