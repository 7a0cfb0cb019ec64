#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hudn/scenario.hpp"

#include <algorithm>
#include <set>

using namespace hudn;

namespace {

ScenarioConfig paper_config() {
  ScenarioConfig c;
  c.side_length = 200;
  c.n_macro = 5;
  c.n_small = 100;
  c.n_buildings = 20;
  c.grid_resolution = 5;
  c.seed = 42;
  return c;
}

}  // namespace

TEST_CASE("paper-sized scenario has 105 sites and 20 buildings") {
  Scenario s = generate_scenario(paper_config());
  CHECK(s.n_sites() == 105);
  CHECK(s.buildings.size() == 20);
  CHECK(s.n_grid() == 40 * 40);
  for (int j = 0; j < 5; ++j) CHECK(s.sites[static_cast<std::size_t>(j)].tier == Tier::macro);
  for (int j = 5; j < 105; ++j) CHECK(s.sites[static_cast<std::size_t>(j)].tier == Tier::small);
  for (int j = 0; j < 105; ++j) CHECK(s.sites[static_cast<std::size_t>(j)].id == j);
}

TEST_CASE("generation is deterministic in config and seed") {
  Scenario a = generate_scenario(paper_config());
  Scenario b = generate_scenario(paper_config());
  CHECK(serialize_scenario(a) == serialize_scenario(b));

  ScenarioConfig other = paper_config();
  other.seed = 43;
  CHECK(serialize_scenario(a) != serialize_scenario(generate_scenario(other)));
}

TEST_CASE("geometry stays inside the cell") {
  Scenario s = generate_scenario(paper_config());
  double L = s.config.side_length;
  for (const auto& site : s.sites) {
    CHECK(site.position.x() >= 0);
    CHECK(site.position.x() <= L);
    CHECK(site.position.y() >= 0);
    CHECK(site.position.y() <= L);
  }
  for (const auto& b : s.buildings) {
    CHECK(b.origin.x() >= 0);
    CHECK(b.origin.x() + b.width <= L);
    CHECK(b.origin.y() >= 0);
    CHECK(b.origin.y() + b.length <= L);
  }
  for (const auto& g : s.grid) {
    CHECK(g.x() > 0);
    CHECK(g.x() < L);
    CHECK(g.y() > 0);
    CHECK(g.y() < L);
  }
}

TEST_CASE("macro lattice is reflection-symmetric for square counts") {
  ScenarioConfig c = paper_config();
  c.n_macro = 4;
  Scenario s = generate_scenario(c);
  double L = c.side_length;
  std::set<std::pair<double, double>> pos;
  for (int j = 0; j < 4; ++j)
    pos.insert({s.sites[static_cast<std::size_t>(j)].position.x(),
                s.sites[static_cast<std::size_t>(j)].position.y()});
  for (auto [x, y] : pos) {
    CHECK(pos.count({L - x, y}) == 1);
    CHECK(pos.count({x, L - y}) == 1);
  }
}

TEST_CASE("five macros sit at the center plus quarter-diagonal points") {
  Scenario s = generate_scenario(paper_config());
  auto at = [&](double x, double y) {
    for (int j = 0; j < 5; ++j)
      if (s.sites[static_cast<std::size_t>(j)].position.x() == doctest::Approx(x) &&
          s.sites[static_cast<std::size_t>(j)].position.y() == doctest::Approx(y))
        return true;
    return false;
  };
  CHECK(at(100, 100));
  CHECK(at(50, 50));
  CHECK(at(50, 150));
  CHECK(at(150, 50));
  CHECK(at(150, 150));
}

TEST_CASE("grid ordering is row-major by x then y") {
  ScenarioConfig c = paper_config();
  c.grid_resolution = 100;  // 2 x 2 grid
  Scenario s = generate_scenario(c);
  REQUIRE(s.n_grid() == 4);
  CHECK(s.grid[0].x() == doctest::Approx(50));
  CHECK(s.grid[0].y() == doctest::Approx(50));
  CHECK(s.grid[1].x() == doctest::Approx(50));
  CHECK(s.grid[1].y() == doctest::Approx(150));
  CHECK(s.grid[2].x() == doctest::Approx(150));
  CHECK(s.grid[2].y() == doctest::Approx(50));
  CHECK(s.grid[3].x() == doctest::Approx(150));
  CHECK(s.grid[3].y() == doctest::Approx(150));
}

TEST_CASE("sites on building footprints move to the roof") {
  ScenarioConfig c = paper_config();
  c.n_buildings = 1;
  c.building_width = 200;
  c.building_length = 200;  // covers everything
  Scenario s = generate_scenario(c);
  for (const auto& site : s.sites)
    CHECK(site.position.z() == doctest::Approx(c.building_height));
}

TEST_CASE("macro power exceeds small power and both are positive") {
  Scenario s = generate_scenario(paper_config());
  CHECK(s.sites[0].p_max == doctest::Approx(100.0));
  CHECK(s.sites[10].p_max == doctest::Approx(0.1));
}

TEST_CASE("invalid configs are rejected") {
  ScenarioConfig c = paper_config();
  c.side_length = -1;
  CHECK_THROWS_AS(generate_scenario(c), config_error);

  c = paper_config();
  c.grid_resolution = 3;  // does not divide 200
  CHECK_THROWS_AS(generate_scenario(c), config_error);

  c = paper_config();
  c.n_macro = 0;
  CHECK_THROWS_AS(generate_scenario(c), config_error);

  c = paper_config();
  c.macro_power_w = 0.05;  // below small power
  CHECK_THROWS_AS(generate_scenario(c), config_error);
}

TEST_CASE("events sample distinct sorted indices") {
  Scenario s = generate_scenario(paper_config());
  Event e = sample_event(s, 120, 7);
  CHECK(e.k() == 120);
  CHECK(std::is_sorted(e.active_ue.begin(), e.active_ue.end()));
  std::set<int> uniq(e.active_ue.begin(), e.active_ue.end());
  CHECK(uniq.size() == 120);
  for (int idx : e.active_ue) {
    CHECK(idx >= 0);
    CHECK(idx < s.n_grid());
  }
}

TEST_CASE("exhaustive event covers the whole grid") {
  ScenarioConfig c = paper_config();
  c.grid_resolution = 50;  // 16 points
  Scenario s = generate_scenario(c);
  Event e = sample_event(s, 16, 0);
  REQUIRE(e.k() == 16);
  for (int i = 0; i < 16; ++i) CHECK(e.active_ue[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("event sampling is seed-deterministic") {
  Scenario s = generate_scenario(paper_config());
  Event a = sample_event(s, 120, 5);
  Event b = sample_event(s, 120, 5);
  Event c = sample_event(s, 120, 6);
  CHECK(a.active_ue == b.active_ue);
  CHECK(a.active_ue != c.active_ue);
}

TEST_CASE("oversized events are rejected") {
  Scenario s = generate_scenario(paper_config());
  CHECK_THROWS_AS(sample_event(s, s.n_grid() + 1, 0), input_error);
}

TEST_CASE("serialization round-trips byte-identically") {
  Scenario s = generate_scenario(paper_config());
  std::string text = serialize_scenario(s);
  Scenario back = parse_scenario(text);
  CHECK(serialize_scenario(back) == text);
  CHECK(back.n_grid() == s.n_grid());
  CHECK(scenario_digest(back) == scenario_digest(s));
}
