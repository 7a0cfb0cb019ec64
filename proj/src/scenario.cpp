#include "hudn/scenario.hpp"

#include "hudn/io_util.hpp"
#include "hudn/rng.hpp"

#include <cmath>
#include <utility>

namespace hudn {

int ScenarioConfig::grid_per_side() const {
  double ratio = side_length / grid_resolution;
  int n = static_cast<int>(std::llround(ratio));
  if (n <= 0 || std::abs(ratio - n) > 1e-9)
    throw config_error("grid_resolution must divide side_length");
  return n;
}

void ScenarioConfig::validate() const {
  if (side_length <= 0) throw config_error("side_length must be > 0");
  if (n_macro < 1) throw config_error("n_macro must be >= 1");
  if (n_small < 0) throw config_error("n_small must be >= 0");
  if (n_buildings < 0) throw config_error("n_buildings must be >= 0");
  if (n_buildings > 0 &&
      (building_width <= 0 || building_length <= 0 || building_height <= 0))
    throw config_error("building dimensions must be > 0");
  if (building_width > side_length || building_length > side_length)
    throw config_error("buildings must fit inside the cell");
  if (grid_resolution <= 0) throw config_error("grid_resolution must be > 0");
  (void)grid_per_side();
  if (macro_bs_height <= 0 || small_bs_height <= 0 || ue_height <= 0)
    throw config_error("heights must be > 0");
  if (macro_power_w <= 0 || small_power_w <= 0) throw config_error("powers must be > 0");
  if (macro_power_w <= small_power_w)
    throw config_error("macro power must exceed small-cell power");
}

namespace {

// Deterministic even macro layout:
//   g*g      -> centered g x g lattice, row-major
//   g*g + 1  -> cell center first, then the g x g lattice (g >= 2)
//   otherwise evenly spaced points on the main diagonal
std::vector<Eigen::Vector2d> macro_layout(int m, double side) {
  std::vector<Eigen::Vector2d> pts;
  auto lattice = [&](int g) {
    for (int ix = 0; ix < g; ++ix)
      for (int iy = 0; iy < g; ++iy)
        pts.emplace_back((ix + 0.5) * side / g, (iy + 0.5) * side / g);
  };
  int g = static_cast<int>(std::llround(std::sqrt(static_cast<double>(m))));
  if (g * g == m) {
    lattice(g);
    return pts;
  }
  int g1 = static_cast<int>(std::llround(std::sqrt(static_cast<double>(m - 1))));
  if (m >= 5 && g1 * g1 == m - 1) {
    pts.emplace_back(side / 2, side / 2);
    lattice(g1);
    return pts;
  }
  for (int k = 0; k < m; ++k) {
    double t = (k + 1) * side / (m + 1);
    pts.emplace_back(t, t);
  }
  return pts;
}

double roof_height_at(const std::vector<Building>& buildings, double x, double y,
                      double fallback) {
  double z = fallback;
  for (const auto& b : buildings)
    if (b.contains_xy(x, y) && b.height > z) z = b.height;
  return z;
}

const char* tier_name(Tier t) { return t == Tier::macro ? "macro" : "small"; }

Tier tier_from(const std::string& s) {
  if (s == "macro") return Tier::macro;
  if (s == "small") return Tier::small;
  throw input_error("unknown tier: " + s);
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config) {
  config.validate();
  Scenario s;
  s.config = config;
  const double L = config.side_length;

  Rng rng(derive_seed(config.seed, "scenario"));

  // one RNG stream, fixed draw order: buildings, then small sites
  s.buildings.reserve(static_cast<std::size_t>(config.n_buildings));
  for (int i = 0; i < config.n_buildings; ++i) {
    Building b;
    b.width = config.building_width;
    b.length = config.building_length;
    b.height = config.building_height;
    b.origin.x() = rng.uniform(0.0, L - b.width);
    b.origin.y() = rng.uniform(0.0, L - b.length);
    s.buildings.push_back(b);
  }

  auto macros = macro_layout(config.n_macro, L);
  for (int i = 0; i < config.n_macro; ++i) {
    BsSite site;
    site.id = i;
    site.tier = Tier::macro;
    double x = macros[static_cast<std::size_t>(i)].x();
    double y = macros[static_cast<std::size_t>(i)].y();
    site.position = {x, y, roof_height_at(s.buildings, x, y, config.macro_bs_height)};
    site.p_max = config.macro_power_w;
    s.sites.push_back(site);
  }
  for (int i = 0; i < config.n_small; ++i) {
    BsSite site;
    site.id = config.n_macro + i;
    site.tier = Tier::small;
    double x = rng.uniform(0.0, L);
    double y = rng.uniform(0.0, L);
    site.position = {x, y, roof_height_at(s.buildings, x, y, config.small_bs_height)};
    site.p_max = config.small_power_w;
    s.sites.push_back(site);
  }

  int n = config.grid_per_side();
  double res = config.grid_resolution;
  s.grid.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      s.grid.emplace_back((ix + 0.5) * res, (iy + 0.5) * res, config.ue_height);

  return s;
}

Event sample_event(const Scenario& scenario, int k_active, std::uint64_t seed) {
  if (k_active <= 0) throw input_error("k_active must be > 0");
  if (k_active > scenario.n_grid())
    throw input_error("k_active exceeds the number of grid points");
  Rng rng(derive_seed(seed, "event"));
  Event e;
  e.active_ue = sample_without_replacement(rng, scenario.n_grid(), k_active);
  return e;
}

std::string serialize_scenario(const Scenario& s) {
  KvFile f;
  auto& c = s.config;
  f.add_section("config");
  f.set("config", "side_length", format_real(c.side_length));
  f.set("config", "n_macro", format_int(c.n_macro));
  f.set("config", "n_small", format_int(c.n_small));
  f.set("config", "n_buildings", format_int(c.n_buildings));
  f.set("config", "building_width", format_real(c.building_width));
  f.set("config", "building_length", format_real(c.building_length));
  f.set("config", "building_height", format_real(c.building_height));
  f.set("config", "grid_resolution", format_real(c.grid_resolution));
  f.set("config", "macro_bs_height", format_real(c.macro_bs_height));
  f.set("config", "small_bs_height", format_real(c.small_bs_height));
  f.set("config", "ue_height", format_real(c.ue_height));
  f.set("config", "macro_power_w", format_real(c.macro_power_w));
  f.set("config", "small_power_w", format_real(c.small_power_w));
  f.set("config", "seed", format_u64(c.seed));

  f.add_section("buildings");
  f.set("buildings", "count", format_int(static_cast<long long>(s.buildings.size())));
  for (std::size_t i = 0; i < s.buildings.size(); ++i) {
    const auto& b = s.buildings[i];
    f.set("buildings", "b" + std::to_string(i),
          format_real(b.origin.x()) + " " + format_real(b.origin.y()) + " " +
              format_real(b.width) + " " + format_real(b.length) + " " +
              format_real(b.height));
  }

  f.add_section("sites");
  f.set("sites", "count", format_int(static_cast<long long>(s.sites.size())));
  for (std::size_t i = 0; i < s.sites.size(); ++i) {
    const auto& site = s.sites[i];
    f.set("sites", "s" + std::to_string(i),
          std::string(tier_name(site.tier)) + " " + format_real(site.position.x()) + " " +
              format_real(site.position.y()) + " " + format_real(site.position.z()) + " " +
              format_real(site.p_max));
  }
  return f.serialize();
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  KvFile f = KvFile::parse(text);
  Scenario s;
  ScenarioConfig& c = s.config;
  c.side_length = f.get_real("config", "side_length");
  c.n_macro = static_cast<int>(f.get_int("config", "n_macro"));
  c.n_small = static_cast<int>(f.get_int("config", "n_small"));
  c.n_buildings = static_cast<int>(f.get_int("config", "n_buildings"));
  c.building_width = f.get_real("config", "building_width");
  c.building_length = f.get_real("config", "building_length");
  c.building_height = f.get_real("config", "building_height");
  c.grid_resolution = f.get_real("config", "grid_resolution");
  c.macro_bs_height = f.get_real("config", "macro_bs_height");
  c.small_bs_height = f.get_real("config", "small_bs_height");
  c.ue_height = f.get_real("config", "ue_height");
  c.macro_power_w = f.get_real("config", "macro_power_w");
  c.small_power_w = f.get_real("config", "small_power_w");
  c.seed = f.get_u64("config", "seed");

  long long nb = f.get_int("buildings", "count");
  for (long long i = 0; i < nb; ++i) {
    auto parts = split_ws(f.get("buildings", "b" + std::to_string(i)));
    if (parts.size() != 5) throw input_error("bad building record");
    Building b;
    b.origin.x() = parse_real(parts[0]);
    b.origin.y() = parse_real(parts[1]);
    b.width = parse_real(parts[2]);
    b.length = parse_real(parts[3]);
    b.height = parse_real(parts[4]);
    s.buildings.push_back(b);
  }

  long long ns = f.get_int("sites", "count");
  for (long long i = 0; i < ns; ++i) {
    auto parts = split_ws(f.get("sites", "s" + std::to_string(i)));
    if (parts.size() != 5) throw input_error("bad site record");
    BsSite site;
    site.id = static_cast<int>(i);
    site.tier = tier_from(parts[0]);
    site.position = {parse_real(parts[1]), parse_real(parts[2]), parse_real(parts[3])};
    site.p_max = parse_real(parts[4]);
    s.sites.push_back(site);
  }

  // the grid is fully determined by the config
  int n = c.grid_per_side();
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      s.grid.emplace_back((ix + 0.5) * c.grid_resolution, (iy + 0.5) * c.grid_resolution,
                          c.ue_height);
  return s;
}

std::uint64_t scenario_digest(const Scenario& s) { return fnv1a64(serialize_scenario(s)); }

void save_scenario(const Scenario& s, const std::string& path) {
  write_text_file(path, serialize_scenario(s));
}

Scenario load_scenario(const std::string& path) {
  return parse_scenario(read_text_file(path));
}

}  // namespace hudn
