#include "hudn/hetgraph.hpp"

#include "hudn/io_util.hpp"
#include "hudn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hudn {

bool HeteroGraph::has_edge(int ue, int bs) const {
  const auto& row = nbr1_ue[static_cast<std::size_t>(ue)];
  return std::binary_search(row.begin(), row.end(), bs);
}

namespace {

void cap_lists(std::vector<std::vector<int>>& lists, int cap, std::uint64_t seed,
               std::uint64_t salt) {
  for (std::size_t v = 0; v < lists.size(); ++v) {
    auto& l = lists[v];
    if (static_cast<int>(l.size()) <= cap) continue;
    Rng rng(derive_seed(seed, "nbr-cap", salt, v));
    auto keep = sample_without_replacement(rng, static_cast<int>(l.size()), cap);
    std::vector<int> capped;
    capped.reserve(keep.size());
    for (int k : keep) capped.push_back(l[static_cast<std::size_t>(k)]);
    l = std::move(capped);  // `keep` ascending, so order survives
  }
}

std::vector<std::vector<int>> second_order(const std::vector<std::vector<int>>& own,
                                           const std::vector<std::vector<int>>& other,
                                           int self_count) {
  std::vector<std::vector<int>> nbr2(static_cast<std::size_t>(self_count));
  for (int v = 0; v < self_count; ++v) {
    std::set<int> acc;
    for (int u : own[static_cast<std::size_t>(v)])
      for (int w : other[static_cast<std::size_t>(u)])
        if (w != v) acc.insert(w);
    nbr2[static_cast<std::size_t>(v)].assign(acc.begin(), acc.end());
  }
  return nbr2;
}

}  // namespace

HeteroGraph build_graph(const RadioMap& map, const Event& event,
                        const GraphBuildOptions& options) {
  if (event.k() == 0) throw input_error("build_graph: empty event");
  const int k = event.k();
  const int j = map.n_sites();

  HeteroGraph g;
  g.ue_ids = event.active_ue;
  g.bs_ids.resize(static_cast<std::size_t>(j));
  for (int b = 0; b < j; ++b) g.bs_ids[static_cast<std::size_t>(b)] = b;

  Mat gains = event_gains(map, event);

  // feature scaling: log10 gains standardized by whole-map statistics
  Mat lg = map.gains.array().log10();
  real mu = lg.mean();
  real var = (lg.array() - mu).square().mean();
  real sd = std::sqrt(var);
  if (!(sd > 1e-12)) sd = 1;

  g.nbr1_ue.resize(static_cast<std::size_t>(k));
  g.nbr1_bs.resize(static_cast<std::size_t>(j));
  for (int i = 0; i < k; ++i) {
    auto& row = g.nbr1_ue[static_cast<std::size_t>(i)];
    for (int b = 0; b < j; ++b)
      if (gains(i, b) >= options.detect_threshold) row.push_back(b);
    if (row.empty()) {
      Eigen::Index best = 0;
      gains.row(i).maxCoeff(&best);
      row.push_back(static_cast<int>(best));
    }
    for (int b : row) g.nbr1_bs[static_cast<std::size_t>(b)].push_back(i);
  }

  g.nbr2_ue = second_order(g.nbr1_ue, g.nbr1_bs, k);
  g.nbr2_bs = second_order(g.nbr1_bs, g.nbr1_ue, j);

  if (options.max_neighbors > 0) {
    cap_lists(g.nbr1_ue, options.max_neighbors, options.sample_seed, 1);
    cap_lists(g.nbr1_bs, options.max_neighbors, options.sample_seed, 2);
    cap_lists(g.nbr2_ue, options.max_neighbors, options.sample_seed, 3);
    cap_lists(g.nbr2_bs, options.max_neighbors, options.sample_seed, 4);
  }

  g.ue_features.setZero(k, j);
  g.bs_features.setZero(j, k);
  for (int i = 0; i < k; ++i) {
    for (int b : g.nbr1_ue[static_cast<std::size_t>(i)]) {
      real z = (std::log10(gains(i, b)) - mu) / sd;
      g.ue_features(i, b) = z;
      g.bs_features(b, i) = z;
    }
  }
  return g;
}

std::vector<int> neighbors(const HeteroGraph& graph, NodeType type, int index, int order) {
  int count = type == NodeType::ue ? graph.n_ue() : graph.n_bs();
  if (index < 0 || index >= count) throw input_error("neighbors: unknown node");
  if (order != 1 && order != 2) throw input_error("neighbors: order must be 1 or 2");
  const auto& lists = type == NodeType::ue
                          ? (order == 1 ? graph.nbr1_ue : graph.nbr2_ue)
                          : (order == 1 ? graph.nbr1_bs : graph.nbr2_bs);
  return lists[static_cast<std::size_t>(index)];
}

namespace {

std::vector<int> inverse_of(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size(), -1);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    int p = perm[i];
    if (p < 0 || p >= static_cast<int>(perm.size()) || inv[static_cast<std::size_t>(p)] != -1)
      throw input_error("not a permutation");
    inv[static_cast<std::size_t>(p)] = static_cast<int>(i);
  }
  return inv;
}

std::vector<int> relabel_sorted(const std::vector<int>& list, const std::vector<int>& inv) {
  std::vector<int> out;
  out.reserve(list.size());
  for (int v : list) out.push_back(inv[static_cast<std::size_t>(v)]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

HeteroGraph permute_ue(const HeteroGraph& graph, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != graph.n_ue())
    throw input_error("permute_ue: size mismatch");
  auto inv = inverse_of(perm);
  HeteroGraph g;
  g.bs_ids = graph.bs_ids;
  g.bs_features = graph.bs_features;
  g.ue_ids.resize(perm.size());
  g.ue_features.resize(graph.ue_features.rows(), graph.ue_features.cols());
  g.nbr1_ue.resize(perm.size());
  g.nbr2_ue.resize(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    std::size_t src = static_cast<std::size_t>(perm[i]);
    g.ue_ids[i] = graph.ue_ids[src];
    g.ue_features.row(static_cast<Eigen::Index>(i)) =
        graph.ue_features.row(static_cast<Eigen::Index>(src));
    g.nbr1_ue[i] = graph.nbr1_ue[src];
    g.nbr2_ue[i] = relabel_sorted(graph.nbr2_ue[src], inv);
  }
  g.nbr1_bs.reserve(graph.nbr1_bs.size());
  for (const auto& l : graph.nbr1_bs) g.nbr1_bs.push_back(relabel_sorted(l, inv));
  g.nbr2_bs = graph.nbr2_bs;
  return g;
}

HeteroGraph permute_bs(const HeteroGraph& graph, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != graph.n_bs())
    throw input_error("permute_bs: size mismatch");
  auto inv = inverse_of(perm);
  HeteroGraph g;
  g.ue_ids = graph.ue_ids;
  g.ue_features = graph.ue_features;
  g.bs_ids.resize(perm.size());
  g.bs_features.resize(graph.bs_features.rows(), graph.bs_features.cols());
  g.nbr1_bs.resize(perm.size());
  g.nbr2_bs.resize(perm.size());
  for (std::size_t b = 0; b < perm.size(); ++b) {
    std::size_t src = static_cast<std::size_t>(perm[b]);
    g.bs_ids[b] = graph.bs_ids[src];
    g.bs_features.row(static_cast<Eigen::Index>(b)) =
        graph.bs_features.row(static_cast<Eigen::Index>(src));
    g.nbr1_bs[b] = graph.nbr1_bs[src];
    g.nbr2_bs[b] = relabel_sorted(graph.nbr2_bs[src], inv);
  }
  g.nbr1_ue.reserve(graph.nbr1_ue.size());
  for (const auto& l : graph.nbr1_ue) g.nbr1_ue.push_back(relabel_sorted(l, inv));
  g.nbr2_ue = graph.nbr2_ue;
  return g;
}

Mat edge_mask(const HeteroGraph& graph) {
  Mat m = Mat::Zero(graph.n_ue(), graph.n_bs());
  for (int i = 0; i < graph.n_ue(); ++i)
    for (int b : graph.nbr1_ue[static_cast<std::size_t>(i)]) m(i, b) = 1;
  return m;
}

Mat mean_adjacency(const std::vector<std::vector<int>>& nbr, int cols) {
  Mat a = Mat::Zero(static_cast<Eigen::Index>(nbr.size()), cols);
  for (std::size_t v = 0; v < nbr.size(); ++v) {
    if (nbr[v].empty()) continue;
    real w = real(1) / static_cast<real>(nbr[v].size());
    for (int u : nbr[v]) a(static_cast<Eigen::Index>(v), u) = w;
  }
  return a;
}

void export_edges_csv(const HeteroGraph& graph, const std::string& path) {
  std::string out = "ue_grid_index,bs_site_id\n";
  for (int i = 0; i < graph.n_ue(); ++i)
    for (int b : graph.nbr1_ue[static_cast<std::size_t>(i)])
      out += format_int(graph.ue_ids[static_cast<std::size_t>(i)]) + "," +
             format_int(graph.bs_ids[static_cast<std::size_t>(b)]) + "\n";
  write_text_file(path, out);
}

}  // namespace hudn
