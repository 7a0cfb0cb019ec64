#pragma once

#include "hudn/radiomap.hpp"
#include "hudn/scenario.hpp"
#include "hudn/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hudn {

struct GraphBuildOptions {
  double detect_threshold = 1e-11;  // linear gain; -110 dB
  int max_neighbors = 0;            // 0 keeps full neighborhoods
  std::uint64_t sample_seed = 0;    // used only when max_neighbors > 0
};

// Bipartite UE/BS graph. Node feature vectors are standardized log10 gains:
// ue_features rows are indexed by graph UE position with columns in site-id
// order; bs_features rows by graph BS position with columns in the canonical
// (ascending grid index) order of the event's UEs. Relabeling graph nodes
// permutes rows and neighbor lists only; feature column order is part of the
// event, not of the node labeling.
struct HeteroGraph {
  std::vector<int> ue_ids;  // grid indices
  std::vector<int> bs_ids;  // site ids
  Mat ue_features;          // K x J
  Mat bs_features;          // J x K
  std::vector<std::vector<int>> nbr1_ue;  // per UE: BS positions, ascending
  std::vector<std::vector<int>> nbr1_bs;  // per BS: UE positions, ascending
  std::vector<std::vector<int>> nbr2_ue;  // per UE: UE positions, ascending
  std::vector<std::vector<int>> nbr2_bs;  // per BS: BS positions, ascending

  int n_ue() const { return static_cast<int>(ue_ids.size()); }
  int n_bs() const { return static_cast<int>(bs_ids.size()); }
  bool has_edge(int ue, int bs) const;
};

// Edge (i, j) iff gain >= detect_threshold; a UE detecting nothing keeps its
// single strongest BS.
HeteroGraph build_graph(const RadioMap& map, const Event& event,
                        const GraphBuildOptions& options = {});

enum class NodeType { ue, bs };

std::vector<int> neighbors(const HeteroGraph& graph, NodeType type, int index, int order);

HeteroGraph permute_ue(const HeteroGraph& graph, const std::vector<int>& perm);
HeteroGraph permute_bs(const HeteroGraph& graph, const std::vector<int>& perm);

Mat edge_mask(const HeteroGraph& graph);  // K x J, 1 on edges

// Row-normalized membership matrix: row v averages over nbr[v] (zero row when
// the neighborhood is empty).
Mat mean_adjacency(const std::vector<std::vector<int>>& nbr, int cols);

void export_edges_csv(const HeteroGraph& graph, const std::string& path);

}  // namespace hudn
