#pragma once

#include "hudn/gradengine.hpp"
#include "hudn/hetgraph.hpp"
#include "hudn/types.hpp"

#include <cstdint>
#include <string>

namespace hudn {

// Two stacked dual-aggregator layers over the bipartite graph, then a shared
// pairwise association head and a per-BS power head. Weight shapes depend on
// (n_sites, k_active, hidden), so a trained model is tied to those dims.
struct ModelDims {
  int n_sites = 0;
  int k_active = 0;
  int hidden = 64;  // output width of each aggregator; node embedding is 2x

  int embed() const { return 2 * hidden; }
  void validate() const;
};

struct ModelParams {
  ModelDims dims;
  ParamSet set;
};

// Glorot-uniform weights (+/- sqrt(6/(fan_in+fan_out))), zero biases.
ModelParams init_params(const ModelDims& dims, std::uint64_t seed);

void save_model(const ModelParams& params, const std::string& path);
ModelParams load_model(const std::string& path);

// One layer for one node side: self features + mean over opposite-type
// one-hop neighbors through w1, self + mean over same-type two-hop neighbors
// through w2, ReLU on both, concat, row-L2-normalize. Empty neighborhoods
// aggregate to zero vectors.
Var hgsage_layer_side(Tape& tape, Var h_self, Var h_other, const Mat& adj1,
                      const Mat& adj2, Var w1, Var b1, Var w2, Var b2);

struct ForwardVars {
  Var x_soft;  // K x J, rows sum to 1
  Var p;       // J x 1, in (0, p_max]
  Var z;       // K x J standardized logits (before masking)
  Var h_ue;    // K x embed
  Var h_bs;    // J x embed
  Mat mask;    // K x J edge mask applied inside the softmax
  std::vector<Var> param_leaves;  // aligned with ModelParams::set indices
};

ForwardVars model_forward(Tape& tape, const HeteroGraph& graph, const ModelParams& params,
                          const Vec& p_max, double temperature,
                          bool trainable = true);

struct ModelOutput {
  Mat x_soft;
  Vec p;
  Mat z;
  Mat mask;
};

ModelOutput materialize(const Tape& tape, const ForwardVars& vars);

// One-hot argmax per row; ties resolve to the lowest BS index.
Mat harden(const Mat& x_soft);

}  // namespace hudn
