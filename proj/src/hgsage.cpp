#include "hudn/hgsage.hpp"

#include "hudn/rng.hpp"

#include <cmath>

namespace hudn {

void ModelDims::validate() const {
  if (n_sites < 1 || k_active < 1) throw config_error("model dims must be positive");
  if (hidden < 1) throw config_error("hidden width must be >= 1");
}

namespace {

constexpr real kPowerFloor = 1e-6;   // fraction of p_max
constexpr real kLogitEps = 1e-8;     // row-standardization variance guard

Mat glorot(Rng& rng, int rows, int cols) {
  double limit = std::sqrt(6.0 / (rows + cols));
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      m(i, j) = static_cast<real>(rng.uniform(-limit, limit));
  return m;
}

struct SideNames {
  std::string w1, b1, w2, b2;
};

SideNames side_names(int layer, const char* side) {
  std::string base = "l" + std::to_string(layer) + "." + side + ".";
  return {base + "w1", base + "b1", base + "w2", base + "b2"};
}

}  // namespace

ModelParams init_params(const ModelDims& dims, std::uint64_t seed) {
  dims.validate();
  Rng rng(derive_seed(seed, "model-init"));
  const int h = dims.hidden;
  const int e = dims.embed();
  const int j = dims.n_sites;
  const int k = dims.k_active;

  ModelParams mp;
  mp.dims = dims;
  auto add_side = [&](int layer, const char* side, int d_self, int d_other) {
    SideNames n = side_names(layer, side);
    mp.set.add(n.w1, glorot(rng, d_self + d_other, h));
    mp.set.add(n.b1, Mat::Zero(1, h));
    mp.set.add(n.w2, glorot(rng, d_self + d_self, h));
    mp.set.add(n.b2, Mat::Zero(1, h));
  };
  add_side(1, "ue", j, k);
  add_side(1, "bs", k, j);
  add_side(2, "ue", e, e);
  add_side(2, "bs", e, e);

  mp.set.add("ua.w0", glorot(rng, 2 * e, h));
  mp.set.add("ua.b0", Mat::Zero(1, h));
  mp.set.add("ua.w1", glorot(rng, h, 1));
  mp.set.add("ua.b1", Mat::Zero(1, 1));
  mp.set.add("pw.w", glorot(rng, e, 1));
  mp.set.add("pw.b", Mat::Zero(1, 1));
  return mp;
}

void save_model(const ModelParams& params, const std::string& path) {
  ParamSet with_dims;
  Mat dims(1, 3);
  dims << static_cast<real>(params.dims.n_sites), static_cast<real>(params.dims.k_active),
      static_cast<real>(params.dims.hidden);
  with_dims.add("dims", dims);
  for (int i = 0; i < params.set.size(); ++i)
    with_dims.add(params.set.name(i), params.set.value(i));
  save_checkpoint(with_dims, path);
}

ModelParams load_model(const std::string& path) {
  ParamSet raw = load_checkpoint(path);
  int di = raw.index_of("dims");
  if (di < 0) throw input_error("checkpoint lacks model dims: " + path);
  const Mat& dims = raw.value(di);
  if (dims.rows() != 1 || dims.cols() != 3) throw input_error("corrupt model dims");
  ModelParams mp;
  mp.dims.n_sites = static_cast<int>(dims(0, 0));
  mp.dims.k_active = static_cast<int>(dims(0, 1));
  mp.dims.hidden = static_cast<int>(dims(0, 2));
  mp.dims.validate();
  for (int i = 0; i < raw.size(); ++i)
    if (i != di) mp.set.add(raw.name(i), raw.value(i));
  return mp;
}

Var hgsage_layer_side(Tape& tape, Var h_self, Var h_other, const Mat& adj1,
                      const Mat& adj2, Var w1, Var b1, Var w2, Var b2) {
  Var agg1 = matmul(tape.constant(adj1), h_other);
  Var agg2 = matmul(tape.constant(adj2), h_self);
  Var o = relu(add_rowvec(matmul(concat_cols(h_self, agg1), w1), b1));
  Var s = relu(add_rowvec(matmul(concat_cols(h_self, agg2), w2), b2));
  return l2_normalize_rows(concat_cols(o, s));
}

ForwardVars model_forward(Tape& tape, const HeteroGraph& graph, const ModelParams& params,
                          const Vec& p_max, double temperature, bool trainable) {
  const int k = graph.n_ue();
  const int j = graph.n_bs();
  if (j != params.dims.n_sites || k != params.dims.k_active)
    throw input_error("model_forward: graph does not match model dims");
  if (p_max.size() != j) throw input_error("model_forward: p_max size mismatch");
  if (temperature <= 0) throw input_error("model_forward: temperature must be > 0");

  std::vector<Var> leaves;
  leaves.reserve(static_cast<std::size_t>(params.set.size()));
  for (int i = 0; i < params.set.size(); ++i)
    leaves.push_back(tape.leaf(params.set.value(i), trainable));
  auto var_of = [&](const std::string& name) {
    int i = params.set.index_of(name);
    if (i < 0) throw input_error("model_forward: missing parameter " + name);
    return leaves[static_cast<std::size_t>(i)];
  };

  Var f_ue = tape.constant(graph.ue_features);
  Var f_bs = tape.constant(graph.bs_features);
  Mat a1u = mean_adjacency(graph.nbr1_ue, j);
  Mat a1b = mean_adjacency(graph.nbr1_bs, k);
  Mat a2u = mean_adjacency(graph.nbr2_ue, k);
  Mat a2b = mean_adjacency(graph.nbr2_bs, j);

  SideNames l1u = side_names(1, "ue"), l1b = side_names(1, "bs");
  SideNames l2u = side_names(2, "ue"), l2b = side_names(2, "bs");

  Var h1_ue = hgsage_layer_side(tape, f_ue, f_bs, a1u, a2u, var_of(l1u.w1),
                                var_of(l1u.b1), var_of(l1u.w2),
                                var_of(l1u.b2));
  Var h1_bs = hgsage_layer_side(tape, f_bs, f_ue, a1b, a2b, var_of(l1b.w1),
                                var_of(l1b.b1), var_of(l1b.w2),
                                var_of(l1b.b2));
  Var h2_ue = hgsage_layer_side(tape, h1_ue, h1_bs, a1u, a2u, var_of(l2u.w1),
                                var_of(l2u.b1), var_of(l2u.w2),
                                var_of(l2u.b2));
  Var h2_bs = hgsage_layer_side(tape, h1_bs, h1_ue, a1b, a2b, var_of(l2b.w1),
                                var_of(l2b.b1), var_of(l2b.w2),
                                var_of(l2b.b2));

  // association head: shared MLP over every (UE, BS) embedding pair
  Var pairs = concat_cols(repeat_rows_each(h2_ue, j), tile_rows(h2_bs, k));
  Var hid = relu(add_rowvec(matmul(pairs, var_of("ua.w0")), var_of("ua.b0")));
  Var logits_flat = add_rowvec(matmul(hid, var_of("ua.w1")), var_of("ua.b1"));
  Var z = row_standardize(reshape_rowmajor(logits_flat, k, j), kLogitEps);

  ForwardVars out;
  out.mask = edge_mask(graph);
  out.z = z;
  out.x_soft = masked_softmax_t(z, out.mask, static_cast<real>(temperature));

  Var raw = sigmoid(add_rowvec(matmul(h2_bs, var_of("pw.w")), var_of("pw.b")));
  Mat pmax_mat = p_max;
  out.p = cmul(clamp_min(raw, kPowerFloor), tape.constant(pmax_mat));

  out.h_ue = h2_ue;
  out.h_bs = h2_bs;
  out.param_leaves = std::move(leaves);
  return out;
}

ModelOutput materialize(const Tape& tape, const ForwardVars& vars) {
  ModelOutput out;
  out.x_soft = tape.value(vars.x_soft);
  out.p = tape.value(vars.p);
  out.z = tape.value(vars.z);
  out.mask = vars.mask;
  return out;
}

Mat harden(const Mat& x_soft) {
  Mat h = Mat::Zero(x_soft.rows(), x_soft.cols());
  for (Eigen::Index i = 0; i < x_soft.rows(); ++i) {
    Eigen::Index best = 0;
    x_soft.row(i).maxCoeff(&best);  // first maximum: lowest index wins ties
    h(i, best) = 1;
  }
  return h;
}

}  // namespace hudn
