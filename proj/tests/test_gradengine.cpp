#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hudn/gradengine.hpp"
#include "hudn/io_util.hpp"

#include "test_util.hpp"

#include <cmath>
#include <filesystem>

using namespace hudn;
using hudn::testutil::FdCheck;
using hudn::testutil::max_fd_error;
using hudn::testutil::random_mat;

namespace {

std::string tmp_path(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "hudn_gradengine_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("finite differences validate every primitive") {
  Rng rng(101);
  auto check = [&](const char* what, std::vector<Mat> leaves,
                   const hudn::testutil::BuildFn& build) {
    INFO(what);
    CHECK(max_fd_error(std::move(leaves), build) < 1e-6);
  };

  check("add/sub/scale", {random_mat(rng, 3, 4), random_mat(rng, 3, 4)},
        [](Tape& t, std::vector<Var>& l) {
          return sum(scale(sub(add(l[0], l[1]), l[1]), real(1.7)));
        });
  check("cmul", {random_mat(rng, 3, 4), random_mat(rng, 3, 4)},
        [](Tape& t, std::vector<Var>& l) { return sum(cmul(l[0], l[1])); });
  check("cdiv", {random_mat(rng, 3, 4), random_mat(rng, 3, 4, 0.5, 2.0)},
        [](Tape& t, std::vector<Var>& l) { return sum(cdiv(l[0], l[1])); });
  check("matmul/transpose", {random_mat(rng, 3, 4), random_mat(rng, 4, 2)},
        [](Tape& t, std::vector<Var>& l) {
          return sum(matmul(transpose(matmul(l[0], l[1])), l[0]));
        });
  check("add_rowvec", {random_mat(rng, 3, 4), random_mat(rng, 1, 4)},
        [](Tape& t, std::vector<Var>& l) { return sum(cmul(add_rowvec(l[0], l[1]), l[0])); });
  check("concat_cols/rows", {random_mat(rng, 3, 2), random_mat(rng, 3, 2)},
        [](Tape& t, std::vector<Var>& l) {
          Var c = concat_cols(l[0], l[1]);
          Var r = concat_rows(l[0], l[1]);
          return add(sum(cmul(c, c)), sum(cmul(r, r)));
        });
  check("tile/repeat/reshape", {random_mat(rng, 2, 3)},
        [](Tape& t, std::vector<Var>& l) {
          Var a = tile_rows(l[0], 3);
          Var b = repeat_rows_each(l[0], 3);
          Var c = reshape_rowmajor(l[0], 3, 2);
          return add(add(sum(cmul(a, b)), sum(cmul(c, c))), sum(tile_cols(rowsum(l[0]), 4)));
        });
  check("reductions", {random_mat(rng, 4, 3)},
        [](Tape& t, std::vector<Var>& l) {
          Var r = rowsum(l[0]);
          Var c = colsum(l[0]);
          Var m = mean_rows(l[0]);
          return add(add(sum(cmul(r, r)), sum(cmul(c, c))), sum(cmul(m, m)));
        });
  check("relu", {random_mat(rng, 4, 3, 0.1, 1.0)},
        [](Tape& t, std::vector<Var>& l) { return sum(relu(l[0])); });
  check("sigmoid/log/log1p", {random_mat(rng, 4, 3, 0.2, 2.0)},
        [](Tape& t, std::vector<Var>& l) {
          return add(sum(log(sigmoid(l[0]))), sum(log1p(cmul(l[0], l[0]))));
        });
  check("clamp_min", {random_mat(rng, 4, 3, 0.5, 2.0)},
        [](Tape& t, std::vector<Var>& l) { return sum(clamp_min(l[0], real(0.1))); });
  check("l2_normalize_rows", {random_mat(rng, 4, 3, 0.3, 1.0)},
        [](Tape& t, std::vector<Var>& l) {
          Var y = l2_normalize_rows(l[0]);
          return sum(cmul(y, add_scalar(y, real(0.5))));
        });
  check("row_standardize", {random_mat(rng, 4, 5)},
        [](Tape& t, std::vector<Var>& l) {
          Var y = row_standardize(l[0], real(1e-8));
          return sum(cmul(y, add_scalar(y, real(0.3))));
        });
  check("softmax_t", {random_mat(rng, 4, 5)},
        [](Tape& t, std::vector<Var>& l) {
          Var y = softmax_t(l[0], real(0.7));
          Mat w = Mat::Zero(4, 5);
          w(0, 1) = 1;
          w(2, 3) = -2;
          w(3, 0) = 0.5;
          return sum(cmul(y, t.constant(w)));
        });
  check("masked softmax", {random_mat(rng, 3, 4)},
        [](Tape& t, std::vector<Var>& l) {
          Mat mask(3, 4);
          mask << 1, 1, 0, 1, 0, 1, 1, 0, 1, 1, 1, 1;
          Var y = masked_softmax_t(l[0], mask, real(0.5));
          Mat w = Mat::Ones(3, 4);
          w(0, 0) = -1;
          w(2, 2) = 3;
          return sum(cmul(y, t.constant(w)));
        });
}

TEST_CASE("a random three-layer composition matches finite differences") {
  Rng rng(202);
  std::vector<Mat> leaves{random_mat(rng, 5, 3), random_mat(rng, 3, 4),
                          random_mat(rng, 4, 2), random_mat(rng, 1, 2)};
  auto build = [](Tape& t, std::vector<Var>& l) {
    Var h1 = relu(matmul(l[0], l[1]));
    Var h2 = sigmoid(add_rowvec(matmul(h1, l[2]), l[3]));
    Var h3 = l2_normalize_rows(h2);
    return sum(cmul(h3, h2));
  };
  CHECK(max_fd_error(leaves, build) < 1e-6);
}

TEST_CASE("uniform softmax splits evenly") {
  Tape t;
  Mat z = Mat::Zero(1, 4);
  Var x = softmax_t(t.leaf(z, false), real(1));
  for (int j = 0; j < 4; ++j) CHECK(t.value(x)(0, j) == doctest::Approx(0.25));
}

TEST_CASE("low temperature sharpens toward one-hot") {
  Tape t;
  Mat z(1, 2);
  z << 1, 0;
  Var x = softmax_t(t.leaf(z, false), real(0.1));
  CHECK(t.value(x)(0, 0) == doctest::Approx(1.0 / (1.0 + std::exp(-10.0))).epsilon(1e-12));
  CHECK(t.value(x)(0, 1) == doctest::Approx(4.5398e-5).epsilon(1e-3));
}

TEST_CASE("gradient of the softmax total is numerically zero at T=0.05") {
  Tape t;
  Mat z(1, 2);
  z << 1, 0;
  Var zv = t.leaf(z, true);
  Var loss = sum(softmax_t(zv, real(0.05)));
  t.backward(loss);
  CHECK(std::abs(t.grad(zv)(0, 0)) < 1e-6);
  CHECK(std::abs(t.grad(zv)(0, 1)) < 1e-6);
}

TEST_CASE("softmax jacobian shrinks monotonically with temperature at gap 1") {
  // rows of the jacobian extracted through backward, one unit seed at a time
  auto max_jacobian_entry = [](double temp) {
    double worst = 0;
    for (int out = 0; out < 2; ++out) {
      Tape t;
      Mat z(1, 2);
      z << 1, 0;
      Var zv = t.leaf(z, true);
      Var x = softmax_t(zv, static_cast<real>(temp));
      Mat w = Mat::Zero(1, 2);
      w(0, out) = 1;
      Var pick = sum(cmul(x, t.constant(w)));
      t.backward(pick);
      worst = std::max({worst, std::abs(static_cast<double>(t.grad(zv)(0, 0))),
                        std::abs(static_cast<double>(t.grad(zv)(0, 1)))});
    }
    return worst;
  };
  double j_050 = max_jacobian_entry(0.5);
  double j_020 = max_jacobian_entry(0.2);
  double j_010 = max_jacobian_entry(0.1);
  double j_005 = max_jacobian_entry(0.05);
  CHECK(j_050 > j_020);
  CHECK(j_020 > j_010);
  CHECK(j_010 > j_005);
  CHECK(j_005 < 1e-6);
}

TEST_CASE("sum of a leaf backpropagates ones") {
  Tape t;
  Var w = t.leaf(Mat::Zero(3, 2), true);
  t.backward(sum(w));
  CHECK(t.grad(w) == Mat::Ones(3, 2));
}

TEST_CASE("stop_gradient blocks the upstream path and keeps the value") {
  Tape t;
  Rng rng(7);
  Mat xv = random_mat(rng, 2, 2), yv = random_mat(rng, 2, 2);
  Var x = t.leaf(xv, true);
  Var y = t.leaf(yv, true);
  Var held = stop_gradient(x);
  CHECK(t.value(held) == xv);
  t.backward(sum(cmul(held, y)));
  CHECK(t.grad(x) == Mat::Zero(2, 2));
  CHECK(t.grad(y) == xv);
}

TEST_CASE("backward rejects non-scalar losses") {
  Tape t;
  Var w = t.leaf(Mat::Zero(2, 2), true);
  CHECK_THROWS_AS(t.backward(w), input_error);
}

TEST_CASE("shape mismatches and bad arguments are rejected") {
  Tape t;
  Var a = t.leaf(Mat::Zero(2, 2), false);
  Var b = t.leaf(Mat::Zero(3, 2), false);
  CHECK_THROWS_AS(add(a, b), input_error);
  CHECK_THROWS_AS(matmul(a, b), input_error);
  CHECK_THROWS_AS(softmax_t(a, real(0)), input_error);
  Tape other;
  Var c = other.leaf(Mat::Zero(2, 2), false);
  CHECK_THROWS_AS(add(a, c), input_error);
}

TEST_CASE("non-finite results trip a numeric error") {
  Tape t;
  Mat z(1, 1);
  z << -1;
  Var v = t.leaf(z, false);
  CHECK_THROWS_AS(log(v), numeric_error);
  Mat big(1, 1);
  big << 1e308;
  Var w = t.leaf(big, false);
  CHECK_THROWS_AS(cmul(w, w), numeric_error);
}

TEST_CASE("zero rows pass through l2 normalization with zero gradient") {
  Tape t;
  Mat x(2, 3);
  x << 0, 0, 0, 3, 4, 0;
  Var xv = t.leaf(x, true);
  Var y = l2_normalize_rows(xv);
  CHECK(t.value(y).row(0) == Mat::Zero(1, 3));
  CHECK(t.value(y)(1, 0) == doctest::Approx(0.6));
  t.backward(sum(y));
  CHECK(t.grad(xv).row(0) == Mat::Zero(1, 3));
}

TEST_CASE("adam takes the expected first step on a scalar") {
  ParamSet params;
  params.add("w", Mat::Constant(1, 1, real(2.0)));
  Adam adam(params);
  std::vector<Mat> grads{Mat::Constant(1, 1, real(1.0))};
  adam.step(params, grads, 1e-4);
  // first-step scale is lr / (1 + eps)
  CHECK(static_cast<double>(params["w"](0, 0)) ==
        doctest::Approx(2.0 - 1e-4 / (1.0 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("adam with zero learning rate leaves parameters alone") {
  ParamSet params;
  params.add("w", Mat::Constant(2, 2, real(1.5)));
  Adam adam(params);
  std::vector<Mat> grads{Mat::Constant(2, 2, real(3.0))};
  adam.step(params, grads, 0.0);
  CHECK(params["w"] == Mat::Constant(2, 2, real(1.5)));
}

TEST_CASE("adam trajectories are deterministic") {
  auto run = [] {
    ParamSet params;
    params.add("w", Mat::Constant(3, 1, real(1.0)));
    Adam adam(params);
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
      std::vector<Mat> grads{random_mat(rng, 3, 1)};
      adam.step(params, grads, 1e-2);
    }
    return params["w"];
  };
  CHECK(run() == run());
}

TEST_CASE("adam rejects non-finite gradients") {
  ParamSet params;
  params.add("w", Mat::Constant(1, 1, real(1.0)));
  Adam adam(params);
  Mat bad(1, 1);
  bad << std::numeric_limits<real>::quiet_NaN();
  // leaf NaN cannot enter a tape, but a raw gradient can
  std::vector<Mat> grads{bad};
  CHECK_THROWS_AS(adam.step(params, grads, 1e-3), numeric_error);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  Rng rng(31);
  ParamSet params;
  params.add("layer1.w", random_mat(rng, 4, 3));
  params.add("layer1.b", random_mat(rng, 1, 3));
  params.add("head.w", random_mat(rng, 3, 1));
  std::string path = tmp_path("params.ckpt");
  save_checkpoint(params, path);
  ParamSet back = load_checkpoint(path);
  REQUIRE(back.size() == params.size());
  for (int i = 0; i < params.size(); ++i) {
    CHECK(back.name(i) == params.name(i));
    CHECK(back.value(i) == params.value(i));
  }
}

TEST_CASE("corrupt checkpoints are rejected") {
  std::string path = tmp_path("junk.ckpt");
  write_text_file(path, "not a checkpoint");
  CHECK_THROWS_AS(load_checkpoint(path), input_error);

  Rng rng(33);
  ParamSet params;
  params.add("w", random_mat(rng, 2, 2));
  std::string good = tmp_path("good.ckpt");
  save_checkpoint(params, good);
  std::string bytes = read_text_file(good);
  write_text_file(tmp_path("short.ckpt"), bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(load_checkpoint(tmp_path("short.ckpt")), input_error);
}
