// Tests for the toy classifier: initialization, forward/backward exactness,
// training, planted spectral-tail noise, and the damage signals the scoring
// pipeline relies on.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>
#include <Eigen/Dense>

#include "claser/errors.hpp"
#include "claser/linalg.hpp"
#include "claser/rng.hpp"
#include "claser/sv_gradient.hpp"
#include "claser/toy_network.hpp"

using claser::dataset_accuracy;
using claser::forward;
using claser::init_toy;
using claser::loss_and_gradients;
using claser::make_blob_dataset;
using claser::plant_noise;
using claser::toy_dataset;
using claser::toy_gradients;
using claser::toy_model;
using claser::toy_target;
using claser::train;

namespace {

// Training recipe shared by the damage-signal tests: small first-layer
// initialization means training grows only the directions the task needs,
// leaving a quiet spectral tail for the planted noise to land in.
struct damage_setup {
  toy_dataset data;
  toy_model clean;
  std::uint64_t plant_seed = 0;
};

damage_setup trained_model(std::uint64_t seed) {
  claser::rng derive(seed);
  const std::uint64_t data_seed = derive.next_u64();
  const std::uint64_t model_seed = derive.next_u64();
  const std::uint64_t plant_seed = derive.next_u64();

  damage_setup setup;
  setup.data = make_blob_dataset(16, 6, 1200, 1.8, 1.0, data_seed);
  toy_model m = init_toy(16, 24, 6, model_seed);
  m.w1 *= 0.05;
  setup.clean = train(m, setup.data, 800, 0.5, model_seed);
  setup.plant_seed = plant_seed;
  return setup;
}

Eigen::MatrixXd summed_w1_gradient(const toy_model& model, const toy_dataset& data, int n) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(model.w1.rows(), model.w1.cols());
  for (int id = 0; id < n; ++id) {
    g += loss_and_gradients(model, data.inputs[static_cast<std::size_t>(id)],
                            data.labels[static_cast<std::size_t>(id)])
             .g_w1;
  }
  return g;
}

double mean_loss(const toy_model& model, const toy_dataset& data) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.inputs.size(); ++i) {
    total += loss_and_gradients(model, data.inputs[i], data.labels[i]).loss;
  }
  return total / static_cast<double>(data.inputs.size());
}

std::vector<int> all_ids(const toy_dataset& data) {
  std::vector<int> ids(data.inputs.size());
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

}  // namespace

TEST(ToyNetwork, InitIsDeterministicPerSeed) {
  const toy_model a = init_toy(5, 7, 3, 11);
  const toy_model b = init_toy(5, 7, 3, 11);
  const toy_model c = init_toy(5, 7, 3, 12);

  EXPECT_TRUE(a.w1 == b.w1);
  EXPECT_TRUE(a.w2 == b.w2);
  EXPECT_FALSE(a.w1 == c.w1);

  EXPECT_EQ(a.w1.rows(), 7);
  EXPECT_EQ(a.w1.cols(), 5);
  EXPECT_EQ(a.w2.rows(), 3);
  EXPECT_EQ(a.w2.cols(), 7);
  EXPECT_NEAR(a.b1.cwiseAbs().maxCoeff(), 0.0, 0.0);
  EXPECT_NEAR(a.b2.cwiseAbs().maxCoeff(), 0.0, 0.0);

  const toy_model tiny = init_toy(4, 1, 3, 1);  // one hidden unit is legal
  EXPECT_EQ(tiny.w1.rows(), 1);
  EXPECT_THROW(init_toy(0, 4, 2, 1), claser::input_error);
}

TEST(ToyNetwork, ZeroModelIsMaximallyUncertain) {
  toy_model m = init_toy(4, 6, 5, 3);
  m.w1.setZero();
  m.w2.setZero();

  const Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
  const auto [logits, probs] = forward(m, x);
  EXPECT_NEAR(logits.cwiseAbs().maxCoeff(), 0.0, 0.0);
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_NEAR(probs(i), 0.2, 1e-12);
  EXPECT_NEAR(loss_and_gradients(m, x, 2).loss, std::log(5.0), 1e-12);
}

TEST(ToyNetwork, ProbabilitiesSumToOne) {
  claser::rng gen(9);
  const toy_model m = init_toy(6, 8, 4, 21);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(6);
    for (Eigen::Index i = 0; i < 6; ++i) x(i) = 3.0 * gen.normal();
    const auto [logits, probs] = forward(m, x);
    EXPECT_NEAR(probs.sum(), 1.0, 1e-12);
    EXPECT_GE(probs.minCoeff(), 0.0);
  }
}

TEST(ToyNetwork, GradientsMatchFiniteDifferences) {
  const toy_model m = init_toy(8, 16, 4, 101);
  claser::rng gen(102);
  Eigen::VectorXd x(8);
  for (Eigen::Index i = 0; i < 8; ++i) x(i) = gen.normal();
  const int label = 2;
  const toy_gradients g = loss_and_gradients(m, x, label);
  const double h = 1e-6;

  toy_model probe = m;
  auto fd_check = [&](double analytic, double* param) {
    const double saved = *param;
    *param = saved + h;
    const double up = loss_and_gradients(probe, x, label).loss;
    *param = saved - h;
    const double down = loss_and_gradients(probe, x, label).loss;
    *param = saved;
    const double fd = (up - down) / (2.0 * h);
    EXPECT_NEAR(fd, analytic, 1e-5 * std::max(1.0, std::abs(analytic)));
  };

  for (Eigen::Index i = 0; i < probe.w1.rows(); ++i)
    for (Eigen::Index j = 0; j < probe.w1.cols(); ++j)
      fd_check(g.g_w1(i, j), &probe.w1(i, j));
  for (Eigen::Index i = 0; i < probe.w2.rows(); ++i)
    for (Eigen::Index j = 0; j < probe.w2.cols(); ++j)
      fd_check(g.g_w2(i, j), &probe.w2(i, j));
  for (Eigen::Index i = 0; i < probe.b1.size(); ++i) fd_check(g.g_b1(i), &probe.b1(i));
  for (Eigen::Index i = 0; i < probe.b2.size(); ++i) fd_check(g.g_b2(i), &probe.b2(i));
}

TEST(ToyNetwork, RejectsBadForwardArguments) {
  const toy_model m = init_toy(4, 6, 3, 5);
  EXPECT_THROW(forward(m, Eigen::VectorXd::Zero(5)), claser::input_error);
  EXPECT_THROW(loss_and_gradients(m, Eigen::VectorXd::Zero(4), 3), claser::input_error);
  EXPECT_THROW(loss_and_gradients(m, Eigen::VectorXd::Zero(4), -1), claser::input_error);
}

TEST(ToyNetwork, TrainingLearnsASeparableProblem) {
  const toy_dataset data = make_blob_dataset(4, 2, 200, 4.0, 0.3, 77);
  const toy_model start = init_toy(4, 8, 2, 78);

  // Zero steps must be an exact no-op.
  const toy_model unchanged = train(start, data, 0, 0.5, 79);
  EXPECT_TRUE(unchanged.w1 == start.w1);
  EXPECT_TRUE(unchanged.w2 == start.w2);

  const toy_model trained = train(start, data, 200, 0.5, 79);
  EXPECT_LT(mean_loss(trained, data), mean_loss(start, data));
  EXPECT_GE(dataset_accuracy(trained, data, all_ids(data)), 0.95);

  // Determinism.
  const toy_model again = train(start, data, 200, 0.5, 79);
  EXPECT_TRUE(again.w1 == trained.w1);
  EXPECT_TRUE(again.w2 == trained.w2);

  EXPECT_THROW(train(start, data, -1, 0.5, 79), claser::input_error);
  EXPECT_THROW(train(start, toy_dataset{}, 5, 0.5, 79), claser::input_error);
}

TEST(ToyNetwork, BlobDatasetIsDeterministicAndLabeled) {
  const toy_dataset a = make_blob_dataset(5, 3, 60, 2.0, 0.5, 4);
  const toy_dataset b = make_blob_dataset(5, 3, 60, 2.0, 0.5, 4);
  ASSERT_EQ(a.inputs.size(), 60u);
  ASSERT_EQ(a.labels.size(), 60u);
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    EXPECT_TRUE(a.inputs[i] == b.inputs[i]);
    EXPECT_EQ(a.labels[i], b.labels[i]);
    EXPECT_GE(a.labels[i], 0);
    EXPECT_LT(a.labels[i], 3);
  }
  EXPECT_THROW(make_blob_dataset(0, 3, 10, 1.0, 1.0, 1), claser::input_error);
}

TEST(PlantNoise, ScaleZeroIsAnExactNoOp) {
  const toy_model m = init_toy(6, 10, 4, 31);
  const toy_model out = plant_noise(m, toy_target::w1, 3, 0.0, 32);
  EXPECT_TRUE(out.w1 == m.w1);
  EXPECT_TRUE(out.w2 == m.w2);
  EXPECT_TRUE(out.b1 == m.b1);
  EXPECT_TRUE(out.b2 == m.b2);
}

TEST(PlantNoise, PerturbationHasTheRequestedGeometry) {
  const toy_model m = init_toy(12, 16, 8, 41);
  const int rank_r = 8;
  const double scale = 0.7;
  const toy_model out = plant_noise(m, toy_target::w1, rank_r, scale, 42);

  const Eigen::MatrixXd delta = out.w1 - m.w1;
  EXPECT_TRUE(out.w2 == m.w2);  // only the target moves

  // Frobenius norm is calibrated exactly.
  EXPECT_NEAR(delta.norm(), scale * m.w1.norm(), 1e-12 * m.w1.norm());

  // Rank is bounded by the request.
  EXPECT_LE(claser::thin_svd(delta).rank, rank_r);

  // The perturbation spectrum is flat: every nonzero singular value equal.
  const Eigen::VectorXd spectrum = claser::thin_svd(delta).sigma;
  ASSERT_GT(spectrum.size(), 0);
  EXPECT_LT((spectrum.array() - spectrum(0)).abs().maxCoeff(), 1e-9 * spectrum(0));

  // The protected top pairs survive: for i < ceil(r/4), (W + D) v_i = s_i u_i.
  const claser::svd_factors f = claser::thin_svd(m.w1);
  const int protected_pairs = (rank_r + 3) / 4;
  for (int i = 0; i < protected_pairs; ++i) {
    const Eigen::VectorXd lhs = out.w1 * f.v.col(i);
    const Eigen::VectorXd rhs = f.sigma(i) * f.u.col(i);
    EXPECT_LT((lhs - rhs).norm(), 1e-10 * f.sigma(0)) << "pair " << i;
  }
}

TEST(PlantNoise, RejectsBadRequests) {
  const toy_model m = init_toy(6, 10, 4, 51);
  EXPECT_THROW(plant_noise(m, toy_target::w1, 0, 0.5, 1), claser::input_error);
  EXPECT_THROW(plant_noise(m, toy_target::w1, 7, 0.5, 1), claser::input_error);  // > min dim
  EXPECT_THROW(plant_noise(m, toy_target::w1, 3, -0.5, 1), claser::input_error);
}

TEST(DamageSignals, SecondLayerNoiseCostsAccuracy) {
  const damage_setup setup = trained_model(0);
  const toy_model noisy = plant_noise(setup.clean, toy_target::w2, 4, 0.5, setup.plant_seed);

  const std::vector<int> ids = all_ids(setup.data);
  const double before = dataset_accuracy(setup.clean, setup.data, ids);
  const double after = dataset_accuracy(noisy, setup.data, ids);
  EXPECT_GE(before - after, 0.015);
}

TEST(DamageSignals, NoisyMatrixOutscoresItsCleanSelf) {
  // The negative-tail score computed from one 100-example calibration pass
  // should flag the damaged first-layer matrix: across ten seeds the noisy
  // matrix must outscore its clean self in at least nine.
  int noisy_scored_higher = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const damage_setup setup = trained_model(seed);
    const toy_model noisy =
        plant_noise(setup.clean, toy_target::w1, 8, 2.0, setup.plant_seed);

    const double clean_score =
        claser::matrix_score(setup.clean.w1, summed_w1_gradient(setup.clean, setup.data, 100),
                             1, 20)
            .score;
    const double noisy_score =
        claser::matrix_score(noisy.w1, summed_w1_gradient(noisy, setup.data, 100), 1, 20)
            .score;
    if (noisy_score > clean_score) ++noisy_scored_higher;
  }
  EXPECT_GE(noisy_scored_higher, 9);
}
