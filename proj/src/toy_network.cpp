// SPDX-License-Identifier: Apache-2.0
#include "claser/toy_network.hpp"

#include <cmath>

#include <Eigen/QR>

#include "claser/errors.hpp"
#include "claser/linalg.hpp"
#include "claser/rng.hpp"

namespace claser {
namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, rng& gen) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = stddev * gen.normal();
  return m;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const Eigen::VectorXd shifted = logits.array() - logits.maxCoeff();
  const Eigen::VectorXd exps = shifted.array().exp();
  return exps / exps.sum();
}

}  // namespace

toy_model init_toy(int inputs, int hidden, int classes, std::uint64_t seed) {
  if (inputs < 1 || hidden < 1 || classes < 1) throw input_error("init_toy: bad dimensions");
  rng gen(seed);
  toy_model m;
  m.w1 = random_matrix(hidden, inputs, 1.0 / std::sqrt(static_cast<double>(inputs)), gen);
  m.w2 = random_matrix(classes, hidden, 1.0 / std::sqrt(static_cast<double>(hidden)), gen);
  m.b1 = Eigen::VectorXd::Zero(hidden);
  m.b2 = Eigen::VectorXd::Zero(classes);
  return m;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> forward(const toy_model& model,
                                                    const Eigen::VectorXd& x) {
  if (x.size() != model.w1.cols()) throw input_error("forward: input length mismatch");
  const Eigen::VectorXd hidden = (model.w1 * x + model.b1).array().tanh();
  const Eigen::VectorXd logits = model.w2 * hidden + model.b2;
  return {logits, softmax(logits)};
}

toy_gradients loss_and_gradients(const toy_model& model, const Eigen::VectorXd& x,
                                 int label) {
  if (x.size() != model.w1.cols()) throw input_error("loss_and_gradients: input length mismatch");
  if (label < 0 || label >= model.w2.rows()) throw input_error("loss_and_gradients: bad label");

  const Eigen::VectorXd pre = model.w1 * x + model.b1;
  const Eigen::VectorXd hidden = pre.array().tanh();
  const Eigen::VectorXd logits = model.w2 * hidden + model.b2;
  const Eigen::VectorXd probs = softmax(logits);

  toy_gradients out;
  out.loss = -std::log(probs(label));

  Eigen::VectorXd dlogits = probs;
  dlogits(label) -= 1.0;
  out.g_w2 = dlogits * hidden.transpose();
  out.g_b2 = dlogits;
  const Eigen::VectorXd dhidden = model.w2.transpose() * dlogits;
  const Eigen::VectorXd dpre =
      dhidden.array() * (1.0 - hidden.array() * hidden.array());
  out.g_w1 = dpre * x.transpose();
  out.g_b1 = dpre;
  return out;
}

toy_model train(const toy_model& model, const toy_dataset& data, int steps,
                double learning_rate, std::uint64_t seed) {
  if (data.inputs.size() != data.labels.size()) throw input_error("train: dataset length mismatch");
  if (steps < 0) throw input_error("train: negative step count");
  if (data.inputs.empty() && steps > 0) throw input_error("train: empty dataset");

  constexpr int batch = 16;
  toy_model m = model;
  rng gen(seed);
  for (int step = 0; step < steps; ++step) {
    Eigen::MatrixXd g_w1 = Eigen::MatrixXd::Zero(m.w1.rows(), m.w1.cols());
    Eigen::MatrixXd g_w2 = Eigen::MatrixXd::Zero(m.w2.rows(), m.w2.cols());
    Eigen::VectorXd g_b1 = Eigen::VectorXd::Zero(m.b1.size());
    Eigen::VectorXd g_b2 = Eigen::VectorXd::Zero(m.b2.size());
    for (int b = 0; b < batch; ++b) {
      const std::size_t i =
          static_cast<std::size_t>(gen.uniform_index(data.inputs.size()));
      const toy_gradients g = loss_and_gradients(m, data.inputs[i], data.labels[i]);
      g_w1 += g.g_w1;
      g_w2 += g.g_w2;
      g_b1 += g.g_b1;
      g_b2 += g.g_b2;
    }
    const double scale = learning_rate / batch;
    m.w1 -= scale * g_w1;
    m.w2 -= scale * g_w2;
    m.b1 -= scale * g_b1;
    m.b2 -= scale * g_b2;
  }
  return m;
}

toy_model plant_noise(const toy_model& model, toy_target target, int rank_r,
                      double scale, std::uint64_t seed) {
  if (scale < 0.0) throw input_error("plant_noise: negative scale");
  toy_model out = model;
  if (scale == 0.0) return out;

  Eigen::MatrixXd& t = target == toy_target::w1 ? out.w1 : out.w2;
  const Eigen::Index min_dim = std::min(t.rows(), t.cols());
  if (rank_r < 1 || rank_r > min_dim) throw input_error("plant_noise: bad rank");

  const svd_factors f = thin_svd(t);
  const Eigen::Index top = std::min<Eigen::Index>((rank_r + 3) / 4, f.rank);
  // The perturbation lives in the orthogonal complement of the protected
  // subspaces, so its effective rank is capped by their codimensions.
  const Eigen::Index rank_eff = std::min<Eigen::Index>(
      rank_r, std::min(t.rows() - top, t.cols() - top));
  if (rank_eff < 1) throw numeric_error("plant_noise: degenerate perturbation");

  rng gen(seed);
  Eigen::MatrixXd a = random_matrix(t.rows(), rank_eff, 1.0, gen);
  Eigen::MatrixXd b = random_matrix(t.cols(), rank_eff, 1.0, gen);
  // Push the perturbation off the dominant singular directions so it lands
  // in the small-sigma tail, where overfitting noise lives.
  a -= f.u.leftCols(top) * (f.u.leftCols(top).transpose() * a);
  b -= f.v.leftCols(top) * (f.v.leftCols(top).transpose() * b);

  // Orthonormalize so each a_t b_t^T term is unit-norm: the planted noise has
  // a flat spectrum instead of piling its energy into a few directions.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_a(a);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_b(b);
  const Eigen::MatrixXd q_a =
      qr_a.householderQ() * Eigen::MatrixXd::Identity(t.rows(), rank_eff);
  const Eigen::MatrixXd q_b =
      qr_b.householderQ() * Eigen::MatrixXd::Identity(t.cols(), rank_eff);

  Eigen::MatrixXd noise = q_a * q_b.transpose();
  const double norm = noise.norm();
  if (norm == 0.0) throw numeric_error("plant_noise: degenerate perturbation");
  noise *= scale * t.norm() / norm;
  t += noise;
  return out;
}

toy_dataset make_blob_dataset(int inputs, int classes, int examples,
                              double separation, double noise, std::uint64_t seed) {
  if (inputs < 1 || classes < 1 || examples < 1) {
    throw input_error("make_blob_dataset: bad dimensions");
  }
  rng gen(seed);
  std::vector<Eigen::VectorXd> means;
  means.reserve(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    Eigen::VectorXd m(inputs);
    for (int i = 0; i < inputs; ++i) m(i) = gen.normal();
    means.push_back(separation * m / m.norm());
  }

  toy_dataset data;
  data.inputs.reserve(static_cast<std::size_t>(examples));
  data.labels.reserve(static_cast<std::size_t>(examples));
  for (int e = 0; e < examples; ++e) {
    const int label = static_cast<int>(gen.uniform_index(static_cast<std::uint64_t>(classes)));
    Eigen::VectorXd x = means[static_cast<std::size_t>(label)];
    for (int i = 0; i < inputs; ++i) x(i) += noise * gen.normal();
    data.inputs.push_back(std::move(x));
    data.labels.push_back(label);
  }
  return data;
}

double dataset_accuracy(const toy_model& model, const toy_dataset& data,
                        const std::vector<int>& example_ids) {
  if (example_ids.empty()) return 0.0;
  long correct = 0;
  for (int id : example_ids) {
    const auto& x = data.inputs.at(static_cast<std::size_t>(id));
    const auto [logits, probs] = forward(model, x);
    Eigen::Index argmax = 0;
    logits.maxCoeff(&argmax);
    if (static_cast<int>(argmax) == data.labels[static_cast<std::size_t>(id)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(example_ids.size());
}

}  // namespace claser
