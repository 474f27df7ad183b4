// SPDX-License-Identifier: Apache-2.0
//
// A small self-contained classifier (two weight matrices, tanh, softmax
// cross-entropy) with an exact manual backward pass. Provides real
// (weight, gradient) pairs and an accuracy surface for desk-scale end-to-end
// validation of the pipeline.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace claser {

// logits = w2 * tanh(w1 * x + b1) + b2
struct toy_model {
  Eigen::MatrixXd w1;  // h x n
  Eigen::MatrixXd w2;  // c x h
  Eigen::VectorXd b1;  // h
  Eigen::VectorXd b2;  // c
};

struct toy_dataset {
  std::vector<Eigen::VectorXd> inputs;
  std::vector<int> labels;  // in [0, classes)
};

enum class toy_target { w1, w2 };

// Entries ~ normal / sqrt(fan_in), biases zero; deterministic per seed.
toy_model init_toy(int inputs, int hidden, int classes, std::uint64_t seed);

// (logits, probabilities); softmax is stabilized by max subtraction.
std::pair<Eigen::VectorXd, Eigen::VectorXd> forward(const toy_model& model,
                                                    const Eigen::VectorXd& x);

struct toy_gradients {
  double loss = 0.0;
  Eigen::MatrixXd g_w1;
  Eigen::MatrixXd g_w2;
  Eigen::VectorXd g_b1;
  Eigen::VectorXd g_b2;
};

// Cross-entropy loss -log p[label] and exact gradients for all four
// parameters.
toy_gradients loss_and_gradients(const toy_model& model,
                                 const Eigen::VectorXd& x, int label);

// Plain minibatch gradient descent; deterministic per seed.
toy_model train(const toy_model& model, const toy_dataset& data, int steps,
                double learning_rate, std::uint64_t seed);

// Adds a random rank-r perturbation to the target matrix, projected off the
// top-ceil(r/4) left/right singular subspaces of the target and renormalized
// to Frobenius norm scale * ||target||_F. Scale 0 returns the model
// unchanged.
toy_model plant_noise(const toy_model& model, toy_target target, int rank_r,
                      double scale, std::uint64_t seed);

// Gaussian class blobs: `classes` unit-separated means in R^inputs with
// per-coordinate noise; labels are the blob indices. Deterministic per seed.
toy_dataset make_blob_dataset(int inputs, int classes, int examples,
                              double separation, double noise,
                              std::uint64_t seed);

// Fraction of examples whose argmax logit equals the label.
double dataset_accuracy(const toy_model& model, const toy_dataset& data,
                        const std::vector<int>& example_ids);

}  // namespace claser
