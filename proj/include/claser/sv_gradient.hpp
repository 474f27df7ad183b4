// SPDX-License-Identifier: Apache-2.0
//
// Singular-value gradients g[i] = u_i' * G * v_i, the windowed negative-tail
// score built from them, matrix ranking, and sigma-vs-gradient correlation
// diagnostics.
#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "claser/matrix_store.hpp"

namespace claser {

// diag(U' G V) of the thin SVD of w, length = numerical rank of w, indexed
// in descending-sigma order. Invariant under the column-sign convention
// (u_i and v_i always flip together).
Eigen::VectorXd singular_value_gradients(const Eigen::MatrixXd& w,
                                         const Eigen::MatrixXd& g);

struct score_report {
  std::string matrix_id;
  std::vector<Eigen::VectorXd> per_block;  // one gradient vector per block
  double score = 0.0;                      // >= 0
  int window = 20;
  int clusters = 1;
  // Set when some block's singular values have min gap < 1e-8 * sigma_max;
  // the factorization is then not unique and g is convention-dependent.
  bool degenerate_spectrum = false;
};

// Splits w and g into k consecutive row blocks, computes the gradient vector
// per block, and scores
//   score = (1/k) * sum_k [ -sum over the last min(window, r_k) entries i
//                            of min(g_k[i], 0) ].
// Positive tail entries contribute nothing; the score is the average mass of
// the negative tail, i.e. how strongly the loss argues for pruning.
score_report matrix_score(const Eigen::MatrixXd& w, const Eigen::MatrixXd& g,
                          int clusters, int window);

// Scores every weight record of the bundle whose kind is in `kinds` against
// its gradient record and returns the top q as (id, score), descending.
// Ties break by ascending layer, then kind order mlp_in < mlp_out < attn_k
// < attn_q.
std::vector<std::pair<std::string, double>> rank_matrices(
    const model_bundle& bundle, int clusters, int window, int q,
    const std::set<matrix_kind>& kinds);

// (pearson_r, spearman_rho) between the singular values of w and the
// gradient vector. Spearman uses average ranks for ties. Requires effective
// rank >= 3 and nonzero variance in both vectors.
std::pair<double, double> correlation_report(const Eigen::MatrixXd& w,
                                             const Eigen::MatrixXd& g);

}  // namespace claser
