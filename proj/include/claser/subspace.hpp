// SPDX-License-Identifier: Apache-2.0
//
// Row groupings for multi-subspace factorization: the zero-cost block split,
// the K-subspaces EM heuristic for the projective-clustering objective, and
// the objective evaluator itself.
#pragma once

#include <vector>

#include <Eigen/Core>

namespace claser {

// K subspace bases; bases[k] is n x j_k with orthonormal columns. j_k is at
// most the requested dimension and may be smaller when a cluster has fewer
// rows than that.
struct subspace_set {
  std::vector<Eigen::MatrixXd> bases;
};

struct row_assignment {
  std::vector<int> assign;  // cluster index per row, in [0, clusters)
  int clusters = 1;
};

// sum_i min_k || rows.row(i) - B_k B_k' rows.row(i) ||^2
double projective_cost(const Eigen::MatrixXd& rows, const subspace_set& subspaces);

struct em_result {
  row_assignment assignment;
  subspace_set subspaces;
  std::vector<double> cost_trace;  // one entry per iteration, non-increasing
};

// Alternating refit/reassign heuristic. Each iteration refits every cluster's
// basis to the top-j right-singular subspace of its rows, re-seeds any empty
// cluster with the row of largest current residual (taken from a cluster
// that keeps at least two rows; lowest row index on ties), then reassigns
// every row to its nearest subspace (lowest cluster index on ties).
// Terminates when the assignment is unchanged, the relative cost decrease is
// below tol, or max_iter is reached.
em_result k_subspaces_em(const Eigen::MatrixXd& rows, int clusters, int dim,
                         const row_assignment& init, int max_iter = 50,
                         double tol = 1e-9);

// Assignment induced by the balanced contiguous split; also the default EM
// initialization.
row_assignment block_assignment(Eigen::Index m, int clusters);

}  // namespace claser
