// SPDX-License-Identifier: Apache-2.0
#include "claser/subspace.hpp"

#include <string>

#include "claser/errors.hpp"
#include "claser/linalg.hpp"

namespace claser {
namespace {

double row_residual(const Eigen::RowVectorXd& row, const Eigen::MatrixXd& basis) {
  if (basis.cols() == 0) return row.squaredNorm();
  const Eigen::RowVectorXd projected = (row * basis) * basis.transpose();
  return (row - projected).squaredNorm();
}

// Top-dim right-singular subspace of the cluster's rows.
Eigen::MatrixXd fit_basis(const Eigen::MatrixXd& rows, int dim) {
  const svd_factors f = thin_svd(rows);
  const Eigen::Index width = std::min<Eigen::Index>(dim, f.rank);
  return f.v.leftCols(width);
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& all, const std::vector<int>& assign,
                            int cluster) {
  Eigen::Index count = 0;
  for (int a : assign)
    if (a == cluster) ++count;
  Eigen::MatrixXd out(count, all.cols());
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < assign.size(); ++i) {
    if (assign[i] == cluster) out.row(at++) = all.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

}  // namespace

double projective_cost(const Eigen::MatrixXd& rows, const subspace_set& subspaces) {
  if (subspaces.bases.empty()) throw input_error("projective_cost: no subspaces");
  for (const Eigen::MatrixXd& b : subspaces.bases) {
    if (b.rows() != rows.cols()) {
      throw input_error("projective_cost: basis dimension " + std::to_string(b.rows()) +
                        " does not match row length " + std::to_string(rows.cols()));
    }
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    double best = row_residual(rows.row(i), subspaces.bases.front());
    for (std::size_t k = 1; k < subspaces.bases.size(); ++k) {
      best = std::min(best, row_residual(rows.row(i), subspaces.bases[k]));
    }
    total += best;
  }
  return total;
}

em_result k_subspaces_em(const Eigen::MatrixXd& rows, int clusters, int dim,
                         const row_assignment& init, int max_iter, double tol) {
  const Eigen::Index m = rows.rows();
  if (clusters < 1 || clusters > m) throw input_error("k_subspaces_em: bad cluster count");
  if (dim < 1 || dim > rows.cols()) throw input_error("k_subspaces_em: bad dimension");
  if (static_cast<Eigen::Index>(init.assign.size()) != m || init.clusters != clusters) {
    throw input_error("k_subspaces_em: init assignment does not match input");
  }
  if (max_iter < 1) throw input_error("k_subspaces_em: max_iter must be positive");

  em_result result;
  result.assignment = init;
  std::vector<int>& assign = result.assignment.assign;

  for (int iter = 0; iter < max_iter; ++iter) {
    // Refit each cluster's basis.
    std::vector<Eigen::MatrixXd> bases(static_cast<std::size_t>(clusters));
    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(clusters), 0);
    for (int a : assign) ++sizes[static_cast<std::size_t>(a)];
    for (int k = 0; k < clusters; ++k) {
      if (sizes[static_cast<std::size_t>(k)] > 0) {
        bases[static_cast<std::size_t>(k)] = fit_basis(gather_rows(rows, assign, k), dim);
      }
    }

    // Re-seed empty clusters with the row of largest current residual, taken
    // from a cluster that keeps at least two rows.
    for (int k = 0; k < clusters; ++k) {
      if (sizes[static_cast<std::size_t>(k)] > 0) continue;
      Eigen::Index worst = -1;
      double worst_residual = -1.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const int owner = assign[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(owner)] < 2) continue;
        const double r = row_residual(rows.row(i), bases[static_cast<std::size_t>(owner)]);
        if (r > worst_residual) {
          worst_residual = r;
          worst = i;
        }
      }
      const int donor = assign[static_cast<std::size_t>(worst)];
      --sizes[static_cast<std::size_t>(donor)];
      assign[static_cast<std::size_t>(worst)] = k;
      sizes[static_cast<std::size_t>(k)] = 1;
      bases[static_cast<std::size_t>(k)] = fit_basis(rows.row(worst), dim);
      bases[static_cast<std::size_t>(donor)] =
          fit_basis(gather_rows(rows, assign, donor), dim);
    }

    // Reassign every row to its nearest subspace; ties go to the lowest
    // cluster index.
    bool changed = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      int best_k = 0;
      double best = row_residual(rows.row(i), bases[0]);
      for (int k = 1; k < clusters; ++k) {
        const double r = row_residual(rows.row(i), bases[static_cast<std::size_t>(k)]);
        if (r < best) {
          best = r;
          best_k = k;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best_k) {
        assign[static_cast<std::size_t>(i)] = best_k;
        changed = true;
      }
    }

    result.subspaces.bases = std::move(bases);
    const double cost = projective_cost(rows, result.subspaces);
    const bool small_decrease =
        !result.cost_trace.empty() &&
        result.cost_trace.back() - cost <= tol * std::max(1.0, result.cost_trace.back());
    result.cost_trace.push_back(cost);
    if (!changed || small_decrease) break;
  }
  return result;
}

row_assignment block_assignment(Eigen::Index m, int clusters) {
  const row_block_partition part = split_rows(m, clusters);
  row_assignment a;
  a.clusters = clusters;
  a.assign.resize(static_cast<std::size_t>(m));
  int block = 0;
  for (const auto& [start, end] : part.block_ranges) {
    for (Eigen::Index i = start; i < end; ++i) a.assign[static_cast<std::size_t>(i)] = block;
    ++block;
  }
  return a;
}

}  // namespace claser
