// SPDX-License-Identifier: Apache-2.0
//
// Multi-subspace low-rank compression of weight matrices under block-split
// or clustered row groupings, and plan application to a bundle.
#pragma once

#include <string>

#include <Eigen/Core>

#include "claser/matrix_store.hpp"
#include "claser/subspace.hpp"

namespace claser {

enum class partition_mode { block, em_cluster };

// One intervention: replace matrix_id's weight with its compressed form.
// rho is the fraction of rank retained; rho = 1.0 is the uncompressed
// baseline arm and short-circuits to an exact no-op.
struct compression_plan {
  std::string matrix_id;
  double rho = 1.0;
  int clusters = 1;
  partition_mode mode = partition_mode::block;
};

// j = max(1, floor(rho * min(rows_k, cols))), 0 < rho <= 1.
Eigen::Index rank_from_rho(Eigen::Index rows_k, Eigen::Index cols, double rho);

// Split w into k consecutive row blocks, truncate each to
// rank_from_rho(block rows, cols, rho), and restack in order.
Eigen::MatrixXd compress_blockwise(const Eigen::MatrixXd& w, int clusters,
                                   double rho);

// Gather rows per cluster (preserving relative order), truncate each
// cluster's matrix, and scatter the rows back. Empty clusters are skipped.
Eigen::MatrixXd compress_clustered(const Eigen::MatrixXd& w,
                                   const row_assignment& assignment,
                                   double rho);

// Returns a new bundle with only the planned weight record's data replaced.
// mode em_cluster first clusters the rows with k_subspaces_em (block-split
// initialization, default iteration limits); the EM dimension is the block
// rank the plan's rho implies for the largest block.
model_bundle apply_plan(const model_bundle& bundle,
                        const compression_plan& plan);

}  // namespace claser
