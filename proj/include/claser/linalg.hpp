// SPDX-License-Identifier: Apache-2.0
//
// Thin SVD with a deterministic sign convention, rank truncation, and the
// contiguous row-block split/stack primitives.
#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace claser {

// Thin SVD restricted to the numerical rank: sigma holds only values above
// max(m, n) * eps * sigma_max, in non-increasing order. Columns of u and v
// are orthonormal; the largest-magnitude entry of each u column is
// non-negative (and the paired v column is flipped with it) so repeated
// factorizations are identical.
struct svd_factors {
  Eigen::MatrixXd u;      // m x r
  Eigen::VectorXd sigma;  // r, non-increasing
  Eigen::MatrixXd v;      // n x r
  Eigen::Index rank = 0;
};

svd_factors thin_svd(const Eigen::MatrixXd& w);

// U * diag(sigma with entries beyond min(j, rank) zeroed) * V^T. The result
// has rank <= min(j, rank).
Eigen::MatrixXd truncate(const svd_factors& factors, Eigen::Index j);

// Balanced, order-preserving partition of [0, m) into k half-open row
// intervals. When m % k != 0 the earlier blocks take the extra row.
struct row_block_partition {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> block_ranges;
};

row_block_partition split_rows(Eigen::Index m, Eigen::Index k);

// Vertical concatenation; all blocks must share a column count.
Eigen::MatrixXd stack_rows(const std::vector<Eigen::MatrixXd>& blocks);

}  // namespace claser
