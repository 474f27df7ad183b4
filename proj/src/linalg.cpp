// SPDX-License-Identifier: Apache-2.0
#include "claser/linalg.hpp"

#include <limits>
#include <string>

#include <Eigen/Dense>

#include "claser/errors.hpp"

namespace claser {

svd_factors thin_svd(const Eigen::MatrixXd& w) {
  if (w.rows() < 1 || w.cols() < 1) throw input_error("thin_svd: empty matrix");
  if (!w.allFinite()) throw input_error("thin_svd: non-finite entries");

  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
  // Jacobi is the most accurate choice and plenty fast at small sizes; the
  // divide-and-conquer kernel takes over for larger inputs.
  if (std::min(w.rows(), w.cols()) <= 32) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw numeric_error("SVD did not converge");
    u = svd.matrixU();
    sigma = svd.singularValues();
    v = svd.matrixV();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw numeric_error("SVD did not converge");
    u = svd.matrixU();
    sigma = svd.singularValues();
    v = svd.matrixV();
  }

  const double eps = std::numeric_limits<double>::epsilon();
  const double threshold =
      static_cast<double>(std::max(w.rows(), w.cols())) * eps * (sigma.size() ? sigma(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > threshold) ++rank;

  svd_factors f;
  f.rank = rank;
  f.u = u.leftCols(rank);
  f.sigma = sigma.head(rank);
  f.v = v.leftCols(rank);

  // Sign convention: largest-magnitude entry of each u column non-negative.
  for (Eigen::Index c = 0; c < rank; ++c) {
    Eigen::Index max_row = 0;
    f.u.col(c).cwiseAbs().maxCoeff(&max_row);
    if (f.u(max_row, c) < 0.0) {
      f.u.col(c) = -f.u.col(c);
      f.v.col(c) = -f.v.col(c);
    }
  }
  return f;
}

Eigen::MatrixXd truncate(const svd_factors& factors, Eigen::Index j) {
  if (j < 1) throw input_error("truncate: rank must be positive");
  const Eigen::Index t = std::min(j, factors.rank);
  if (t == 0) {
    return Eigen::MatrixXd::Zero(factors.u.rows(), factors.v.rows());
  }
  return factors.u.leftCols(t) * factors.sigma.head(t).asDiagonal() *
         factors.v.leftCols(t).transpose();
}

row_block_partition split_rows(Eigen::Index m, Eigen::Index k) {
  if (m < 1) throw input_error("split_rows: need at least one row");
  if (k < 1 || k > m) {
    throw input_error("split_rows: block count " + std::to_string(k) +
                      " not in [1, " + std::to_string(m) + "]");
  }
  row_block_partition p;
  const Eigen::Index base = m / k;
  const Eigen::Index extra = m % k;
  Eigen::Index start = 0;
  for (Eigen::Index b = 0; b < k; ++b) {
    const Eigen::Index size = base + (b < extra ? 1 : 0);
    p.block_ranges.emplace_back(start, start + size);
    start += size;
  }
  return p;
}

Eigen::MatrixXd stack_rows(const std::vector<Eigen::MatrixXd>& blocks) {
  if (blocks.empty()) throw input_error("stack_rows: no blocks");
  const Eigen::Index cols = blocks.front().cols();
  Eigen::Index rows = 0;
  for (const Eigen::MatrixXd& b : blocks) {
    if (b.cols() != cols) {
      throw input_error("stack_rows: column mismatch, " + std::to_string(b.cols()) + " vs " +
                        std::to_string(cols));
    }
    rows += b.rows();
  }
  Eigen::MatrixXd out(rows, cols);
  Eigen::Index at = 0;
  for (const Eigen::MatrixXd& b : blocks) {
    out.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return out;
}

}  // namespace claser
