// Tests for the thin SVD, rank truncation, and row block split/stack.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>
#include <Eigen/Dense>

#include "claser/errors.hpp"
#include "claser/linalg.hpp"
#include "claser/rng.hpp"

using claser::split_rows;
using claser::stack_rows;
using claser::svd_factors;
using claser::thin_svd;
using claser::truncate;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, claser::rng& gen) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gen.normal();
  return m;
}

// Random matrix with orthonormal columns, via QR.
Eigen::MatrixXd random_orthonormal(Eigen::Index rows, Eigen::Index cols, claser::rng& gen) {
  const Eigen::MatrixXd m = random_matrix(rows, cols, gen);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ() *
         Eigen::MatrixXd::Identity(rows, cols);
}

}  // namespace

TEST(ThinSvd, DiagonalMatrixIsItsOwnFactorization) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
  w(0, 0) = 3.0;
  w(1, 1) = 1.0;

  const svd_factors f = thin_svd(w);
  ASSERT_EQ(f.rank, 2);
  EXPECT_NEAR(f.sigma(0), 3.0, 1e-12);
  EXPECT_NEAR(f.sigma(1), 1.0, 1e-12);
  // The sign convention makes the factors exactly the identity here.
  EXPECT_NEAR((f.u - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  EXPECT_NEAR((f.v - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(ThinSvd, ZeroMatrixHasRankZero) {
  const svd_factors f = thin_svd(Eigen::MatrixXd::Zero(2, 2));
  EXPECT_EQ(f.rank, 0);
  EXPECT_EQ(f.sigma.size(), 0);
  EXPECT_EQ(f.u.cols(), 0);
  EXPECT_EQ(f.v.cols(), 0);
  // Truncation of a rank-zero factorization reconstructs the zero matrix.
  const Eigen::MatrixXd back = truncate(f, 1);
  EXPECT_EQ(back.rows(), 2);
  EXPECT_EQ(back.cols(), 2);
  EXPECT_NEAR(back.cwiseAbs().maxCoeff(), 0.0, 0.0);
}

TEST(ThinSvd, SingularValuesMatchGramEigenvalues) {
  claser::rng gen(5);
  const Eigen::MatrixXd w = random_matrix(8, 5, gen);
  const svd_factors f = thin_svd(w);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w.transpose() * w);
  std::vector<double> expected;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    expected.push_back(std::sqrt(std::max(0.0, eig.eigenvalues()(i))));
  }
  std::sort(expected.begin(), expected.end(), std::greater<double>());

  ASSERT_EQ(f.rank, 5);
  for (Eigen::Index i = 0; i < f.rank; ++i) {
    EXPECT_NEAR(f.sigma(i), expected[static_cast<std::size_t>(i)], 1e-8);
  }
}

TEST(ThinSvd, RandomMatrixInvariants) {
  claser::rng gen(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(gen.uniform_index(64));
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(gen.uniform_index(64));
    const Eigen::MatrixXd w = random_matrix(m, n, gen);
    const svd_factors f = thin_svd(w);

    // Reconstruction.
    const Eigen::MatrixXd back = f.u * f.sigma.asDiagonal() * f.v.transpose();
    EXPECT_LT((back - w).norm(), 1e-9 * (1.0 + w.norm()));

    // Orthonormal columns.
    EXPECT_LT((f.u.transpose() * f.u - Eigen::MatrixXd::Identity(f.rank, f.rank)).norm(),
              1e-10);
    EXPECT_LT((f.v.transpose() * f.v - Eigen::MatrixXd::Identity(f.rank, f.rank)).norm(),
              1e-10);

    // Ordered positive spectrum.
    for (Eigen::Index i = 0; i < f.rank; ++i) {
      EXPECT_GT(f.sigma(i), 0.0);
      if (i > 0) EXPECT_LE(f.sigma(i), f.sigma(i - 1));
    }

    // Sign convention: the largest-magnitude entry of each u column is
    // non-negative.
    for (Eigen::Index c = 0; c < f.rank; ++c) {
      Eigen::Index argmax = 0;
      f.u.col(c).cwiseAbs().maxCoeff(&argmax);
      EXPECT_GE(f.u(argmax, c), 0.0);
    }

    // Determinism.
    const svd_factors again = thin_svd(w);
    EXPECT_TRUE(again.u == f.u);
    EXPECT_TRUE(again.sigma == f.sigma);
    EXPECT_TRUE(again.v == f.v);
  }
}

TEST(ThinSvd, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(thin_svd(Eigen::MatrixXd(0, 3)), claser::input_error);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
  w(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(thin_svd(w), claser::input_error);
}

TEST(Truncate, FullRankRequestReconstructsTheMatrix) {
  claser::rng gen(3);
  const Eigen::MatrixXd w = random_matrix(6, 4, gen);
  const svd_factors f = thin_svd(w);
  EXPECT_LT((truncate(f, f.rank) - w).norm(), 1e-10);
  EXPECT_LT((truncate(f, 100) - w).norm(), 1e-10);  // beyond-rank request clips
}

TEST(Truncate, DiagonalRankOne) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
  w(0, 0) = 3.0;
  w(1, 1) = 1.0;
  const Eigen::MatrixXd t = truncate(thin_svd(w), 1);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(2, 2);
  expected(0, 0) = 3.0;
  EXPECT_LT((t - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Truncate, RejectsNonPositiveRank) {
  const svd_factors f = thin_svd(Eigen::MatrixXd::Identity(2, 2));
  EXPECT_THROW(truncate(f, 0), claser::input_error);
}

TEST(Truncate, ErrorEqualsTailAndBeatsRandomProjections) {
  claser::rng gen(1234);
  const Eigen::MatrixXd w = random_matrix(12, 8, gen);
  const svd_factors f = thin_svd(w);
  const Eigen::Index j = 2;

  // The truncation error is exactly the Frobenius mass of the dropped tail.
  double tail = 0.0;
  for (Eigen::Index i = j; i < f.rank; ++i) tail += f.sigma(i) * f.sigma(i);
  const double err = (w - truncate(f, j)).norm();
  EXPECT_NEAR(err, std::sqrt(tail), 1e-9);

  // No rank-j column-space projection does better.
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::MatrixXd q = random_orthonormal(12, j, gen);
    const double rival = (w - q * (q.transpose() * w)).norm();
    EXPECT_GE(rival, err - 1e-9);
  }
}

TEST(SplitRows, BalancedPartitions) {
  const claser::row_block_partition even = split_rows(10, 2);
  ASSERT_EQ(even.block_ranges.size(), 2u);
  EXPECT_EQ(even.block_ranges[0].first, 0);
  EXPECT_EQ(even.block_ranges[0].second, 5);
  EXPECT_EQ(even.block_ranges[1].first, 5);
  EXPECT_EQ(even.block_ranges[1].second, 10);

  // 10 = 3 + 3 + 2 + 2: earlier blocks take the remainder.
  const claser::row_block_partition uneven = split_rows(10, 4);
  std::vector<Eigen::Index> sizes;
  for (const auto& [start, end] : uneven.block_ranges) sizes.push_back(end - start);
  EXPECT_EQ(sizes, (std::vector<Eigen::Index>{3, 3, 2, 2}));

  const claser::row_block_partition single = split_rows(5, 1);
  ASSERT_EQ(single.block_ranges.size(), 1u);
  EXPECT_EQ(single.block_ranges[0].first, 0);
  EXPECT_EQ(single.block_ranges[0].second, 5);

  const claser::row_block_partition each = split_rows(4, 4);
  ASSERT_EQ(each.block_ranges.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(each.block_ranges[static_cast<std::size_t>(i)].second -
                  each.block_ranges[static_cast<std::size_t>(i)].first,
              1);
  }
}

TEST(SplitRows, RejectsBadBlockCounts) {
  try {
    split_rows(10, 11);
    FAIL() << "expected input_error";
  } catch (const claser::input_error& e) {
    EXPECT_NE(std::string(e.what()).find("block count 11 not in [1, 10]"), std::string::npos);
  }
  EXPECT_THROW(split_rows(10, 0), claser::input_error);
  EXPECT_THROW(split_rows(0, 1), claser::input_error);
}

TEST(StackRows, SplitThenStackIsIdentity) {
  claser::rng gen(21);
  for (Eigen::Index m = 1; m <= 12; ++m) {
    const Eigen::MatrixXd w = random_matrix(m, 5, gen);
    for (Eigen::Index k = 1; k <= m; ++k) {
      const claser::row_block_partition part = split_rows(m, k);
      std::vector<Eigen::MatrixXd> blocks;
      for (const auto& [start, end] : part.block_ranges) {
        blocks.push_back(w.middleRows(start, end - start));
      }
      EXPECT_TRUE(stack_rows(blocks) == w) << "m=" << m << " k=" << k;
    }
  }
}

TEST(StackRows, PreservesBlockOrder) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(1, 2, 1.0);
  Eigen::MatrixXd b = Eigen::MatrixXd::Constant(2, 2, 2.0);
  const Eigen::MatrixXd stacked = stack_rows({a, b});
  ASSERT_EQ(stacked.rows(), 3);
  EXPECT_EQ(stacked(0, 0), 1.0);
  EXPECT_EQ(stacked(1, 0), 2.0);
  EXPECT_EQ(stacked(2, 1), 2.0);
}

TEST(StackRows, RejectsMismatchedColumnsAndEmptyInput) {
  try {
    stack_rows({Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Zero(1, 3)});
    FAIL() << "expected input_error";
  } catch (const claser::input_error& e) {
    EXPECT_NE(std::string(e.what()).find("column mismatch"), std::string::npos);
  }
  EXPECT_THROW(stack_rows({}), claser::input_error);
}
