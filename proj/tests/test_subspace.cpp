// Tests for the projective-clustering objective and the K-subspaces EM
// heuristic.

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>
#include <Eigen/Dense>

#include "claser/errors.hpp"
#include "claser/linalg.hpp"
#include "claser/rng.hpp"
#include "claser/subspace.hpp"

using claser::block_assignment;
using claser::k_subspaces_em;
using claser::projective_cost;
using claser::row_assignment;
using claser::subspace_set;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, claser::rng& gen) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gen.normal();
  return m;
}

Eigen::MatrixXd random_orthonormal(Eigen::Index rows, Eigen::Index cols, claser::rng& gen) {
  const Eigen::MatrixXd m = random_matrix(rows, cols, gen);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ() *
         Eigen::MatrixXd::Identity(rows, cols);
}

// 20 rows in R^6 alternating between the e1 and e2 axes, with magnitudes in
// [0.5, 2.5] so no row is near zero.
Eigen::MatrixXd two_orthogonal_lines(claser::rng& gen) {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(20, 6);
  for (Eigen::Index i = 0; i < 20; ++i) {
    const double magnitude = 0.5 + 2.0 * gen.uniform();
    rows(i, i % 2) = magnitude;
  }
  return rows;
}

}  // namespace

TEST(ProjectiveCost, ZeroWhenRowsLieInTheSpan) {
  claser::rng gen(2);
  Eigen::VectorXd direction(3);
  direction << 1.0, 2.0, -2.0;
  direction.normalize();

  Eigen::MatrixXd rows(5, 3);
  for (Eigen::Index i = 0; i < 5; ++i) rows.row(i) = (1.0 + gen.uniform()) * direction;

  subspace_set one_line;
  one_line.bases.push_back(direction);
  EXPECT_NEAR(projective_cost(rows, one_line), 0.0, 1e-18);
}

TEST(ProjectiveCost, UnitResidualForOrthogonalDirection) {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(1, 2);
  rows(0, 0) = 1.0;  // e1
  subspace_set e2;
  e2.bases.push_back((Eigen::MatrixXd(2, 1) << 0.0, 1.0).finished());
  EXPECT_NEAR(projective_cost(rows, e2), 1.0, 1e-15);
}

TEST(ProjectiveCost, MatchesBruteForceMinimumOverSubspaces) {
  claser::rng gen(14);
  const Eigen::MatrixXd rows = random_matrix(10, 4, gen);
  subspace_set set;
  for (int k = 0; k < 3; ++k) set.bases.push_back(random_orthonormal(4, 2, gen));

  double expected = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const Eigen::VectorXd r = rows.row(i).transpose();
    double best = std::numeric_limits<double>::infinity();
    for (const Eigen::MatrixXd& b : set.bases) {
      best = std::min(best, (r - b * (b.transpose() * r)).squaredNorm());
    }
    expected += best;
  }
  EXPECT_NEAR(projective_cost(rows, set), expected, 1e-10);
}

TEST(ProjectiveCost, RejectsEmptyAndMismatchedBases) {
  const Eigen::MatrixXd rows = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(projective_cost(rows, subspace_set{}), claser::input_error);
  subspace_set wrong_dim;
  wrong_dim.bases.push_back(Eigen::MatrixXd::Identity(4, 1));
  EXPECT_THROW(projective_cost(rows, wrong_dim), claser::input_error);
}

TEST(KSubspacesEm, RecoversTwoOrthogonalLines) {
  claser::rng gen(10);
  const Eigen::MatrixXd rows = two_orthogonal_lines(gen);

  const claser::em_result em =
      k_subspaces_em(rows, 2, 1, block_assignment(rows.rows(), 2));

  EXPECT_LE(em.cost_trace.back(), 1e-16);
  EXPECT_LE(em.cost_trace.size(), 10u);

  // Pure clusters: all even rows together, all odd rows together, apart.
  ASSERT_EQ(em.assignment.assign.size(), 20u);
  const int even_cluster = em.assignment.assign[0];
  const int odd_cluster = em.assignment.assign[1];
  EXPECT_NE(even_cluster, odd_cluster);
  for (Eigen::Index i = 0; i < 20; ++i) {
    EXPECT_EQ(em.assignment.assign[static_cast<std::size_t>(i)],
              i % 2 == 0 ? even_cluster : odd_cluster)
        << "row " << i;
  }
}

TEST(KSubspacesEm, SingleClusterCostIsTheSpectralTail) {
  claser::rng gen(20);
  const Eigen::MatrixXd rows = random_matrix(12, 5, gen);
  const int j = 2;

  const claser::em_result em = k_subspaces_em(rows, 1, j, block_assignment(12, 1));

  const claser::svd_factors f = claser::thin_svd(rows);
  double tail = 0.0;
  for (Eigen::Index i = j; i < f.rank; ++i) tail += f.sigma(i) * f.sigma(i);
  EXPECT_NEAR(em.cost_trace.back(), tail, 1e-8 * std::max(1.0, tail));
}

TEST(KSubspacesEm, CostTraceNeverIncreases) {
  claser::rng gen(30);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index m = 4 + static_cast<Eigen::Index>(gen.uniform_index(20));
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(gen.uniform_index(6));
    const int k = 1 + static_cast<int>(gen.uniform_index(std::min<Eigen::Index>(m, 4)));
    const int dim = 1 + static_cast<int>(gen.uniform_index(std::min<Eigen::Index>(n, 3)));
    const Eigen::MatrixXd rows = random_matrix(m, n, gen);

    const claser::em_result em = k_subspaces_em(rows, k, dim, block_assignment(m, k));
    ASSERT_FALSE(em.cost_trace.empty());
    for (std::size_t i = 1; i < em.cost_trace.size(); ++i) {
      EXPECT_LE(em.cost_trace[i], em.cost_trace[i - 1] + 1e-9 * (1.0 + em.cost_trace[0]))
          << "trial " << trial << " step " << i;
    }
    // The reported final cost is the objective of the returned clustering.
    EXPECT_NEAR(em.cost_trace.back(), projective_cost(rows, em.subspaces), 1e-20);
  }
}

TEST(KSubspacesEm, ConvergedAssignmentIsAFixedPoint) {
  claser::rng gen(40);
  const Eigen::MatrixXd rows = random_matrix(16, 5, gen);
  const claser::em_result first = k_subspaces_em(rows, 3, 2, block_assignment(16, 3));
  const claser::em_result second = k_subspaces_em(rows, 3, 2, first.assignment);

  EXPECT_EQ(second.cost_trace.size(), 1u);
  EXPECT_NEAR(second.cost_trace.back(), first.cost_trace.back(),
              1e-12 * (1.0 + first.cost_trace.back()));
  EXPECT_EQ(second.assignment.assign, first.assignment.assign);
}

TEST(KSubspacesEm, ReseedsEmptyClusters) {
  // Every row lies on one line, so one cluster empties out after the first
  // reassignment and must be reseeded rather than crash.
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(6, 3);
  for (Eigen::Index i = 0; i < 6; ++i) rows(i, 0) = static_cast<double>(i + 1);

  const claser::em_result em = k_subspaces_em(rows, 2, 1, block_assignment(6, 2));
  ASSERT_EQ(em.assignment.assign.size(), 6u);
  for (int a : em.assignment.assign) {
    EXPECT_GE(a, 0);
    EXPECT_LT(a, 2);
  }
  EXPECT_LE(em.cost_trace.back(), em.cost_trace.front() + 1e-12);
  EXPECT_NEAR(em.cost_trace.back(), 0.0, 1e-18);  // the line itself is rank 1
}

TEST(BlockAssignment, BalancedContiguousGroups) {
  EXPECT_EQ(block_assignment(6, 3).assign, (std::vector<int>{0, 0, 1, 1, 2, 2}));
  EXPECT_EQ(block_assignment(5, 2).assign, (std::vector<int>{0, 0, 0, 1, 1}));
  EXPECT_EQ(block_assignment(4, 1).assign, (std::vector<int>{0, 0, 0, 0}));
  EXPECT_EQ(block_assignment(3, 3).assign, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(block_assignment(6, 3).clusters, 3);
}

TEST(KSubspacesEm, RejectsBadArguments) {
  claser::rng gen(50);
  const Eigen::MatrixXd rows = random_matrix(6, 4, gen);
  EXPECT_THROW(k_subspaces_em(rows, 0, 1, block_assignment(6, 1)), claser::input_error);
  EXPECT_THROW(k_subspaces_em(rows, 7, 1, block_assignment(6, 1)), claser::input_error);
  EXPECT_THROW(k_subspaces_em(rows, 2, 0, block_assignment(6, 2)), claser::input_error);
  EXPECT_THROW(k_subspaces_em(rows, 2, 5, block_assignment(6, 2)), claser::input_error);
  EXPECT_THROW(k_subspaces_em(rows, 2, 1, block_assignment(5, 2)), claser::input_error);
  EXPECT_THROW(k_subspaces_em(rows, 2, 1, block_assignment(6, 2), 0), claser::input_error);
}
