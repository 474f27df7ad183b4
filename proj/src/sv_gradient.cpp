// SPDX-License-Identifier: Apache-2.0
#include "claser/sv_gradient.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "claser/errors.hpp"
#include "claser/linalg.hpp"

namespace claser {
namespace {

bool has_degenerate_spectrum(const Eigen::VectorXd& sigma) {
  if (sigma.size() < 2) return false;
  const double floor = 1e-8 * sigma(0);
  for (Eigen::Index i = 0; i + 1 < sigma.size(); ++i) {
    if (sigma(i) - sigma(i + 1) < floor) return true;
  }
  return false;
}

// Average ranks (1-based), ties share the mean of their positions.
Eigen::VectorXd average_ranks(const Eigen::VectorXd& values) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });

  Eigen::VectorXd ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && values(order[static_cast<std::size_t>(j + 1)]) ==
                            values(order[static_cast<std::size_t>(i)]))
      ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) ranks(order[static_cast<std::size_t>(k)]) = shared;
    i = j + 1;
  }
  return ranks;
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double n = static_cast<double>(x.size());
  const Eigen::VectorXd xc = x.array() - x.mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double sx = std::sqrt(xc.squaredNorm() / n);
  const double sy = std::sqrt(yc.squaredNorm() / n);
  if (sx == 0.0 || sy == 0.0) {
    throw input_error("correlation undefined: zero variance");
  }
  return xc.dot(yc) / (n * sx * sy);
}

}  // namespace

Eigen::VectorXd singular_value_gradients(const Eigen::MatrixXd& w,
                                         const Eigen::MatrixXd& g) {
  if (w.rows() != g.rows() || w.cols() != g.cols()) {
    throw input_error("singular_value_gradients: shape mismatch");
  }
  const svd_factors f = thin_svd(w);
  return (f.u.transpose() * g * f.v).diagonal();
}

score_report matrix_score(const Eigen::MatrixXd& w, const Eigen::MatrixXd& g,
                          int clusters, int window) {
  if (w.rows() != g.rows() || w.cols() != g.cols()) {
    throw input_error("matrix_score: shape mismatch");
  }
  if (window < 1) throw input_error("matrix_score: window must be positive");
  const row_block_partition part = split_rows(w.rows(), clusters);

  score_report report;
  report.window = window;
  report.clusters = clusters;

  double total = 0.0;
  for (const auto& [start, end] : part.block_ranges) {
    const Eigen::Index rows = end - start;
    const svd_factors f = thin_svd(w.middleRows(start, rows));
    if (has_degenerate_spectrum(f.sigma)) report.degenerate_spectrum = true;
    const Eigen::VectorXd gv = (f.u.transpose() * g.middleRows(start, rows) * f.v).diagonal();
    const Eigen::Index tail = std::min<Eigen::Index>(window, gv.size());
    double block_sum = 0.0;
    for (Eigen::Index i = gv.size() - tail; i < gv.size(); ++i) {
      block_sum -= std::min(gv(i), 0.0);
    }
    total += block_sum;
    report.per_block.push_back(gv);
  }
  report.score = total / static_cast<double>(clusters);
  return report;
}

std::vector<std::pair<std::string, double>> rank_matrices(
    const model_bundle& bundle, int clusters, int window, int q,
    const std::set<matrix_kind>& kinds) {
  if (q < 1) throw input_error("rank_matrices: q must be positive");

  struct entry {
    int layer;
    matrix_kind kind;
    std::string id;
    double score;
  };
  std::vector<entry> scored;
  for (const matrix_record& rec : bundle.records) {
    if (rec.role != matrix_role::weight || kinds.count(rec.kind) == 0) continue;
    const int gi = bundle.find(rec.layer, rec.kind, matrix_role::gradient);
    if (gi < 0) {
      throw input_error("missing gradient for layer " + std::to_string(rec.layer) + ", " +
                        to_string(rec.kind));
    }
    const Eigen::MatrixXd& grad = bundle.records[static_cast<std::size_t>(gi)].data;
    scored.push_back(
        {rec.layer, rec.kind, rec.id, matrix_score(rec.data, grad, clusters, window).score});
  }

  std::stable_sort(scored.begin(), scored.end(), [](const entry& a, const entry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.layer != b.layer) return a.layer < b.layer;
    return kind_order(a.kind) < kind_order(b.kind);
  });

  std::vector<std::pair<std::string, double>> out;
  for (const entry& e : scored) {
    if (static_cast<int>(out.size()) == q) break;
    out.emplace_back(e.id, e.score);
  }
  return out;
}

std::pair<double, double> correlation_report(const Eigen::MatrixXd& w,
                                             const Eigen::MatrixXd& g) {
  if (w.rows() != g.rows() || w.cols() != g.cols()) {
    throw input_error("correlation_report: shape mismatch");
  }
  const svd_factors f = thin_svd(w);
  if (f.rank < 3) throw input_error("correlation_report: effective rank below 3");
  const Eigen::VectorXd gv = (f.u.transpose() * g * f.v).diagonal();

  const double pearson_r = pearson(f.sigma, gv);
  const double spearman_rho = pearson(average_ranks(f.sigma), average_ranks(gv));
  return {pearson_r, spearman_rho};
}

}  // namespace claser
