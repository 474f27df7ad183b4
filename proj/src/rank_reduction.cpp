// SPDX-License-Identifier: Apache-2.0
#include "claser/rank_reduction.hpp"

#include <cmath>
#include <string>

#include "claser/errors.hpp"
#include "claser/linalg.hpp"

namespace claser {

Eigen::Index rank_from_rho(Eigen::Index rows_k, Eigen::Index cols, double rho) {
  if (rows_k < 1 || cols < 1) throw input_error("rank_from_rho: empty block");
  if (!(rho > 0.0 && rho <= 1.0)) throw input_error("rank_from_rho: rho must be in (0, 1]");
  const double scaled = rho * static_cast<double>(std::min(rows_k, cols));
  const Eigen::Index j = static_cast<Eigen::Index>(std::floor(scaled));
  return std::max<Eigen::Index>(1, j);
}

Eigen::MatrixXd compress_blockwise(const Eigen::MatrixXd& w, int clusters, double rho) {
  if (rho == 1.0) return w;  // exact baseline no-op
  const row_block_partition part = split_rows(w.rows(), clusters);
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(part.block_ranges.size());
  for (const auto& [start, end] : part.block_ranges) {
    const Eigen::Index rows = end - start;
    const Eigen::Index j = rank_from_rho(rows, w.cols(), rho);
    blocks.push_back(truncate(thin_svd(w.middleRows(start, rows)), j));
  }
  return stack_rows(blocks);
}

Eigen::MatrixXd compress_clustered(const Eigen::MatrixXd& w,
                                   const row_assignment& assignment, double rho) {
  if (static_cast<Eigen::Index>(assignment.assign.size()) != w.rows()) {
    throw input_error("compress_clustered: assignment length does not match rows");
  }
  for (int a : assignment.assign) {
    if (a < 0 || a >= assignment.clusters) {
      throw input_error("compress_clustered: cluster index out of range");
    }
  }
  if (rho == 1.0) return w;  // exact baseline no-op

  Eigen::MatrixXd out(w.rows(), w.cols());
  for (int k = 0; k < assignment.clusters; ++k) {
    std::vector<Eigen::Index> members;
    for (std::size_t i = 0; i < assignment.assign.size(); ++i) {
      if (assignment.assign[i] == k) members.push_back(static_cast<Eigen::Index>(i));
    }
    if (members.empty()) continue;

    Eigen::MatrixXd cluster(static_cast<Eigen::Index>(members.size()), w.cols());
    for (std::size_t i = 0; i < members.size(); ++i) {
      cluster.row(static_cast<Eigen::Index>(i)) = w.row(members[i]);
    }
    const Eigen::Index j =
        rank_from_rho(static_cast<Eigen::Index>(members.size()), w.cols(), rho);
    const Eigen::MatrixXd compressed = truncate(thin_svd(cluster), j);
    for (std::size_t i = 0; i < members.size(); ++i) {
      out.row(members[i]) = compressed.row(static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

model_bundle apply_plan(const model_bundle& bundle, const compression_plan& plan) {
  const int idx = bundle.find_id(plan.matrix_id);
  if (idx < 0) throw input_error("apply_plan: unknown matrix id: " + plan.matrix_id);
  const matrix_record& target = bundle.records[static_cast<std::size_t>(idx)];
  if (target.role != matrix_role::weight) {
    throw input_error("apply_plan: " + plan.matrix_id + " is not a weight record");
  }
  if (!(plan.rho > 0.0 && plan.rho <= 1.0)) {
    throw input_error("apply_plan: rho must be in (0, 1]");
  }

  model_bundle out = bundle;
  if (plan.rho == 1.0) return out;  // baseline arm: bit-identical bundle

  Eigen::MatrixXd& data = out.records[static_cast<std::size_t>(idx)].data;
  if (plan.mode == partition_mode::block) {
    data = compress_blockwise(data, plan.clusters, plan.rho);
  } else {
    const Eigen::Index largest_block =
        split_rows(data.rows(), plan.clusters).block_ranges.front().second;
    const Eigen::Index dim = rank_from_rho(largest_block, data.cols(), plan.rho);
    const em_result em = k_subspaces_em(
        data, plan.clusters, static_cast<int>(std::min<Eigen::Index>(dim, data.cols())),
        block_assignment(data.rows(), plan.clusters));
    data = compress_clustered(data, em.assignment, plan.rho);
  }
  return out;
}

}  // namespace claser
