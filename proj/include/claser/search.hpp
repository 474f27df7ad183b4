// SPDX-License-Identifier: Apache-2.0
//
// End-to-end adaptation search: calibration sampling, gradient accumulation,
// matrix ranking, candidate-grid evaluation through a pluggable evaluator,
// and final plan selection. Also provides the exhaustive sweep baselines.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "claser/cost_model.hpp"
#include "claser/matrix_store.hpp"
#include "claser/rank_reduction.hpp"
#include "claser/toy_network.hpp"

namespace claser {

struct search_space {
  std::vector<int> layers;
  std::vector<matrix_kind> kinds;
  std::vector<double> rhos;          // in (0, 1); 1.0 is the baseline arm
  std::vector<int> cluster_levels;   // K values
  bool include_baseline = true;
};

struct search_config {
  search_method method = search_method::laser_full;
  int q = 5;            // matrices kept after ranking
  int window = 20;      // negative-tail scoring window
  int calib_n = 100;    // examples for the 100-gradient / 100-eval variants
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;
  double test_fraction = 0.8;
};

// Accuracy oracle. evaluate() sees the already-compressed bundle plus the
// plan that produced it (nullptr for the baseline); lookup-table evaluators
// key on the plan, model-backed evaluators ignore it.
class evaluator {
 public:
  virtual ~evaluator() = default;
  virtual bool has_gradients() const = 0;
  // (correct, total) over the given example ids.
  virtual std::pair<long, long> evaluate(const model_bundle& bundle,
                                         const compression_plan* plan,
                                         const std::vector<int>& ids) = 0;
  // Per-weight-matrix loss gradient for one example, keyed by record id.
  // Throws capability_error unless has_gradients().
  virtual std::map<std::string, Eigen::MatrixXd> loss_gradients(
      const model_bundle& bundle, int example_id) = 0;
};

struct evaluator_binding {
  std::shared_ptr<evaluator> oracle;
  int dataset_size = 0;  // example ids are [0, dataset_size)
};

struct search_outcome {
  compression_plan best_plan;
  bool baseline_won = false;  // best_plan.rho == 1.0, no record touched
  double validation_accuracy = 0.0;
  double test_accuracy = 0.0;
  long candidates_evaluated = 0;  // arms including the baseline
  double forward_pass_equivalents = 0.0;
  std::vector<std::pair<std::string, double>> ranked_matrices;
};

// Uniform sample of n distinct ids, sorted ascending; deterministic per
// (split, n, seed).
std::vector<int> sample_calibration(const std::vector<int>& split, int n,
                                    std::uint64_t seed);

// Sum of per-example loss gradients over the ids, in ascending id order,
// keyed by weight-record id.
std::map<std::string, Eigen::MatrixXd> accumulate_gradients(
    evaluator& oracle, const model_bundle& bundle,
    const std::vector<int>& example_ids);

// Runs the configured method over the space:
//   1. (gradient methods) accumulate gradients on the calibration set and
//      rank matrices by the windowed negative-tail score, averaged over the
//      configured cluster levels; keep the top q.
//   2. Evaluate every (matrix, rho, K) arm plus the baseline on the
//      validation split (or the 100-example subsample for *_100e methods).
//   3. Pick the argmax validation accuracy; ties prefer higher rho, then
//      smaller K, then lower layer, then kind order. Report test accuracy of
//      the winner on the test split and the method's forward-pass
//      equivalents composed from the live configuration.
search_outcome run_search(const model_bundle& bundle,
                          const search_space& space,
                          const search_config& config,
                          const evaluator_binding& binding);

// The experiment grids: 28 layers (gptj) or 12 (roberta), in/out matrices,
// the nine-point rho grid, and the method's cluster levels and q.
std::pair<search_space, search_config> preset_space(model_preset preset,
                                                    search_method method);

// --- Evaluators ---------------------------------------------------------

// Wraps a list of toy models whose weight matrices live in a bundle: layer L
// holds records (mlp_in = w1, mlp_out = w2). Biases stay here, outside the
// bundle; compression plans only ever touch the matrices.
class toy_evaluator : public evaluator {
 public:
  toy_evaluator(std::vector<toy_model> models, toy_dataset data);

  bool has_gradients() const override { return true; }
  std::pair<long, long> evaluate(const model_bundle& bundle,
                                 const compression_plan* plan,
                                 const std::vector<int>& ids) override;
  std::map<std::string, Eigen::MatrixXd> loss_gradients(
      const model_bundle& bundle, int example_id) override;

  // Bundle holding every model's w1/w2 as weight records.
  model_bundle make_bundle(const std::string& name) const;

 private:
  std::vector<toy_model> rebuild(const model_bundle& bundle) const;

  std::vector<toy_model> models_;
  toy_dataset data_;
};

// Deterministic lookup-table oracle for testing search logic: maps an arm
// (layer, kind, rho, K) to validation/test accuracy, with defaults for
// unlisted arms and the baseline. Has no gradient capability. Example ids at
// or beyond test_split_start read the test-accuracy column.
class replay_evaluator : public evaluator {
 public:
  struct arm_entry {
    int layer = 0;
    matrix_kind kind = matrix_kind::mlp_in;
    double rho = 1.0;
    int clusters = 1;
    double accuracy = 0.0;
    double test_accuracy = 0.0;
  };

  struct surface {
    double baseline_accuracy = 0.0;
    double baseline_test_accuracy = 0.0;
    double default_accuracy = 0.0;
    double default_test_accuracy = 0.0;
    std::vector<arm_entry> arms;
    int test_split_start = 0;
  };

  explicit replay_evaluator(surface table);

  bool has_gradients() const override { return false; }
  std::pair<long, long> evaluate(const model_bundle& bundle,
                                 const compression_plan* plan,
                                 const std::vector<int>& ids) override;
  std::map<std::string, Eigen::MatrixXd> loss_gradients(
      const model_bundle& bundle, int example_id) override;

 private:
  surface table_;
};

}  // namespace claser
