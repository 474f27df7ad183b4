// SPDX-License-Identifier: Apache-2.0
#include "claser/search.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "claser/errors.hpp"
#include "claser/rng.hpp"
#include "claser/sv_gradient.hpp"

namespace claser {
namespace {

struct method_traits {
  bool uses_gradients = false;   // has a matrix-ranking step
  bool grads_on_calib = false;   // gradient pass on calib_n examples (else the
                                 // whole validation split)
  bool eval_on_calib = false;    // arm evaluation on calib_n examples
  bool clustered = false;        // searches cluster levels and scores per level
};

method_traits traits_for(search_method method) {
  switch (method) {
    case search_method::laser_full:      return {false, false, false, false};
    case search_method::laser_grads_std: return {true, false, false, false};
    case search_method::laser_100eval:   return {false, false, true, false};
    case search_method::laser_100g_std:  return {true, true, false, false};
    case search_method::laser_100g_100e: return {true, true, true, false};
    case search_method::cl_full:         return {false, false, false, true};
    case search_method::cl_100g_std:     return {true, true, false, true};
    case search_method::cl_100g_100e:    return {true, true, true, true};
  }
  throw input_error("unknown search method");
}

bool plan_less_destructive(const compression_plan& a, int layer_a, matrix_kind kind_a,
                           const compression_plan& b, int layer_b, matrix_kind kind_b) {
  if (a.rho != b.rho) return a.rho > b.rho;
  if (a.clusters != b.clusters) return a.clusters < b.clusters;
  if (layer_a != layer_b) return layer_a < layer_b;
  return kind_order(kind_a) < kind_order(kind_b);
}

}  // namespace

std::vector<int> sample_calibration(const std::vector<int>& split, int n,
                                    std::uint64_t seed) {
  if (n < 1) throw input_error("sample_calibration: n must be positive");
  if (static_cast<std::size_t>(n) > split.size()) {
    throw input_error("sample_calibration: n exceeds split size");
  }
  // Partial Fisher-Yates over a copy, then sort for reproducible order.
  std::vector<int> pool = split;
  rng gen(seed);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t j =
        static_cast<std::size_t>(i) +
        static_cast<std::size_t>(gen.uniform_index(pool.size() - static_cast<std::size_t>(i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    out.push_back(pool[static_cast<std::size_t>(i)]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::string, Eigen::MatrixXd> accumulate_gradients(
    evaluator& oracle, const model_bundle& bundle, const std::vector<int>& example_ids) {
  if (!oracle.has_gradients()) {
    throw capability_error("evaluator does not expose loss gradients");
  }
  std::vector<int> ordered = example_ids;
  std::sort(ordered.begin(), ordered.end());

  std::map<std::string, Eigen::MatrixXd> total;
  for (int id : ordered) {
    for (auto& [matrix_id, grad] : oracle.loss_gradients(bundle, id)) {
      auto it = total.find(matrix_id);
      if (it == total.end()) {
        total.emplace(matrix_id, std::move(grad));
      } else {
        it->second += grad;
      }
    }
  }
  return total;
}

search_outcome run_search(const model_bundle& bundle, const search_space& space,
                          const search_config& config, const evaluator_binding& binding) {
  if (space.layers.empty() || space.kinds.empty() || space.rhos.empty() ||
      space.cluster_levels.empty()) {
    throw input_error("run_search: empty search space");
  }
  for (double rho : space.rhos) {
    if (!(rho > 0.0 && rho < 1.0)) {
      throw input_error("run_search: rho grid must lie in (0, 1)");
    }
  }
  if (!binding.oracle) throw input_error("run_search: no evaluator");
  if (binding.dataset_size < 1) throw input_error("run_search: empty dataset");
  if (config.validation_fraction + config.test_fraction > 1.0 + 1e-12) {
    throw input_error("run_search: split fractions exceed the dataset");
  }

  const method_traits traits = traits_for(config.method);
  evaluator& oracle = *binding.oracle;

  // Splits: validation is the first fraction of ids, test the last.
  const int d = binding.dataset_size;
  const int val_n =
      static_cast<int>(std::floor(config.validation_fraction * static_cast<double>(d)));
  const int test_n =
      static_cast<int>(std::floor(config.test_fraction * static_cast<double>(d)));
  if (val_n < 1 || test_n < 1) throw input_error("run_search: split too small");
  std::vector<int> validation_ids(static_cast<std::size_t>(val_n));
  for (int i = 0; i < val_n; ++i) validation_ids[static_cast<std::size_t>(i)] = i;
  std::vector<int> test_ids(static_cast<std::size_t>(test_n));
  for (int i = 0; i < test_n; ++i) test_ids[static_cast<std::size_t>(i)] = d - test_n + i;

  // The 100-point subsample, shared by gradient scoring and arm evaluation
  // when both run on it.
  std::vector<int> calib_ids;
  if (traits.grads_on_calib || traits.eval_on_calib) {
    calib_ids = sample_calibration(validation_ids, config.calib_n, config.seed);
  }
  const std::vector<int>& eval_ids = traits.eval_on_calib ? calib_ids : validation_ids;

  // Candidate matrices: every (layer, kind) weight in the space, or the top
  // q by windowed negative-tail score when the method ranks by gradients.
  struct candidate {
    int record_index;
    int layer;
    matrix_kind kind;
  };
  std::vector<candidate> candidates;
  search_outcome outcome;

  const std::vector<int> score_levels =
      traits.clustered ? space.cluster_levels : std::vector<int>{1};

  if (traits.uses_gradients) {
    const std::vector<int>& grad_ids = traits.grads_on_calib ? calib_ids : validation_ids;
    const std::map<std::string, Eigen::MatrixXd> grads =
        accumulate_gradients(oracle, bundle, grad_ids);

    struct scored_candidate {
      candidate c;
      double score;
    };
    std::vector<scored_candidate> scored;
    for (int layer : space.layers) {
      for (matrix_kind kind : space.kinds) {
        const int idx = bundle.find(layer, kind, matrix_role::weight);
        if (idx < 0) continue;
        const matrix_record& rec = bundle.records[static_cast<std::size_t>(idx)];
        const auto git = grads.find(rec.id);
        if (git == grads.end()) {
          throw input_error("run_search: no gradient accumulated for " + rec.id);
        }
        // Mean of the per-level scores: the ranking step is run once per
        // cluster level and the levels vote equally. Levels larger than the
        // row count are infeasible; a matrix supporting none of them cannot
        // be compressed in this space and is not a candidate.
        double mean_score = 0.0;
        int feasible = 0;
        for (int level : score_levels) {
          if (level > rec.data.rows()) continue;
          mean_score += matrix_score(rec.data, git->second, level, config.window).score;
          ++feasible;
        }
        if (feasible == 0) continue;
        mean_score /= static_cast<double>(feasible);
        scored.push_back({{idx, layer, kind}, mean_score});
      }
    }
    if (scored.empty()) throw input_error("run_search: no candidate matrices in the space");

    std::stable_sort(scored.begin(), scored.end(),
                     [](const scored_candidate& a, const scored_candidate& b) {
                       if (a.score != b.score) return a.score > b.score;
                       if (a.c.layer != b.c.layer) return a.c.layer < b.c.layer;
                       return kind_order(a.c.kind) < kind_order(b.c.kind);
                     });
    for (const scored_candidate& s : scored) {
      outcome.ranked_matrices.emplace_back(
          bundle.records[static_cast<std::size_t>(s.c.record_index)].id, s.score);
      if (static_cast<int>(candidates.size()) < config.q) candidates.push_back(s.c);
    }
  } else {
    for (int layer : space.layers) {
      for (matrix_kind kind : space.kinds) {
        const int idx = bundle.find(layer, kind, matrix_role::weight);
        if (idx < 0) continue;
        candidates.push_back({idx, layer, kind});
      }
    }
    if (candidates.empty()) throw input_error("run_search: no candidate matrices in the space");
  }

  // Baseline arm first, then every (candidate, rho, K) in canonical order.
  struct arm_result {
    compression_plan plan;
    int layer = -1;
    matrix_kind kind = matrix_kind::mlp_in;
    double accuracy = 0.0;
  };
  arm_result best;
  {
    const auto [correct, total_count] = oracle.evaluate(bundle, nullptr, eval_ids);
    best.plan = compression_plan{};  // rho = 1.0: the untouched model
    best.accuracy = total_count > 0
                        ? static_cast<double>(correct) / static_cast<double>(total_count)
                        : 0.0;
  }
  outcome.candidates_evaluated = 1;

  for (const candidate& c : candidates) {
    const matrix_record& rec = bundle.records[static_cast<std::size_t>(c.record_index)];
    for (double rho : space.rhos) {
      for (int level : space.cluster_levels) {
        // A matrix with fewer rows than K cannot be split K ways; such arms
        // are infeasible, not failures.
        if (level > rec.data.rows()) continue;
        compression_plan plan{rec.id, rho, level, partition_mode::block};
        const model_bundle compressed = apply_plan(bundle, plan);
        const auto [correct, total_count] = oracle.evaluate(compressed, &plan, eval_ids);
        const double accuracy =
            total_count > 0 ? static_cast<double>(correct) / static_cast<double>(total_count)
                            : 0.0;
        ++outcome.candidates_evaluated;
        const bool wins =
            accuracy > best.accuracy ||
            (accuracy == best.accuracy &&
             best.layer >= 0 &&  // never displace the baseline on a tie
             plan_less_destructive(plan, c.layer, c.kind, best.plan, best.layer, best.kind));
        if (wins) best = {plan, c.layer, c.kind, accuracy};
      }
    }
  }

  outcome.best_plan = best.plan;
  outcome.baseline_won = best.layer < 0;
  outcome.validation_accuracy = best.accuracy;

  // Test accuracy of the winner.
  {
    const model_bundle final_bundle =
        outcome.baseline_won ? bundle : apply_plan(bundle, best.plan);
    const auto [correct, total_count] = oracle.evaluate(
        final_bundle, outcome.baseline_won ? nullptr : &best.plan, test_ids);
    outcome.test_accuracy =
        total_count > 0 ? static_cast<double>(correct) / static_cast<double>(total_count) : 0.0;
  }

  // Forward-pass equivalents, composed from the live configuration exactly
  // like the closed-form cost model: gradient passes cost 2.5 forwards and
  // run once per cluster level, every arm costs one evaluation-set pass, the
  // baseline check runs once, and the final test pass covers the test split.
  {
    const double dd = static_cast<double>(d);
    const double eval_size = traits.eval_on_calib
                                 ? static_cast<double>(config.calib_n)
                                 : config.validation_fraction * dd;
    double fpe = config.test_fraction * dd + eval_size;  // test + baseline
    fpe += static_cast<double>(outcome.candidates_evaluated - 1) * eval_size;
    if (traits.uses_gradients) {
      const double grad_size = traits.grads_on_calib
                                   ? static_cast<double>(config.calib_n)
                                   : config.validation_fraction * dd;
      fpe += 2.5 * static_cast<double>(score_levels.size()) * grad_size;
    }
    outcome.forward_pass_equivalents = fpe;
  }
  return outcome;
}

std::pair<search_space, search_config> preset_space(model_preset preset,
                                                    search_method method) {
  const method_traits traits = traits_for(method);
  search_space space;
  const int layers = preset == model_preset::gptj ? 28 : 12;
  for (int i = 0; i < layers; ++i) space.layers.push_back(i);
  space.kinds = {matrix_kind::mlp_in, matrix_kind::mlp_out};
  space.rhos = {0.9, 0.8, 0.6, 0.4, 0.2, 0.1, 0.05, 0.01, 0.005};
  if (!traits.clustered) {
    space.cluster_levels = {1};
  } else if (method == search_method::cl_full) {
    space.cluster_levels = {1, 2, 4, 8, 16};
  } else if (preset == model_preset::gptj) {
    space.cluster_levels = {2, 4, 8, 16};
  } else {
    space.cluster_levels = {1, 2, 4, 8};
  }
  space.include_baseline = true;

  search_config config;
  config.method = method;
  if (method == search_method::cl_100g_std) {
    config.q = 7;
  } else if (method == search_method::cl_100g_100e) {
    config.q = preset == model_preset::gptj ? 5 : 7;
  } else {
    config.q = 5;
  }
  return {space, config};
}

// --- toy_evaluator -------------------------------------------------------

toy_evaluator::toy_evaluator(std::vector<toy_model> models, toy_dataset data)
    : models_(std::move(models)), data_(std::move(data)) {
  if (models_.empty()) throw input_error("toy_evaluator: no models");
}

model_bundle toy_evaluator::make_bundle(const std::string& name) const {
  model_bundle bundle;
  bundle.name = name;
  bundle.layer_count = static_cast<int>(models_.size());
  for (std::size_t layer = 0; layer < models_.size(); ++layer) {
    const std::string tag = "layer" + std::to_string(layer);
    const toy_model& m = models_[layer];
    bundle.records.push_back({tag + ".mlp_in.weight", static_cast<int>(layer),
                              matrix_kind::mlp_in, matrix_role::weight, matrix_dtype::f64,
                              m.w1});
    bundle.records.push_back({tag + ".mlp_out.weight", static_cast<int>(layer),
                              matrix_kind::mlp_out, matrix_role::weight, matrix_dtype::f64,
                              m.w2});
  }
  return bundle;
}

std::vector<toy_model> toy_evaluator::rebuild(const model_bundle& bundle) const {
  std::vector<toy_model> rebuilt = models_;
  for (std::size_t layer = 0; layer < rebuilt.size(); ++layer) {
    const int w1 = bundle.find(static_cast<int>(layer), matrix_kind::mlp_in,
                               matrix_role::weight);
    const int w2 = bundle.find(static_cast<int>(layer), matrix_kind::mlp_out,
                               matrix_role::weight);
    if (w1 < 0 || w2 < 0) {
      throw input_error("toy_evaluator: bundle is missing matrices for layer " +
                        std::to_string(layer));
    }
    rebuilt[layer].w1 = bundle.records[static_cast<std::size_t>(w1)].data;
    rebuilt[layer].w2 = bundle.records[static_cast<std::size_t>(w2)].data;
  }
  return rebuilt;
}

std::pair<long, long> toy_evaluator::evaluate(const model_bundle& bundle,
                                              const compression_plan* /*plan*/,
                                              const std::vector<int>& ids) {
  const std::vector<toy_model> models = rebuild(bundle);
  long correct = 0;
  for (const toy_model& m : models) {
    for (int id : ids) {
      const Eigen::VectorXd& x = data_.inputs.at(static_cast<std::size_t>(id));
      const auto [logits, probs] = forward(m, x);
      Eigen::Index argmax = 0;
      logits.maxCoeff(&argmax);
      if (static_cast<int>(argmax) == data_.labels[static_cast<std::size_t>(id)]) ++correct;
    }
  }
  return {correct, static_cast<long>(ids.size()) * static_cast<long>(models.size())};
}

std::map<std::string, Eigen::MatrixXd> toy_evaluator::loss_gradients(
    const model_bundle& bundle, int example_id) {
  const std::vector<toy_model> models = rebuild(bundle);
  const Eigen::VectorXd& x = data_.inputs.at(static_cast<std::size_t>(example_id));
  const int label = data_.labels[static_cast<std::size_t>(example_id)];

  std::map<std::string, Eigen::MatrixXd> out;
  for (std::size_t layer = 0; layer < models.size(); ++layer) {
    const toy_gradients g = loss_and_gradients(models[layer], x, label);
    const std::string tag = "layer" + std::to_string(layer);
    out.emplace(tag + ".mlp_in.weight", g.g_w1);
    out.emplace(tag + ".mlp_out.weight", g.g_w2);
  }
  return out;
}

// --- replay_evaluator ----------------------------------------------------

replay_evaluator::replay_evaluator(surface table) : table_(std::move(table)) {}

std::pair<long, long> replay_evaluator::evaluate(const model_bundle& bundle,
                                                 const compression_plan* plan,
                                                 const std::vector<int>& ids) {
  const bool test_phase = !ids.empty() && ids.front() >= table_.test_split_start;

  double accuracy;
  if (plan == nullptr || plan->rho == 1.0) {
    accuracy = test_phase ? table_.baseline_test_accuracy : table_.baseline_accuracy;
  } else {
    accuracy = test_phase ? table_.default_test_accuracy : table_.default_accuracy;
    const int idx = bundle.find_id(plan->matrix_id);
    if (idx < 0) throw input_error("replay_evaluator: unknown matrix id " + plan->matrix_id);
    const matrix_record& rec = bundle.records[static_cast<std::size_t>(idx)];
    for (const arm_entry& arm : table_.arms) {
      if (arm.layer == rec.layer && arm.kind == rec.kind &&
          std::abs(arm.rho - plan->rho) < 1e-9 && arm.clusters == plan->clusters) {
        accuracy = test_phase ? arm.test_accuracy : arm.accuracy;
        break;
      }
    }
  }
  const long total = static_cast<long>(ids.size());
  return {static_cast<long>(std::llround(accuracy * static_cast<double>(total))), total};
}

std::map<std::string, Eigen::MatrixXd> replay_evaluator::loss_gradients(
    const model_bundle& /*bundle*/, int /*example_id*/) {
  throw capability_error("replay evaluator has no gradient capability");
}

}  // namespace claser
