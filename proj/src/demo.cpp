// SPDX-License-Identifier: Apache-2.0
#include "claser/demo.hpp"

#include <cmath>
#include <memory>

#include "claser/errors.hpp"
#include "claser/rng.hpp"

namespace claser {

demo_outcome run_demo(const demo_config& config) {
  if (config.planted_layer < 0 || config.planted_layer >= config.model_count) {
    throw input_error("run_demo: planted layer out of range");
  }

  rng derive(config.seed);
  const std::uint64_t data_seed = derive.next_u64();
  std::vector<std::uint64_t> model_seeds;
  for (int i = 0; i < config.model_count; ++i) model_seeds.push_back(derive.next_u64());
  const std::uint64_t plant_seed = derive.next_u64();
  const std::uint64_t search_seed = derive.next_u64();

  const toy_dataset data =
      make_blob_dataset(config.input_dim, config.classes, config.examples,
                        config.separation, config.noise, data_seed);

  std::vector<toy_model> models;
  for (int i = 0; i < config.model_count; ++i) {
    toy_model m = init_toy(config.input_dim, config.hidden_dim, config.classes,
                           model_seeds[static_cast<std::size_t>(i)]);
    m.w1 *= config.w1_init_scale;
    models.push_back(train(m, data, config.train_steps, config.learning_rate,
                           model_seeds[static_cast<std::size_t>(i)]));
  }

  const int d = config.examples;
  const int test_n = static_cast<int>(std::floor(0.8 * static_cast<double>(d)));
  std::vector<int> test_ids(static_cast<std::size_t>(test_n));
  for (int i = 0; i < test_n; ++i) test_ids[static_cast<std::size_t>(i)] = d - test_n + i;

  demo_outcome out;
  {
    toy_evaluator clean(models, data);
    const model_bundle clean_bundle = clean.make_bundle("demo");
    const auto [correct, total] = clean.evaluate(clean_bundle, nullptr, test_ids);
    out.clean_test_accuracy = static_cast<double>(correct) / static_cast<double>(total);
  }

  models[static_cast<std::size_t>(config.planted_layer)] =
      plant_noise(models[static_cast<std::size_t>(config.planted_layer)], toy_target::w1,
                  config.planted_rank, config.noise_scale, plant_seed);
  out.planted_id = "layer" + std::to_string(config.planted_layer) + ".mlp_in.weight";

  auto oracle = std::make_shared<toy_evaluator>(models, data);
  const model_bundle bundle = oracle->make_bundle("demo");
  {
    const auto [correct, total] = oracle->evaluate(bundle, nullptr, test_ids);
    out.baseline_test_accuracy = static_cast<double>(correct) / static_cast<double>(total);
  }

  search_space space;
  for (int i = 0; i < config.model_count; ++i) space.layers.push_back(i);
  space.kinds = {matrix_kind::mlp_in, matrix_kind::mlp_out};
  space.rhos = config.rhos;
  space.cluster_levels = config.cluster_levels;

  search_config sc;
  sc.method = search_method::cl_100g_std;
  sc.q = config.q;
  sc.window = config.window;
  sc.calib_n = config.calib_n;
  sc.seed = search_seed;

  out.search = run_search(bundle, space, sc, {oracle, d});
  out.planted_ranked_first =
      !out.search.ranked_matrices.empty() &&
      out.search.ranked_matrices.front().first == out.planted_id;
  out.improved = out.search.test_accuracy > out.baseline_test_accuracy;
  return out;
}

}  // namespace claser
