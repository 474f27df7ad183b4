// SPDX-License-Identifier: Apache-2.0
//
// Closed-form compute model for every search method, in forward-pass
// equivalents: cost(d) = slope * d + intercept for dataset size d. A backward
// pass counts as 2.5 forward passes. Speedup is measured against the
// exhaustive single-subspace search on the same preset.
#pragma once

#include <string>
#include <vector>

namespace claser {

enum class search_method {
  laser_full,       // exhaustive (layer, kind, rho) sweep, K = 1
  laser_grads_std,  // gradient ranking on the validation split, standard eval
  laser_100eval,    // exhaustive sweep, evaluation on 100 examples
  laser_100g_std,   // gradient ranking on 100 examples, standard eval
  laser_100g_100e,  // gradient ranking and evaluation on the same 100
  cl_full,          // exhaustive sweep including cluster levels
  cl_100g_std,      // clustered, gradient ranking on 100, standard eval
  cl_100g_100e,     // clustered, gradient ranking and evaluation on 100
};

enum class model_preset { gptj, roberta };

const char* to_string(search_method method);
const char* to_string(model_preset preset);
search_method parse_search_method(const std::string& text);
model_preset parse_model_preset(const std::string& text);

struct cost_formula {
  search_method method;
  model_preset preset;
  double slope = 0.0;
  double intercept = 0.0;
};

// Pinned constants per (method, preset). laser_grads_std, laser_100g_std,
// laser_100g_100e and cl_100g_std are preset-independent.
cost_formula formula_for(search_method method, model_preset preset);

// Rebuilds the same formula from its factored ingredients (layer count,
// 2 matrices per layer, 9 rates, cluster levels, top-q, the 2.5x backward
// factor, the 0.2/0.8 split fractions, 100-example calibration). Must equal
// formula_for exactly; exists so the pinned constants and the composition
// cannot drift apart.
cost_formula composed_formula(search_method method, model_preset preset);

double cost(search_method method, model_preset preset, double d);

// cost(laser_full, preset, d) / cost(method, preset, d)
double speedup(search_method method, model_preset preset, double d);

// The eight benchmark datasets with their sizes, in canonical order.
const std::vector<std::pair<std::string, int>>& benchmark_dataset_sizes();

struct speedup_row {
  std::string dataset;
  int size = 0;
  double value = 0.0;  // unrounded
};

struct speedup_summary {
  std::vector<speedup_row> rows;
  double mean = 0.0;  // arithmetic mean of the unrounded speedups
};

speedup_summary speedup_table(
    search_method method, model_preset preset,
    const std::vector<std::pair<std::string, int>>& sizes =
        benchmark_dataset_sizes());

}  // namespace claser
