// SPDX-License-Identifier: Apache-2.0
//
// claser: score, compress, cluster, cost, sweep, demo. Machine-readable JSON
// reports go to stdout; human-readable summaries go to stderr. Exit codes:
// 0 success, 2 input error, 3 I/O error, 4 capability error, 5 property
// failure.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "claser/cost_model.hpp"
#include "claser/demo.hpp"
#include "claser/errors.hpp"
#include "claser/linalg.hpp"
#include "claser/matrix_store.hpp"
#include "claser/rank_reduction.hpp"
#include "claser/report.hpp"
#include "claser/rng.hpp"
#include "claser/search.hpp"
#include "claser/subspace.hpp"
#include "claser/sv_gradient.hpp"
#include "claser/toy_network.hpp"

namespace {

using nlohmann::json;

void emit(const json& report) { std::cout << report.dump(2) << "\n"; }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw claser::io_error("cannot open " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

json parse_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw claser::input_error(path + ": " + e.what());
  }
}

json plan_as_tuple(const claser::model_bundle& bundle, const claser::compression_plan& plan,
                   bool baseline) {
  if (baseline) return json::array({nullptr, nullptr, 1.0, 1});
  const int idx = bundle.find_id(plan.matrix_id);
  json tau = nullptr;
  json layer = nullptr;
  if (idx >= 0) {
    const claser::matrix_record& rec = bundle.records[static_cast<std::size_t>(idx)];
    tau = claser::to_string(rec.kind);
    layer = rec.layer;
  }
  return json::array({tau, layer, plan.rho, plan.clusters});
}

json outcome_payload(const claser::model_bundle& bundle, const claser::search_outcome& outcome) {
  json ranked = json::array();
  for (const auto& [id, score] : outcome.ranked_matrices) {
    ranked.push_back(json::array({id, score}));
  }
  return json{{"best_plan", plan_as_tuple(bundle, outcome.best_plan, outcome.baseline_won)},
              {"baseline_won", outcome.baseline_won},
              {"validation_accuracy", outcome.validation_accuracy},
              {"test_accuracy", outcome.test_accuracy},
              {"candidates_evaluated", outcome.candidates_evaluated},
              {"forward_pass_equivalents", outcome.forward_pass_equivalents},
              {"ranked_matrices", ranked}};
}

// --- score ---------------------------------------------------------------

struct score_flags {
  std::string manifest;
  int clusters = 1;
  int window = 20;
  int top = 5;
  std::string kinds = "mlp_in,mlp_out";
};

int run_score(const score_flags& flags) {
  std::set<claser::matrix_kind> kinds;
  std::stringstream list(flags.kinds);
  for (std::string item; std::getline(list, item, ',');) {
    if (!item.empty()) kinds.insert(claser::parse_matrix_kind(item));
  }
  if (kinds.empty()) throw claser::input_error("--kinds selected nothing");

  const claser::model_bundle bundle = claser::load_bundle(flags.manifest);
  const auto ranked =
      claser::rank_matrices(bundle, flags.clusters, flags.window, flags.top, kinds);

  json rows = json::array();
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const int idx = bundle.find_id(ranked[i].first);
    const claser::matrix_record& rec = bundle.records[static_cast<std::size_t>(idx)];
    const int gidx = bundle.find(rec.layer, rec.kind, claser::matrix_role::gradient);
    const claser::score_report report =
        claser::matrix_score(rec.data, bundle.records[static_cast<std::size_t>(gidx)].data,
                             flags.clusters, flags.window);
    rows.push_back(json{{"rank", i + 1},
                        {"matrix_id", rec.id},
                        {"layer", rec.layer},
                        {"kind", claser::to_string(rec.kind)},
                        {"score", ranked[i].second},
                        {"degenerate_spectrum", report.degenerate_spectrum}});
    std::fprintf(stderr, "%2zu. %-28s score %.6g%s\n", i + 1, rec.id.c_str(),
                 ranked[i].second, report.degenerate_spectrum ? "  (degenerate spectrum)" : "");
  }

  emit(claser::make_report(
      "score", claser::digest_file(flags.manifest),
      json{{"manifest", flags.manifest},
           {"clusters", flags.clusters},
           {"window", flags.window},
           {"top", flags.top},
           {"rows", rows}}));
  return 0;
}

// --- compress --------------------------------------------------------------

struct compress_flags {
  std::string manifest;
  std::string target;
  double rho = 1.0;
  int clusters = 1;
  std::string mode = "block";
  std::string out;
};

int run_compress(const compress_flags& flags) {
  const auto colon = flags.target.find(':');
  if (colon == std::string::npos) {
    throw claser::input_error("--target must be layer:kind, got '" + flags.target + "'");
  }
  int layer = 0;
  try {
    std::size_t used = 0;
    layer = std::stoi(flags.target.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw claser::input_error("--target layer must be an integer, got '" +
                              flags.target.substr(0, colon) + "'");
  }
  const claser::matrix_kind kind = claser::parse_matrix_kind(flags.target.substr(colon + 1));
  if (flags.mode != "block" && flags.mode != "em") {
    throw claser::input_error("--mode must be block or em, got '" + flags.mode + "'");
  }

  const claser::model_bundle bundle = claser::load_bundle(flags.manifest);
  const int idx = bundle.find(layer, kind, claser::matrix_role::weight);
  if (idx < 0) {
    throw claser::input_error("no weight matrix at layer " + std::to_string(layer) +
                              ", kind " + claser::to_string(kind));
  }
  const claser::matrix_record& rec = bundle.records[static_cast<std::size_t>(idx)];

  claser::compression_plan plan;
  plan.matrix_id = rec.id;
  plan.rho = flags.rho;
  plan.clusters = flags.clusters;
  plan.mode = flags.mode == "em" ? claser::partition_mode::em_cluster
                                 : claser::partition_mode::block;

  const claser::model_bundle compressed = claser::apply_plan(bundle, plan);
  const Eigen::MatrixXd& before = rec.data;
  const Eigen::MatrixXd& after = compressed.records[static_cast<std::size_t>(idx)].data;

  json payload{{"manifest", flags.manifest},
               {"matrix_id", rec.id},
               {"target", json{{"layer", layer}, {"kind", claser::to_string(kind)}}},
               {"rho", flags.rho},
               {"clusters", flags.clusters},
               {"mode", flags.mode},
               {"rows", before.rows()},
               {"cols", before.cols()},
               {"pre_frobenius", before.norm()},
               {"post_frobenius", after.norm()},
               {"out", flags.out}};

  if (plan.mode == claser::partition_mode::block || flags.rho == 1.0) {
    const claser::row_block_partition part = claser::split_rows(before.rows(), flags.clusters);
    json block_rows = json::array();
    json block_ranks = json::array();
    for (const auto& [start, end] : part.block_ranges) {
      block_rows.push_back(end - start);
      block_ranks.push_back(claser::rank_from_rho(end - start, before.cols(), flags.rho));
    }
    payload["block_rows"] = block_rows;
    payload["block_ranks"] = block_ranks;
  } else {
    // Mirror the em path: same initialization, dimension, and iteration
    // limits as the plan application, so the trace matches what was written.
    const claser::row_block_partition part = claser::split_rows(before.rows(), flags.clusters);
    Eigen::Index largest = 0;
    for (const auto& [start, end] : part.block_ranges) largest = std::max(largest, end - start);
    const Eigen::Index dim =
        std::min(claser::rank_from_rho(largest, before.cols(), flags.rho), before.cols());
    const claser::em_result em =
        claser::k_subspaces_em(before, flags.clusters, static_cast<int>(dim),
                               claser::block_assignment(before.rows(), flags.clusters));
    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(flags.clusters), 0);
    for (int a : em.assignment.assign) ++sizes[static_cast<std::size_t>(a)];
    json cluster_rows = json::array();
    json block_ranks = json::array();
    for (Eigen::Index size : sizes) {
      cluster_rows.push_back(size);
      block_ranks.push_back(
          size == 0 ? 0 : claser::rank_from_rho(size, before.cols(), flags.rho));
    }
    payload["cluster_rows"] = cluster_rows;
    payload["block_ranks"] = block_ranks;
    payload["cost_trace_length"] = em.cost_trace.size();
    payload["final_cost"] = em.cost_trace.back();
  }

  claser::save_bundle(compressed, flags.out);
  std::fprintf(stderr, "%s: %lldx%lld, |W|_F %.6g -> %.6g, wrote %s\n", rec.id.c_str(),
               static_cast<long long>(before.rows()), static_cast<long long>(before.cols()),
               before.norm(), after.norm(), flags.out.c_str());

  emit(claser::make_report("compress", claser::digest_file(flags.manifest),
                           std::move(payload)));
  return 0;
}

// --- cluster ---------------------------------------------------------------

struct cluster_flags {
  std::string matrix;
  int k = 2;
  int dim = 1;
  int max_iter = 50;
  double tol = 1e-9;
};

int run_cluster(const cluster_flags& flags) {
  const claser::stored_matrix m = claser::read_matrix_file(flags.matrix);
  const claser::em_result em =
      claser::k_subspaces_em(m.data, flags.k, flags.dim,
                             claser::block_assignment(m.data.rows(), flags.k),
                             flags.max_iter, flags.tol);

  std::vector<long> histogram(static_cast<std::size_t>(flags.k), 0);
  for (int a : em.assignment.assign) ++histogram[static_cast<std::size_t>(a)];

  std::fprintf(stderr, "%lld rows -> %d clusters (dim %d), %zu iterations, final cost %.6g\n",
               static_cast<long long>(m.data.rows()), flags.k, flags.dim,
               em.cost_trace.size(), em.cost_trace.back());

  emit(claser::make_report(
      "cluster", claser::digest_file(flags.matrix),
      json{{"matrix", flags.matrix},
           {"rows", m.data.rows()},
           {"cols", m.data.cols()},
           {"k", flags.k},
           {"dim", flags.dim},
           {"histogram", histogram},
           {"cost_trace", em.cost_trace},
           {"final_cost", em.cost_trace.back()}}));
  return 0;
}

// --- cost --------------------------------------------------------------------

struct cost_flags {
  std::string method;
  std::string preset;
  double d = 0.0;
  bool table = false;
};

int run_cost(const cost_flags& flags) {
  const claser::search_method method = claser::parse_search_method(flags.method);
  const claser::model_preset preset = claser::parse_model_preset(flags.preset);
  const claser::cost_formula formula = claser::formula_for(method, preset);

  json payload{{"method", flags.method},
               {"preset", flags.preset},
               {"formula", json{{"slope", formula.slope}, {"intercept", formula.intercept}}}};

  if (flags.table) {
    const claser::speedup_summary table = claser::speedup_table(method, preset);
    json rows = json::array();
    for (const claser::speedup_row& row : table.rows) {
      rows.push_back(json{{"dataset", row.dataset}, {"size", row.size}, {"speedup", row.value}});
      std::fprintf(stderr, "%-20s d=%-6d speedup %.4g\n", row.dataset.c_str(), row.size,
                   row.value);
    }
    std::fprintf(stderr, "%-20s mean     speedup %.4g\n", "", table.mean);
    payload["table"] = rows;
    payload["mean_speedup"] = table.mean;
  } else {
    if (flags.d < 1.0) throw claser::input_error("--d must be at least 1 (or use --table)");
    const double c = claser::cost(method, preset, flags.d);
    const double s = claser::speedup(method, preset, flags.d);
    payload["d"] = flags.d;
    payload["cost"] = c;
    payload["exhaustive_cost"] = claser::cost(claser::search_method::laser_full, preset, flags.d);
    payload["speedup"] = s;
    std::fprintf(stderr, "%s/%s at d=%g: %.6g forward-pass equivalents, speedup %.4g\n",
                 flags.method.c_str(), flags.preset.c_str(), flags.d, c, s);
  }

  emit(claser::make_report("cost",
                           claser::digest_bytes(flags.method + "|" + flags.preset),
                           std::move(payload)));
  return 0;
}

// --- sweep -------------------------------------------------------------------

struct sweep_flags {
  std::string config;
};

claser::replay_evaluator::surface parse_surface(const json& spec) {
  claser::replay_evaluator::surface surface;
  surface.baseline_accuracy = spec.at("baseline_accuracy").get<double>();
  surface.baseline_test_accuracy = spec.at("baseline_test_accuracy").get<double>();
  surface.default_accuracy = spec.value("default_accuracy", 0.0);
  surface.default_test_accuracy = spec.value("default_test_accuracy", 0.0);
  surface.test_split_start = spec.at("test_split_start").get<int>();
  for (const json& arm : spec.value("arms", json::array())) {
    claser::replay_evaluator::arm_entry entry;
    entry.layer = arm.at("layer").get<int>();
    entry.kind = claser::parse_matrix_kind(arm.at("kind").get<std::string>());
    entry.rho = arm.at("rho").get<double>();
    entry.clusters = arm.at("clusters").get<int>();
    entry.accuracy = arm.at("accuracy").get<double>();
    entry.test_accuracy = arm.value("test_accuracy", entry.accuracy);
    surface.arms.push_back(entry);
  }
  return surface;
}

int run_sweep(const sweep_flags& flags) {
  const json config = parse_json_file(flags.config);
  try {
    const claser::search_method method =
        claser::parse_search_method(config.at("method").get<std::string>());

    claser::search_space space;
    claser::search_config sc;
    if (config.contains("preset")) {
      std::tie(space, sc) = claser::preset_space(
          claser::parse_model_preset(config.at("preset").get<std::string>()), method);
      sc.method = method;
    } else if (config.contains("space")) {
      const json& js = config.at("space");
      space.layers = js.at("layers").get<std::vector<int>>();
      for (const std::string& name : js.at("kinds").get<std::vector<std::string>>()) {
        space.kinds.push_back(claser::parse_matrix_kind(name));
      }
      space.rhos = js.at("rhos").get<std::vector<double>>();
      space.cluster_levels = js.at("cluster_levels").get<std::vector<int>>();
      sc.method = method;
    } else {
      throw claser::input_error("sweep config needs either \"preset\" or \"space\"");
    }
    sc.q = config.value("q", sc.q);
    sc.window = config.value("window", sc.window);
    sc.calib_n = config.value("calib_n", sc.calib_n);
    sc.seed = config.value("seed", std::uint64_t{0});
    sc.validation_fraction = config.value("validation_fraction", sc.validation_fraction);
    sc.test_fraction = config.value("test_fraction", sc.test_fraction);

    const json& ev = config.at("evaluator");
    const std::string type = ev.at("type").get<std::string>();
    claser::evaluator_binding binding;
    claser::model_bundle bundle;
    if (type == "replay") {
      bundle = claser::load_bundle(ev.at("manifest").get<std::string>());
      binding.oracle = std::make_shared<claser::replay_evaluator>(
          parse_surface(parse_json_file(ev.at("surface").get<std::string>())));
      binding.dataset_size = ev.at("dataset_size").get<int>();
    } else if (type == "toy") {
      const int layers = ev.value("layers", 3);
      const int inputs = ev.value("inputs", 16);
      const int hidden = ev.value("hidden", 24);
      const int classes = ev.value("classes", 3);
      const int examples = ev.value("examples", 1200);
      const std::uint64_t data_seed = ev.value("seed", std::uint64_t{1});
      const claser::toy_dataset data = claser::make_blob_dataset(
          inputs, classes, examples, ev.value("separation", 3.0), ev.value("noise", 1.0),
          data_seed);
      std::vector<claser::toy_model> models;
      claser::rng derive(data_seed);
      for (int i = 0; i < layers; ++i) {
        const std::uint64_t model_seed = derive.next_u64();
        claser::toy_model m = claser::init_toy(inputs, hidden, classes, model_seed);
        models.push_back(claser::train(m, data, ev.value("train_steps", 400),
                                       ev.value("learning_rate", 0.5), model_seed));
      }
      if (ev.contains("plant")) {
        const json& plant = ev.at("plant");
        const int layer = plant.at("layer").get<int>();
        if (layer < 0 || layer >= layers) {
          throw claser::input_error("plant.layer out of range");
        }
        models[static_cast<std::size_t>(layer)] = claser::plant_noise(
            models[static_cast<std::size_t>(layer)],
            plant.value("target", std::string("w1")) == "w2" ? claser::toy_target::w2
                                                             : claser::toy_target::w1,
            plant.value("rank", 8), plant.value("scale", 0.5),
            plant.value("seed", std::uint64_t{2}));
      }
      auto oracle = std::make_shared<claser::toy_evaluator>(models, data);
      bundle = oracle->make_bundle("toy");
      binding.oracle = oracle;
      binding.dataset_size = examples;
    } else {
      throw claser::input_error("unknown evaluator type '" + type + "'");
    }

    const claser::search_outcome outcome = claser::run_search(bundle, space, sc, binding);
    std::fprintf(stderr,
                 "%s: %ld arms, best plan %s, validation %.4f, test %.4f, %.6g "
                 "forward-pass equivalents\n",
                 claser::to_string(sc.method), outcome.candidates_evaluated,
                 plan_as_tuple(bundle, outcome.best_plan, outcome.baseline_won).dump().c_str(),
                 outcome.validation_accuracy, outcome.test_accuracy,
                 outcome.forward_pass_equivalents);

    json payload = outcome_payload(bundle, outcome);
    payload["method"] = claser::to_string(sc.method);
    payload["q"] = sc.q;
    payload["seed"] = sc.seed;
    emit(claser::make_report("sweep", claser::digest_file(flags.config), std::move(payload)));
    return 0;
  } catch (const json::exception& e) {
    throw claser::input_error(flags.config + ": " + e.what());
  }
}

// --- demo ----------------------------------------------------------------------

struct demo_flags {
  std::uint64_t seed = 0;
  double scale = claser::demo_config{}.noise_scale;
};

int run_demo_cmd(const demo_flags& flags) {
  claser::demo_config config;
  config.seed = flags.seed;
  config.noise_scale = flags.scale;
  const claser::demo_outcome out = claser::run_demo(config);

  json ranked = json::array();
  for (const auto& [id, score] : out.search.ranked_matrices) {
    ranked.push_back(json::array({id, score}));
  }
  json plan = out.search.baseline_won
                  ? json::array({nullptr, nullptr, 1.0, 1})
                  : json::array({std::string(out.search.best_plan.matrix_id.find("mlp_out") !=
                                                     std::string::npos
                                                 ? "mlp_out"
                                                 : "mlp_in"),
                                 // matrix ids are layerN.kind.weight
                                 std::stoi(out.search.best_plan.matrix_id.substr(5)),
                                 out.search.best_plan.rho, out.search.best_plan.clusters});

  std::fprintf(stderr,
               "clean test %.4f, damaged baseline %.4f, adapted %.4f (plan %s); "
               "top-ranked matrix %s\n",
               out.clean_test_accuracy, out.baseline_test_accuracy, out.search.test_accuracy,
               plan.dump().c_str(),
               out.search.ranked_matrices.empty()
                   ? "(none)"
                   : out.search.ranked_matrices.front().first.c_str());

  emit(claser::make_report(
      "demo", claser::digest_bytes(std::to_string(flags.seed)),
      json{{"seed", flags.seed},
           {"scale", flags.scale},
           {"planted_id", out.planted_id},
           {"clean_test_accuracy", out.clean_test_accuracy},
           {"baseline_test_accuracy", out.baseline_test_accuracy},
           {"adapted_test_accuracy", out.search.test_accuracy},
           {"validation_accuracy", out.search.validation_accuracy},
           {"best_plan", plan},
           {"baseline_won", out.search.baseline_won},
           {"planted_ranked_first", out.planted_ranked_first},
           {"ranked_matrices", ranked},
           {"candidates_evaluated", out.search.candidates_evaluated},
           {"forward_pass_equivalents", out.search.forward_pass_equivalents}}));

  if (out.search.test_accuracy < out.baseline_test_accuracy) {
    throw claser::property_error("adapted model is worse than the damaged baseline");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-guided multi-subspace low-rank reduction of weight matrices"};
  app.require_subcommand(1);

  score_flags score;
  CLI::App* score_cmd = app.add_subcommand("score", "Rank matrices by negative-tail gradient score");
  score_cmd->add_option("--manifest", score.manifest, "Bundle manifest")->required();
  score_cmd->add_option("--clusters", score.clusters, "Row blocks per matrix")
      ->check(CLI::PositiveNumber);
  score_cmd->add_option("--window", score.window, "Tail window")->check(CLI::PositiveNumber);
  score_cmd->add_option("--top", score.top, "Rows to keep")->check(CLI::PositiveNumber);
  score_cmd->add_option("--kinds", score.kinds, "Comma-separated matrix kinds");

  compress_flags compress;
  CLI::App* compress_cmd =
      app.add_subcommand("compress", "Low-rank-compress one matrix and write a new bundle");
  compress_cmd->add_option("--manifest", compress.manifest, "Bundle manifest")->required();
  compress_cmd->add_option("--target", compress.target, "layer:kind")->required();
  compress_cmd->add_option("--rho", compress.rho, "Retained rank fraction in (0, 1]")
      ->required();
  compress_cmd->add_option("--clusters", compress.clusters, "Row groups")
      ->check(CLI::PositiveNumber);
  compress_cmd->add_option("--mode", compress.mode, "block or em");
  compress_cmd->add_option("--out", compress.out, "Output directory")->required();

  cluster_flags cluster;
  CLI::App* cluster_cmd =
      app.add_subcommand("cluster", "K-subspaces clustering of a matrix's rows");
  cluster_cmd->add_option("--matrix", cluster.matrix, "Matrix file")->required();
  cluster_cmd->add_option("--k", cluster.k, "Cluster count")->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--dim", cluster.dim, "Subspace dimension")
      ->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--max-iter", cluster.max_iter, "Iteration cap")
      ->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--tol", cluster.tol, "Relative cost-decrease tolerance");

  cost_flags cost;
  CLI::App* cost_cmd = app.add_subcommand("cost", "Search cost and speedup");
  cost_cmd->add_option("--method", cost.method, "Search method")->required();
  cost_cmd->add_option("--preset", cost.preset, "gptj or roberta")->required();
  CLI::Option* d_opt = cost_cmd->add_option("--d", cost.d, "Dataset size");
  cost_cmd->add_flag("--table", cost.table, "All benchmark datasets plus the mean")
      ->excludes(d_opt);

  sweep_flags sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a configured adaptation search");
  sweep_cmd->add_option("--config", sweep.config, "JSON configuration")->required();

  demo_flags demo;
  CLI::App* demo_cmd =
      app.add_subcommand("demo", "Train toy models, plant noise, search, and repair");
  demo_cmd->add_option("--seed", demo.seed, "Experiment seed");
  demo_cmd->add_option("--scale", demo.scale, "Planted noise scale")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (score_cmd->parsed()) return run_score(score);
    if (compress_cmd->parsed()) return run_compress(compress);
    if (cluster_cmd->parsed()) return run_cluster(cluster);
    if (cost_cmd->parsed()) return run_cost(cost);
    if (sweep_cmd->parsed()) return run_sweep(sweep);
    if (demo_cmd->parsed()) return run_demo_cmd(demo);
  } catch (const claser::input_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const claser::io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const claser::capability_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const claser::property_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
