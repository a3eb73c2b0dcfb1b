// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front door: dataset generation, two-tower training and
// evaluation, experiment sweeps, bound calculators, and theory property
// checks. Every command reads one structured config whose keys mirror the
// library struct fields one-to-one, writes its outputs atomically under
// --out, and records a manifest with a config digest that is stable under
// key reordering. Errors leave on stderr as a single machine-parseable line
// "error[E_CODE]: message" with a nonzero exit.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <initializer_list>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "ttrec/baselines/knn.hpp"
#include "ttrec/data/observations.hpp"
#include "ttrec/error.hpp"
#include "ttrec/harness/experiment.hpp"
#include "ttrec/io/fileio.hpp"
#include "ttrec/nn/mlp.hpp"
#include "ttrec/parallel.hpp"
#include "ttrec/rng.hpp"
#include "ttrec/synth/generator.hpp"
#include "ttrec/theory/boxdim.hpp"
#include "ttrec/theory/calculators.hpp"
#include "ttrec/theory/embedding.hpp"
#include "ttrec/theory/lipschitz.hpp"
#include "ttrec/theory/rate_probe.hpp"
#include "ttrec/twotower/model.hpp"
#include "ttrec/twotower/train.hpp"

namespace {

using nlohmann::json;
using namespace ttrec;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = 0;
  bool seed_given = false;
  int jobs = 0;
};

std::string single_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

// Paths inside a config resolve relative to the config file's directory, so
// a config bundle can move as a unit.
std::string resolve_path(const std::string& config_path, const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const auto slash = config_path.find_last_of('/');
  if (slash == std::string::npos) return path;
  return config_path.substr(0, slash + 1) + path;
}

std::string fnv1a64_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json load_config(const std::string& path) {
  require(!path.empty(), Errc::config_parse, "missing --config");
  std::string text;
  try {
    text = io::read_text_file(path);
  } catch (const Error& e) {
    fail(Errc::io, std::string("cannot read config: ") + e.what());
  }
  try {
    return json::parse(text);
  } catch (const std::exception& e) {
    fail(Errc::config_parse, "config " + path + ": " + single_line(e.what()));
  }
}

// Unknown keys are config errors: silent typos must not fall back to
// defaults.
void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
  require(obj.is_object(), Errc::config_parse, std::string(where) + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    require(known, Errc::config_parse,
            std::string(where) + ": unknown key \"" + item.key() + "\"");
  }
}

const json* find_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void read_field(const json& obj, const char* where, const char* key, double& target) {
  if (const json* v = find_field(obj, key)) {
    require(v->is_number(), Errc::config_parse,
            std::string(where) + "." + key + ": expected a number");
    target = v->get<double>();
  }
}

void read_field(const json& obj, const char* where, const char* key, int& target) {
  if (const json* v = find_field(obj, key)) {
    require(v->is_number_integer(), Errc::config_parse,
            std::string(where) + "." + key + ": expected an integer");
    target = v->get<int>();
  }
}

void read_field(const json& obj, const char* where, const char* key, std::int64_t& target) {
  if (const json* v = find_field(obj, key)) {
    require(v->is_number_integer(), Errc::config_parse,
            std::string(where) + "." + key + ": expected an integer");
    target = v->get<std::int64_t>();
  }
}

void read_field(const json& obj, const char* where, const char* key, std::uint64_t& target) {
  if (const json* v = find_field(obj, key)) {
    require(v->is_number_integer(), Errc::config_parse,
            std::string(where) + "." + key + ": expected an integer");
    target = v->get<std::uint64_t>();
  }
}

void read_field(const json& obj, const char* where, const char* key, std::string& target) {
  if (const json* v = find_field(obj, key)) {
    require(v->is_string(), Errc::config_parse,
            std::string(where) + "." + key + ": expected a string");
    target = v->get<std::string>();
  }
}

void read_field(const json& obj, const char* where, const char* key, std::vector<int>& target) {
  if (const json* v = find_field(obj, key)) {
    require(v->is_array(), Errc::config_parse,
            std::string(where) + "." + key + ": expected an array of integers");
    target.clear();
    for (const json& e : *v) {
      require(e.is_number_integer(), Errc::config_parse,
              std::string(where) + "." + key + ": expected an array of integers");
      target.push_back(e.get<int>());
    }
  }
}

void read_field(const json& obj, const char* where, const char* key, std::vector<double>& target) {
  if (const json* v = find_field(obj, key)) {
    require(v->is_array(), Errc::config_parse,
            std::string(where) + "." + key + ": expected an array of numbers");
    target.clear();
    for (const json& e : *v) {
      require(e.is_number(), Errc::config_parse,
              std::string(where) + "." + key + ": expected an array of numbers");
      target.push_back(e.get<double>());
    }
  }
}

void read_field(const json& obj, const char* where, const char* key,
                std::vector<std::int64_t>& target) {
  if (const json* v = find_field(obj, key)) {
    require(v->is_array(), Errc::config_parse,
            std::string(where) + "." + key + ": expected an array of integers");
    target.clear();
    for (const json& e : *v) {
      require(e.is_number_integer(), Errc::config_parse,
              std::string(where) + "." + key + ": expected an array of integers");
      target.push_back(e.get<std::int64_t>());
    }
  }
}

nn::Activation parse_activation(const std::string& name, const char* where) {
  if (name == "relu") return nn::Activation::relu;
  if (name == "sigmoid") return nn::Activation::sigmoid;
  fail(Errc::config_parse, std::string(where) + ": unknown activation \"" + name + "\"");
}

synth::SyntheticSpec parse_spec(const json& doc, const char* where) {
  check_keys(doc, where,
             {"n_users", "n_items", "user_dim", "item_dim", "embed_dim", "intrinsic_dim",
              "n_ratings", "noise_var", "coeff_range", "seed"});
  synth::SyntheticSpec spec;
  read_field(doc, where, "n_users", spec.n_users);
  read_field(doc, where, "n_items", spec.n_items);
  read_field(doc, where, "user_dim", spec.user_dim);
  read_field(doc, where, "item_dim", spec.item_dim);
  read_field(doc, where, "embed_dim", spec.embed_dim);
  read_field(doc, where, "intrinsic_dim", spec.intrinsic_dim);
  read_field(doc, where, "n_ratings", spec.n_ratings);
  read_field(doc, where, "noise_var", spec.noise_var);
  read_field(doc, where, "coeff_range", spec.coeff_range);
  read_field(doc, where, "seed", spec.seed);
  return spec;
}

twotower::TrainConfig parse_train_config(const json& doc, const char* where) {
  check_keys(doc, where,
             {"lambda", "lr_init", "lr_decay", "lr_min", "batch_size", "max_epochs",
              "patience", "seed"});
  twotower::TrainConfig cfg;
  read_field(doc, where, "lambda", cfg.lambda);
  read_field(doc, where, "lr_init", cfg.lr_init);
  read_field(doc, where, "lr_decay", cfg.lr_decay);
  read_field(doc, where, "lr_min", cfg.lr_min);
  read_field(doc, where, "batch_size", cfg.batch_size);
  read_field(doc, where, "max_epochs", cfg.max_epochs);
  read_field(doc, where, "patience", cfg.patience);
  read_field(doc, where, "seed", cfg.seed);
  return cfg;
}

harness::T2RecSettings parse_t2rec(const json& doc, const char* where) {
  check_keys(doc, where, {"hidden", "embed_dim", "activation", "train", "val_fraction", "seed"});
  harness::T2RecSettings settings;
  read_field(doc, where, "hidden", settings.hidden);
  read_field(doc, where, "embed_dim", settings.embed_dim);
  std::string activation = "relu";
  read_field(doc, where, "activation", activation);
  settings.activation = parse_activation(activation, where);
  if (const json* train = find_field(doc, "train"))
    settings.train = parse_train_config(*train, (std::string(where) + ".train").c_str());
  read_field(doc, where, "val_fraction", settings.val_fraction);
  read_field(doc, where, "seed", settings.seed);
  return settings;
}

harness::BaselineSettings parse_baselines(const json& doc, const char* where) {
  check_keys(doc, where,
             {"mf_rank", "mf_sweeps", "svdpp_rank", "svdpp_epochs", "svdpp_lr", "svdpp_reg",
              "svdpp_init_std", "cocluster_user_clusters", "cocluster_item_clusters",
              "cocluster_iters", "knn_mode", "cv_folds"});
  harness::BaselineSettings settings;
  read_field(doc, where, "mf_rank", settings.mf_rank);
  read_field(doc, where, "mf_sweeps", settings.mf_sweeps);
  read_field(doc, where, "svdpp_rank", settings.svdpp_rank);
  read_field(doc, where, "svdpp_epochs", settings.svdpp_epochs);
  read_field(doc, where, "svdpp_lr", settings.svdpp_lr);
  read_field(doc, where, "svdpp_reg", settings.svdpp_reg);
  read_field(doc, where, "svdpp_init_std", settings.svdpp_init_std);
  read_field(doc, where, "cocluster_user_clusters", settings.cocluster_user_clusters);
  read_field(doc, where, "cocluster_item_clusters", settings.cocluster_item_clusters);
  read_field(doc, where, "cocluster_iters", settings.cocluster_iters);
  std::string mode = "user_based";
  read_field(doc, where, "knn_mode", mode);
  if (mode == "user_based")
    settings.knn_mode = baselines::KnnMode::user_based;
  else if (mode == "item_based")
    settings.knn_mode = baselines::KnnMode::item_based;
  else
    fail(Errc::config_parse, std::string(where) + ": unknown knn_mode \"" + mode + "\"");
  read_field(doc, where, "cv_folds", settings.cv_folds);
  return settings;
}

struct SweepConfig {
  harness::ExperimentConfig experiment;
  std::vector<harness::Scenario> scenarios;
};

SweepConfig parse_sweep(const json& doc) {
  const char* where = "sweep config";
  check_keys(doc, where,
             {"spec", "methods", "replications", "split_ratio", "val_fraction", "lambda_grid",
              "k_grid", "base_seed", "t2rec", "baselines", "scenarios"});
  SweepConfig cfg;
  if (const json* spec = find_field(doc, "spec"))
    cfg.experiment.spec = parse_spec(*spec, "sweep config.spec");
  if (const json* methods = find_field(doc, "methods")) {
    require(methods->is_array(), Errc::config_parse, "sweep config.methods: expected an array");
    cfg.experiment.methods.clear();
    for (const json& m : *methods) {
      require(m.is_string(), Errc::config_parse, "sweep config.methods: expected method names");
      cfg.experiment.methods.push_back(harness::parse_method(m.get<std::string>()));
    }
  }
  read_field(doc, where, "replications", cfg.experiment.replications);
  read_field(doc, where, "split_ratio", cfg.experiment.split_ratio);
  read_field(doc, where, "val_fraction", cfg.experiment.val_fraction);
  read_field(doc, where, "lambda_grid", cfg.experiment.lambda_grid);
  read_field(doc, where, "k_grid", cfg.experiment.k_grid);
  read_field(doc, where, "base_seed", cfg.experiment.base_seed);
  if (const json* t2rec = find_field(doc, "t2rec"))
    cfg.experiment.t2rec = parse_t2rec(*t2rec, "sweep config.t2rec");
  if (const json* baselines = find_field(doc, "baselines"))
    cfg.experiment.baselines = parse_baselines(*baselines, "sweep config.baselines");
  const json* scenarios = find_field(doc, "scenarios");
  require(scenarios != nullptr && scenarios->is_array() && !scenarios->empty(),
          Errc::config_parse, "sweep config.scenarios: expected a nonempty array");
  for (const json& sc : *scenarios) {
    check_keys(sc, "sweep config.scenarios[]", {"n_users", "n_items", "intrinsic_dim"});
    harness::Scenario scenario;
    read_field(sc, "sweep config.scenarios[]", "n_users", scenario.n_users);
    read_field(sc, "sweep config.scenarios[]", "n_items", scenario.n_items);
    read_field(sc, "sweep config.scenarios[]", "intrinsic_dim", scenario.intrinsic_dim);
    cfg.scenarios.push_back(scenario);
  }
  return cfg;
}

theory::BoundInputs parse_bound_inputs(const json& doc) {
  const char* where = "bounds config";
  check_keys(doc, where,
             {"W", "L", "B", "W_tilde", "L_tilde", "B_tilde", "p", "M", "beta", "d_u", "d_i",
              "omega_size", "sigma2", "B_e", "lambda_omega", "J_R0", "eps"});
  theory::BoundInputs in;
  read_field(doc, where, "W", in.W);
  read_field(doc, where, "L", in.L);
  read_field(doc, where, "B", in.B);
  read_field(doc, where, "W_tilde", in.W_tilde);
  read_field(doc, where, "L_tilde", in.L_tilde);
  read_field(doc, where, "B_tilde", in.B_tilde);
  read_field(doc, where, "p", in.p);
  read_field(doc, where, "M", in.M);
  read_field(doc, where, "beta", in.beta);
  read_field(doc, where, "d_u", in.d_u);
  read_field(doc, where, "d_i", in.d_i);
  read_field(doc, where, "omega_size", in.omega_size);
  read_field(doc, where, "sigma2", in.sigma2);
  read_field(doc, where, "B_e", in.B_e);
  read_field(doc, where, "lambda_omega", in.lambda_omega);
  read_field(doc, where, "J_R0", in.J_R0);
  return in;
}

void write_manifest(const CommonArgs& args, const std::string& command, const json& config_doc,
                    const std::vector<std::string>& outputs, const json& seeds) {
  json manifest;
  manifest["artifact_version"] = 1;
  manifest["command"] = command;
  // json::dump() emits object keys sorted, so the digest does not depend on
  // the key order of the config file.
  manifest["config_digest"] =
      config_doc.is_null() ? "none" : "fnv1a64:" + fnv1a64_hex(config_doc.dump());
  manifest["config_path"] = args.config_path;
  manifest["jobs"] = args.jobs;
  manifest["outputs"] = outputs;
  manifest["seeds"] = seeds;
  manifest["timestamp_utc"] = utc_now();
  io::atomic_write_text_file(join_path(args.out_dir, "manifest.json"), manifest.dump(2) + "\n");
}

data::ObservationSet load_observations(const std::string& config_path, const std::string& ratings,
                                       const std::string& user_covariates,
                                       const std::string& item_covariates) {
  require(!ratings.empty(), Errc::config_parse, "config: missing ratings path");
  require(!user_covariates.empty() && !item_covariates.empty(), Errc::config_parse,
          "config: missing covariate paths");
  data::ObservationSet obs;
  obs.ratings = data::read_ratings_csv(resolve_path(config_path, ratings));
  obs.user_covariates = std::make_shared<data::CovariateTable>(
      data::read_covariates_csv(resolve_path(config_path, user_covariates)));
  obs.item_covariates = std::make_shared<data::CovariateTable>(
      data::read_covariates_csv(resolve_path(config_path, item_covariates)));
  data::validate(obs);
  return obs;
}

int run_gen(const CommonArgs& args) {
  const json doc = load_config(args.config_path);
  synth::SyntheticSpec spec = parse_spec(doc, "gen config");
  if (args.seed_given) spec.seed = static_cast<std::uint64_t>(args.seed);
  io::ensure_directory(args.out_dir);
  const synth::SyntheticData data = synth::generate_dataset(spec);

  data::write_ratings_csv(join_path(args.out_dir, "ratings.csv"), data.observations.ratings);
  data::write_covariates_csv(join_path(args.out_dir, "user_covariates.csv"),
                             *data.observations.user_covariates);
  data::write_covariates_csv(join_path(args.out_dir, "item_covariates.csv"),
                             *data.observations.item_covariates);
  io::atomic_write_text_file(join_path(args.out_dir, "ground_truth.json"),
                             synth::ground_truth_to_json(data.truth).dump(2) + "\n");
  write_manifest(args, "gen", doc,
                 {"ratings.csv", "user_covariates.csv", "item_covariates.csv",
                  "ground_truth.json"},
                 json{{"spec_seed", spec.seed}, {"seed_overridden", args.seed_given}});
  std::cout << "gen: " << data.observations.ratings.size() << " ratings, " << spec.n_users
            << " users, " << spec.n_items << " items -> " << args.out_dir << "\n";
  return 0;
}

int run_train(const CommonArgs& args) {
  const json doc = load_config(args.config_path);
  const char* where = "train config";
  check_keys(doc, where,
             {"ratings", "user_covariates", "item_covariates", "val_fraction", "t2rec"});
  std::string ratings, user_covariates, item_covariates;
  read_field(doc, where, "ratings", ratings);
  read_field(doc, where, "user_covariates", user_covariates);
  read_field(doc, where, "item_covariates", item_covariates);
  harness::T2RecSettings settings;
  if (const json* t2rec = find_field(doc, "t2rec"))
    settings = parse_t2rec(*t2rec, "train config.t2rec");
  read_field(doc, where, "val_fraction", settings.val_fraction);
  if (args.seed_given) {
    settings.seed = static_cast<std::uint64_t>(args.seed);
    settings.train.seed = static_cast<std::uint64_t>(args.seed);
  }

  const data::ObservationSet obs =
      load_observations(args.config_path, ratings, user_covariates, item_covariates);
  io::ensure_directory(args.out_dir);
  // A single-point grid reuses the tuning path: same validation carve, same
  // training protocol, no selection to do.
  const harness::T2RecTuneResult tuned =
      harness::tune_t2rec(obs, {settings.train.lambda}, settings);
  const twotower::TrainResult& result = tuned.train_result;

  json model;
  model["format_version"] = 1;
  model["lambda"] = settings.train.lambda;
  model["best_epoch"] = result.best_epoch;
  model["user_tower"] = nn::mlp_to_json(result.model.user_tower);
  model["item_tower"] = nn::mlp_to_json(result.model.item_tower);
  io::atomic_write_text_file(join_path(args.out_dir, "model.json"), model.dump(2) + "\n");

  std::string history = "epoch,train_objective,val_rmse,lr\n";
  for (const twotower::EpochRow& row : result.history) {
    history += std::to_string(row.epoch) + "," + io::format_double(row.train_objective) + "," +
               io::format_double(row.val_rmse) + "," + io::format_double(row.lr) + "\n";
  }
  io::atomic_write_text_file(join_path(args.out_dir, "history.csv"), history);

  write_manifest(args, "train", doc, {"model.json", "history.csv"},
                 json{{"t2rec_seed", settings.seed},
                      {"train_seed", settings.train.seed},
                      {"seed_overridden", args.seed_given}});
  std::cout << "train: best epoch " << result.best_epoch << ", validation rmse "
            << io::format_double(
                   result.history[static_cast<std::size_t>(result.best_epoch)].val_rmse)
            << " -> " << args.out_dir << "\n";
  return 0;
}

int run_eval(const CommonArgs& args) {
  const json doc = load_config(args.config_path);
  const char* where = "eval config";
  check_keys(doc, where, {"model", "ratings", "user_covariates", "item_covariates"});
  std::string model_path, ratings, user_covariates, item_covariates;
  read_field(doc, where, "model", model_path);
  read_field(doc, where, "ratings", ratings);
  read_field(doc, where, "user_covariates", user_covariates);
  read_field(doc, where, "item_covariates", item_covariates);
  require(!model_path.empty(), Errc::config_parse, "eval config: missing model path");

  json model_doc;
  try {
    model_doc = json::parse(io::read_text_file(resolve_path(args.config_path, model_path)));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(Errc::config_parse, "eval config: model file: " + single_line(e.what()));
  }
  require(model_doc.contains("user_tower") && model_doc.contains("item_tower"),
          Errc::config_parse, "eval config: model file lacks tower entries");
  twotower::TwoTowerModel model;
  model.user_tower = nn::mlp_from_json(model_doc["user_tower"]);
  model.item_tower = nn::mlp_from_json(model_doc["item_tower"]);
  twotower::validate(model);

  const data::ObservationSet obs =
      load_observations(args.config_path, ratings, user_covariates, item_covariates);
  const double rmse = harness::evaluate_t2rec_rmse(model, obs);

  io::ensure_directory(args.out_dir);
  io::atomic_write_text_file(join_path(args.out_dir, "rmse.txt"),
                             io::format_double(rmse) + "\n");
  write_manifest(args, "eval", doc, {"rmse.txt"},
                 json{{"seed_overridden", args.seed_given}});
  std::cout << "rmse " << io::format_double(rmse) << "\n";
  return 0;
}

int run_sweep(const CommonArgs& args) {
  const json doc = load_config(args.config_path);
  SweepConfig cfg = parse_sweep(doc);
  if (args.seed_given) cfg.experiment.base_seed = static_cast<std::uint64_t>(args.seed);

  const harness::ResultTable rows = harness::run_sweep(cfg.experiment, cfg.scenarios);

  io::ensure_directory(args.out_dir);
  io::atomic_write_text_file(join_path(args.out_dir, "results.csv"), harness::result_csv(rows));
  const std::string text = harness::result_text(rows);
  io::atomic_write_text_file(join_path(args.out_dir, "results.txt"), text);
  write_manifest(args, "sweep", doc, {"results.csv", "results.txt"},
                 json{{"base_seed", cfg.experiment.base_seed},
                      {"seed_overridden", args.seed_given}});
  std::cout << text;

  int failed_cells = 0;
  for (const harness::ResultRow& row : rows) {
    if (row.failures == 0) continue;
    ++failed_cells;
    std::cerr << "warning: " << harness::method_name(row.method) << " at ("
              << row.scenario_n << ", " << row.scenario_m << ", d=" << row.intrinsic_dim
              << "): " << row.failures << " failed replications; first: "
              << single_line(row.error) << "\n";
  }
  if (failed_cells > 0) {
    std::cerr << "error[E_TRAINING_FAILURE]: " << failed_cells
              << " result cells had failed replications; details in results.csv\n";
    return 1;
  }
  return 0;
}

int run_bounds(const CommonArgs& args) {
  const json doc = load_config(args.config_path);
  const theory::BoundInputs in = parse_bound_inputs(doc);
  const theory::BoundReport report = theory::rate_report(in);

  std::string out;
  const auto line = [&out](const std::string& name, const std::string& value) {
    out += name + " " + value + "\n";
  };
  line("lipschitz_C", io::format_double(report.lipschitz_C));
  line("lipschitz_C_tilde", io::format_double(report.lipschitz_C_tilde));
  line("C1", io::format_double(report.C1));
  line("C2", io::format_double(report.C2));
  line("C3", io::format_double(report.C3));
  line("rate_exponent", io::format_double(report.rate_exponent));
  line("L_ui", std::to_string(report.L_ui));
  line("d_ui", std::to_string(report.d_ui));
  line("lambda_condition_holds", report.lambda_condition_holds ? "true" : "false");
  line("width_order", io::format_double(report.width_order));
  line("depth_order_user", io::format_double(report.depth_order_user));
  line("depth_order_item", io::format_double(report.depth_order_item));
  line("rate_value", io::format_double(report.rate_value(in.omega_size)));
  if (const json* eps_field = find_field(doc, "eps")) {
    require(eps_field->is_number(), Errc::config_parse, "bounds config.eps: expected a number");
    const double eps = eps_field->get<double>();
    line("eps", io::format_double(eps));
    line("entropy_bound", io::format_double(theory::entropy_bound(in, eps)));
    line("approx_bound", io::format_double(theory::approx_bound(in.p, in.M, eps)));
  }

  io::ensure_directory(args.out_dir);
  io::atomic_write_text_file(join_path(args.out_dir, "bounds.txt"), out);
  write_manifest(args, "bounds", doc, {"bounds.txt"},
                 json{{"seed_overridden", args.seed_given}});
  std::cout << out;
  return 0;
}

struct TheoryCheckConfig {
  std::uint64_t seed = 0;
  int gradient_nets = 20;
  int embedding_nets = 10;
  int embedding_inputs = 200;
  int lipschitz_trials = 100;
  int boxdim_points = 5000;
};

TheoryCheckConfig parse_theorycheck(const json& doc) {
  const char* where = "theorycheck config";
  check_keys(doc, where,
             {"seed", "gradient_nets", "embedding_nets", "embedding_inputs", "lipschitz_trials",
              "boxdim_points"});
  TheoryCheckConfig cfg;
  read_field(doc, where, "seed", cfg.seed);
  read_field(doc, where, "gradient_nets", cfg.gradient_nets);
  read_field(doc, where, "embedding_nets", cfg.embedding_nets);
  read_field(doc, where, "embedding_inputs", cfg.embedding_inputs);
  read_field(doc, where, "lipschitz_trials", cfg.lipschitz_trials);
  read_field(doc, where, "boxdim_points", cfg.boxdim_points);
  require(cfg.gradient_nets > 0 && cfg.embedding_nets > 0 && cfg.embedding_inputs > 0 &&
              cfg.lipschitz_trials > 0 && cfg.boxdim_points >= 100,
          Errc::config_invalid, "theorycheck config: counts must be positive");
  return cfg;
}

// Analytic minibatch gradient against central finite differences of the
// objective, every parameter of both towers. Smooth activations keep the
// difference quotient clean.
int check_gradients(const TheoryCheckConfig& cfg, std::string& report) {
  int violations = 0;
  double worst = 0.0;
  for (int n = 0; n < cfg.gradient_nets; ++n) {
    const auto net_seed = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(n));
    Rng rng(net_seed);
    const int user_dim = 2 + static_cast<int>(rng.uniform_u64_below(3));
    const int item_dim = 2 + static_cast<int>(rng.uniform_u64_below(3));
    const int embed = 2 + static_cast<int>(rng.uniform_u64_below(2));
    const int hidden = 3 + static_cast<int>(rng.uniform_u64_below(3));
    twotower::TwoTowerModel model = twotower::make_towers(
        user_dim, item_dim, embed, {hidden}, nn::Activation::sigmoid, net_seed);

    twotower::PairBatch batch;
    const int batch_size = 6;
    batch.user_inputs.resize(batch_size, user_dim);
    batch.item_inputs.resize(batch_size, item_dim);
    batch.targets.resize(batch_size);
    for (int b = 0; b < batch_size; ++b) {
      for (int j = 0; j < user_dim; ++j) batch.user_inputs(b, j) = rng.uniform01();
      for (int j = 0; j < item_dim; ++j) batch.item_inputs(b, j) = rng.uniform01();
      batch.targets(b) = rng.gaussian();
    }
    const double lambda = 1e-3;
    const twotower::BatchGradient analytic = twotower::objective_gradient(model, batch, lambda);

    const double h = 1e-5;
    const auto fd_check = [&](double* param, double grad) {
      const double saved = *param;
      *param = saved + h;
      const double up = twotower::objective_batch(model, batch, lambda);
      *param = saved - h;
      const double down = twotower::objective_batch(model, batch, lambda);
      *param = saved;
      const double fd = (up - down) / (2.0 * h);
      const double err = std::abs(fd - grad);
      const double allowed = std::max(1e-8, 1e-5 * std::max(std::abs(fd), std::abs(grad)));
      worst = std::max(worst, err / std::max(allowed, 1e-300));
      if (err > allowed) ++violations;
    };
    for (int side = 0; side < 2; ++side) {
      nn::Mlp& tower = side == 0 ? model.user_tower : model.item_tower;
      const nn::MlpGrad& grad = side == 0 ? analytic.grad.user : analytic.grad.item;
      for (std::size_t l = 0; l < tower.layers.size(); ++l) {
        for (Eigen::Index r = 0; r < tower.layers[l].weights.rows(); ++r)
          for (Eigen::Index c = 0; c < tower.layers[l].weights.cols(); ++c)
            fd_check(&tower.layers[l].weights(r, c), grad.weights[l](r, c));
        for (Eigen::Index r = 0; r < tower.layers[l].bias.size(); ++r)
          fd_check(&tower.layers[l].bias(r), grad.bias[l](r));
      }
    }
  }
  report += std::string(violations == 0 ? "ok" : "violation") + ": gradient check, " +
            std::to_string(cfg.gradient_nets) + " nets, worst error ratio " +
            io::format_double(worst) + "\n";
  return violations;
}

// Depth-embedding identity and parameter budget across padding gaps 0..3.
int check_embedding(const TheoryCheckConfig& cfg, std::string& report) {
  int violations = 0;
  double worst = 0.0;
  for (int n = 0; n < cfg.embedding_nets; ++n) {
    Rng rng(derive_seed(cfg.seed, 2000 + static_cast<std::uint64_t>(n)));
    const int input = 1 + static_cast<int>(rng.uniform_u64_below(4));
    const int layers = 1 + static_cast<int>(rng.uniform_u64_below(3));
    std::vector<int> dims{input};
    for (int l = 0; l < layers; ++l) dims.push_back(1 + static_cast<int>(rng.uniform_u64_below(5)));
    nn::Mlp net = nn::glorot_init(dims, nn::Activation::relu, rng);
    const int gap = n % 4;
    const int target_depth = net.depth() + gap;
    const auto cap =
        static_cast<int>(std::max<std::int64_t>(2, nn::arch_stats(net).effective_params));
    const nn::Mlp embedded = theory::embed_network(net, target_depth, cap);
    for (int t = 0; t < cfg.embedding_inputs; ++t) {
      Eigen::VectorXd x(input);
      for (int j = 0; j < input; ++j) x(j) = rng.uniform(-2.0, 2.0);
      const double dev = (nn::forward(net, x) - nn::forward(embedded, x)).cwiseAbs().maxCoeff();
      worst = std::max(worst, dev);
      if (dev > 1e-10) ++violations;
    }
    if (nn::arch_stats(embedded).effective_params >
        static_cast<std::int64_t>(theory::embedding_budget(target_depth, cap)))
      ++violations;
  }
  report += std::string(violations == 0 ? "ok" : "violation") + ": embedding identity, " +
            std::to_string(cfg.embedding_nets) + " nets, max deviation " +
            io::format_double(worst) + "\n";
  return violations;
}

int check_lipschitz(const TheoryCheckConfig& cfg, std::string& report) {
  int violations = 0;
  double worst_ratio = 0.0;
  int families = 0;
  // Width times bound must stay away from 1, where the Lipschitz constant's
  // geometric sum is undefined.
  for (int width : {4, 8}) {
    for (int depth : {1, 2}) {
      for (double bound : {0.5, 1.0}) {
        theory::LipschitzFamily family;
        family.input_dim = width;
        family.width = width;
        family.depth = depth;
        family.B = bound;
        family.p = 2;
        const theory::LipschitzReport r = theory::verify_lipschitz(
            family, 1e-3, cfg.lipschitz_trials,
            derive_seed(cfg.seed, 3000 + static_cast<std::uint64_t>(families)));
        violations += r.violations;
        worst_ratio = std::max(worst_ratio, r.max_ratio);
        ++families;
      }
    }
  }
  report += std::string(violations == 0 ? "ok" : "violation") +
            ": lipschitz perturbation bound, " + std::to_string(families) + " families x " +
            std::to_string(cfg.lipschitz_trials) + " trials, max ratio " +
            io::format_double(worst_ratio) + "\n";
  return violations;
}

int check_boxdim(const TheoryCheckConfig& cfg, std::string& report) {
  int violations = 0;
  Rng rng(derive_seed(cfg.seed, 4000));
  Eigen::MatrixXd segment(cfg.boxdim_points, 2);
  for (int i = 0; i < cfg.boxdim_points; ++i) {
    const double t = rng.uniform01();
    segment(i, 0) = t;
    segment(i, 1) = 0.25 + 0.5 * t;
  }
  const theory::BoxCountReport seg = theory::minkowski_dimension(segment, theory::default_scales());
  if (seg.dimension < 0.9 || seg.dimension > 1.1) ++violations;

  Eigen::MatrixXd repeated(200, 2);
  repeated.col(0).setConstant(0.4);
  repeated.col(1).setConstant(0.6);
  const theory::BoxCountReport point =
      theory::minkowski_dimension(repeated, theory::default_scales());
  if (point.dimension != 0.0) ++violations;

  report += std::string(violations == 0 ? "ok" : "violation") +
            ": box-counting dimension, segment " + io::format_double(seg.dimension) +
            ", repeated point " + io::format_double(point.dimension) + "\n";
  return violations;
}

int run_theorycheck(const CommonArgs& args) {
  json doc;
  TheoryCheckConfig cfg;
  if (!args.config_path.empty()) {
    doc = load_config(args.config_path);
    cfg = parse_theorycheck(doc);
  }
  if (args.seed_given) cfg.seed = static_cast<std::uint64_t>(args.seed);

  std::string report;
  int violations = 0;
  violations += check_gradients(cfg, report);
  violations += check_embedding(cfg, report);
  violations += check_lipschitz(cfg, report);
  violations += check_boxdim(cfg, report);
  report += "theorycheck: " + std::to_string(violations) + " violations\n";

  io::ensure_directory(args.out_dir);
  io::atomic_write_text_file(join_path(args.out_dir, "theorycheck.txt"), report);
  write_manifest(args, "theorycheck", doc, {"theorycheck.txt"},
                 json{{"seed", cfg.seed}, {"seed_overridden", args.seed_given}});
  std::cout << report;
  if (violations > 0) {
    std::cerr << "error[E_INTERNAL]: theorycheck found " << violations
              << " property violations\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-tower recommender artifact: generate, train, evaluate, sweep, bound, check"};
  app.require_subcommand(1);

  CommonArgs args;
  const auto add_common = [&args](CLI::App* cmd, bool config_required) {
    auto* config = cmd->add_option("--config", args.config_path, "config file (JSON)");
    if (config_required) config->required();
    cmd->add_option("--out", args.out_dir, "output directory")->required();
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--jobs", args.jobs, "thread budget (0 keeps the runtime default)");
  };
  add_common(app.add_subcommand("gen", "generate a synthetic dataset"), true);
  add_common(app.add_subcommand("train", "train the two-tower model"), true);
  add_common(app.add_subcommand("eval", "evaluate a saved model"), true);
  add_common(app.add_subcommand("sweep", "run replicated experiment scenarios"), true);
  add_common(app.add_subcommand("bounds", "print the bound report"), true);
  add_common(app.add_subcommand("theorycheck", "run theory property suites"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error[E_CONFIG_PARSE]: " << single_line(e.what()) << "\n";
    return 1;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    args.seed_given = sub->count("--seed") > 0;
    if (args.jobs > 0) set_threads(args.jobs);
    const std::string name = sub->get_name();
    if (name == "gen") return run_gen(args);
    if (name == "train") return run_train(args);
    if (name == "eval") return run_eval(args);
    if (name == "sweep") return run_sweep(args);
    if (name == "bounds") return run_bounds(args);
    return run_theorycheck(args);
  } catch (const ttrec::Error& e) {
    std::cerr << "error[" << ttrec::errc_name(e.code()) << "]: " << single_line(e.what())
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[E_INTERNAL]: " << single_line(e.what()) << "\n";
    return 1;
  }
}
