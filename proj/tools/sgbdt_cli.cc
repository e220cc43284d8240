// Copyright 2026 The sgbdt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: train, eval, plan, experiment, stream, distributed.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"
#include "sgbdt/accountant.h"
#include "sgbdt/dataset.h"
#include "sgbdt/distributed.h"
#include "sgbdt/dpboost.h"
#include "sgbdt/ensemble.h"
#include "sgbdt/experiment.h"
#include "sgbdt/hyperparameters.h"
#include "sgbdt/loss.h"
#include "sgbdt/nonprivate.h"
#include "sgbdt/schema.h"
#include "sgbdt/sgbdt.h"

namespace {

using sgbdt::Hyperparameters;

// String flags for the enum-valued hyperparameters.
struct HyperFlags {
  std::string config;
  std::string leaf_noise = "dynamic";
  std::string init_noise = "wide";
  std::string adp = "balle";
  std::string subsampling = "gaussian";
  bool no_filter = false;
  bool no_init_score = false;
};

void AddHyperparameterFlags(CLI::App* app, Hyperparameters& h,
                            HyperFlags& flags) {
  app->add_option("--hyperparameters", flags.config,
                  "JSON file with hyperparameters; flags override it");
  app->add_option("--g-star", h.g_star, "gradient clip bound");
  app->add_option("--m-star", h.m_star, "label clip bound for the init score");
  app->add_option("--lambda", h.lambda, "leaf regularisation");
  app->add_option("--eta", h.eta, "learning rate");
  app->add_option("--depth", h.depth, "tree depth");
  app->add_option("--gamma", h.gamma, "Poisson subsampling ratio");
  app->add_option("--t-regular", h.t_regular, "regular rounds");
  app->add_option("--t-extra", h.t_extra, "extra rounds (filter on)");
  app->add_option("--eps-init", h.eps_init, "init score epsilon (0 = off)");
  app->add_option("--eps-trees", h.eps_trees, "tree epsilon");
  app->add_option("--delta", h.delta_trees, "tree delta");
  app->add_option("--r1", h.r1, "support noise weight");
  app->add_option("--r2", h.r2, "sum noise weight");
  app->add_option("--r", h.r, "numerical feature weight for splits");
  app->add_option("--alpha-max", h.alpha_max, "largest RDP order");
  app->add_option("--leaf-noise", flags.leaf_noise, "dynamic | static")
      ->check(CLI::IsMember({"dynamic", "static"}));
  app->add_option("--init-noise", flags.init_noise, "wide | narrow")
      ->check(CLI::IsMember({"wide", "narrow"}));
  app->add_option("--adp", flags.adp, "simple | standard | balle")
      ->check(CLI::IsMember({"simple", "standard", "balle"}));
  app->add_option("--subsampling-bound", flags.subsampling,
                  "gaussian | general")
      ->check(CLI::IsMember({"gaussian", "general"}));
  app->add_flag("--no-filter", flags.no_filter, "disable the privacy filter");
  app->add_flag("--no-init-score", flags.no_init_score,
                "start from zero instead of a private mean");
}

// File values first, then every flag the user actually passed.
absl::StatusOr<Hyperparameters> ResolveHyperparameters(
    const CLI::App* app, const Hyperparameters& from_flags,
    const HyperFlags& flags) {
  Hyperparameters h = from_flags;
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", flags.config));
    nlohmann::json file;
    try {
      in >> file;
    } catch (const nlohmann::json::exception& e) {
      return absl::InvalidArgumentError(e.what());
    }
    nlohmann::json flag_json = from_flags.ToJson();
    nlohmann::json merged = file;
    static const std::pair<const char*, const char*> kFlagToKey[] = {
        {"--g-star", "g_star"},     {"--m-star", "m_star"},
        {"--lambda", "lambda"},     {"--eta", "eta"},
        {"--depth", "depth"},       {"--gamma", "gamma"},
        {"--t-regular", "t_regular"}, {"--t-extra", "t_extra"},
        {"--eps-init", "eps_init"}, {"--eps-trees", "eps_trees"},
        {"--delta", "delta_trees"}, {"--r1", "r1"},
        {"--r2", "r2"},             {"--r", "r"},
        {"--alpha-max", "alpha_max"}};
    for (const auto& [flag, key] : kFlagToKey) {
      if (app->count(flag) > 0) merged[key] = flag_json[key];
    }
    absl::StatusOr<Hyperparameters> parsed = Hyperparameters::FromJson(merged);
    if (!parsed.ok()) return parsed.status();
    h = *parsed;
  }
  if (app->count("--leaf-noise") > 0 || flags.config.empty()) {
    h.leaf_noise = flags.leaf_noise == "static" ? sgbdt::LeafNoise::kStatic
                                                : sgbdt::LeafNoise::kDynamic;
  }
  if (app->count("--init-noise") > 0 || flags.config.empty()) {
    h.init_noise = flags.init_noise == "narrow" ? sgbdt::InitNoise::kNarrowScale
                                                 : sgbdt::InitNoise::kWideScale;
  }
  if (app->count("--adp") > 0 || flags.config.empty()) {
    h.adp_conversion = flags.adp == "simple"     ? sgbdt::AdpConversion::kSimple
                       : flags.adp == "standard" ? sgbdt::AdpConversion::kStandard
                                                 : sgbdt::AdpConversion::kBalle;
  }
  if (app->count("--subsampling-bound") > 0 || flags.config.empty()) {
    h.subsampling_bound = flags.subsampling == "general"
                              ? sgbdt::SubsamplingBound::kGeneral
                              : sgbdt::SubsamplingBound::kGaussian;
  }
  if (flags.no_filter) h.use_filter = false;
  if (flags.no_init_score) {
    h.use_init_score = false;
    h.eps_init = 0.0;
  }
  if (absl::Status s = h.Validate(); !s.ok()) return s;
  return h;
}

absl::StatusOr<sgbdt::Dataset> Load(const std::string& data,
                                    const std::string& schema_path) {
  absl::StatusOr<sgbdt::Schema> schema = sgbdt::Schema::LoadFile(schema_path);
  if (!schema.ok()) return schema.status();
  return sgbdt::LoadCsv(
      data, std::make_shared<const sgbdt::Schema>(*std::move(schema)));
}

absl::Status WriteJson(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << j.dump(1) << "\n";
  return absl::OkStatus();
}

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status.message() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private gradient boosted decision trees"};
  app.require_subcommand(1);

  // train
  std::string data, schema, model_out, manifest_out, ledger_csv;
  std::string learner_name = "sgbdt";
  uint64_t seed = 1;
  Hyperparameters h;
  HyperFlags flags;
  sgbdt::DpBoostOptions dpboost;
  CLI::App* train = app.add_subcommand("train", "train one model");
  train->add_option("--data", data, "CSV file")->required();
  train->add_option("--schema", schema, "schema JSON")->required();
  train->add_option("--learner", learner_name, "sgbdt | dpboost | nonprivate")
      ->check(CLI::IsMember({"sgbdt", "dpboost", "nonprivate"}));
  train->add_option("--seed", seed, "base seed");
  train->add_option("--model", model_out, "write the ensemble here")->required();
  train->add_option("--manifest", manifest_out, "write the run manifest here");
  train->add_option("--ledger-csv", ledger_csv,
                    "write per-point spent/remaining budget (sgbdt)");
  train->add_option("--ensembles", dpboost.num_ensembles,
                    "dpboost: number of ensembles");
  train->add_option("--trees-per-ensemble", dpboost.trees_per_ensemble,
                    "dpboost: trees per ensemble");
  AddHyperparameterFlags(train, h, flags);

  // plan
  CLI::App* plan = app.add_subcommand("plan", "print the accountant plan");
  Hyperparameters plan_h;
  HyperFlags plan_flags;
  AddHyperparameterFlags(plan, plan_h, plan_flags);

  // eval
  std::string model_in;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a saved model");
  eval->add_option("--model", model_in, "ensemble JSON")->required();
  eval->add_option("--data", data, "CSV file")->required();
  eval->add_option("--schema", schema, "schema JSON")->required();

  // experiment / stream
  std::string config_path, out_dir = "results";
  int threads = 0, repeats = 0;
  CLI::App* experiment =
      app.add_subcommand("experiment", "cross-validated epsilon sweep");
  CLI::App* stream =
      app.add_subcommand("stream", "late-arriving batch, filter on vs off");
  for (CLI::App* sub : {experiment, stream}) {
    sub->add_option("--config", config_path, "experiment JSON")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "override config threads");
    sub->add_option("--repeats", repeats, "override config repeats");
  }

  // distributed
  int parties = 2;
  CLI::App* distributed =
      app.add_subcommand("distributed", "simulate k parties with masking");
  distributed->add_option("--data", data, "CSV file")->required();
  distributed->add_option("--schema", schema, "schema JSON")->required();
  distributed->add_option("--parties", parties, "number of parties")
      ->check(CLI::PositiveNumber);
  distributed->add_option("--seed", seed, "base seed");
  distributed->add_option("--model", model_out, "write party 0's ensemble");
  distributed->add_option("--manifest", manifest_out, "write the transcript");
  Hyperparameters dist_h;
  HyperFlags dist_flags;
  AddHyperparameterFlags(distributed, dist_h, dist_flags);

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) {
    absl::StatusOr<Hyperparameters> hp = ResolveHyperparameters(train, h, flags);
    if (!hp.ok()) return Fail(hp.status());
    absl::StatusOr<sgbdt::Dataset> d = Load(data, schema);
    if (!d.ok()) return Fail(d.status());
    sgbdt::Ensemble ensemble;
    nlohmann::json manifest;
    if (learner_name == "sgbdt") {
      absl::StatusOr<sgbdt::TrainResult> r = sgbdt::TrainSgbdt(*d, *hp, seed);
      if (!r.ok()) return Fail(r.status());
      ensemble = r->ensemble;
      manifest = r->manifest.ToJson();
      if (!ledger_csv.empty()) {
        std::ofstream out(ledger_csv);
        if (!out) return Fail(absl::UnavailableError("cannot write ledger"));
        out << "index,spent,remaining\n";
        const nlohmann::json& ledger = r->manifest.ledger;
        const double budget = ledger.at("budget").get<double>();
        const auto& spent = ledger.at("spent");
        for (size_t i = 0; i < spent.size(); ++i) {
          const double s = spent[i].get<double>();
          out << i << "," << s << "," << budget - s << "\n";
        }
      }
      std::cout << "epsilon " << r->manifest.epsilon_total << " delta "
                << r->manifest.delta << "\n";
    } else if (learner_name == "dpboost") {
      absl::StatusOr<sgbdt::DpBoostResult> r =
          sgbdt::TrainDpBoost(*d, *hp, dpboost, seed);
      if (!r.ok()) return Fail(r.status());
      ensemble = r->ensemble;
      manifest = r->manifest.ToJson();
      std::cout << "epsilon " << r->manifest.epsilon_total << "\n";
    } else {
      absl::StatusOr<sgbdt::Ensemble> e = sgbdt::TrainNonPrivate(*d, *hp);
      if (!e.ok()) return Fail(e.status());
      ensemble = *e;
    }
    manifest["hyperparameters"] = hp->ToJson();
    manifest["learner"] = learner_name;
    manifest["seed"] = seed;
    if (absl::Status s = ensemble.Save(model_out); !s.ok()) return Fail(s);
    if (!manifest_out.empty()) {
      if (absl::Status s = WriteJson(manifest_out, manifest); !s.ok()) {
        return Fail(s);
      }
    }
    return 0;
  }

  if (plan->parsed()) {
    absl::StatusOr<Hyperparameters> hp =
        ResolveHyperparameters(plan, plan_h, plan_flags);
    if (!hp.ok()) return Fail(hp.status());
    absl::StatusOr<sgbdt::AccountantPlan> p = sgbdt::Initialize(*hp);
    if (!p.ok()) return Fail(p.status());
    std::cout << p->ToJson().dump(1) << "\n";
    return 0;
  }

  if (eval->parsed()) {
    absl::StatusOr<sgbdt::Ensemble> e = sgbdt::Ensemble::Load(model_in);
    if (!e.ok()) return Fail(e.status());
    absl::StatusOr<sgbdt::Dataset> d = Load(data, schema);
    if (!d.ok()) return Fail(d.status());
    absl::StatusOr<double> metric =
        sgbdt::TaskMetric(d->task(), e->PredictAll(*d), d->labels());
    if (!metric.ok()) return Fail(metric.status());
    std::cout << sgbdt::MetricName(d->task()) << " " << *metric << "\n";
    return 0;
  }

  if (experiment->parsed() || stream->parsed()) {
    absl::StatusOr<sgbdt::ExperimentConfig> config =
        sgbdt::ExperimentConfig::LoadFile(config_path);
    if (!config.ok()) return Fail(config.status());
    if (threads > 0) config->threads = threads;
    if (repeats > 0) config->repeats = repeats;
    absl::StatusOr<sgbdt::ExperimentOutput> out =
        experiment->parsed() ? sgbdt::RunExperiment(*config)
                             : sgbdt::RunStreamScenario(*config);
    if (!out.ok()) return Fail(out.status());
    if (absl::Status s = sgbdt::WriteOutputs(*out, out_dir); !s.ok()) {
      return Fail(s);
    }
    std::cout << sgbdt::ResultsCsv(out->rows);
    return 0;
  }

  if (distributed->parsed()) {
    absl::StatusOr<Hyperparameters> hp =
        ResolveHyperparameters(distributed, dist_h, dist_flags);
    if (!hp.ok()) return Fail(hp.status());
    absl::StatusOr<sgbdt::Dataset> d = Load(data, schema);
    if (!d.ok()) return Fail(d.status());
    std::vector<sgbdt::Dataset> split =
        sgbdt::PartitionUniform(*d, parties, sgbdt::DeriveSeed(seed, {7}));
    absl::StatusOr<sgbdt::DistributedResult> r =
        sgbdt::DistributedTrain(split, *hp, seed);
    if (!r.ok()) return Fail(r.status());
    absl::StatusOr<double> metric = sgbdt::TaskMetric(
        d->task(), r->ensemble.PredictAll(*d), d->labels());
    if (!metric.ok()) return Fail(metric.status());
    std::cout << "parties " << parties << " rounds_identical "
              << r->rounds_replicas_identical << " train_"
              << sgbdt::MetricName(d->task()) << " " << *metric << "\n";
    if (!model_out.empty()) {
      if (absl::Status s = r->ensemble.Save(model_out); !s.ok()) return Fail(s);
    }
    if (!manifest_out.empty()) {
      nlohmann::json m;
      m["plan"] = r->plan.ToJson();
      m["rounds_replicas_identical"] = r->rounds_replicas_identical;
      m["transcript"] = nlohmann::json::array();
      for (const sgbdt::TranscriptEntry& t : r->transcript) {
        m["transcript"].push_back({{"kind", t.kind},
                                   {"round", t.round},
                                   {"from", t.from},
                                   {"length", t.length}});
      }
      m["ledgers"] = r->ledgers;
      if (absl::Status s = WriteJson(manifest_out, m); !s.ok()) return Fail(s);
    }
    return 0;
  }
  return 0;
}
