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

#include "sgbdt/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "sgbdt/nonprivate.h"
#include "sgbdt/privacy_filter.h"
#include "sgbdt/random.h"
#include "sgbdt/rdp.h"
#include "sgbdt/sgbdt.h"

namespace sgbdt {
namespace {

namespace fs = std::filesystem;

std::string Resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || fs::path(path).is_absolute() || base_dir.empty()) {
    return path;
  }
  return (fs::path(base_dir) / path).string();
}

bool HigherIsBetter(Task task) { return task == Task::kRegression; }

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double StdDev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1));
}

// Runs fn(i) for i in [0, count) on `threads` workers; first error wins.
absl::Status ParallelFor(size_t count, int threads,
                         const std::function<absl::Status(size_t)>& fn) {
  std::atomic<size_t> next{0};
  std::mutex mu;
  absl::Status first;
  auto worker = [&] {
    for (size_t i = next++; i < count; i = next++) {
      absl::Status s = fn(i);
      if (!s.ok()) {
        std::lock_guard<std::mutex> lock(mu);
        if (first.ok()) first = s;
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return first;
}

absl::StatusOr<Hyperparameters> ApplyOverrides(const Hyperparameters& h,
                                               const nlohmann::json& overrides) {
  nlohmann::json j = h.ToJson();
  for (const auto& item : overrides.items()) j[item.key()] = item.value();
  return Hyperparameters::FromJson(j);
}

struct Loaded {
  Dataset data;
};

absl::StatusOr<Dataset> LoadData(const ExperimentConfig& config) {
  absl::StatusOr<Schema> schema = Schema::LoadFile(config.schema_path);
  if (!schema.ok()) return schema.status();
  return LoadCsv(config.data_path,
                 std::make_shared<const Schema>(*std::move(schema)));
}

// Seeds of one (repeat, fold) cell at epsilon index e.
uint64_t CellSeed(uint64_t seed, size_t e, int repeat, int fold) {
  return DeriveSeed(seed, {e, uint64_t(repeat), uint64_t(fold)});
}

struct CvSummary {
  std::vector<double> metrics;
  double epsilon_reported = 0.0;
  size_t ledger_cells = 0;
  size_t ledger_failures = 0;
  double max_spent = 0.0;
  double budget = 0.0;
  std::string first_ledger_error;
};

// Cross-validates one hyperparameter setting.
absl::StatusOr<CvSummary> CrossValidate(
    const ExperimentConfig& config, const Dataset& data, Learner learner,
    const Hyperparameters& h, size_t eps_index, int repeats,
    const std::function<std::vector<int>(const std::vector<size_t>&, int, int)>&
        arrival_for = nullptr) {
  const int folds = config.folds;
  std::vector<std::vector<std::vector<size_t>>> fold_sets(repeats);
  for (int r = 0; r < repeats; ++r) {
    fold_sets[r] =
        MakeFolds(data.size(), folds, DeriveSeed(config.seed, StreamTag::kFolds, {uint64_t(r)}));
  }
  const size_t cells = static_cast<size_t>(repeats) * folds;
  std::vector<CellResult> results(cells);
  absl::Status status = ParallelFor(cells, config.threads, [&](size_t c) {
    const int r = static_cast<int>(c / folds);
    const int f = static_cast<int>(c % folds);
    std::vector<size_t> train_rows;
    for (int g = 0; g < folds; ++g) {
      if (g == f) continue;
      train_rows.insert(train_rows.end(), fold_sets[r][g].begin(),
                        fold_sets[r][g].end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    const Dataset train = data.Subset(train_rows);
    const Dataset test = data.Subset(fold_sets[r][f]);
    std::vector<int> arrival;
    if (arrival_for) arrival = arrival_for(train_rows, r, f);
    absl::StatusOr<CellResult> cell =
        RunLearner(learner, train, test, h, config.dpboost,
                   CellSeed(config.seed, eps_index, r, f), arrival);
    if (!cell.ok()) return cell.status();
    results[c] = *cell;
    return absl::OkStatus();
  });
  if (!status.ok()) return status;
  CvSummary summary;
  for (const CellResult& cell : results) {
    summary.metrics.push_back(cell.metric);
    summary.epsilon_reported =
        std::max(summary.epsilon_reported, cell.epsilon_reported);
    if (cell.ledger_checked) {
      ++summary.ledger_cells;
      summary.max_spent = std::max(summary.max_spent, cell.max_spent);
      summary.budget = cell.budget;
      if (!cell.ledger_ok) {
        ++summary.ledger_failures;
        if (summary.first_ledger_error.empty()) {
          summary.first_ledger_error = cell.ledger_error;
        }
      }
    }
  }
  return summary;
}

// Cartesian product of the grid in a seeded random order.
std::vector<nlohmann::json> GridCandidates(const ExperimentConfig& config) {
  std::vector<nlohmann::json> out(1, nlohmann::json::object());
  for (const auto& [name, values] : config.grid) {
    std::vector<nlohmann::json> next;
    for (const nlohmann::json& partial : out) {
      for (const nlohmann::json& v : values) {
        nlohmann::json c = partial;
        c[name] = v;
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  Rng rng = MakeRng(DeriveSeed(config.seed, {0x5eed}));
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

nlohmann::json LedgerJson(const CvSummary& s) {
  return {{"cells_checked", s.ledger_cells},
          {"failures", s.ledger_failures},
          {"max_spent", s.max_spent},
          {"budget", s.budget},
          {"first_error", s.first_ledger_error}};
}

ResultRow MakeRow(const ExperimentConfig& config, const std::string& learner,
                  Task task, const CvSummary& s, const std::string& hash) {
  ResultRow row;
  row.learner = learner;
  row.dataset = config.dataset;
  row.epsilon = s.epsilon_reported;
  row.metric = MetricName(task);
  row.mean = Mean(s.metrics);
  row.std = StdDev(s.metrics);
  row.seed = config.seed;
  row.config_hash = hash;
  row.values = s.metrics;
  return row;
}

}  // namespace

absl::StatusOr<Learner> ParseLearner(const std::string& name) {
  if (name == "sgbdt") return Learner::kSgbdt;
  if (name == "dpboost") return Learner::kDpBoost;
  if (name == "dpmean") return Learner::kDpMean;
  if (name == "nonprivate") return Learner::kNonPrivate;
  return absl::InvalidArgumentError(absl::StrCat("unknown learner '", name, "'"));
}

const char* LearnerName(Learner learner) {
  switch (learner) {
    case Learner::kSgbdt:
      return "sgbdt";
    case Learner::kDpBoost:
      return "dpboost";
    case Learner::kDpMean:
      return "dpmean";
    case Learner::kNonPrivate:
      return "nonprivate";
  }
  return "unknown";
}

absl::StatusOr<ExperimentConfig> ExperimentConfig::FromJson(
    const nlohmann::json& j, const std::string& base_dir) {
  ExperimentConfig c;
  c.raw = j;
  try {
    c.dataset = j.at("dataset").get<std::string>();
    c.data_path = Resolve(j.at("data").get<std::string>(), base_dir);
    if (!j.contains("schema")) {
      return absl::InvalidArgumentError("config lacks 'schema'");
    }
    c.schema_path = Resolve(j.at("schema").get<std::string>(), base_dir);
    absl::StatusOr<Learner> learner =
        ParseLearner(j.value("learner", std::string("sgbdt")));
    if (!learner.ok()) return learner.status();
    c.learner = *learner;
    c.folds = j.value("folds", 5);
    c.repeats = j.value("repeats", 20);
    c.seed = j.value("seed", uint64_t{1});
    c.epsilons = j.value("epsilons", std::vector<double>{});
    c.init_fraction = j.value("init_fraction", 0.1);
    c.search_repeats = j.value("search_repeats", 1);
    c.threads = j.value("threads", 1);
    if (j.contains("hyperparameters")) {
      absl::StatusOr<Hyperparameters> h =
          Hyperparameters::FromJson(j.at("hyperparameters"));
      if (!h.ok()) return h.status();
      c.base = *h;
    }
    if (j.contains("per_epsilon")) {
      for (const auto& item : j.at("per_epsilon").items()) {
        c.per_epsilon[std::stod(item.key())] = item.value();
      }
    }
    if (j.contains("dpboost")) {
      const nlohmann::json& d = j.at("dpboost");
      c.dpboost.num_ensembles = d.value("num_ensembles", 1);
      c.dpboost.trees_per_ensemble = d.value("trees_per_ensemble", 50);
      c.dpboost.gdf = d.value("gdf", true);
      c.dpboost.init_score = d.value("init_score", true);
    }
    if (j.contains("grid")) {
      for (const auto& item : j.at("grid").items()) {
        c.grid[item.key()] = item.value().get<std::vector<nlohmann::json>>();
      }
    }
    if (j.contains("stream")) {
      c.stream.batch_fraction = j.at("stream").value("batch_fraction", 0.2);
      c.stream.non_iid = j.at("stream").value("non_iid", true);
    }
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed config: ", e.what()));
  }
  if (c.folds < 2) return absl::InvalidArgumentError("folds must be >= 2");
  if (c.repeats < 1 || c.search_repeats < 1) {
    return absl::InvalidArgumentError("repeats must be >= 1");
  }
  if (!(c.init_fraction >= 0 && c.init_fraction < 1)) {
    return absl::InvalidArgumentError("init_fraction must be in [0, 1)");
  }
  if (c.epsilons.empty() && c.learner != Learner::kNonPrivate) {
    return absl::InvalidArgumentError("config lists no epsilons");
  }
  for (double e : c.epsilons) {
    if (!(e > 0)) return absl::InvalidArgumentError("epsilons must be > 0");
  }
  if (!(c.stream.batch_fraction >= 0 && c.stream.batch_fraction < 1)) {
    return absl::InvalidArgumentError("stream.batch_fraction must be in [0, 1)");
  }
  return c;
}

absl::StatusOr<ExperimentConfig> ExperimentConfig::LoadFile(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", e.what()));
  }
  return FromJson(j, fs::path(path).parent_path().string());
}

absl::StatusOr<Hyperparameters> ExperimentConfig::ForEpsilon(
    double epsilon) const {
  Hyperparameters h = base;
  auto it = per_epsilon.find(epsilon);
  if (it != per_epsilon.end()) {
    absl::StatusOr<Hyperparameters> merged = ApplyOverrides(h, it->second);
    if (!merged.ok()) return merged.status();
    h = *merged;
  }
  if (learner == Learner::kDpMean) {
    h.eps_init = epsilon / (h.init_noise == InitNoise::kNarrowScale ? 2.0 : 1.0);
    h.eps_trees = epsilon;  // unused
    return h;
  }
  const bool init =
      learner == Learner::kDpBoost ? dpboost.init_score : h.use_init_score;
  const double eps_init = init ? init_fraction * epsilon : 0.0;
  h.eps_init = eps_init / (h.init_noise == InitNoise::kNarrowScale ? 2.0 : 1.0);
  h.eps_trees = epsilon - eps_init;
  return h;
}

std::string ConfigHash(const nlohmann::json& j) {
  const std::string text = j.dump();
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return absl::StrFormat("%016x", hash);
}

std::vector<std::vector<size_t>> MakeFolds(size_t n, int folds,
                                           uint64_t seed) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng = MakeRng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<size_t>> out(folds);
  for (int f = 0; f < folds; ++f) {
    out[f].assign(order.begin() + n * f / folds,
                  order.begin() + n * (f + 1) / folds);
    std::sort(out[f].begin(), out[f].end());
  }
  return out;
}

absl::StatusOr<CellResult> RunLearner(Learner learner, const Dataset& train,
                                      const Dataset& test,
                                      const Hyperparameters& h,
                                      const DpBoostOptions& dpboost,
                                      uint64_t seed,
                                      const std::vector<int>& arrival) {
  CellResult cell;
  std::vector<double> predictions;
  switch (learner) {
    case Learner::kSgbdt: {
      TrainOptions options;
      options.arrival_round = arrival;
      absl::StatusOr<TrainResult> result = TrainSgbdt(train, h, seed, options);
      if (!result.ok()) return result.status();
      predictions = result->ensemble.PredictAll(test);
      cell.epsilon_reported = result->manifest.epsilon_total;
      const nlohmann::json& ledger = result->manifest.ledger;
      cell.ledger_checked = true;
      cell.budget = ledger.at("budget").get<double>();
      cell.max_spent = ledger.at("max_spent").get<double>();
      absl::Status check = VerifyLedgerSummary(ledger);
      cell.ledger_ok = check.ok() && cell.max_spent <= cell.budget;
      if (!check.ok()) cell.ledger_error = std::string(check.message());
      break;
    }
    case Learner::kDpBoost: {
      absl::StatusOr<DpBoostResult> result =
          TrainDpBoost(train, h, dpboost, seed);
      if (!result.ok()) return result.status();
      predictions = result->ensemble.PredictAll(test);
      cell.epsilon_reported = result->manifest.epsilon_total;
      break;
    }
    case Learner::kDpMean: {
      Rng rng = MakeRng(DeriveSeed(seed, StreamTag::kInitNoise));
      absl::StatusOr<double> mean =
          DpInitScore(train.labels(), h.m_star, h.eps_init, h.init_noise, rng);
      if (!mean.ok()) return mean.status();
      Ensemble e;
      e.loss = LossForTask(train.task());
      e.init_score = InitScoreToRaw(e.loss, *mean);
      predictions = e.PredictAll(test);
      cell.epsilon_reported = InitScoreEpsilon(h.eps_init, h.init_noise);
      break;
    }
    case Learner::kNonPrivate: {
      absl::StatusOr<Ensemble> e = TrainNonPrivate(train, h);
      if (!e.ok()) return e.status();
      predictions = e->PredictAll(test);
      cell.epsilon_reported = std::numeric_limits<double>::infinity();
      break;
    }
  }
  absl::StatusOr<double> metric =
      TaskMetric(test.task(), predictions, test.labels());
  if (!metric.ok()) return metric.status();
  cell.metric = *metric;
  return cell;
}

absl::StatusOr<ExperimentOutput> RunExperiment(const ExperimentConfig& config) {
  absl::StatusOr<Dataset> data = LoadData(config);
  if (!data.ok()) return data.status();
  const Task task = data->task();
  const std::string hash = ConfigHash(config.raw);
  ExperimentOutput out;
  out.manifest["config"] = config.raw;
  out.manifest["config_hash"] = hash;
  out.manifest["rows"] = nlohmann::json::array();

  std::vector<double> epsilons = config.epsilons;
  if (config.learner == Learner::kNonPrivate) {
    epsilons = {std::numeric_limits<double>::infinity()};
  }
  for (size_t e = 0; e < epsilons.size(); ++e) {
    absl::StatusOr<Hyperparameters> h =
        config.learner == Learner::kNonPrivate ? config.base
                                               : config.ForEpsilon(epsilons[e]);
    if (!h.ok()) return h.status();
    nlohmann::json search = nlohmann::json::array();
    if (!config.grid.empty()) {
      double best = 0.0;
      std::optional<Hyperparameters> best_h;
      for (const nlohmann::json& candidate : GridCandidates(config)) {
        absl::StatusOr<Hyperparameters> ch = ApplyOverrides(*h, candidate);
        if (!ch.ok()) return ch.status();
        absl::StatusOr<CvSummary> s = CrossValidate(
            config, *data, config.learner, *ch, e, config.search_repeats);
        if (!s.ok()) {
          search.push_back({{"candidate", candidate},
                            {"error", std::string(s.status().message())}});
          continue;
        }
        const double m = Mean(s->metrics);
        search.push_back({{"candidate", candidate}, {"mean", m}});
        const bool better = HigherIsBetter(task) ? m > best : m < best;
        if (!best_h || better) {
          best = m;
          best_h = *ch;
        }
      }
      if (!best_h) {
        return absl::FailedPreconditionError(
            "no grid candidate is feasible");
      }
      h = *best_h;
    }
    absl::StatusOr<CvSummary> s =
        CrossValidate(config, *data, config.learner, *h, e, config.repeats);
    if (!s.ok()) return s.status();
    ResultRow row = MakeRow(config, LearnerName(config.learner), task, *s, hash);
    row.details = {{"epsilon_target", epsilons[e]},
                   {"hyperparameters", h->ToJson()},
                   {"ledger", LedgerJson(*s)},
                   {"values", s->metrics}};
    if (!search.empty()) row.details["search"] = search;
    if (config.learner == Learner::kSgbdt) {
      absl::StatusOr<AccountantPlan> plan = Initialize(*h);
      if (plan.ok()) row.details["plan"] = plan->ToJson();
    }
    if (config.learner == Learner::kDpBoost) {
      row.details["dpboost"] = {{"num_ensembles", config.dpboost.num_ensembles},
                                {"trees_per_ensemble",
                                 config.dpboost.trees_per_ensemble},
                                {"gdf", config.dpboost.gdf},
                                {"init_score", config.dpboost.init_score}};
    }
    nlohmann::json manifest_row = row.details;
    manifest_row["learner"] = row.learner;
    manifest_row["epsilon"] = row.epsilon;
    manifest_row["mean"] = row.mean;
    manifest_row["std"] = row.std;
    out.manifest["rows"].push_back(manifest_row);
    out.rows.push_back(std::move(row));
  }
  return out;
}

absl::StatusOr<ExperimentOutput> RunStreamScenario(
    const ExperimentConfig& config) {
  if (config.learner != Learner::kSgbdt) {
    return absl::InvalidArgumentError("the stream scenario runs S-GBDT only");
  }
  absl::StatusOr<Dataset> data = LoadData(config);
  if (!data.ok()) return data.status();
  const Task task = data->task();
  const std::string hash = ConfigHash(config.raw);
  ExperimentOutput out;
  out.manifest["config"] = config.raw;
  out.manifest["config_hash"] = hash;
  out.manifest["rows"] = nlohmann::json::array();

  // Batch candidates: top label quartile (regression) or the positive class.
  std::vector<uint8_t> candidate(data->size(), 1);
  if (config.stream.non_iid) {
    if (task == Task::kRegression) {
      std::vector<double> labels = data->labels();
      std::sort(labels.begin(), labels.end());
      const double q3 = labels[labels.size() * 3 / 4];
      for (size_t i = 0; i < data->size(); ++i) candidate[i] = data->label(i) >= q3;
    } else {
      for (size_t i = 0; i < data->size(); ++i) candidate[i] = data->label(i) == 1.0;
    }
  }

  for (size_t e = 0; e < config.epsilons.size(); ++e) {
    absl::StatusOr<Hyperparameters> h = config.ForEpsilon(config.epsilons[e]);
    if (!h.ok()) return h.status();
    const int t_regular = h->t_regular;
    auto arrival_for = [&](const std::vector<size_t>& rows, int r, int f) {
      std::vector<size_t> pool;
      for (size_t k = 0; k < rows.size(); ++k) {
        if (candidate[rows[k]]) pool.push_back(k);
      }
      Rng rng = MakeRng(DeriveSeed(config.seed, StreamTag::kStreamBatch,
                                   {e, uint64_t(r), uint64_t(f)}));
      std::shuffle(pool.begin(), pool.end(), rng);
      const size_t batch = std::min(
          pool.size(),
          static_cast<size_t>(config.stream.batch_fraction * rows.size()));
      std::vector<int> arrival(rows.size(), 0);
      for (size_t k = 0; k < batch; ++k) arrival[pool[k]] = t_regular;
      return arrival;
    };
    for (bool filter : {true, false}) {
      Hyperparameters hf = *h;
      hf.use_filter = filter;
      absl::StatusOr<CvSummary> s = CrossValidate(
          config, *data, Learner::kSgbdt, hf, e, config.repeats, arrival_for);
      if (!s.ok()) return s.status();
      ResultRow row = MakeRow(
          config, filter ? "sgbdt_stream_filter" : "sgbdt_stream_nofilter",
          task, *s, hash);
      row.details = {{"epsilon_target", config.epsilons[e]},
                     {"hyperparameters", hf.ToJson()},
                     {"ledger", LedgerJson(*s)},
                     {"values", s->metrics}};
      absl::StatusOr<AccountantPlan> plan = Initialize(hf);
      if (plan.ok()) row.details["plan"] = plan->ToJson();
      nlohmann::json manifest_row = row.details;
      manifest_row["learner"] = row.learner;
      manifest_row["epsilon"] = row.epsilon;
      manifest_row["mean"] = row.mean;
      manifest_row["std"] = row.std;
      out.manifest["rows"].push_back(manifest_row);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

std::string ResultsCsv(const std::vector<ResultRow>& rows) {
  std::string out = "learner,dataset,epsilon,metric,mean,std,seed,config_hash\n";
  for (const ResultRow& r : rows) {
    absl::StrAppendFormat(&out, "%s,%s,%.6g,%s,%.6f,%.6f,%d,%s\n", r.learner,
                          r.dataset, r.epsilon, r.metric, r.mean, r.std,
                          r.seed, r.config_hash);
  }
  return out;
}

absl::Status WriteOutputs(const ExperimentOutput& output,
                          const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return absl::UnavailableError(absl::StrCat("cannot create ", dir));
  {
    std::ofstream csv(fs::path(dir) / "results.csv");
    if (!csv) return absl::UnavailableError("cannot write results.csv");
    csv << ResultsCsv(output.rows);
  }
  std::ofstream manifest(fs::path(dir) / "manifest.json");
  if (!manifest) return absl::UnavailableError("cannot write manifest.json");
  manifest << output.manifest.dump(1) << "\n";
  return absl::OkStatus();
}

}  // namespace sgbdt
