// Copyright 2026 The LingMess-cpp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// lingmess: train, predict, evaluate, diagnose and synth commands.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lingmess/categorizer.h"
#include "lingmess/checkpoint.h"
#include "lingmess/config.h"
#include "lingmess/corpus.h"
#include "lingmess/diagnostics.h"
#include "lingmess/encoder.h"
#include "lingmess/inference.h"
#include "lingmess/metrics.h"
#include "lingmess/synthdata.h"
#include "lingmess/training.h"

namespace {

using namespace lingmess;
using nlohmann::ordered_json;

std::string FlagName(const std::string &key) {
  std::string flag = key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  return "--" + flag;
}

// Registers one string flag per config key; values are applied after the
// config file so that flags win.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void Register(CLI::App *cmd) {
    cmd->add_option("--config", config_path, "Config file (JSON or key=value)");
    for (const auto &key : ConfigKeys()) {
      cmd->add_option(FlagName(key), values[key], "Config key " + key);
    }
  }

  TrainConfig Resolve(TrainConfig base = {}) const {
    TrainConfig cfg = config_path.empty() ? base : LoadConfigFile(config_path, base);
    for (const auto &key : ConfigKeys()) {
      const auto it = values.find(key);
      if (it != values.end() && !it->second.empty()) SetConfigValue(cfg, key, it->second);
    }
    cfg.Validate();
    return cfg;
  }

  bool Any() const {
    if (!config_path.empty()) return true;
    for (const auto &[k, v] : values) {
      if (!v.empty()) return true;
    }
    return false;
  }
};

std::ofstream OpenOut(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void WriteText(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    auto out = OpenOut(path);
    out << text;
  }
}

std::vector<Clustering> Clusterings(const std::vector<Document> &docs) {
  std::vector<Clustering> out;
  out.reserve(docs.size());
  for (const auto &d : docs) out.push_back(GoldClustering(d));
  return out;
}

Span ParseSpan(const std::string &text) {
  const auto sep = text.find_first_of(",:-");
  if (sep == std::string::npos) throw std::invalid_argument("span must be START,END: " + text);
  try {
    return {std::stoul(text.substr(0, sep)), std::stoul(text.substr(sep + 1))};
  } catch (const std::exception &) {
    throw std::invalid_argument("span must be START,END: " + text);
  }
}

std::vector<std::string> SplitWords(const std::string &text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

// ---- train ----

struct TrainArgs {
  std::string train_path, out_path, log_path;
  bool quiet = false;
  ConfigFlags config;
};

int RunTrain(const TrainArgs &args) {
  const TrainConfig cfg = args.config.Resolve();
  const auto docs = ReadCorpusFile(args.train_path);
  if (docs.empty()) throw std::runtime_error("no documents in " + args.train_path);
  const std::string log_path =
      args.log_path.empty() ? args.out_path + ".log.jsonl" : args.log_path;
  auto log = OpenOut(log_path);
  TrainOptions options;
  options.threads = ThreadsFromEnv();
  options.on_epoch = [&](const EpochLog &e) {
    ordered_json j{{"epoch", e.epoch}, {"loss", e.loss}, {"wall_seconds", e.wall_seconds}};
    log << j.dump() << "\n" << std::flush;
    if (!args.quiet) std::cerr << "epoch " << e.epoch << " loss " << e.loss << "\n";
  };
  const auto result = Train(docs, cfg, options);
  SaveCheckpoint(result.model, args.out_path);
  return 0;
}

// ---- predict ----

struct PredictArgs {
  std::string model_path, input_path, out_path;
};

int RunPredict(const PredictArgs &args) {
  const Model model = LoadCheckpoint(args.model_path);
  const auto docs = ReadCorpusFile(args.input_path);
  const auto predictions = PredictAll(docs, model, ThreadsFromEnv());
  std::ostringstream out;
  for (size_t i = 0; i < docs.size(); ++i) {
    auto j = ordered_json::parse(ToJsonLine(WithClusters(docs[i], predictions[i])));
    if (!docs[i].gold_clusters.empty()) {
      auto gold = ordered_json::array();
      for (const auto &c : docs[i].gold_clusters) {
        auto cluster = ordered_json::array();
        for (const auto &s : c) cluster.push_back({s.start, s.end});
        gold.push_back(cluster);
      }
      j["gold_clusters"] = gold;
    }
    out << j.dump() << "\n";
  }
  WriteText(args.out_path, out.str());
  return 0;
}

// ---- evaluate ----

struct EvaluateArgs {
  std::string gold_path, pred_path, compare_path, model_path, out_path;
  bool table = false;
  bool pruned_only = false;
  int resamples = 10000;
  uint64_t seed = 0;
};

int RunEvaluate(const EvaluateArgs &args) {
  const auto gold_docs = ReadCorpusFile(args.gold_path);
  const auto key = Clusterings(gold_docs);
  const auto response = Clusterings(ReadCorpusFile(args.pred_path));
  EvalReport report = Evaluate(key, response);
  if (!args.model_path.empty()) {
    report.per_category =
        PairwiseByCategory(gold_docs, LoadCheckpoint(args.model_path), args.pruned_only);
  }
  ordered_json j = ToJson(report);
  if (!args.compare_path.empty()) {
    const auto other = Clusterings(ReadCorpusFile(args.compare_path));
    const EvalReport other_report = Evaluate(key, other);
    const double p = PermutationTest(PerDocConllF1(key, response), PerDocConllF1(key, other),
                                     args.resamples, args.seed);
    j["compare"] = {{"conll_f1", other_report.conll_f1},
                    {"resamples", args.resamples},
                    {"p_value", p}};
  }
  if (!args.out_path.empty()) WriteText(args.out_path, j.dump(2) + "\n");
  if (args.table) {
    std::cout << FormatTable(report);
    if (j.contains("compare")) {
      std::cout << "compare CoNLL F1 " << j["compare"]["conll_f1"].get<double>() * 100
                << "  p = " << j["compare"]["p_value"].get<double>() << "\n";
    }
  } else if (args.out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

// ---- diagnose ----

struct RouteArgs {
  std::string candidate, query;
  bool random = false;
};

int RunRoute(const RouteArgs &args) {
  const auto c = SplitWords(args.candidate);
  const auto q = SplitWords(args.query);
  if (c.empty() || q.empty()) throw std::invalid_argument("--c and --q must be non-empty");
  const Category t = args.random ? CategorizeRandom(c.back(), q.back()) : Categorize(c, q);
  std::cout << CategoryName(t) << "\n";
  return 0;
}

struct ScorePairArgs {
  std::string model_path, input_path, doc_key, candidate, query;
};

int RunScorePair(const ScorePairArgs &args) {
  const Model model = LoadCheckpoint(args.model_path);
  const auto docs = ReadCorpusFile(args.input_path);
  const Document *doc = nullptr;
  for (const auto &d : docs) {
    if (args.doc_key.empty() || d.doc_key == args.doc_key) {
      doc = &d;
      break;
    }
  }
  if (doc == nullptr) throw std::invalid_argument("document not found: " + args.doc_key);
  const MentionPair pair{ParseSpan(args.candidate), ParseSpan(args.query)};
  for (const Span &s : {pair.candidate, pair.query}) {
    if (s.start > s.end || s.end >= doc->size()) {
      throw std::invalid_argument("span out of bounds: " + ToString(s));
    }
  }
  if (!Precedes(pair.candidate, pair.query)) {
    throw std::invalid_argument("candidate must precede query");
  }
  const Tensor2 enc = Encode(*doc, model.Encoder(), model.vocab());
  const Router router(model.config().routing_mode, *doc);
  auto j = ToJson(PairScore(pair, enc, model.Scorers(), router));
  ordered_json out{{"doc_key", doc->doc_key},
                   {"candidate", doc->Text(pair.candidate)},
                   {"query", doc->Text(pair.query)}};
  out.update(j);
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct GradCheckArgs {
  double eps = kGradCheckEps;
  double max_error = 0.0;
  ConfigFlags config;
};

int RunGradCheckCmd(const GradCheckArgs &args) {
  const TrainConfig cfg = args.config.Resolve(GradCheckConfig());
  const auto r = RunGradCheck(cfg, args.eps);
  const Document doc = GradCheckDocument();
  const Model names = Model::Initialize(cfg, Vocab::Build({doc}, 1));
  ordered_json j{{"max_relative_error", r.max_relative_error},
                 {"worst_param", names.store().name(r.worst_param)},
                 {"worst_entry", r.worst_entry},
                 {"entries_checked", r.entries_checked},
                 {"eps", args.eps}};
  std::cout << j.dump(2) << "\n";
  if (args.max_error > 0.0 && !(r.max_relative_error < args.max_error)) return 1;
  return 0;
}

// ---- synth ----

struct SynthArgs {
  SynthSpec spec;
  std::string out_path;
};

int RunSynth(const SynthArgs &args) {
  std::ostringstream out;
  WriteJsonl(Generate(args.spec), out);
  WriteText(args.out_path, out.str());
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"LingMess multi-expert coreference resolution"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  std::function<int()> action;

  TrainArgs train;
  auto *train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  train_cmd->add_option("--train", train.train_path, "Training corpus (JSONL or CoNLL-2012)")
      ->required();
  train_cmd->add_option("--out", train.out_path, "Checkpoint path")->required();
  train_cmd->add_option("--log", train.log_path, "Loss log (default: <out>.log.jsonl)");
  train_cmd->add_flag("--quiet", train.quiet, "No per-epoch output on stderr");
  train.config.Register(train_cmd);
  train_cmd->callback([&] { action = [&] { return RunTrain(train); }; });

  PredictArgs predict;
  auto *predict_cmd = app.add_subcommand("predict", "Write predicted clusters as JSONL");
  predict_cmd->add_option("--model", predict.model_path, "Checkpoint")->required();
  predict_cmd->add_option("--input", predict.input_path, "Corpus (JSONL or CoNLL-2012)")
      ->required();
  predict_cmd->add_option("--out", predict.out_path, "Output JSONL (default: stdout)");
  predict_cmd->callback([&] { action = [&] { return RunPredict(predict); }; });

  EvaluateArgs evaluate;
  auto *eval_cmd = app.add_subcommand("evaluate", "Score predictions against gold clusters");
  eval_cmd->add_option("--gold", evaluate.gold_path, "Gold corpus")->required();
  eval_cmd->add_option("--pred", evaluate.pred_path, "Predicted JSONL")->required();
  eval_cmd->add_option("--compare", evaluate.compare_path,
                       "Second prediction file for a paired permutation test");
  eval_cmd->add_option("--model", evaluate.model_path,
                       "Checkpoint for per-category pairwise scores on the gold corpus");
  eval_cmd->add_flag("--pruned-only", evaluate.pruned_only,
                     "Pairwise scores only over mentions the model keeps");
  eval_cmd->add_option("--resamples", evaluate.resamples, "Permutation test resamples")
      ->check(CLI::Range(1000, 100000000));
  eval_cmd->add_option("--seed", evaluate.seed, "Permutation test seed");
  eval_cmd->add_option("--out", evaluate.out_path, "Write the JSON report here");
  eval_cmd->add_flag("--table", evaluate.table, "Print a table instead of JSON");
  eval_cmd->callback([&] { action = [&] { return RunEvaluate(evaluate); }; });

  auto *diag_cmd = app.add_subcommand("diagnose", "Routing, scoring and gradient audits");
  diag_cmd->require_subcommand(1);

  auto *tables_cmd = diag_cmd->add_subcommand("dump-tables", "Print pronoun groups and stop words");
  tables_cmd->callback([&] {
    action = [] {
      std::cout << TablesJson().dump(2) << "\n";
      return 0;
    };
  });

  RouteArgs route;
  auto *route_cmd = diag_cmd->add_subcommand("route", "Print the category of a mention pair");
  route_cmd->add_option("--c", route.candidate, "Candidate text")->required();
  route_cmd->add_option("--q", route.query, "Query text")->required();
  route_cmd->add_flag("--random", route.random, "Use the random routing function");
  route_cmd->callback([&] { action = [&] { return RunRoute(route); }; });

  ScorePairArgs score;
  auto *score_cmd = diag_cmd->add_subcommand("score-pair", "Print the score breakdown of a pair");
  score_cmd->add_option("--model", score.model_path, "Checkpoint")->required();
  score_cmd->add_option("--input", score.input_path, "Corpus holding the document")->required();
  score_cmd->add_option("--doc-key", score.doc_key, "Document (default: first)");
  score_cmd->add_option("--c", score.candidate, "Candidate span START,END")->required();
  score_cmd->add_option("--q", score.query, "Query span START,END")->required();
  score_cmd->callback([&] { action = [&] { return RunScorePair(score); }; });

  GradCheckArgs gradcheck;
  auto *grad_cmd = diag_cmd->add_subcommand("gradcheck", "Finite-difference gradient check");
  grad_cmd->add_option("--eps", gradcheck.eps, "Central difference step")
      ->check(CLI::Range(1e-12, 1e-3));
  grad_cmd->add_option("--max-error", gradcheck.max_error,
                       "Exit with status 1 unless the error is below this");
  gradcheck.config.Register(grad_cmd);
  grad_cmd->callback([&] { action = [&] { return RunGradCheckCmd(gradcheck); }; });

  SynthArgs synth;
  auto *synth_cmd = app.add_subcommand("synth", "Generate the synthetic corpus");
  synth_cmd->add_option("--n-docs", synth.spec.n_docs, "Number of documents")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.spec.seed, "Seed");
  synth_cmd->add_flag("--heldout-names", synth.spec.heldout_names,
                      "Use the held-out name lexicon");
  synth_cmd->add_option("--ambiguous-episodes", synth.spec.ambiguous_episodes,
                        "Extra name-matching episodes per document")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--out", synth.out_path, "Output JSONL (default: stdout)");
  synth_cmd->callback([&] { action = [&] { return RunSynth(synth); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }
  try {
    return action ? action() : 0;
  } catch (const std::exception &e) {
    std::cerr << "lingmess: " << e.what() << "\n";
    return 1;
  }
}
