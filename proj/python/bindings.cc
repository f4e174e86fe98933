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


// Python extension module. Documents travel as JSONL text and reports as
// JSON text; the lingmess package wraps both in native Python objects.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lingmess/categorizer.h"
#include "lingmess/checkpoint.h"
#include "lingmess/config.h"
#include "lingmess/corpus.h"
#include "lingmess/diagnostics.h"
#include "lingmess/inference.h"
#include "lingmess/metrics.h"
#include "lingmess/synthdata.h"
#include "lingmess/training.h"

namespace py = pybind11;
using namespace lingmess;

namespace {

std::vector<Document> ParseText(const std::string &jsonl) {
  std::istringstream in(jsonl);
  return ParseJsonl(in);
}

std::string ToText(const std::vector<Document> &docs) {
  std::ostringstream out;
  WriteJsonl(docs, out);
  return out.str();
}

std::vector<Clustering> GoldOf(const std::vector<Document> &docs) {
  std::vector<Clustering> out;
  for (const auto &d : docs) out.push_back(GoldClustering(d));
  return out;
}

TrainConfig ConfigFrom(const std::string &json_text) {
  TrainConfig cfg;
  ApplyJson(nlohmann::json::parse(json_text), cfg);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_lingmess, m) {
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<CheckpointError>(m, "CheckpointError", PyExc_ValueError);
  py::register_exception<SynthError>(m, "SynthError", PyExc_ValueError);
  py::register_exception<TrainingDiverged>(m, "TrainingDiverged", PyExc_RuntimeError);

  m.def(
      "categorize",
      [](const std::vector<std::string> &candidate, const std::vector<std::string> &query) {
        return std::string(CategoryName(Categorize(candidate, query)));
      },
      py::arg("candidate"), py::arg("query"));

  m.def("tables_json", [] { return TablesJson().dump(2); });

  m.def(
      "synth",
      [](int n_docs, uint64_t seed, bool heldout_names, int ambiguous_episodes) {
        return ToText(Generate({n_docs, seed, heldout_names, ambiguous_episodes}));
      },
      py::arg("n_docs") = 20, py::arg("seed") = 0, py::arg("heldout_names") = false,
      py::arg("ambiguous_episodes") = 0);

  m.def("normalize_jsonl", [](const std::string &jsonl) { return ToText(ParseText(jsonl)); });
  m.def("read_corpus", [](const std::string &path) { return ToText(ReadCorpusFile(path)); });

  m.def("default_config_json", [] { return ToJson(TrainConfig{}).dump(); });

  py::class_<Model>(m, "Model")
      .def_static("load", &LoadCheckpoint, py::arg("path"))
      .def_static("from_bytes", &DeserializeCheckpoint, py::arg("text"))
      .def("save", [](const Model &model, const std::string &path) { SaveCheckpoint(model, path); })
      .def("to_bytes", [](const Model &model) { return py::bytes(SerializeCheckpoint(model)); })
      .def("config_json", [](const Model &model) { return ToJson(model.config()).dump(); })
      .def(
          "predict_jsonl",
          [](const Model &model, const std::string &jsonl, int threads) {
            const auto docs = ParseText(jsonl);
            std::vector<Clustering> pred;
            {
              py::gil_scoped_release release;
              pred = PredictAll(docs, model, threads);
            }
            std::vector<Document> out;
            for (size_t i = 0; i < docs.size(); ++i) out.push_back(WithClusters(docs[i], pred[i]));
            return ToText(out);
          },
          py::arg("jsonl"), py::arg("threads") = 0)
      .def(
          "pairwise_json",
          [](const Model &model, const std::string &jsonl, bool pruned_only) {
            EvalReport report;
            report.per_category = PairwiseByCategory(ParseText(jsonl), model, pruned_only);
            return ToJson(report)["per_category"].dump();
          },
          py::arg("jsonl"), py::arg("pruned_only") = false);

  m.def(
      "train",
      [](const std::string &jsonl, const std::string &config_json, int threads,
         const std::function<void(int, double)> &on_epoch) {
        const auto docs = ParseText(jsonl);
        const TrainConfig cfg = ConfigFrom(config_json);
        TrainOptions opts;
        opts.threads = threads;
        if (on_epoch) {
          opts.on_epoch = [&](const EpochLog &log) {
            py::gil_scoped_acquire acquire;
            on_epoch(log.epoch, log.loss);
          };
        }
        TrainResult result = [&] {
          py::gil_scoped_release release;
          return Train(docs, cfg, opts);
        }();
        std::vector<double> losses;
        for (const auto &log : result.log) losses.push_back(log.loss);
        return std::make_pair(std::move(result.model), losses);
      },
      py::arg("jsonl"), py::arg("config_json"), py::arg("threads") = 0,
      py::arg("on_epoch") = nullptr);

  m.def(
      "evaluate_json",
      [](const std::string &gold_jsonl, const std::string &pred_jsonl) {
        return ToJson(Evaluate(GoldOf(ParseText(gold_jsonl)), GoldOf(ParseText(pred_jsonl))))
            .dump();
      },
      py::arg("gold_jsonl"), py::arg("pred_jsonl"));

  m.def(
      "per_doc_conll_f1",
      [](const std::string &gold_jsonl, const std::string &pred_jsonl) {
        return PerDocConllF1(GoldOf(ParseText(gold_jsonl)), GoldOf(ParseText(pred_jsonl)));
      },
      py::arg("gold_jsonl"), py::arg("pred_jsonl"));

  m.def("permutation_test", &PermutationTest, py::arg("a"), py::arg("b"),
        py::arg("resamples") = 10000, py::arg("seed") = 0);

  m.def(
      "gradcheck",
      [](const std::string &config_json, double eps) {
        TrainConfig cfg = GradCheckConfig();
        if (!config_json.empty()) ApplyJson(nlohmann::json::parse(config_json), cfg);
        return RunGradCheck(cfg, eps).max_relative_error;
      },
      py::arg("config_json") = "", py::arg("eps") = kGradCheckEps);
}
