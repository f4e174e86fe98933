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

#include "lingmess/corpus.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace lingmess {

using json = nlohmann::ordered_json;

std::string ToString(const Span &span) {
  return "[" + std::to_string(span.start) + "," + std::to_string(span.end) +
         "]";
}

std::vector<std::string> Document::Words(const Span &span) const {
  std::vector<std::string> words;
  for (size_t i = span.start; i <= span.end && i < tokens.size(); ++i) {
    words.push_back(tokens[i].text);
  }
  return words;
}

std::string Document::Text(const Span &span) const {
  std::string text;
  for (const auto &w : Words(span)) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  return text;
}

Document MakeDocument(std::string doc_key,
                      const std::vector<std::vector<std::string>> &sentences,
                      std::vector<std::vector<Span>> clusters) {
  Document doc;
  doc.doc_key = std::move(doc_key);
  for (size_t s = 0; s < sentences.size(); ++s) {
    for (const auto &word : sentences[s]) {
      doc.tokens.push_back({word, s, doc.tokens.size()});
    }
  }
  for (auto &cluster : clusters) {
    std::sort(cluster.begin(), cluster.end());
    cluster.erase(std::unique(cluster.begin(), cluster.end()), cluster.end());
  }
  doc.gold_clusters = std::move(clusters);
  Validate(doc);
  return doc;
}

void Validate(const Document &doc) {
  for (size_t i = 0; i < doc.tokens.size(); ++i) {
    if (doc.tokens[i].text.empty()) {
      throw ValidationError(doc.doc_key + ": empty token at index " +
                            std::to_string(i));
    }
    if (doc.tokens[i].doc_index != i) {
      throw ValidationError(doc.doc_key + ": non-contiguous token index at " +
                            std::to_string(i));
    }
  }
  std::set<Span> seen;
  for (const auto &cluster : doc.gold_clusters) {
    if (cluster.empty()) {
      throw ValidationError(doc.doc_key + ": empty cluster");
    }
    for (const auto &span : cluster) {
      if (span.start > span.end || span.end >= doc.tokens.size()) {
        throw ValidationError(doc.doc_key + ": span " + ToString(span) +
                              " out of bounds for " +
                              std::to_string(doc.tokens.size()) + " tokens");
      }
      if (!seen.insert(span).second) {
        throw ValidationError(doc.doc_key + ": span " + ToString(span) +
                              " appears in more than one cluster");
      }
    }
  }
}

std::vector<std::vector<std::string>> Sentences(const Document &doc) {
  std::vector<std::vector<std::string>> sentences(doc.num_sentences());
  for (const auto &token : doc.tokens) {
    sentences[token.sentence_index].push_back(token.text);
  }
  return sentences;
}

namespace {

Document DocumentFromJson(const json &j, size_t line) {
  if (!j.is_object()) throw ParseError("expected a JSON object", line);
  if (!j.contains("doc_key") || !j["doc_key"].is_string()) {
    throw ParseError("missing string field doc_key", line);
  }
  if (!j.contains("sentences") || !j["sentences"].is_array()) {
    throw ParseError("missing array field sentences", line);
  }
  std::vector<std::vector<std::string>> sentences;
  for (const auto &sent : j["sentences"]) {
    if (!sent.is_array()) throw ParseError("sentence is not an array", line);
    auto &out = sentences.emplace_back();
    for (const auto &tok : sent) {
      if (!tok.is_string()) throw ParseError("token is not a string", line);
      out.push_back(tok.get<std::string>());
    }
  }
  std::vector<std::vector<Span>> clusters;
  if (j.contains("clusters")) {
    if (!j["clusters"].is_array()) throw ParseError("clusters is not an array", line);
    for (const auto &cluster : j["clusters"]) {
      if (!cluster.is_array()) throw ParseError("cluster is not an array", line);
      auto &out = clusters.emplace_back();
      for (const auto &span : cluster) {
        if (!span.is_array() || span.size() != 2 ||
            !span[0].is_number_integer() || !span[1].is_number_integer()) {
          throw ParseError("span must be [start, end]", line);
        }
        const auto start = span[0].get<long long>();
        const auto end = span[1].get<long long>();
        if (start < 0 || end < 0) {
          throw ValidationError(j["doc_key"].get<std::string>() + ": span [" +
                                std::to_string(start) + "," +
                                std::to_string(end) + "] has a negative index");
        }
        out.push_back({static_cast<size_t>(start), static_cast<size_t>(end)});
      }
    }
  }
  return MakeDocument(j["doc_key"].get<std::string>(), sentences,
                      std::move(clusters));
}

json ClustersToJson(const std::vector<std::vector<Span>> &clusters) {
  json out = json::array();
  for (const auto &cluster : clusters) {
    json c = json::array();
    for (const auto &span : cluster) c.push_back({span.start, span.end});
    out.push_back(std::move(c));
  }
  return out;
}

std::ifstream OpenOrThrow(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace

std::vector<Document> ParseJsonl(std::istream &in) {
  std::vector<Document> docs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    docs.push_back(DocumentFromJson(j, line_no));
  }
  return docs;
}

std::vector<Document> ParseJsonlFile(const std::string &path) {
  auto in = OpenOrThrow(path);
  return ParseJsonl(in);
}

std::string ToJsonLine(const Document &doc) {
  json j;
  j["doc_key"] = doc.doc_key;
  j["sentences"] = Sentences(doc);
  j["clusters"] = ClustersToJson(doc.gold_clusters);
  return j.dump();
}

void WriteJsonl(const std::vector<Document> &docs, std::ostream &out) {
  for (const auto &doc : docs) out << ToJsonLine(doc) << '\n';
}

namespace {

std::vector<std::string> SplitWhitespace(const std::string &line) {
  std::istringstream ss(line);
  std::vector<std::string> fields;
  std::string f;
  while (ss >> f) fields.push_back(f);
  return fields;
}

// "#begin document (name); part 003" -> "name_3".
std::string ConllDocKey(const std::string &header) {
  std::string rest = header.substr(std::string("#begin document").size());
  std::string name;
  const auto open = rest.find('(');
  const auto close = rest.find(')', open == std::string::npos ? 0 : open);
  if (open != std::string::npos && close != std::string::npos) {
    name = rest.substr(open + 1, close - open - 1);
    rest = rest.substr(close + 1);
  } else {
    auto fields = SplitWhitespace(rest);
    name = fields.empty() ? "" : fields[0];
    rest.clear();
  }
  const auto part = rest.find("part");
  if (part != std::string::npos) {
    auto fields = SplitWhitespace(rest.substr(part + 4));
    if (!fields.empty()) {
      try {
        return name + "_" + std::to_string(std::stoi(fields[0]));
      } catch (const std::exception &) {
        return name + "_" + fields[0];
      }
    }
  }
  return name;
}

struct ConllBuilder {
  std::string doc_key;
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> current;
  size_t num_tokens = 0;
  // id -> stack of (start token, line of opening bracket).
  std::map<std::string, std::vector<std::pair<size_t, size_t>>> open;
  std::map<std::string, std::vector<Span>> clusters;

  void EndSentence() {
    if (!current.empty()) sentences.push_back(std::move(current));
    current.clear();
  }

  void AddToken(const std::vector<std::string> &fields, size_t line) {
    if (fields.size() < 5) {
      throw ParseError("expected at least 5 columns, got " +
                           std::to_string(fields.size()),
                       line);
    }
    const size_t index = num_tokens++;
    current.push_back(fields[3]);
    const std::string &coref = fields.back();
    if (coref == "-") return;
    std::stringstream parts(coref);
    std::string part;
    while (std::getline(parts, part, '|')) {
      if (part.empty()) throw ParseError("empty coreference entry", line);
      const bool opens = part.front() == '(';
      const bool closes = part.back() == ')';
      std::string id = part.substr(opens ? 1 : 0);
      if (closes) id.pop_back();
      if (id.empty() || (!opens && !closes)) {
        throw ParseError("bad coreference entry '" + part + "'", line);
      }
      if (opens && closes) {
        clusters[id].push_back({index, index});
      } else if (opens) {
        open[id].push_back({index, line});
      } else {
        auto it = open.find(id);
        if (it == open.end() || it->second.empty()) {
          throw ParseError("closing bracket for " + id + " without an opening",
                           line);
        }
        clusters[id].push_back({it->second.back().first, index});
        it->second.pop_back();
      }
    }
  }

  Document Finish(size_t line) {
    EndSentence();
    for (const auto &[id, stack] : open) {
      if (!stack.empty()) {
        throw ParseError("unclosed bracket for entity " + id + " opened on line " +
                             std::to_string(stack.back().second),
                         line);
      }
    }
    std::vector<std::vector<Span>> out;
    for (auto &[id, spans] : clusters) out.push_back(std::move(spans));
    for (auto &c : out) std::sort(c.begin(), c.end());
    std::sort(out.begin(), out.end(),
              [](const auto &a, const auto &b) { return a.front() < b.front(); });
    return MakeDocument(doc_key, sentences, std::move(out));
  }
};

}  // namespace

std::vector<Document> ParseConll2012(std::istream &in) {
  std::vector<Document> docs;
  std::optional<ConllBuilder> builder;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("#begin document", 0) == 0) {
      if (builder) throw ParseError("nested #begin document", line_no);
      builder.emplace();
      builder->doc_key = ConllDocKey(line);
      continue;
    }
    if (line.rfind("#end document", 0) == 0) {
      if (!builder) throw ParseError("#end document without #begin", line_no);
      docs.push_back(builder->Finish(line_no));
      builder.reset();
      continue;
    }
    const auto fields = SplitWhitespace(line);
    if (fields.empty()) {
      if (builder) builder->EndSentence();
      continue;
    }
    if (fields[0].front() == '#') continue;
    if (!builder) throw ParseError("token line outside a document", line_no);
    builder->AddToken(fields, line_no);
  }
  if (builder) throw ParseError("missing #end document", line_no);
  return docs;
}

std::vector<Document> ParseConll2012File(const std::string &path) {
  auto in = OpenOrThrow(path);
  return ParseConll2012(in);
}

std::vector<Document> ReadCorpusFile(const std::string &path) {
  auto in = OpenOrThrow(path);
  std::string first;
  while (std::getline(in, first)) {
    if (first.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  in.clear();
  in.seekg(0);
  if (first.rfind("#begin document", 0) == 0) return ParseConll2012(in);
  return ParseJsonl(in);
}

std::vector<Span> EnumerateSpans(const Document &doc, size_t max_width) {
  std::vector<Span> spans;
  const size_t n = doc.size();
  for (size_t start = 0; start < n; ++start) {
    const size_t sentence = doc.tokens[start].sentence_index;
    for (size_t end = start; end < n && end - start + 1 <= max_width; ++end) {
      if (doc.tokens[end].sentence_index != sentence) break;
      spans.push_back({start, end});
    }
  }
  return spans;
}

}  // namespace lingmess
