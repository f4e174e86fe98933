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

// Documents, spans and the two corpus formats: JSON lines
//   {"doc_key": "...", "sentences": [["tok", ...], ...],
//    "clusters": [[[start, end], ...], ...]}
// with inclusive token indices over the flattened document, and the
// CoNLL-2012 column format (word in column 4, coreference in the last
// column).

#ifndef LINGMESS_CORPUS_H_
#define LINGMESS_CORPUS_H_

#include <compare>
#include <cstddef>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lingmess {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string &what, size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Token {
  std::string text;
  size_t sentence_index = 0;
  size_t doc_index = 0;
  bool operator==(const Token &) const = default;
};

// Inclusive token range [start, end].
struct Span {
  size_t start = 0;
  size_t end = 0;

  size_t width() const { return end - start + 1; }
  auto operator<=>(const Span &) const = default;
};

std::string ToString(const Span &span);

// True iff a comes before b: earlier start, or equal start and earlier end.
inline bool Precedes(const Span &a, const Span &b) {
  return a.start < b.start || (a.start == b.start && a.end < b.end);
}

struct MentionPair {
  Span candidate;
  Span query;
};

struct Document {
  std::string doc_key;
  std::vector<Token> tokens;
  std::vector<std::vector<Span>> gold_clusters;

  size_t size() const { return tokens.size(); }
  size_t num_sentences() const {
    return tokens.empty() ? 0 : tokens.back().sentence_index + 1;
  }
  // Token strings of span, in order.
  std::vector<std::string> Words(const Span &span) const;
  std::string Text(const Span &span) const;
  bool operator==(const Document &) const = default;
};

// Builds a document from sentences and clusters, normalizing each cluster to
// sorted unique spans, and validates it.
Document MakeDocument(std::string doc_key,
                      const std::vector<std::vector<std::string>> &sentences,
                      std::vector<std::vector<Span>> clusters);

// Throws ValidationError naming the document and span when an invariant is
// broken: empty token text, start > end, out-of-range spans, empty clusters,
// or a span listed in two clusters.
void Validate(const Document &doc);

// Sentences as lists of token strings.
std::vector<std::vector<std::string>> Sentences(const Document &doc);

std::vector<Document> ParseJsonl(std::istream &in);
std::vector<Document> ParseJsonlFile(const std::string &path);
std::string ToJsonLine(const Document &doc);
void WriteJsonl(const std::vector<Document> &docs, std::ostream &out);

std::vector<Document> ParseConll2012(std::istream &in);
std::vector<Document> ParseConll2012File(const std::string &path);

// Reads JSONL, or CoNLL-2012 when the file starts with "#begin document".
std::vector<Document> ReadCorpusFile(const std::string &path);

// All spans of width <= max_width inside one sentence, sorted by
// (start, end).
std::vector<Span> EnumerateSpans(const Document &doc, size_t max_width);

}  // namespace lingmess

#endif  // LINGMESS_CORPUS_H_
