// Copyright 2026 The asrpipe Authors.
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

#ifndef ASRPIPE_LM_HPP_
#define ASRPIPE_LM_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace asrpipe::lm {

inline constexpr const char* kBos = "<s>";
inline constexpr const char* kEos = "</s>";
inline constexpr const char* kUnk = "<unk>";

// Closed vocabulary with the three reserved tokens always present.
class Vocabulary {
 public:
  // Reserved tokens get ids 0..2, then corpus tokens by first occurrence.
  static Vocabulary from_corpus(const std::vector<std::vector<std::string>>& sentences);
  // One token per line, line number = id; the reserved tokens must appear
  // exactly once.
  static Vocabulary load(const std::string& path);
  // Builds from an explicit token list (used by the ARPA reader).
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  void save(const std::string& path) const;

  uint32_t size() const { return static_cast<uint32_t>(id_to_token_.size()); }
  const std::string& token(uint32_t id) const { return id_to_token_[id]; }
  // OOV tokens map to <unk>.
  uint32_t map_token(const std::string& token) const;
  bool contains(const std::string& token) const;

  uint32_t bos() const { return bos_; }
  uint32_t eos() const { return eos_; }
  uint32_t unk() const { return unk_; }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, uint32_t> token_to_id_;
  uint32_t bos_ = 0, eos_ = 0, unk_ = 0;

  void index_specials();
};

using NGramKey = std::vector<uint32_t>;

struct NGramKeyHash {
  size_t operator()(const NGramKey& k) const {
    uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (uint32_t v : k) {
      h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<size_t>(h);
  }
};

template <typename V>
using NGramMap = std::unordered_map<NGramKey, V, NGramKeyHash>;

// Raw n-gram counts per order over sentence-padded token sequences
// (<s> tokens ... </s>).
struct NGramCounts {
  Vocabulary vocab;
  uint32_t max_order = 0;
  std::vector<NGramMap<uint64_t>> raw;  // raw[k-1] holds order-k counts
  uint64_t total_sentences = 0;
};

// Sentences are token-id sequences without padding; empty sentences are
// skipped. Throws if nothing remains.
NGramCounts count_ngrams(const std::vector<std::vector<uint32_t>>& sentences,
                         uint32_t max_order, const Vocabulary& vocab);

struct NGramEntry {
  double prob = 0.0;   // linear probability
  double count = 0.0;  // count the entry was estimated from (0 if imported)
};

// Backoff n-gram model in the interpolated modified Kneser-Ney formulation:
// stored probabilities are already interpolated with the lower order, and
// each stored context carries the leftover mass as its backoff weight, so
// sum_w p(w|h) = 1 for every context. <s> is never predicted (probability 0,
// exported as -99).
class NGramModel {
 public:
  NGramModel() = default;
  NGramModel(Vocabulary vocab, uint32_t max_order);

  uint32_t max_order() const { return max_order_; }
  const Vocabulary& vocab() const { return vocab_; }

  // p(word | history); history longer than max_order-1 is truncated to its
  // most recent tokens. Backoff guarantees a value for every word except <s>.
  double prob_ids(std::span<const uint32_t> history, uint32_t word) const;
  double token_prob(std::span<const std::string> history, const std::string& word) const;

  uint64_t entry_count(uint32_t order) const { return entries_[order - 1].size(); }

  // Removes every entry of order >= 2 whose training count is below
  // min_count[order-1], except entries that remain contexts of surviving
  // higher-order entries, then recomputes backoff weights so that every
  // context still sums to one.
  void prune_min_counts(const std::vector<uint64_t>& min_count);

  // Estimation and ARPA I/O need raw access.
  friend NGramModel kn_estimate(const NGramCounts& counts, uint32_t max_order);
  friend void arpa_export(const NGramModel& model, std::ostream& out);
  friend NGramModel arpa_import(std::istream& in);

 private:
  double backoff_weight(std::span<const uint32_t> context) const;

  Vocabulary vocab_;
  uint32_t max_order_ = 0;
  std::vector<NGramMap<NGramEntry>> entries_;  // entries_[k-1]: order-k probs
  NGramMap<double> backoffs_;                  // context -> leftover mass
};

// Interpolated modified Kneser-Ney estimation with three discounts per order
// (D_k = k - (k+1) * Y * n_{k+1}/n_k, Y = n_1/(n_1 + 2 n_2), computed from
// the count-of-counts of that order). Lower orders use left-extension
// diversity counts, except that n-grams starting with <s> keep their raw
// counts; the top order uses raw counts. Degenerate count-of-counts fall back
// to a fixed discount of 0.5 with a warning. max_order may be below
// counts.max_order, in which case the top estimated order also uses diversity
// counts (order reduction).
NGramModel kn_estimate(const NGramCounts& counts, uint32_t max_order);

// Weighted mixture of n-gram models; weights are >= 0 and sum to 1.
struct InterpolatedLM {
  std::vector<NGramModel> components;
  std::vector<double> weights;
  double token_prob(std::span<const std::string> history, const std::string& word) const;
};

struct InterpFitResult {
  InterpolatedLM mixture;
  std::vector<double> dev_log_likelihood;  // per EM iteration, non-decreasing
};

// EM over mixture weights on the development corpus; stops when the largest
// weight change drops below 1e-6 or after 200 iterations.
InterpFitResult interp_fit(std::vector<NGramModel> components,
                           const std::vector<std::vector<std::string>>& dev_sentences);

// exp of the mean negative log-likelihood per predicted event; events are
// every token plus the sentence end.
double perplexity(const NGramModel& model, const std::vector<std::vector<std::string>>& sentences);
double perplexity(const InterpolatedLM& model, const std::vector<std::vector<std::string>>& sentences);

// ARPA text serialization: log10 probabilities and backoff weights, "\data\"
// header, per-order sections, "\end\" footer. The writer is canonical (entries sorted
// by token ids, fixed "%.7f" formatting, backoff always written for orders
// below the top), so export -> import -> export reproduces the bytes.
// Probabilities of zero are written as -99.
void arpa_export(const NGramModel& model, std::ostream& out);
void arpa_export(const NGramModel& model, const std::string& path);
NGramModel arpa_import(std::istream& in);
NGramModel arpa_import(const std::string& path);

// Corpus helpers: UTF-8 text, one sentence per line, whitespace tokens;
// empty lines are skipped.
std::vector<std::vector<std::string>> read_corpus(const std::string& path);
std::vector<std::vector<uint32_t>> map_corpus(const Vocabulary& vocab,
                                              const std::vector<std::vector<std::string>>& sentences);

}  // namespace asrpipe::lm

#endif  // ASRPIPE_LM_HPP_
