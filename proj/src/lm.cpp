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

#include "asrpipe/lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace asrpipe::lm {

namespace {

std::string join_tokens(const Vocabulary& vocab, const NGramKey& key) {
  std::string s;
  for (size_t i = 0; i < key.size(); ++i) {
    if (i) s += ' ';
    s += vocab.token(key[i]);
  }
  return s;
}

}  // namespace

// ---- Vocabulary -------------------------------------------------------------

void Vocabulary::index_specials() {
  int bos_n = 0, eos_n = 0, unk_n = 0;
  for (uint32_t i = 0; i < size(); ++i) {
    if (id_to_token_[i] == kBos) {
      bos_ = i;
      bos_n++;
    } else if (id_to_token_[i] == kEos) {
      eos_ = i;
      eos_n++;
    } else if (id_to_token_[i] == kUnk) {
      unk_ = i;
      unk_n++;
    }
  }
  if (bos_n != 1 || eos_n != 1 || unk_n != 1) {
    throw std::runtime_error(
        "vocabulary must contain <s>, </s> and <unk> exactly once");
  }
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  Vocabulary v;
  v.id_to_token_ = tokens;
  for (uint32_t i = 0; i < v.size(); ++i) {
    if (!v.token_to_id_.emplace(v.id_to_token_[i], i).second) {
      throw std::runtime_error("duplicate token in vocabulary: " + v.id_to_token_[i]);
    }
  }
  v.index_specials();
  return v;
}

Vocabulary Vocabulary::from_corpus(const std::vector<std::vector<std::string>>& sentences) {
  std::vector<std::string> tokens = {kBos, kEos, kUnk};
  std::set<std::string> seen(tokens.begin(), tokens.end());
  for (const auto& sent : sentences) {
    for (const auto& tok : sent) {
      if (seen.insert(tok).second) tokens.push_back(tok);
    }
  }
  return from_tokens(tokens);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    tokens.push_back(line);
  }
  return from_tokens(tokens);
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vocabulary: " + path);
  for (const auto& tok : id_to_token_) out << tok << '\n';
}

uint32_t Vocabulary::map_token(const std::string& token) const {
  const auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? unk_ : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return token_to_id_.count(token) != 0;
}

// ---- counting ----------------------------------------------------------------

NGramCounts count_ngrams(const std::vector<std::vector<uint32_t>>& sentences,
                         uint32_t max_order, const Vocabulary& vocab) {
  if (max_order < 1) throw std::invalid_argument("count_ngrams: max_order must be >= 1");
  NGramCounts counts;
  counts.vocab = vocab;
  counts.max_order = max_order;
  counts.raw.resize(max_order);

  for (const auto& sent : sentences) {
    if (sent.empty()) continue;
    std::vector<uint32_t> padded;
    padded.reserve(sent.size() + 2);
    padded.push_back(vocab.bos());
    padded.insert(padded.end(), sent.begin(), sent.end());
    padded.push_back(vocab.eos());

    for (uint32_t k = 1; k <= max_order; ++k) {
      if (padded.size() < k) continue;
      for (size_t i = 0; i + k <= padded.size(); ++i) {
        NGramKey key(padded.begin() + i, padded.begin() + i + k);
        counts.raw[k - 1][key]++;
      }
    }
    counts.total_sentences++;
  }
  if (counts.total_sentences == 0) {
    throw std::invalid_argument("count_ngrams: empty corpus");
  }
  return counts;
}

// ---- model -------------------------------------------------------------------

NGramModel::NGramModel(Vocabulary vocab, uint32_t max_order)
    : vocab_(std::move(vocab)), max_order_(max_order), entries_(max_order) {}

double NGramModel::backoff_weight(std::span<const uint32_t> context) const {
  const auto it = backoffs_.find(NGramKey(context.begin(), context.end()));
  return it == backoffs_.end() ? 1.0 : it->second;
}

double NGramModel::prob_ids(std::span<const uint32_t> history, uint32_t word) const {
  if (max_order_ == 0) throw std::runtime_error("prob_ids: empty model");
  size_t hlen = std::min<size_t>(history.size(), max_order_ - 1);
  std::span<const uint32_t> h = history.subspan(history.size() - hlen);

  double backoff_product = 1.0;
  NGramKey key;
  for (size_t len = hlen;; --len) {
    const std::span<const uint32_t> ctx = h.subspan(h.size() - len);
    key.assign(ctx.begin(), ctx.end());
    key.push_back(word);
    const auto it = entries_[len].find(key);
    if (it != entries_[len].end()) {
      return backoff_product * it->second.prob;
    }
    if (len == 0) return 0.0;  // word missing from the unigram table
    backoff_product *= backoff_weight(ctx);
  }
}

double NGramModel::token_prob(std::span<const std::string> history,
                              const std::string& word) const {
  std::vector<uint32_t> h;
  const size_t keep = std::min<size_t>(history.size(), max_order_ - 1);
  h.reserve(keep);
  for (size_t i = history.size() - keep; i < history.size(); ++i) {
    h.push_back(vocab_.map_token(history[i]));
  }
  return prob_ids(h, vocab_.map_token(word));
}

// ---- Kneser-Ney estimation ----------------------------------------------------

namespace {

struct Discounts {
  double d1 = 0.5, d2 = 0.5, d3 = 0.5;
  double of(uint64_t count) const { return count == 1 ? d1 : (count == 2 ? d2 : d3); }
};

Discounts estimate_discounts(const NGramMap<uint64_t>& adjusted, uint32_t order,
                             uint32_t skip_token, bool is_unigram) {
  uint64_t n[5] = {0, 0, 0, 0, 0};
  for (const auto& [key, c] : adjusted) {
    if (is_unigram && key[0] == skip_token) continue;
    if (c >= 1 && c <= 4) n[c]++;
  }
  Discounts d;
  if (n[1] == 0 || n[2] == 0) {
    std::cerr << "kn_estimate: degenerate count-of-counts at order " << order
              << " (n1=" << n[1] << ", n2=" << n[2] << "); using fixed discount 0.5\n";
    return d;
  }
  const double y = static_cast<double>(n[1]) / (n[1] + 2.0 * n[2]);
  double cand[3] = {
      1.0 - 2.0 * y * static_cast<double>(n[2]) / static_cast<double>(n[1]),
      2.0 - 3.0 * y * static_cast<double>(n[3]) / static_cast<double>(n[2]),
      n[3] > 0 ? 3.0 - 4.0 * y * static_cast<double>(n[4]) / static_cast<double>(n[3]) : 3.0,
  };
  double* slot[3] = {&d.d1, &d.d2, &d.d3};
  for (int i = 0; i < 3; ++i) {
    if (cand[i] > 0.0) {
      *slot[i] = cand[i];
    } else {
      std::cerr << "kn_estimate: non-positive discount D" << (i + 1) << " at order "
                << order << "; using fixed discount 0.5\n";
    }
  }
  return d;
}

}  // namespace

NGramModel kn_estimate(const NGramCounts& counts, uint32_t max_order) {
  if (max_order < 1 || max_order > counts.max_order) {
    throw std::invalid_argument("kn_estimate: max_order must be in [1, counts.max_order]");
  }
  const Vocabulary& vocab = counts.vocab;
  const uint32_t bos = vocab.bos();

  // Counts actually used per order: raw at the top, left-extension diversity
  // below, except that <s>-initial n-grams keep raw counts (they cannot be
  // extended to the left).
  std::vector<NGramMap<uint64_t>> adjusted(max_order);
  for (uint32_t k = 1; k <= max_order; ++k) {
    if (k == counts.max_order) {
      adjusted[k - 1] = counts.raw[k - 1];
      continue;
    }
    auto& adj = adjusted[k - 1];
    for (const auto& [key, c] : counts.raw[k]) {  // each distinct (k+1)-gram
      (void)c;
      adj[NGramKey(key.begin() + 1, key.end())]++;
    }
    for (const auto& [key, c] : counts.raw[k - 1]) {
      if (key[0] == bos) adj[key] = c;
    }
  }

  NGramModel model(vocab, max_order);
  const double v_pred = static_cast<double>(vocab.size() - 1);  // <s> is never predicted

  // Unigram level: discounted counts interpolated with the uniform base.
  {
    const Discounts disc = estimate_discounts(adjusted[0], 1, bos, true);
    double total = 0.0;
    uint64_t n1 = 0, n2 = 0, n3p = 0;
    for (const auto& [key, c] : adjusted[0]) {
      if (key[0] == bos) continue;
      total += static_cast<double>(c);
      (c == 1 ? n1 : (c == 2 ? n2 : n3p))++;
    }
    if (total <= 0.0) throw std::runtime_error("kn_estimate: no predictable events");
    const double gamma = (disc.d1 * n1 + disc.d2 * n2 + disc.d3 * n3p) / total;

    for (uint32_t w = 0; w < vocab.size(); ++w) {
      NGramKey key = {w};
      NGramEntry e;
      if (w == bos) {
        e.prob = 0.0;
        e.count = 0.0;
      } else {
        const auto it = adjusted[0].find(key);
        const uint64_t c = it == adjusted[0].end() ? 0 : it->second;
        const double discounted = c > 0 ? (c - disc.of(c)) / total : 0.0;
        e.prob = discounted + gamma / v_pred;
        e.count = static_cast<double>(c);
      }
      model.entries_[0].emplace(std::move(key), e);
    }
  }

  // Higher orders, bottom-up so the lower-order interpolation target exists.
  for (uint32_t k = 2; k <= max_order; ++k) {
    const Discounts disc = estimate_discounts(adjusted[k - 1], k, bos, false);

    struct CtxAgg {
      double total = 0.0;
      uint64_t n1 = 0, n2 = 0, n3p = 0;
    };
    NGramMap<CtxAgg> per_context;
    for (const auto& [key, c] : adjusted[k - 1]) {
      CtxAgg& agg = per_context[NGramKey(key.begin(), key.end() - 1)];
      agg.total += static_cast<double>(c);
      (c == 1 ? agg.n1 : (c == 2 ? agg.n2 : agg.n3p))++;
    }

    for (const auto& [key, c] : adjusted[k - 1]) {
      const NGramKey ctx(key.begin(), key.end() - 1);
      const CtxAgg& agg = per_context.at(ctx);
      const double gamma =
          (disc.d1 * agg.n1 + disc.d2 * agg.n2 + disc.d3 * agg.n3p) / agg.total;
      const double lower =
          model.prob_ids(std::span<const uint32_t>(ctx.data() + 1, ctx.size() - 1),
                         key.back());
      NGramEntry e;
      e.prob = (static_cast<double>(c) - disc.of(c)) / agg.total + gamma * lower;
      e.count = static_cast<double>(c);
      model.entries_[k - 1].emplace(key, e);
    }
    for (const auto& [ctx, agg] : per_context) {
      model.backoffs_[ctx] =
          (disc.d1 * agg.n1 + disc.d2 * agg.n2 + disc.d3 * agg.n3p) / agg.total;
    }
  }
  return model;
}

// ---- pruning -----------------------------------------------------------------

void NGramModel::prune_min_counts(const std::vector<uint64_t>& min_count) {
  if (min_count.size() < max_order_) {
    throw std::invalid_argument("prune_min_counts: need one threshold per order");
  }

  // Remove low-count entries top-down; an entry survives if it is still the
  // context of a surviving higher-order entry.
  for (uint32_t k = max_order_; k >= 2; --k) {
    NGramMap<char> needed;
    if (k < max_order_) {
      for (const auto& [key, e] : entries_[k]) {
        (void)e;
        needed.emplace(NGramKey(key.begin(), key.end() - 1), 1);
      }
    }
    const double thr = static_cast<double>(min_count[k - 1]);
    auto& table = entries_[k - 1];
    for (auto it = table.begin(); it != table.end();) {
      if (it->second.count < thr && needed.find(it->first) == needed.end()) {
        it = table.erase(it);
      } else {
        ++it;
      }
    }
  }

  // Rebuild backoff weights bottom-up so every surviving context still sums
  // to one: alpha(h) = (1 - sum_kept p(w|h)) / (1 - sum_kept p(w|h')).
  NGramMap<double> rebuilt;
  for (uint32_t k = 2; k <= max_order_; ++k) {
    // lower-order queries must see the already-rebuilt weights for shorter
    // contexts
    backoffs_ = rebuilt;
    struct Sums {
      double kept = 0.0;
      double lower = 0.0;
    };
    NGramMap<Sums> per_context;
    for (const auto& [key, e] : entries_[k - 1]) {
      Sums& s = per_context[NGramKey(key.begin(), key.end() - 1)];
      s.kept += e.prob;
      s.lower += prob_ids(std::span<const uint32_t>(key.data() + 1, key.size() - 2),
                          key.back());
    }
    for (const auto& [ctx, s] : per_context) {
      const double denom = 1.0 - s.lower;
      if (denom <= 1e-12) {
        throw std::runtime_error("prune_min_counts: cannot renormalize context");
      }
      rebuilt[ctx] = (1.0 - s.kept) / denom;
    }
  }
  backoffs_ = std::move(rebuilt);
}

// ---- interpolation -------------------------------------------------------------

double InterpolatedLM::token_prob(std::span<const std::string> history,
                                  const std::string& word) const {
  double p = 0.0;
  for (size_t i = 0; i < components.size(); ++i) {
    p += weights[i] * components[i].token_prob(history, word);
  }
  return p;
}

namespace {

// Every predicted event of the corpus: (history, token) pairs per sentence,
// with the implicit <s> at the start and </s> as the final event.
template <typename Fn>
void for_each_event(const std::vector<std::vector<std::string>>& sentences, Fn&& fn) {
  for (const auto& sent : sentences) {
    if (sent.empty()) continue;
    std::vector<std::string> hist = {kBos};
    for (const auto& tok : sent) {
      fn(hist, tok);
      hist.push_back(tok);
    }
    fn(hist, kEos);
  }
}

template <typename Model>
double perplexity_impl(const Model& model,
                       const std::vector<std::vector<std::string>>& sentences) {
  double total_ln = 0.0;
  uint64_t events = 0;
  for_each_event(sentences, [&](const std::vector<std::string>& hist, const std::string& tok) {
    const double p = model.token_prob(hist, tok);
    if (!(p > 0.0)) {
      throw std::runtime_error("perplexity: zero probability for token '" + tok + "'");
    }
    total_ln += std::log(p);
    events++;
  });
  if (events == 0) throw std::invalid_argument("perplexity: empty corpus");
  return std::exp(-total_ln / static_cast<double>(events));
}

}  // namespace

double perplexity(const NGramModel& model,
                  const std::vector<std::vector<std::string>>& sentences) {
  return perplexity_impl(model, sentences);
}

double perplexity(const InterpolatedLM& model,
                  const std::vector<std::vector<std::string>>& sentences) {
  return perplexity_impl(model, sentences);
}

InterpFitResult interp_fit(std::vector<NGramModel> components,
                           const std::vector<std::vector<std::string>>& dev_sentences) {
  const size_t nc = components.size();
  if (nc == 0) throw std::invalid_argument("interp_fit: need at least one component");

  // Per-event component probabilities, computed once.
  std::vector<std::vector<double>> event_probs;
  for_each_event(dev_sentences, [&](const std::vector<std::string>& hist, const std::string& tok) {
    std::vector<double> p(nc);
    for (size_t i = 0; i < nc; ++i) p[i] = components[i].token_prob(hist, tok);
    event_probs.push_back(std::move(p));
  });
  if (event_probs.empty()) throw std::invalid_argument("interp_fit: empty dev corpus");

  InterpFitResult result;
  std::vector<double> w(nc, 1.0 / static_cast<double>(nc));
  const auto mixture_ll = [&](const std::vector<double>& weights) {
    double ll = 0.0;
    for (const auto& p : event_probs) {
      double denom = 0.0;
      for (size_t i = 0; i < nc; ++i) denom += weights[i] * p[i];
      ll += std::log(denom);
    }
    return ll;
  };

  for (int iter = 0; iter < 200; ++iter) {
    std::vector<double> acc(nc, 0.0);
    double ll = 0.0;
    for (const auto& p : event_probs) {
      double denom = 0.0;
      for (size_t i = 0; i < nc; ++i) denom += w[i] * p[i];
      ll += std::log(denom);
      for (size_t i = 0; i < nc; ++i) acc[i] += w[i] * p[i] / denom;
    }
    result.dev_log_likelihood.push_back(ll);

    double max_change = 0.0;
    for (size_t i = 0; i < nc; ++i) {
      const double nw = acc[i] / static_cast<double>(event_probs.size());
      max_change = std::max(max_change, std::fabs(nw - w[i]));
      w[i] = nw;
    }
    if (max_change < 1e-6) break;
  }

  // EM approaches boundary optima only asymptotically; when a single
  // component beats the stopped iterate, take that corner.
  double best_ll = mixture_ll(w);
  for (size_t i = 0; i < nc; ++i) {
    std::vector<double> corner(nc, 0.0);
    corner[i] = 1.0;
    const double ll = mixture_ll(corner);
    if (ll > best_ll) {
      best_ll = ll;
      w = corner;
    }
  }
  if (best_ll > result.dev_log_likelihood.back()) {
    result.dev_log_likelihood.push_back(best_ll);
  }

  result.mixture.components = std::move(components);
  result.mixture.weights = std::move(w);
  return result;
}

// ---- ARPA ----------------------------------------------------------------------

namespace {

std::string fmt_log10(double linear) {
  const double l = linear > 0.0 ? std::max(std::log10(linear), -99.0) : -99.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.7f", l);
  return buf;
}

}  // namespace

void arpa_export(const NGramModel& model, std::ostream& out) {
  out << "\\data\\\n";
  for (uint32_t k = 1; k <= model.max_order_; ++k) {
    out << "ngram " << k << "=" << model.entries_[k - 1].size() << "\n";
  }
  for (uint32_t k = 1; k <= model.max_order_; ++k) {
    std::vector<const NGramKey*> keys;
    keys.reserve(model.entries_[k - 1].size());
    for (const auto& [key, e] : model.entries_[k - 1]) {
      (void)e;
      keys.push_back(&key);
    }
    std::sort(keys.begin(), keys.end(),
              [](const NGramKey* a, const NGramKey* b) { return *a < *b; });

    out << "\n\\" << k << "-grams:\n";
    for (const NGramKey* key : keys) {
      const NGramEntry& e = model.entries_[k - 1].at(*key);
      out << fmt_log10(e.prob) << '\t' << join_tokens(model.vocab_, *key);
      if (k < model.max_order_) {
        const auto it = model.backoffs_.find(*key);
        out << '\t' << fmt_log10(it == model.backoffs_.end() ? 1.0 : it->second);
      }
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

void arpa_export(const NGramModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  arpa_export(model, out);
  if (!out) throw std::runtime_error("short write: " + path);
}

namespace {

[[noreturn]] void parse_fail(size_t lineno, const std::string& what) {
  throw std::runtime_error("ARPA parse error at line " + std::to_string(lineno) + ": " + what);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string f;
  while (ss >> f) fields.push_back(std::move(f));
  return fields;
}

double parse_log10(const std::string& s, size_t lineno) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    parse_fail(lineno, "non-numeric field '" + s + "'");
  }
  if (used != s.size()) parse_fail(lineno, "non-numeric field '" + s + "'");
  return std::pow(10.0, v);
}

}  // namespace

NGramModel arpa_import(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }

  size_t i = 0;
  const auto skip_blank = [&] {
    while (i < lines.size() && lines[i].empty()) ++i;
  };

  skip_blank();
  if (i >= lines.size() || lines[i] != "\\data\\") {
    parse_fail(i + 1, "expected \\data\\");
  }
  ++i;

  std::vector<uint64_t> declared;
  while (i < lines.size() && !lines[i].empty()) {
    const auto fields = split_ws(lines[i]);
    if (fields.size() != 2 || fields[0] != "ngram") {
      parse_fail(i + 1, "expected 'ngram K=N'");
    }
    const size_t eq = fields[1].find('=');
    if (eq == std::string::npos) parse_fail(i + 1, "expected 'ngram K=N'");
    unsigned long k = 0, n = 0;
    try {
      k = std::stoul(fields[1].substr(0, eq));
      n = std::stoul(fields[1].substr(eq + 1));
    } catch (const std::exception&) {
      parse_fail(i + 1, "expected 'ngram K=N'");
    }
    if (k != declared.size() + 1) parse_fail(i + 1, "non-contiguous ngram orders");
    declared.push_back(n);
    ++i;
  }
  if (declared.empty()) parse_fail(i + 1, "no ngram counts declared");
  const uint32_t max_order = static_cast<uint32_t>(declared.size());

  // First pass over the 1-grams section builds the vocabulary, so parse
  // sections in order.
  std::vector<std::string> tokens;
  std::unordered_map<std::string, uint32_t> token_ids;
  std::vector<NGramMap<NGramEntry>> entries(max_order);
  NGramMap<double> backoffs;

  for (uint32_t k = 1; k <= max_order; ++k) {
    skip_blank();
    const std::string header = "\\" + std::to_string(k) + "-grams:";
    if (i >= lines.size() || lines[i] != header) {
      parse_fail(i + 1, "expected " + header);
    }
    ++i;
    uint64_t parsed = 0;
    while (i < lines.size() && !lines[i].empty() && lines[i][0] != '\\') {
      const size_t lineno = i + 1;
      const auto fields = split_ws(lines[i]);
      const size_t base = 1 + k;
      if (fields.size() != base && !(k < max_order && fields.size() == base + 1)) {
        parse_fail(lineno, "expected " + std::to_string(base) + " or " +
                               std::to_string(base + 1) + " fields, got " +
                               std::to_string(fields.size()));
      }
      NGramEntry e;
      e.prob = parse_log10(fields[0], lineno);
      NGramKey key(k);
      for (uint32_t t = 0; t < k; ++t) {
        const std::string& tok = fields[1 + t];
        auto it = token_ids.find(tok);
        if (it == token_ids.end()) {
          if (k != 1) parse_fail(lineno, "token '" + tok + "' missing from 1-grams");
          const uint32_t id = static_cast<uint32_t>(tokens.size());
          tokens.push_back(tok);
          it = token_ids.emplace(tok, id).first;
        }
        key[t] = it->second;
      }
      if (fields.size() == base + 1) {
        backoffs[key] = parse_log10(fields[base], lineno);
      }
      if (!entries[k - 1].emplace(std::move(key), e).second) {
        parse_fail(lineno, "duplicate n-gram");
      }
      parsed++;
      ++i;
    }
    if (parsed != declared[k - 1]) {
      parse_fail(i + 1, "section " + std::to_string(k) + " declared " +
                            std::to_string(declared[k - 1]) + " entries but has " +
                            std::to_string(parsed));
    }
  }

  skip_blank();
  if (i >= lines.size() || lines[i] != "\\end\\") parse_fail(i + 1, "expected \\end\\");

  NGramModel model(Vocabulary::from_tokens(tokens), max_order);
  model.entries_ = std::move(entries);
  model.backoffs_ = std::move(backoffs);
  return model;
}

NGramModel arpa_import(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return arpa_import(in);
}

// ---- corpus helpers --------------------------------------------------------------

std::vector<std::vector<std::string>> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus: " + path);
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = split_ws(line);
    if (!tokens.empty()) sentences.push_back(std::move(tokens));
  }
  return sentences;
}

std::vector<std::vector<uint32_t>> map_corpus(
    const Vocabulary& vocab, const std::vector<std::vector<std::string>>& sentences) {
  std::vector<std::vector<uint32_t>> out;
  out.reserve(sentences.size());
  for (const auto& sent : sentences) {
    std::vector<uint32_t> ids;
    ids.reserve(sent.size());
    for (const auto& tok : sent) ids.push_back(vocab.map_token(tok));
    out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace asrpipe::lm
