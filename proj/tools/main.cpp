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

// asrpipe command-line front-end. Every subcommand is a pure function of its
// input files, configuration and seed: outputs are written atomically
// (temp file + rename) and identical invocations produce byte-identical
// files.
//
// Exit codes: 0 success, 2 bad usage or configuration, 3 missing or
// unreadable file, 4 input format violation, 5 internal error.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "asrpipe/audio.hpp"
#include "asrpipe/augment.hpp"
#include "asrpipe/chunker.hpp"
#include "asrpipe/embedding.hpp"
#include "asrpipe/feature_matrix.hpp"
#include "asrpipe/lm.hpp"
#include "asrpipe/logmel.hpp"
#include "asrpipe/rng.hpp"
#include "asrpipe/sched.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All tunables, mirroring the library config fields. JSON config supplies
// defaults; explicit command-line flags override.
struct AppConfig {
  uint64_t seed = 0;

  double window_ms = 25.0;
  double shift_ms = 10.0;
  uint32_t num_bands = 80;
  double log_floor = 1e-10;

  uint32_t chunk_len = 64;
  double overlap = 0.5;
  uint32_t batch_size = 128;

  std::string tm = "6x5";
  std::string fm;  // empty = 10% of the feature dimension with N=5
  bool fm_on_ivec = true;
  uint32_t warmup_steps = 2000;
  uint32_t logmel_dims = 80;
  uint64_t step = 2000;  // default past warmup

  uint32_t context = 9;
  uint32_t lda_dim = 60;
  uint32_t ubm_components = 256;
  uint32_t em_iterations = 10;
  uint32_t kmeans_iterations = 5;
  uint32_t classes = 64;
  double ridge = 1e-6;
  double var_floor = 1e-4;

  uint32_t lm_order = 4;
  std::string lm_prune;  // comma list of per-order minimum counts

  double initial_lr = 0.0009;
  double lr_decay = 0.9;
  double min_lr = 1e-8;
  double lr_threshold = 0.0;
  uint32_t layers = 6;
  uint32_t epochs_per_stage = 1;
};

template <typename T>
void load_key(const json& section, const std::string& name, T* out) {
  if (section.contains(name)) *out = section.at(name).get<T>();
}

void check_keys(const json& obj, const std::string& where,
                const std::vector<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw UsageError("unknown config key '" + key + "' in " + where);
    }
  }
}

void apply_config_file(const std::string& path, AppConfig* cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config parse error: " + std::string(e.what()));
  }
  try {
    check_keys(root, "config",
               {"seed", "features", "chunker", "augment", "embedding", "lm", "sched"});
    load_key(root, "seed", &cfg->seed);
    if (root.contains("features")) {
      const json& s = root["features"];
      check_keys(s, "features", {"window_ms", "shift_ms", "num_bands", "log_floor"});
      load_key(s, "window_ms", &cfg->window_ms);
      load_key(s, "shift_ms", &cfg->shift_ms);
      load_key(s, "num_bands", &cfg->num_bands);
      load_key(s, "log_floor", &cfg->log_floor);
    }
    if (root.contains("chunker")) {
      const json& s = root["chunker"];
      check_keys(s, "chunker", {"chunk_len", "overlap", "batch_size"});
      load_key(s, "chunk_len", &cfg->chunk_len);
      load_key(s, "overlap", &cfg->overlap);
      load_key(s, "batch_size", &cfg->batch_size);
    }
    if (root.contains("augment")) {
      const json& s = root["augment"];
      check_keys(s, "augment",
                 {"tm", "fm", "fm_on_ivec", "warmup_steps", "logmel_dims", "step"});
      load_key(s, "tm", &cfg->tm);
      load_key(s, "fm", &cfg->fm);
      load_key(s, "fm_on_ivec", &cfg->fm_on_ivec);
      load_key(s, "warmup_steps", &cfg->warmup_steps);
      load_key(s, "logmel_dims", &cfg->logmel_dims);
      load_key(s, "step", &cfg->step);
    }
    if (root.contains("embedding")) {
      const json& s = root["embedding"];
      check_keys(s, "embedding",
                 {"context", "lda_dim", "ubm_components", "em_iterations",
                  "kmeans_iterations", "classes", "ridge", "var_floor"});
      load_key(s, "context", &cfg->context);
      load_key(s, "lda_dim", &cfg->lda_dim);
      load_key(s, "ubm_components", &cfg->ubm_components);
      load_key(s, "em_iterations", &cfg->em_iterations);
      load_key(s, "kmeans_iterations", &cfg->kmeans_iterations);
      load_key(s, "classes", &cfg->classes);
      load_key(s, "ridge", &cfg->ridge);
      load_key(s, "var_floor", &cfg->var_floor);
    }
    if (root.contains("lm")) {
      const json& s = root["lm"];
      check_keys(s, "lm", {"order", "prune"});
      load_key(s, "order", &cfg->lm_order);
      load_key(s, "prune", &cfg->lm_prune);
    }
    if (root.contains("sched")) {
      const json& s = root["sched"];
      check_keys(s, "sched",
                 {"initial_lr", "decay", "min_lr", "threshold", "layers", "epochs_per_stage"});
      load_key(s, "initial_lr", &cfg->initial_lr);
      load_key(s, "decay", &cfg->lr_decay);
      load_key(s, "min_lr", &cfg->min_lr);
      load_key(s, "threshold", &cfg->lr_threshold);
      load_key(s, "layers", &cfg->layers);
      load_key(s, "epochs_per_stage", &cfg->epochs_per_stage);
    }
  } catch (const json::exception& e) {
    throw UsageError("bad config value: " + std::string(e.what()));
  }
}

void require_file(const std::string& path) {
  if (!fs::exists(path) || fs::is_directory(path)) {
    throw IoError("missing input file: " + path);
  }
}

// Writes through a temp path and renames, so failures leave no partial file.
template <typename Writer>
void atomic_output(const std::string& path, Writer&& writer) {
  const std::string tmp = path + ".tmp";
  try {
    writer(tmp);
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

void atomic_write_text(const std::string& path, const std::string& text) {
  atomic_output(path, [&](const std::string& tmp) {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw IoError("cannot write file: " + tmp);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw IoError("short write: " + tmp);
  });
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

asrpipe::AugmentConfig make_augment_config(const AppConfig& cfg, uint32_t dims) {
  asrpipe::AugmentConfig ac;
  asrpipe::parse_mask_spec(cfg.tm, &ac.max_time_masks, &ac.max_time_mask_len);
  if (cfg.fm.empty()) {
    ac.max_feat_masks = 5;
    ac.max_feat_mask_len = asrpipe::default_feat_mask_len(dims);
  } else {
    asrpipe::parse_mask_spec(cfg.fm, &ac.max_feat_masks, &ac.max_feat_mask_len);
  }
  ac.fm_on_ivec = cfg.fm_on_ivec;
  ac.warmup_steps = cfg.warmup_steps;
  ac.logmel_dims = cfg.logmel_dims;
  if (!ac.fm_on_ivec && ac.logmel_dims > dims) {
    throw UsageError("--logmel-dims exceeds the feature dimension");
  }
  return ac;
}

// ---- subcommands -----------------------------------------------------------

void run_extract(const AppConfig& cfg, const std::string& in, const std::string& out) {
  require_file(in);
  const asrpipe::AudioSignal audio = asrpipe::read_wav(in);
  asrpipe::LogmelOptions opts;
  opts.window_ms = cfg.window_ms;
  opts.shift_ms = cfg.shift_ms;
  opts.num_bands = cfg.num_bands;
  opts.log_floor = cfg.log_floor;
  const asrpipe::FeatureMatrix feats = asrpipe::extract_logmel(audio, opts, stem_of(in));
  atomic_output(out, [&](const std::string& tmp) { asrpipe::write_fmx(feats, tmp); });
}

void run_embed_train(const AppConfig& cfg, std::vector<std::string> features,
                     const std::string& list, const std::vector<std::string>& label_files,
                     const std::string& out_prefix) {
  if (!list.empty()) {
    require_file(list);
    std::ifstream f(list);
    std::string line;
    while (std::getline(f, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) features.push_back(line);
    }
  }
  if (features.empty()) throw UsageError("embed-train: no feature files given");
  if (!label_files.empty() && label_files.size() != features.size()) {
    throw UsageError("embed-train: need one label file per feature file");
  }
  for (const auto& p : features) require_file(p);
  for (const auto& p : label_files) require_file(p);

  // stack context per recording, pool frames for LDA
  std::vector<asrpipe::FeatureMatrix> stacked;
  for (const auto& p : features) {
    asrpipe::FeatureMatrix m = asrpipe::read_fmx(p);
    m.source_id = stem_of(p);
    stacked.push_back(asrpipe::stack_context(m, cfg.context));
  }
  size_t total_frames = 0;
  for (const auto& m : stacked) total_frames += m.num_frames;
  const uint32_t dim = stacked[0].num_dims;
  asrpipe::Matrix pooled(total_frames, dim);
  size_t row = 0;
  for (const auto& m : stacked) {
    if (m.num_dims != dim) throw UsageError("embed-train: inconsistent feature dims");
    std::copy(m.data.begin(), m.data.end(), pooled.row(row));
    row += m.num_frames;
  }

  std::vector<int> labels;
  if (!label_files.empty()) {
    for (size_t i = 0; i < label_files.size(); ++i) {
      std::ifstream f(label_files[i]);
      std::string line;
      size_t n = 0;
      while (std::getline(f, line)) {
        if (line.empty()) continue;
        try {
          labels.push_back(std::stoi(line));
        } catch (const std::exception&) {
          throw FormatError("bad label line in " + label_files[i] + ": '" + line + "'");
        }
        n++;
      }
      if (n != stacked[i].num_frames) {
        throw FormatError("label count " + std::to_string(n) + " does not match " +
                          std::to_string(stacked[i].num_frames) + " frames of " +
                          features[i]);
      }
    }
  } else {
    labels = asrpipe::kmeans_labels(pooled, cfg.classes, cfg.kmeans_iterations,
                                    asrpipe::SeededRng(cfg.seed).fork(0));
  }

  const asrpipe::LdaTransform lda = asrpipe::lda_fit(pooled, labels, cfg.lda_dim, cfg.ridge);
  const asrpipe::Matrix reduced_all = asrpipe::lda_apply(lda, pooled);
  const asrpipe::UbmTrainResult ubm =
      asrpipe::ubm_fit(reduced_all, cfg.ubm_components, cfg.em_iterations,
                       asrpipe::SeededRng(cfg.seed).fork(1), cfg.var_floor);

  std::vector<std::vector<double>> supervectors;
  for (const auto& m : stacked) {
    asrpipe::Matrix rec(m.num_frames, dim);
    std::copy(m.data.begin(), m.data.end(), rec.v.data());
    supervectors.push_back(asrpipe::ubm_supervector(ubm.model, asrpipe::lda_apply(lda, rec)));
  }
  const asrpipe::EmbeddingProjection proj = asrpipe::embedding_projection_fit(
      supervectors, asrpipe::kSpeakerEmbeddingDim, asrpipe::SeededRng(cfg.seed).fork(2));

  atomic_output(out_prefix + ".lda",
                [&](const std::string& tmp) { asrpipe::write_lda(lda, tmp); });
  atomic_output(out_prefix + ".ubm",
                [&](const std::string& tmp) { asrpipe::write_ubm(ubm.model, tmp); });
  atomic_output(out_prefix + ".prj",
                [&](const std::string& tmp) { asrpipe::write_projection(proj, tmp); });
}

void run_embed(const std::string& in, const std::string& lda_path, const std::string& ubm_path,
               const std::string& proj_path, const std::string& id, const std::string& out) {
  require_file(in);
  require_file(lda_path);
  require_file(ubm_path);
  require_file(proj_path);

  asrpipe::FeatureMatrix feats = asrpipe::read_fmx(in);
  feats.source_id = id.empty() ? stem_of(in) : id;
  const asrpipe::LdaTransform lda = asrpipe::read_lda(lda_path);
  const asrpipe::Ubm ubm = asrpipe::read_ubm(ubm_path);
  const asrpipe::EmbeddingProjection proj = asrpipe::read_projection(proj_path);
  const asrpipe::SpeakerEmbedding emb = asrpipe::embed_recording(feats, lda, ubm, proj);

  std::string text;
  for (double v : emb.values) text += format_double("%.9e", v) + "\n";
  atomic_write_text(out, text);
}

void run_augment(const AppConfig& cfg, const std::string& in, const std::string& out,
                 const std::string& pgm_before, const std::string& pgm_after,
                 uint32_t pgm_chunk) {
  require_file(in);
  const asrpipe::FeatureMatrix feats = asrpipe::read_fmx(in);
  const asrpipe::AugmentConfig ac = make_augment_config(cfg, feats.num_dims);

  // tile the sequence (overlap would make masked chunks disagree on shared
  // frames), then mask batch by batch with the step advancing per batch
  const std::vector<asrpipe::Chunk> chunks = asrpipe::split_chunks(feats, cfg.chunk_len, 0.0);
  const std::vector<asrpipe::Minibatch> batches =
      asrpipe::make_batches(chunks, cfg.batch_size, std::nullopt);

  const asrpipe::SeededRng rng(cfg.seed);
  std::vector<asrpipe::Chunk> masked;
  for (size_t b = 0; b < batches.size(); ++b) {
    const asrpipe::Minibatch done =
        asrpipe::augment_batch(batches[b], ac, cfg.step + b, rng);
    masked.insert(masked.end(), done.chunks.begin(), done.chunks.end());
  }
  const asrpipe::FeatureMatrix result = asrpipe::reassemble(masked, feats.num_frames);
  atomic_output(out, [&](const std::string& tmp) { asrpipe::write_fmx(result, tmp); });

  if (!pgm_before.empty() || !pgm_after.empty()) {
    if (pgm_chunk >= chunks.size()) {
      throw UsageError("--pgm-chunk " + std::to_string(pgm_chunk) + " out of range (" +
                       std::to_string(chunks.size()) + " chunks)");
    }
    // shared scale so the masked cells are visibly zero in both images
    double lo = chunks[pgm_chunk].data[0], hi = chunks[pgm_chunk].data[0];
    for (double v : chunks[pgm_chunk].data) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo == hi) hi = lo + 1.0;
    lo = std::min(lo, 0.0);
    if (!pgm_before.empty()) {
      atomic_output(pgm_before, [&](const std::string& tmp) {
        asrpipe::write_chunk_pgm(chunks[pgm_chunk], tmp, lo, hi);
      });
    }
    if (!pgm_after.empty()) {
      atomic_output(pgm_after, [&](const std::string& tmp) {
        asrpipe::write_chunk_pgm(masked[pgm_chunk], tmp, lo, hi);
      });
    }
  }
}

void run_mask_stats(const AppConfig& cfg, uint32_t dims, uint64_t trials,
                    const std::string& out, const std::string& hist_out) {
  const asrpipe::AugmentConfig ac = make_augment_config(cfg, dims);
  const asrpipe::MaskStats st =
      asrpipe::mask_statistics(ac, cfg.chunk_len, dims, trials, asrpipe::SeededRng(cfg.seed));

  std::ostringstream csv;
  csv << "tm,fm,fm_on_ivec,chunk,dims,trials,mean_time_fraction,max_time_fraction,"
         "mean_dim_fraction,max_dim_fraction\n";
  csv << ac.max_time_masks << "x" << ac.max_time_mask_len << ","
      << ac.max_feat_masks << "x" << ac.max_feat_mask_len << ","
      << (ac.fm_on_ivec ? 1 : 0) << "," << cfg.chunk_len << "," << dims << "," << trials
      << "," << format_double("%.6f", st.mean_time_fraction) << ","
      << format_double("%.6f", st.max_time_fraction) << ","
      << format_double("%.6f", st.mean_dim_fraction) << ","
      << format_double("%.6f", st.max_dim_fraction) << "\n";
  atomic_write_text(out, csv.str());

  if (!hist_out.empty()) {
    std::ostringstream hist;
    hist << "dim,mask_count\n";
    for (uint32_t d = 0; d < dims; ++d) {
      hist << d << "," << st.dim_mask_counts[d] << "\n";
    }
    atomic_write_text(hist_out, hist.str());
  }
}

std::vector<uint64_t> parse_prune_spec(const std::string& spec, uint32_t order) {
  std::vector<uint64_t> out;
  std::stringstream ss(spec);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      out.push_back(std::stoull(field));
    } catch (const std::exception&) {
      throw UsageError("bad prune spec '" + spec + "' (expected e.g. 0,1,1,2)");
    }
  }
  if (out.size() != order) {
    throw UsageError("prune spec needs exactly one minimum count per order");
  }
  return out;
}

void run_lm_train(const AppConfig& cfg, const std::string& corpus_path,
                  const std::string& vocab_path, const std::string& out,
                  const std::string& write_vocab) {
  require_file(corpus_path);
  if (!vocab_path.empty()) require_file(vocab_path);

  const auto sentences = asrpipe::lm::read_corpus(corpus_path);
  const asrpipe::lm::Vocabulary vocab = vocab_path.empty()
                                            ? asrpipe::lm::Vocabulary::from_corpus(sentences)
                                            : asrpipe::lm::Vocabulary::load(vocab_path);
  const auto counts = asrpipe::lm::count_ngrams(asrpipe::lm::map_corpus(vocab, sentences),
                                                cfg.lm_order, vocab);
  asrpipe::lm::NGramModel model = asrpipe::lm::kn_estimate(counts, cfg.lm_order);
  if (!cfg.lm_prune.empty()) {
    model.prune_min_counts(parse_prune_spec(cfg.lm_prune, cfg.lm_order));
  }
  atomic_output(out, [&](const std::string& tmp) { asrpipe::lm::arpa_export(model, tmp); });
  if (!write_vocab.empty()) {
    atomic_output(write_vocab, [&](const std::string& tmp) { vocab.save(tmp); });
  }
}

void run_lm_interp(const std::vector<std::string>& model_paths, const std::string& dev_path,
                   const std::string& out) {
  if (model_paths.empty()) throw UsageError("lm-interp: no models given");
  require_file(dev_path);
  for (const auto& p : model_paths) require_file(p);

  std::vector<asrpipe::lm::NGramModel> components;
  for (const auto& p : model_paths) components.push_back(asrpipe::lm::arpa_import(p));
  const auto dev = asrpipe::lm::read_corpus(dev_path);
  const asrpipe::lm::InterpFitResult r = asrpipe::lm::interp_fit(std::move(components), dev);

  json doc;
  doc["models"] = model_paths;
  doc["weights"] = r.mixture.weights;
  doc["dev_perplexity"] = asrpipe::lm::perplexity(r.mixture, dev);
  atomic_write_text(out, doc.dump(2) + "\n");
}

asrpipe::lm::InterpolatedLM load_mixture(const std::string& mix_path) {
  require_file(mix_path);
  std::ifstream in(mix_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("mixture file parse error: " + std::string(e.what()));
  }
  asrpipe::lm::InterpolatedLM mix;
  try {
    const auto paths = doc.at("models").get<std::vector<std::string>>();
    mix.weights = doc.at("weights").get<std::vector<double>>();
    for (const auto& p : paths) {
      require_file(p);
      mix.components.push_back(asrpipe::lm::arpa_import(p));
    }
  } catch (const json::exception& e) {
    throw FormatError("bad mixture file: " + std::string(e.what()));
  }
  if (mix.components.size() != mix.weights.size() || mix.components.empty()) {
    throw FormatError("mixture file: models and weights must align");
  }
  return mix;
}

void run_lm_ppl(const std::string& model_path, const std::string& mix_path,
                const std::string& corpus_path, const std::string& out) {
  if (model_path.empty() == mix_path.empty()) {
    throw UsageError("lm-ppl: give exactly one of --model or --mix");
  }
  require_file(corpus_path);
  const auto corpus = asrpipe::lm::read_corpus(corpus_path);

  double ppl = 0.0;
  if (!model_path.empty()) {
    require_file(model_path);
    ppl = asrpipe::lm::perplexity(asrpipe::lm::arpa_import(model_path), corpus);
  } else {
    ppl = asrpipe::lm::perplexity(load_mixture(mix_path), corpus);
  }
  const std::string text = format_double("%.6f", ppl) + "\n";
  std::cout << text;
  if (!out.empty()) atomic_write_text(out, text);
}

void run_lm_arpa(const std::string& in, const std::string& out) {
  require_file(in);
  const asrpipe::lm::NGramModel model = asrpipe::lm::arpa_import(in);
  atomic_output(out, [&](const std::string& tmp) { asrpipe::lm::arpa_export(model, tmp); });
}

void run_sched_replay(const AppConfig& cfg, const std::string& scores_path,
                      const std::string& out) {
  require_file(scores_path);
  std::ifstream in(scores_path);
  std::vector<std::pair<uint64_t, double>> scores;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    uint64_t epoch = 0;
    double score = 0.0;
    if (!(ss >> epoch >> score)) {
      throw FormatError("bad score line " + std::to_string(lineno) + " in " + scores_path);
    }
    std::string rest;
    if (ss >> rest) {
      throw FormatError("bad score line " + std::to_string(lineno) + " in " + scores_path);
    }
    scores.emplace_back(epoch, score);
  }
  if (scores.empty()) throw FormatError("no scores in " + scores_path);

  asrpipe::NewbobState state;
  state.current_lr = cfg.initial_lr;
  state.decay = cfg.lr_decay;
  state.min_lr = cfg.min_lr;
  state.rel_improvement_threshold = cfg.lr_threshold;
  const asrpipe::PretrainSchedule sched{cfg.layers, cfg.epochs_per_stage};

  std::ostringstream csv;
  csv << "epoch,dev_score,lr,active_layers\n";
  for (const auto& [epoch, score] : scores) {
    state = asrpipe::newbob_step(state, epoch, score);
    csv << epoch << "," << format_double("%.6f", score) << ","
        << format_double("%.12g", state.current_lr) << ","
        << asrpipe::active_layers(sched, epoch) << "\n";
  }
  atomic_write_text(out, csv.str());
}

std::string prescan_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  AppConfig cfg;
  try {
    const std::string config_path = prescan_config_path(argc, argv);
    if (!config_path.empty()) apply_config_file(config_path, &cfg);

    CLI::App app{
        "asrpipe: logmel extraction, chunked masking augmentation, speaker\n"
        "embeddings, Kneser-Ney language models and schedule utilities.\n"
        "Outputs are deterministic in (inputs, config, seed) and written\n"
        "atomically.\n\n"
        "Exit codes: 0 success, 2 usage/config, 3 missing file, 4 format\n"
        "violation, 5 internal error."};
    app.require_subcommand(1);
    std::string config_dummy;
    app.add_option("--config", config_dummy, "JSON config file (flags override it)");

    // ---- extract
    auto* extract = app.add_subcommand("extract", "WAV -> FMX1 logmel features");
    std::string ex_in, ex_out;
    extract->add_option("--in", ex_in, "input WAV (PCM16 mono)")->required();
    extract->add_option("--out", ex_out, "output FMX1 file")->required();
    extract->add_option("--seed", cfg.seed, "unused here; accepted for uniformity");
    extract->add_option("--window-ms", cfg.window_ms, "analysis window (ms)");
    extract->add_option("--shift-ms", cfg.shift_ms, "frame shift (ms)");
    extract->add_option("--bands", cfg.num_bands, "mel bands");
    extract->add_option("--log-floor", cfg.log_floor, "energy floor before log");
    extract->callback([&] { run_extract(cfg, ex_in, ex_out); });

    // ---- embed-train
    auto* etrain = app.add_subcommand(
        "embed-train", "fit LDA + UBM + projection from FMX1 recordings; writes "
                       "<out>.lda/.ubm/.prj");
    std::vector<std::string> et_features, et_labels;
    std::string et_list, et_out;
    etrain->add_option("--features", et_features, "FMX1 recordings");
    etrain->add_option("--list", et_list, "manifest with one FMX1 path per line");
    etrain->add_option("--labels", et_labels, "per-recording frame label files (optional)");
    etrain->add_option("--out", et_out, "output path prefix")->required();
    etrain->add_option("--seed", cfg.seed, "seed");
    etrain->add_option("--context", cfg.context, "context frames (odd)");
    etrain->add_option("--lda-dim", cfg.lda_dim, "LDA output dim");
    etrain->add_option("--ubm-k", cfg.ubm_components, "UBM components");
    etrain->add_option("--em-iters", cfg.em_iterations, "EM iterations");
    etrain->add_option("--classes", cfg.classes, "k-means classes when no labels given");
    etrain->add_option("--ridge", cfg.ridge, "LDA ridge scale");
    etrain->add_option("--var-floor", cfg.var_floor, "UBM variance floor");
    etrain->callback([&] { run_embed_train(cfg, et_features, et_list, et_labels, et_out); });

    // ---- embed
    auto* embed = app.add_subcommand("embed", "FMX1 recording -> 100-dim embedding text");
    std::string em_in, em_lda, em_ubm, em_proj, em_id, em_out;
    embed->add_option("--in", em_in, "input FMX1")->required();
    embed->add_option("--lda", em_lda, "LDA1 model")->required();
    embed->add_option("--ubm", em_ubm, "UBM1 model")->required();
    embed->add_option("--proj", em_proj, "PRJ1 model")->required();
    embed->add_option("--id", em_id, "recording id (default: input stem)");
    embed->add_option("--out", em_out, "output text file, one value per line")->required();
    embed->add_option("--seed", cfg.seed, "unused here; accepted for uniformity");
    embed->callback([&] { run_embed(em_in, em_lda, em_ubm, em_proj, em_id, em_out); });

    // ---- augment
    auto* aug = app.add_subcommand("augment", "FMX1 -> masked FMX1 (+ optional PGM dumps)");
    std::string au_in, au_out, au_pgm_before, au_pgm_after;
    uint32_t au_pgm_chunk = 0;
    aug->add_option("--in", au_in, "input FMX1")->required();
    aug->add_option("--out", au_out, "output FMX1")->required();
    aug->add_option("--tm", cfg.tm, "time masking MxL, e.g. 6x5");
    aug->add_option("--fm", cfg.fm, "feature masking NxL (default 5 x 10% of dims)");
    aug->add_option("--fm-on-ivec", cfg.fm_on_ivec,
                    "apply feature masks over the full dim range");
    aug->add_option("--logmel-dims", cfg.logmel_dims, "leading non-embedding dims");
    aug->add_option("--chunk", cfg.chunk_len, "chunk length (frames)");
    aug->add_option("--batch", cfg.batch_size, "chunks per batch");
    aug->add_option("--step", cfg.step, "global step (warmup halves counts below it)");
    aug->add_option("--warmup", cfg.warmup_steps, "warmup steps");
    aug->add_option("--seed", cfg.seed, "seed");
    aug->add_option("--pgm-before", au_pgm_before, "PGM dump of one chunk before masking");
    aug->add_option("--pgm-after", au_pgm_after, "PGM dump of the same chunk after masking");
    aug->add_option("--pgm-chunk", au_pgm_chunk, "chunk index for the PGM dumps");
    aug->callback([&] { run_augment(cfg, au_in, au_out, au_pgm_before, au_pgm_after,
                                    au_pgm_chunk); });

    // ---- mask-stats
    auto* stats = app.add_subcommand("mask-stats", "Monte-Carlo masking statistics -> CSV");
    std::string ms_out, ms_hist;
    uint32_t ms_dims = 180;
    uint64_t ms_trials = 100000;
    stats->add_option("--tm", cfg.tm, "time masking MxL");
    stats->add_option("--fm", cfg.fm, "feature masking NxL (default 5 x 10% of dims)");
    stats->add_option("--fm-on-ivec", cfg.fm_on_ivec,
                      "apply feature masks over the full dim range");
    stats->add_option("--logmel-dims", cfg.logmel_dims, "leading non-embedding dims");
    stats->add_option("--chunk", cfg.chunk_len, "chunk length (frames)");
    stats->add_option("--dims", ms_dims, "feature dimension");
    stats->add_option("--trials", ms_trials, "Monte-Carlo trials");
    stats->add_option("--seed", cfg.seed, "seed");
    stats->add_option("--out", ms_out, "output CSV")->required();
    stats->add_option("--hist-out", ms_hist, "optional per-dim mask frequency CSV");
    stats->callback([&] { run_mask_stats(cfg, ms_dims, ms_trials, ms_out, ms_hist); });

    // ---- lm-train
    auto* lmt = app.add_subcommand("lm-train", "corpus -> modified Kneser-Ney ARPA model");
    std::string lt_corpus, lt_vocab, lt_out, lt_wvocab;
    lmt->add_option("--corpus", lt_corpus, "training text, one sentence per line")->required();
    lmt->add_option("--vocab", lt_vocab, "vocabulary file (default: built from corpus)");
    lmt->add_option("--order", cfg.lm_order, "n-gram order");
    lmt->add_option("--prune", cfg.lm_prune, "per-order minimum counts, e.g. 0,1,1,2");
    lmt->add_option("--out", lt_out, "output ARPA file")->required();
    lmt->add_option("--write-vocab", lt_wvocab, "also write the vocabulary here");
    lmt->add_option("--seed", cfg.seed, "unused here; accepted for uniformity");
    lmt->callback([&] { run_lm_train(cfg, lt_corpus, lt_vocab, lt_out, lt_wvocab); });

    // ---- lm-interp
    auto* lmi = app.add_subcommand(
        "lm-interp", "fit mixture weights on a dev corpus; writes a JSON mixture file");
    std::vector<std::string> li_models;
    std::string li_dev, li_out;
    lmi->add_option("--models", li_models, "component ARPA files")->required();
    lmi->add_option("--dev", li_dev, "development corpus")->required();
    lmi->add_option("--out", li_out, "output mixture JSON")->required();
    lmi->add_option("--seed", cfg.seed, "unused here; accepted for uniformity");
    lmi->callback([&] { run_lm_interp(li_models, li_dev, li_out); });

    // ---- lm-ppl
    auto* lmp = app.add_subcommand("lm-ppl", "perplexity of an ARPA model or mixture");
    std::string lp_model, lp_mix, lp_corpus, lp_out;
    lmp->add_option("--model", lp_model, "ARPA model");
    lmp->add_option("--mix", lp_mix, "mixture JSON from lm-interp");
    lmp->add_option("--corpus", lp_corpus, "evaluation corpus")->required();
    lmp->add_option("--out", lp_out, "also write the perplexity here");
    lmp->add_option("--seed", cfg.seed, "unused here; accepted for uniformity");
    lmp->callback([&] { run_lm_ppl(lp_model, lp_mix, lp_corpus, lp_out); });

    // ---- lm-arpa
    auto* lma = app.add_subcommand("lm-arpa",
                                   "validate and canonicalize an ARPA file (import + export)");
    std::string la_in, la_out;
    lma->add_option("--in", la_in, "input ARPA")->required();
    lma->add_option("--out", la_out, "canonical output ARPA")->required();
    lma->add_option("--seed", cfg.seed, "unused here; accepted for uniformity");
    lma->callback([&] { run_lm_arpa(la_in, la_out); });

    // ---- sched-replay
    auto* rep = app.add_subcommand(
        "sched-replay", "replay 'epoch score' lines through the schedule -> CSV lr trace");
    std::string sr_scores, sr_out;
    rep->add_option("--scores", sr_scores, "score log, one 'epoch score' pair per line")
        ->required();
    rep->add_option("--out", sr_out, "output CSV")->required();
    rep->add_option("--lr", cfg.initial_lr, "initial learning rate");
    rep->add_option("--decay", cfg.lr_decay, "decay factor");
    rep->add_option("--min-lr", cfg.min_lr, "learning-rate floor");
    rep->add_option("--threshold", cfg.lr_threshold, "relative improvement threshold");
    rep->add_option("--layers", cfg.layers, "total layers for pretraining");
    rep->add_option("--epochs-per-stage", cfg.epochs_per_stage, "epochs per pretrain stage");
    rep->add_option("--seed", cfg.seed, "unused here; accepted for uniformity");
    rep->callback([&] { run_sched_replay(cfg, sr_scores, sr_out); });

    // --config is valid in any position; the file was already applied during
    // the prescan
    for (CLI::App* sub : {extract, etrain, embed, aug, stats, lmt, lmi, lmp, lma, rep}) {
      sub->add_option("--config", config_dummy, "JSON config file (flags override it)");
    }

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      std::cerr << "error: usage: " << e.what() << "\n";
      return 2;
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 3;
  } catch (const FormatError& e) {
    std::cerr << "error: format: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    if (what.find("cannot open") != std::string::npos ||
        what.find("cannot write") != std::string::npos ||
        what.find("short write") != std::string::npos) {
      std::cerr << "error: io: " << what << "\n";
      return 3;
    }
    std::cerr << "error: format: " << what << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 5;
  }
}
