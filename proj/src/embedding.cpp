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

#include "asrpipe/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <stdexcept>

namespace asrpipe {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

void canonical_sign(double* v, size_t n) {
  size_t arg = 0;
  for (size_t i = 1; i < n; ++i) {
    if (std::fabs(v[i]) > std::fabs(v[arg])) arg = i;
  }
  if (v[arg] < 0.0) {
    for (size_t i = 0; i < n; ++i) v[i] = -v[i];
  }
}

double dot(const double* a, const double* b, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// ---- binary model container helpers --------------------------------------

void put_u32(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& s, double d) {
  const float f = static_cast<float>(d);
  uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(s, bits);
}

struct ByteReader {
  std::vector<uint8_t> bytes;
  size_t pos = 0;
  std::string path;

  explicit ByteReader(const std::string& p) : path(p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + p);
    bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  void expect_magic(const char* magic) {
    if (bytes.size() < pos + 4 || std::memcmp(bytes.data() + pos, magic, 4) != 0) {
      throw std::runtime_error(std::string("not a ") + magic + " file: " + path);
    }
    pos += 4;
  }
  uint32_t u32() {
    if (pos + 4 > bytes.size()) throw std::runtime_error("truncated model file: " + path);
    const uint8_t* p = bytes.data() + pos;
    pos += 4;
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
  }
  double f32() {
    const uint32_t bits = u32();
    float f;
    std::memcpy(&f, &bits, 4);
    return static_cast<double>(f);
  }
  void done() {
    if (pos != bytes.size()) throw std::runtime_error("trailing bytes in model file: " + path);
  }
};

void write_bytes(const std::string& payload, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!f) throw std::runtime_error("short write: " + path);
}

// ---- GMM internals --------------------------------------------------------

struct GmmBlockAcc {
  std::vector<double> gamma;   // K
  Matrix sum;                  // K x dim
  Matrix sqsum;                // K x dim
  double ll = 0.0;

  GmmBlockAcc(uint32_t K, uint32_t dim) : gamma(K, 0.0), sum(K, dim), sqsum(K, dim) {}
};

struct GmmScratch {
  std::vector<double> log_weight;  // K, -inf for zero weights
  std::vector<double> log_const;   // K
  Matrix inv_var;                  // K x dim
};

GmmScratch precompute(const Ubm& ubm) {
  const uint32_t K = ubm.components(), dim = ubm.dim();
  GmmScratch s;
  s.log_weight.resize(K);
  s.log_const.resize(K);
  s.inv_var = Matrix(K, dim);
  for (uint32_t k = 0; k < K; ++k) {
    s.log_weight[k] = ubm.weights[k] > 0.0 ? std::log(ubm.weights[k])
                                           : -std::numeric_limits<double>::infinity();
    double c = 0.0;
    for (uint32_t d = 0; d < dim; ++d) {
      const double var = ubm.variances.at(k, d);
      c += std::log(kTwoPi * var);
      s.inv_var.at(k, d) = 1.0 / var;
    }
    s.log_const[k] = -0.5 * c;
  }
  return s;
}

// Responsibilities for one frame; returns the frame log-likelihood.
double frame_posteriors(const Ubm& ubm, const GmmScratch& s, const double* x,
                        std::vector<double>& resp) {
  const uint32_t K = ubm.components(), dim = ubm.dim();
  double best = -std::numeric_limits<double>::infinity();
  for (uint32_t k = 0; k < K; ++k) {
    double e = 0.0;
    const double* mu = ubm.means.row(k);
    const double* iv = s.inv_var.row(k);
    for (uint32_t d = 0; d < dim; ++d) {
      const double diff = x[d] - mu[d];
      e += diff * diff * iv[d];
    }
    resp[k] = s.log_weight[k] + s.log_const[k] - 0.5 * e;
    best = std::max(best, resp[k]);
  }
  double z = 0.0;
  for (uint32_t k = 0; k < K; ++k) z += std::exp(resp[k] - best);
  const double ll = best + std::log(z);
  for (uint32_t k = 0; k < K; ++k) resp[k] = std::exp(resp[k] - ll);
  return ll;
}

constexpr uint32_t kGmmBlock = 2048;

// Blockwise E-step: per-block partials are reduced in block order so the
// result is identical for any thread count (and to the serial path).
GmmBlockAcc estep(const Ubm& ubm, const Matrix& frames, bool parallel) {
  const uint32_t K = ubm.components(), dim = ubm.dim();
  const size_t n = frames.rows;
  const size_t nblocks = (n + kGmmBlock - 1) / kGmmBlock;
  const GmmScratch scratch = precompute(ubm);

  std::vector<GmmBlockAcc> partials(nblocks, GmmBlockAcc(K, dim));
  const int64_t nb = static_cast<int64_t>(nblocks);
#pragma omp parallel for schedule(static) if (parallel)
  for (int64_t b = 0; b < nb; ++b) {
    GmmBlockAcc& acc = partials[b];
    std::vector<double> resp(K);
    const size_t lo = static_cast<size_t>(b) * kGmmBlock;
    const size_t hi = std::min(n, lo + kGmmBlock);
    for (size_t i = lo; i < hi; ++i) {
      const double* x = frames.row(i);
      acc.ll += frame_posteriors(ubm, scratch, x, resp);
      for (uint32_t k = 0; k < K; ++k) {
        const double r = resp[k];
        if (r == 0.0) continue;
        acc.gamma[k] += r;
        double* sk = acc.sum.row(k);
        double* qk = acc.sqsum.row(k);
        for (uint32_t d = 0; d < dim; ++d) {
          sk[d] += r * x[d];
          qk[d] += r * x[d] * x[d];
        }
      }
    }
  }

  GmmBlockAcc total(K, dim);
  for (const GmmBlockAcc& p : partials) {
    total.ll += p.ll;
    for (uint32_t k = 0; k < K; ++k) {
      total.gamma[k] += p.gamma[k];
      for (uint32_t d = 0; d < dim; ++d) {
        total.sum.at(k, d) += p.sum.at(k, d);
        total.sqsum.at(k, d) += p.sqsum.at(k, d);
      }
    }
  }
  return total;
}

std::vector<uint32_t> nearest_center(const Matrix& frames, const Matrix& centers) {
  std::vector<uint32_t> assign(frames.rows, 0);
  for (size_t i = 0; i < frames.rows; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < centers.rows; ++k) {
      double d2 = 0.0;
      for (size_t d = 0; d < frames.cols; ++d) {
        const double diff = frames.at(i, d) - centers.at(k, d);
        d2 += diff * diff;
      }
      if (d2 < best) {
        best = d2;
        assign[i] = static_cast<uint32_t>(k);
      }
    }
  }
  return assign;
}

Matrix kmeans_centers(const Matrix& frames, uint32_t k, uint32_t iterations,
                      SeededRng& rng, std::vector<uint32_t>* final_assign) {
  const size_t n = frames.rows;
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  for (size_t i = n; i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.next_below(i)]);
  }
  Matrix centers(k, frames.cols);
  for (uint32_t c = 0; c < k; ++c) {
    std::memcpy(centers.row(c), frames.row(idx[c]), frames.cols * sizeof(double));
  }
  std::vector<uint32_t> assign;
  for (uint32_t it = 0; it < iterations; ++it) {
    assign = nearest_center(frames, centers);
    Matrix sums(k, frames.cols);
    std::vector<uint64_t> counts(k, 0);
    for (size_t i = 0; i < n; ++i) {
      counts[assign[i]]++;
      const double* x = frames.row(i);
      double* s = sums.row(assign[i]);
      for (size_t d = 0; d < frames.cols; ++d) s[d] += x[d];
    }
    for (uint32_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its center
      for (size_t d = 0; d < frames.cols; ++d) {
        centers.at(c, d) = sums.at(c, d) / static_cast<double>(counts[c]);
      }
    }
  }
  if (final_assign) *final_assign = nearest_center(frames, centers);
  return centers;
}

}  // namespace

// ---- LDA -------------------------------------------------------------------

LdaTransform lda_fit(const Matrix& frames, const std::vector<int>& labels,
                     uint32_t out_dim, double ridge_scale) {
  const size_t n = frames.rows;
  const size_t dim = frames.cols;
  if (n == 0 || labels.size() != n) {
    throw std::invalid_argument("lda_fit: frames and labels must have equal nonzero length");
  }

  std::map<int, uint32_t> class_of;
  for (int l : labels) class_of.emplace(l, 0);
  uint32_t next = 0;
  for (auto& [label, id] : class_of) id = next++;
  const uint32_t C = next;
  if (C < 2) throw std::invalid_argument("lda_fit: need at least 2 classes");
  if (out_dim < 1 || out_dim > std::min<size_t>(dim, C - 1)) {
    throw std::invalid_argument("lda_fit: out_dim must be in [1, min(input_dim, classes-1)]");
  }

  std::vector<uint64_t> counts(C, 0);
  Matrix class_mean(C, dim);
  std::vector<double> global_mean(dim, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const uint32_t c = class_of[labels[i]];
    counts[c]++;
    const double* x = frames.row(i);
    double* m = class_mean.row(c);
    for (size_t d = 0; d < dim; ++d) {
      m[d] += x[d];
      global_mean[d] += x[d];
    }
  }
  for (uint32_t c = 0; c < C; ++c) {
    for (size_t d = 0; d < dim; ++d) class_mean.at(c, d) /= static_cast<double>(counts[c]);
  }
  for (size_t d = 0; d < dim; ++d) global_mean[d] /= static_cast<double>(n);

  Matrix sw(dim, dim);
  std::vector<double> diff(dim);
  for (size_t i = 0; i < n; ++i) {
    const uint32_t c = class_of[labels[i]];
    const double* x = frames.row(i);
    const double* m = class_mean.row(c);
    for (size_t d = 0; d < dim; ++d) diff[d] = x[d] - m[d];
    for (size_t a = 0; a < dim; ++a) {
      double* row = sw.row(a);
      const double da = diff[a];
      for (size_t b = a; b < dim; ++b) row[b] += da * diff[b];
    }
  }
  for (size_t a = 0; a < dim; ++a)
    for (size_t b = 0; b < a; ++b) sw.at(a, b) = sw.at(b, a);

  double trace = 0.0;
  for (size_t d = 0; d < dim; ++d) trace += sw.at(d, d);
  const double ridge = ridge_scale * trace / static_cast<double>(dim);
  for (size_t d = 0; d < dim; ++d) sw.at(d, d) += ridge;

  Matrix chol;
  try {
    chol = cholesky_lower(sw);
  } catch (const std::runtime_error&) {
    throw std::runtime_error(
        "lda_fit: within-class scatter is singular; pass ridge_scale > 0 to regularize");
  }

  // Between-class scatter has rank < C, so solve in the span of the class
  // means: columns of A are sqrt(n_c) (mu_c - mu), and the nonzero
  // generalized eigenpairs come from the C x C matrix A^T W^-1 A.
  Matrix a_cols(C, dim);  // row c holds column c of A
  for (uint32_t c = 0; c < C; ++c) {
    const double scale = std::sqrt(static_cast<double>(counts[c]));
    for (size_t d = 0; d < dim; ++d) {
      a_cols.at(c, d) = scale * (class_mean.at(c, d) - global_mean[d]);
    }
  }
  Matrix x_cols(C, dim);  // row c holds W^-1 A e_c
  std::vector<double> rhs(dim);
  for (uint32_t c = 0; c < C; ++c) {
    std::memcpy(rhs.data(), a_cols.row(c), dim * sizeof(double));
    const std::vector<double> sol = cholesky_solve(chol, rhs);
    std::memcpy(x_cols.row(c), sol.data(), dim * sizeof(double));
  }
  Matrix small(C, C);
  for (uint32_t i = 0; i < C; ++i) {
    for (uint32_t j = i; j < C; ++j) {
      const double v = dot(a_cols.row(i), x_cols.row(j), dim);
      small.at(i, j) = v;
      small.at(j, i) = v;
    }
  }
  const EigenDecomposition eig = jacobi_eigen(small);

  LdaTransform lda;
  lda.class_count = C;
  lda.input_dim = static_cast<uint32_t>(dim);
  lda.projection = Matrix(out_dim, dim);
  lda.eigenvalues.resize(out_dim);
  for (uint32_t j = 0; j < out_dim; ++j) {
    lda.eigenvalues[j] = std::max(0.0, eig.values[j]);
    double* row = lda.projection.row(j);
    for (size_t d = 0; d < dim; ++d) {
      double acc = 0.0;
      for (uint32_t c = 0; c < C; ++c) acc += eig.vectors.at(j, c) * x_cols.at(c, d);
      row[d] = acc;
    }
    const double norm = std::sqrt(dot(row, row, dim));
    if (norm < 1e-12) {
      throw std::runtime_error("lda_fit: degenerate eigenvector (rank of scatter too low)");
    }
    for (size_t d = 0; d < dim; ++d) row[d] /= norm;
    canonical_sign(row, dim);
  }
  return lda;
}

Matrix lda_apply(const LdaTransform& lda, const Matrix& frames) {
  if (frames.cols != lda.input_dim) {
    throw std::invalid_argument("lda_apply: input dim mismatch");
  }
  Matrix out(frames.rows, lda.out_dim());
  for (size_t i = 0; i < frames.rows; ++i) {
    const double* x = frames.row(i);
    for (uint32_t j = 0; j < lda.out_dim(); ++j) {
      out.at(i, j) = dot(lda.projection.row(j), x, frames.cols);
    }
  }
  return out;
}

// ---- UBM -------------------------------------------------------------------

UbmTrainResult ubm_fit(const Matrix& frames, uint32_t K, uint32_t iterations,
                       SeededRng rng, double var_floor) {
  const size_t n = frames.rows;
  const size_t dim = frames.cols;
  if (K < 1) throw std::invalid_argument("ubm_fit: K must be >= 1");
  if (n < K) {
    throw std::invalid_argument("ubm_fit: fewer frames (" + std::to_string(n) +
                                ") than components (" + std::to_string(K) + ")");
  }
  if (var_floor <= 0.0) throw std::invalid_argument("ubm_fit: var_floor must be > 0");

  std::vector<uint32_t> assign;
  Matrix centers = kmeans_centers(frames, K, 2, rng, &assign);

  std::vector<double> gvar(dim, 0.0), gmean(dim, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t d = 0; d < dim; ++d) gmean[d] += frames.at(i, d);
  }
  for (size_t d = 0; d < dim; ++d) gmean[d] /= static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t d = 0; d < dim; ++d) {
      const double diff = frames.at(i, d) - gmean[d];
      gvar[d] += diff * diff;
    }
  }
  for (size_t d = 0; d < dim; ++d) {
    gvar[d] = std::max(gvar[d] / static_cast<double>(n), var_floor);
  }

  Ubm ubm;
  ubm.means = centers;
  ubm.variances = Matrix(K, dim);
  ubm.weights.assign(K, 0.0);
  std::vector<uint64_t> counts(K, 0);
  for (uint32_t c : assign) counts[c]++;
  for (uint32_t k = 0; k < K; ++k) {
    // start from cluster proportions with a small floor, global variance
    ubm.weights[k] = std::max<double>(counts[k], 0.5) / static_cast<double>(n);
    for (size_t d = 0; d < dim; ++d) ubm.variances.at(k, d) = gvar[d];
  }
  double wsum = 0.0;
  for (double w : ubm.weights) wsum += w;
  for (double& w : ubm.weights) w /= wsum;

  UbmTrainResult result;
  for (uint32_t it = 0; it < iterations; ++it) {
    const GmmBlockAcc acc = estep(ubm, frames, true);
    result.log_likelihood.push_back(acc.ll);
    for (uint32_t k = 0; k < K; ++k) {
      ubm.weights[k] = acc.gamma[k] / static_cast<double>(n);
      if (acc.gamma[k] <= 1e-10) continue;  // dead component keeps its parameters
      for (size_t d = 0; d < dim; ++d) {
        const double mu = acc.sum.at(k, d) / acc.gamma[k];
        ubm.means.at(k, d) = mu;
        ubm.variances.at(k, d) =
            std::max(acc.sqsum.at(k, d) / acc.gamma[k] - mu * mu, var_floor);
      }
    }
  }
  result.model = std::move(ubm);
  return result;
}

UbmStats accumulate_ubm_stats(const Ubm& ubm, const Matrix& frames) {
  if (frames.rows == 0) throw std::invalid_argument("accumulate_ubm_stats: empty recording");
  if (frames.cols != ubm.dim()) {
    throw std::invalid_argument("accumulate_ubm_stats: dim mismatch");
  }
  const GmmBlockAcc acc = estep(ubm, frames, true);
  const double T = static_cast<double>(frames.rows);
  UbmStats st;
  st.log_likelihood = acc.ll;
  st.occupancy.resize(ubm.components());
  st.centered_mean = Matrix(ubm.components(), ubm.dim());
  for (uint32_t k = 0; k < ubm.components(); ++k) {
    st.occupancy[k] = acc.gamma[k] / T;
    for (uint32_t d = 0; d < ubm.dim(); ++d) {
      st.centered_mean.at(k, d) =
          (acc.sum.at(k, d) - acc.gamma[k] * ubm.means.at(k, d)) / T;
    }
  }
  return st;
}

UbmStats accumulate_ubm_stats_serial(const Ubm& ubm, const Matrix& frames) {
  if (frames.rows == 0) throw std::invalid_argument("accumulate_ubm_stats: empty recording");
  if (frames.cols != ubm.dim()) {
    throw std::invalid_argument("accumulate_ubm_stats: dim mismatch");
  }
  const GmmBlockAcc acc = estep(ubm, frames, false);
  const double T = static_cast<double>(frames.rows);
  UbmStats st;
  st.log_likelihood = acc.ll;
  st.occupancy.resize(ubm.components());
  st.centered_mean = Matrix(ubm.components(), ubm.dim());
  for (uint32_t k = 0; k < ubm.components(); ++k) {
    st.occupancy[k] = acc.gamma[k] / T;
    for (uint32_t d = 0; d < ubm.dim(); ++d) {
      st.centered_mean.at(k, d) =
          (acc.sum.at(k, d) - acc.gamma[k] * ubm.means.at(k, d)) / T;
    }
  }
  return st;
}

std::vector<double> ubm_supervector(const Ubm& ubm, const Matrix& frames) {
  const UbmStats st = accumulate_ubm_stats(ubm, frames);
  std::vector<double> sv(static_cast<size_t>(ubm.components()) * ubm.dim());
  for (uint32_t k = 0; k < ubm.components(); ++k) {
    for (uint32_t d = 0; d < ubm.dim(); ++d) {
      sv[static_cast<size_t>(k) * ubm.dim() + d] =
          st.centered_mean.at(k, d) / std::sqrt(ubm.variances.at(k, d));
    }
  }
  return sv;
}

// ---- embedding projection ---------------------------------------------------

EmbeddingProjection embedding_projection_fit(const std::vector<std::vector<double>>& supervectors,
                                             uint32_t out_dim, SeededRng rng) {
  if (supervectors.empty()) {
    throw std::invalid_argument("embedding_projection_fit: no supervectors");
  }
  const size_t dim = supervectors[0].size();
  for (const auto& sv : supervectors) {
    if (sv.size() != dim) {
      throw std::invalid_argument("embedding_projection_fit: inconsistent dimensions");
    }
  }
  if (out_dim < 1 || out_dim > dim) {
    throw std::invalid_argument(
        "embedding_projection_fit: out_dim must be in [1, supervector dim]");
  }
  const size_t n = supervectors.size();

  std::vector<double> mean(dim, 0.0);
  for (const auto& sv : supervectors) {
    for (size_t d = 0; d < dim; ++d) mean[d] += sv[d];
  }
  for (size_t d = 0; d < dim; ++d) mean[d] /= static_cast<double>(n);

  Matrix centered(n, dim);
  for (size_t i = 0; i < n; ++i) {
    for (size_t d = 0; d < dim; ++d) centered.at(i, d) = supervectors[i][d] - mean[d];
  }

  // PCA through the n x n Gram matrix; eigenvectors map back through the data.
  Matrix gram(n, n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i; j < n; ++j) {
      const double g = dot(centered.row(i), centered.row(j), dim) / static_cast<double>(n);
      gram.at(i, j) = g;
      gram.at(j, i) = g;
    }
  }
  const EigenDecomposition eig = jacobi_eigen(gram);

  const double lead = std::max(eig.values.empty() ? 0.0 : eig.values[0], 0.0);
  size_t rank = 0;
  while (rank < n && eig.values[rank] > std::max(lead * 1e-12, 1e-300)) ++rank;
  const uint32_t r = static_cast<uint32_t>(std::min<size_t>(out_dim, rank));

  EmbeddingProjection proj;
  proj.rows = Matrix(out_dim, dim);
  proj.explained_variance.assign(out_dim, 0.0);
  for (uint32_t j = 0; j < r; ++j) {
    double* row = proj.rows.row(j);
    for (size_t d = 0; d < dim; ++d) {
      double acc = 0.0;
      for (size_t i = 0; i < n; ++i) acc += eig.vectors.at(j, i) * centered.at(i, d);
      row[d] = acc;
    }
    const double norm = std::sqrt(dot(row, row, dim));
    for (size_t d = 0; d < dim; ++d) row[d] /= norm;
    canonical_sign(row, dim);
    proj.explained_variance[j] = eig.values[j];
  }

  if (r < out_dim) {
    std::cerr << "embedding_projection_fit: sample rank " << r << " is below out_dim "
              << out_dim << "; completing with seeded orthonormal directions\n";
    for (uint32_t j = r; j < out_dim; ++j) {
      double* row = proj.rows.row(j);
      while (true) {
        for (size_t d = 0; d < dim; ++d) {
          row[d] = static_cast<double>(rng.next()) * 0x1p-64 - 0.5;
        }
        for (uint32_t prev = 0; prev < j; ++prev) {
          const double p = dot(row, proj.rows.row(prev), dim);
          const double* pr = proj.rows.row(prev);
          for (size_t d = 0; d < dim; ++d) row[d] -= p * pr[d];
        }
        const double norm = std::sqrt(dot(row, row, dim));
        if (norm > 1e-8) {
          for (size_t d = 0; d < dim; ++d) row[d] /= norm;
          break;
        }
      }
      canonical_sign(row, dim);
    }
  }
  return proj;
}

SpeakerEmbedding embed_recording(const FeatureMatrix& feats, const LdaTransform& lda,
                                 const Ubm& ubm, const EmbeddingProjection& proj) {
  if (feats.num_frames == 0) throw std::invalid_argument("embed_recording: empty recording");
  if (feats.num_dims == 0 || lda.input_dim % feats.num_dims != 0) {
    throw std::invalid_argument("embed_recording: LDA input dim is not a multiple of the feature dim");
  }
  const uint32_t context = lda.input_dim / feats.num_dims;
  if (context % 2 == 0) {
    throw std::invalid_argument("embed_recording: inferred context is not odd");
  }
  if (ubm.dim() != lda.out_dim()) {
    throw std::invalid_argument("embed_recording: UBM dim does not match LDA output dim");
  }
  if (proj.input_dim() != ubm.components() * ubm.dim()) {
    throw std::invalid_argument("embed_recording: projection input dim does not match supervector");
  }
  if (proj.out_dim() != kSpeakerEmbeddingDim) {
    throw std::invalid_argument("embed_recording: projection must produce " +
                                std::to_string(kSpeakerEmbeddingDim) + " dims");
  }

  const FeatureMatrix stacked = stack_context(feats, context);
  Matrix m(stacked.num_frames, stacked.num_dims);
  std::memcpy(m.v.data(), stacked.data.data(), stacked.data.size() * sizeof(double));
  const Matrix reduced = lda_apply(lda, m);
  const std::vector<double> sv = ubm_supervector(ubm, reduced);

  SpeakerEmbedding emb;
  emb.recording_id = feats.source_id;
  emb.values.resize(kSpeakerEmbeddingDim);
  for (uint32_t j = 0; j < kSpeakerEmbeddingDim; ++j) {
    emb.values[j] = dot(proj.rows.row(j), sv.data(), sv.size());
  }
  return emb;
}

std::vector<int> kmeans_labels(const Matrix& frames, uint32_t k, uint32_t iterations,
                               SeededRng rng) {
  if (frames.rows < k) throw std::invalid_argument("kmeans_labels: fewer frames than clusters");
  std::vector<uint32_t> assign;
  kmeans_centers(frames, k, iterations, rng, &assign);
  std::vector<int> labels(assign.begin(), assign.end());
  return labels;
}

// ---- model files -------------------------------------------------------------

void write_lda(const LdaTransform& lda, const std::string& path) {
  std::string out;
  out.append("LDA1");
  put_u32(out, lda.out_dim());
  put_u32(out, lda.input_dim);
  put_u32(out, lda.class_count);
  for (uint32_t j = 0; j < lda.out_dim(); ++j) put_f32(out, lda.eigenvalues[j]);
  for (double v : lda.projection.v) put_f32(out, v);
  write_bytes(out, path);
}

LdaTransform read_lda(const std::string& path) {
  ByteReader r(path);
  r.expect_magic("LDA1");
  LdaTransform lda;
  const uint32_t out_dim = r.u32();
  lda.input_dim = r.u32();
  lda.class_count = r.u32();
  lda.eigenvalues.resize(out_dim);
  for (uint32_t j = 0; j < out_dim; ++j) lda.eigenvalues[j] = r.f32();
  lda.projection = Matrix(out_dim, lda.input_dim);
  for (double& v : lda.projection.v) v = r.f32();
  r.done();
  return lda;
}

void write_ubm(const Ubm& ubm, const std::string& path) {
  std::string out;
  out.append("UBM1");
  put_u32(out, ubm.components());
  put_u32(out, ubm.dim());
  for (double w : ubm.weights) put_f32(out, w);
  for (double v : ubm.means.v) put_f32(out, v);
  for (double v : ubm.variances.v) put_f32(out, v);
  write_bytes(out, path);
}

Ubm read_ubm(const std::string& path) {
  ByteReader r(path);
  r.expect_magic("UBM1");
  Ubm ubm;
  const uint32_t K = r.u32();
  const uint32_t dim = r.u32();
  ubm.weights.resize(K);
  for (double& w : ubm.weights) w = r.f32();
  ubm.means = Matrix(K, dim);
  for (double& v : ubm.means.v) v = r.f32();
  ubm.variances = Matrix(K, dim);
  for (double& v : ubm.variances.v) v = r.f32();
  r.done();
  return ubm;
}

void write_projection(const EmbeddingProjection& proj, const std::string& path) {
  std::string out;
  out.append("PRJ1");
  put_u32(out, proj.out_dim());
  put_u32(out, proj.input_dim());
  for (double v : proj.explained_variance) put_f32(out, v);
  for (double v : proj.rows.v) put_f32(out, v);
  write_bytes(out, path);
}

EmbeddingProjection read_projection(const std::string& path) {
  ByteReader r(path);
  r.expect_magic("PRJ1");
  EmbeddingProjection proj;
  const uint32_t out_dim = r.u32();
  const uint32_t input_dim = r.u32();
  proj.explained_variance.resize(out_dim);
  for (double& v : proj.explained_variance) v = r.f32();
  proj.rows = Matrix(out_dim, input_dim);
  for (double& v : proj.rows.v) v = r.f32();
  r.done();
  return proj;
}

}  // namespace asrpipe
