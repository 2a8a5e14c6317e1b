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

#ifndef ASRPIPE_EMBEDDING_HPP_
#define ASRPIPE_EMBEDDING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "asrpipe/feature_matrix.hpp"
#include "asrpipe/linalg.hpp"
#include "asrpipe/rng.hpp"

namespace asrpipe {

inline constexpr uint32_t kSpeakerEmbeddingDim = 100;

// Fixed 100-dim per-recording speaker vector, concatenated per frame onto the
// acoustic features.
struct SpeakerEmbedding {
  std::vector<double> values;  // exactly kSpeakerEmbeddingDim entries
  std::string recording_id;
};

struct LdaTransform {
  Matrix projection;  // out_dim x input_dim
  std::vector<double> eigenvalues;
  uint32_t class_count = 0;
  uint32_t input_dim = 0;
  uint32_t out_dim() const { return static_cast<uint32_t>(projection.rows); }
};

// Diagonal-covariance GMM.
struct Ubm {
  std::vector<double> weights;    // K, sums to 1
  Matrix means;                   // K x dim
  Matrix variances;               // K x dim, floored
  uint32_t components() const { return static_cast<uint32_t>(means.rows); }
  uint32_t dim() const { return static_cast<uint32_t>(means.cols); }
};

struct EmbeddingProjection {
  Matrix rows;  // out_dim x input_dim, orthonormal rows
  std::vector<double> explained_variance;  // non-increasing
  uint32_t out_dim() const { return static_cast<uint32_t>(rows.rows); }
  uint32_t input_dim() const { return static_cast<uint32_t>(rows.cols); }
};

// Fisher LDA via the generalized eigenproblem of (between-class scatter,
// within-class scatter + ridge). The ridge is ridge_scale * trace(Sw)/dim on
// the diagonal; with ridge_scale = 0 a singular within-class scatter is an
// error. out_dim must be <= min(input_dim, class_count - 1). Eigenvalues come
// out non-increasing; each projection row has unit norm and its
// largest-magnitude entry positive, so label renaming reproduces the rows up
// to sign.
LdaTransform lda_fit(const Matrix& frames, const std::vector<int>& labels,
                     uint32_t out_dim, double ridge_scale = 1e-6);

// Projects frames through the LDA transform.
Matrix lda_apply(const LdaTransform& lda, const Matrix& frames);

struct UbmTrainResult {
  Ubm model;
  std::vector<double> log_likelihood;  // total LL before each update, non-decreasing
};

// Diagonal-GMM EM from a k-means style seeded initialization (seeded center
// pick + two Lloyd rounds). Variances are floored at var_floor; deterministic
// given the seed.
UbmTrainResult ubm_fit(const Matrix& frames, uint32_t K, uint32_t iterations,
                       SeededRng rng, double var_floor = 1e-4);

// Per-frame responsibilities and zeroth/first order statistics against the
// UBM, frame-averaged. Exposed for the embedding path and tests.
struct UbmStats {
  std::vector<double> occupancy;  // K, sums to 1
  Matrix centered_mean;           // K x dim: (1/T) sum_t r_tk (x_t - mu_k)
  double log_likelihood = 0.0;
};
UbmStats accumulate_ubm_stats(const Ubm& ubm, const Matrix& frames);
UbmStats accumulate_ubm_stats_serial(const Ubm& ubm, const Matrix& frames);

// Centered, variance-normalized first-order supervector:
// u[k*dim + d] = centered_mean[k][d] / sqrt(variance[k][d]).
std::vector<double> ubm_supervector(const Ubm& ubm, const Matrix& frames);

// PCA of centered supervectors via the Gram matrix. Components are ordered by
// non-increasing explained variance. When the sample rank is below out_dim,
// the remaining rows are completed with seeded random directions
// orthonormalized against the rest, and a rank warning is printed to stderr.
// The projection is applied without re-centering, so a zero supervector maps
// to a zero embedding.
EmbeddingProjection embedding_projection_fit(const std::vector<std::vector<double>>& supervectors,
                                             uint32_t out_dim, SeededRng rng);

// Whole per-recording pipeline: context stacking (context inferred from
// lda.input_dim / feats.num_dims), LDA, UBM statistics, supervector,
// projection to the fixed 100-dim embedding. Uses every frame of the
// recording; deterministic.
SpeakerEmbedding embed_recording(const FeatureMatrix& feats, const LdaTransform& lda,
                                 const Ubm& ubm, const EmbeddingProjection& proj);

// Fallback frame labeler for LDA when no alignment labels are available:
// seeded k-means cluster ids.
std::vector<int> kmeans_labels(const Matrix& frames, uint32_t k, uint32_t iterations,
                               SeededRng rng);

// Model containers, little-endian f32 payloads.
//   LDA1: magic, u32 out_dim, u32 input_dim, u32 class_count,
//         f32 eigenvalues[out_dim], f32 projection[out_dim*input_dim] row-major
//   UBM1: magic, u32 K, u32 dim, f32 weights[K], f32 means[K*dim],
//         f32 variances[K*dim], both row-major
//   PRJ1: magic, u32 out_dim, u32 input_dim, f32 explained_variance[out_dim],
//         f32 rows[out_dim*input_dim] row-major
void write_lda(const LdaTransform& lda, const std::string& path);
LdaTransform read_lda(const std::string& path);
void write_ubm(const Ubm& ubm, const std::string& path);
Ubm read_ubm(const std::string& path);
void write_projection(const EmbeddingProjection& proj, const std::string& path);
EmbeddingProjection read_projection(const std::string& path);

}  // namespace asrpipe

#endif  // ASRPIPE_EMBEDDING_HPP_
