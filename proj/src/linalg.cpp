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

#include "asrpipe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace asrpipe {

EigenDecomposition jacobi_eigen(const Matrix& sym) {
  const size_t n = sym.rows;
  if (n == 0 || sym.cols != n) {
    throw std::invalid_argument("jacobi_eigen: matrix must be square and non-empty");
  }
  Matrix a = sym;
  Matrix v(n, n);
  for (size_t i = 0; i < n; ++i) v.at(i, i) = 1.0;

  double scale = 0.0;
  for (size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a.at(i, i)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) scale = std::max(scale, std::fabs(a.at(i, j)));
  const double tol = std::max(scale, 1.0) * 1e-14;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) off = std::max(off, std::fabs(a.at(i, j)));
    if (off <= tol) break;

    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (std::fabs(apq) <= tol) continue;
        const double app = a.at(p, p), aqq = a.at(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (size_t k = 0; k < n; ++k) {
          const double akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (size_t k = 0; k < n; ++k) {
          const double apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (size_t k = 0; k < n; ++k) {
          const double vpk = v.at(p, k), vqk = v.at(q, k);
          v.at(p, k) = c * vpk - s * vqk;
          v.at(q, k) = s * vpk + c * vqk;
        }
      }
    }
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (size_t i = 0; i < n; ++i) diag[i] = a.at(i, i);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t x, size_t y) { return diag[x] > diag[y]; });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (size_t i = 0; i < n; ++i) {
    out.values[i] = diag[order[i]];
    for (size_t k = 0; k < n; ++k) out.vectors.at(i, k) = v.at(order[i], k);
  }
  return out;
}

Matrix cholesky_lower(const Matrix& spd) {
  const size_t n = spd.rows;
  if (n == 0 || spd.cols != n) {
    throw std::invalid_argument("cholesky_lower: matrix must be square and non-empty");
  }
  Matrix l(n, n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      double sum = spd.at(i, j);
      for (size_t k = 0; k < j; ++k) sum -= l.at(i, k) * l.at(j, k);
      if (i == j) {
        if (sum <= 0.0) {
          throw std::runtime_error("cholesky_lower: matrix is not positive definite");
        }
        l.at(i, i) = std::sqrt(sum);
      } else {
        l.at(i, j) = sum / l.at(j, j);
      }
    }
  }
  return l;
}

std::vector<double> cholesky_solve(const Matrix& L, const std::vector<double>& b) {
  const size_t n = L.rows;
  if (b.size() != n) throw std::invalid_argument("cholesky_solve: size mismatch");
  std::vector<double> y(n), x(n);
  for (size_t i = 0; i < n; ++i) {
    double sum = b[i];
    for (size_t k = 0; k < i; ++k) sum -= L.at(i, k) * y[k];
    y[i] = sum / L.at(i, i);
  }
  for (size_t ii = n; ii-- > 0;) {
    double sum = y[ii];
    for (size_t k = ii + 1; k < n; ++k) sum -= L.at(k, ii) * x[k];
    x[ii] = sum / L.at(ii, ii);
  }
  return x;
}

}  // namespace asrpipe
