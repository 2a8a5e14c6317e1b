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

#ifndef ASRPIPE_LINALG_HPP_
#define ASRPIPE_LINALG_HPP_

#include <cstddef>
#include <vector>

namespace asrpipe {

// Minimal dense row-major double matrix for the model-fitting code.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> v;

  Matrix() = default;
  Matrix(size_t r, size_t c) : rows(r), cols(c), v(r * c, 0.0) {}

  double& at(size_t r, size_t c) { return v[r * cols + c]; }
  double at(size_t r, size_t c) const { return v[r * cols + c]; }
  const double* row(size_t r) const { return v.data() + r * cols; }
  double* row(size_t r) { return v.data() + r * cols; }
};

struct EigenDecomposition {
  std::vector<double> values;  // non-increasing
  Matrix vectors;              // row i is the eigenvector for values[i]
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenpairs are
// sorted by non-increasing eigenvalue; eigenvectors are orthonormal rows.
EigenDecomposition jacobi_eigen(const Matrix& sym);

// Lower Cholesky factor of a symmetric positive definite matrix. Throws
// std::runtime_error if the matrix is not positive definite.
Matrix cholesky_lower(const Matrix& spd);

// Solves A x = b given the lower Cholesky factor L of A.
std::vector<double> cholesky_solve(const Matrix& L, const std::vector<double>& b);

}  // namespace asrpipe

#endif  // ASRPIPE_LINALG_HPP_
