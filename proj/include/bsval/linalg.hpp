/*
 * Copyright 2026 The bsval Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "bsval/pattern.hpp"

namespace bsval {

using Complex = std::complex<double>;

/// Dense complex matrix, row-major.
class ComplexMatrix {
 public:
  /// Zero-filled rows x cols matrix.
  ComplexMatrix(std::size_t rows, std::size_t cols);

  /// Takes ownership of row-major entries; rejects wrong sizes and NaN/Inf.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Complex> data() const { return data_; }

  bool operator==(const ComplexMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> data_;
};

/// max_ij |(A^dagger A - I)_ij|.
double unitarity_residual(const ComplexMatrix& a);

/// Square matrix with unitarity residual at most kUnitarityTolerance.
class UnitaryMatrix {
 public:
  static constexpr double kUnitarityTolerance = 1e-10;

  /// Validates squareness and unitarity.
  explicit UnitaryMatrix(ComplexMatrix matrix);

  std::size_t dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return matrix_(r, c); }

  bool operator==(const UnitaryMatrix&) const = default;

 private:
  ComplexMatrix matrix_;
};

/// Haar-distributed m x m unitary: QR of a complex Ginibre matrix with the
/// phases of R's diagonal folded back into Q.
UnitaryMatrix haar_random_unitary(std::size_t m, std::uint64_t seed);

/// Permanent as the plain sum over permutations. Test oracle; n <= 8.
Complex permanent_naive(const ComplexMatrix& a);

/// Ryser's inclusion-exclusion formula visited in Gray-code order, so each
/// subset differs from the previous by one column and the row sums update
/// in O(n). O(n 2^n) overall; n <= 30 (the subset mask is 32 bits).
Complex permanent_ryser(const ComplexMatrix& a);

/// n x n submatrix with rows at the input modes and columns at the output
/// modes, both ascending.
ComplexMatrix submatrix_collision_free(const UnitaryMatrix& u, const OutputPattern& input,
                                       const OutputPattern& output);

/// JSON file {"m", "re", "im"} with row-major arrays. Round trips are exact.
void save_matrix_json(const UnitaryMatrix& u, const std::filesystem::path& path);
UnitaryMatrix load_matrix_json(const std::filesystem::path& path);

}  // namespace bsval
