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

#include "bsval/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "bsval/error.hpp"
#include "bsval/rng.hpp"

namespace bsval {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {
  if (rows == 0 || cols == 0) throw_invalid("ComplexMatrix: dimensions must be >= 1");
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw_invalid("ComplexMatrix: dimensions must be >= 1");
  if (data_.size() != rows * cols)
    throw_invalid("ComplexMatrix: expected " + std::to_string(rows * cols) + " entries, got " +
                  std::to_string(data_.size()));
  for (const Complex& z : data_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw_invalid("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

double unitarity_residual(const ComplexMatrix& a) {
  const std::size_t n = a.rows();
  const std::size_t c = a.cols();
  double worst = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      Complex acc = 0.0;
      for (std::size_t r = 0; r < n; ++r) acc += std::conj(a(r, i)) * a(r, j);
      if (i == j) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  }
  return worst;
}

UnitaryMatrix::UnitaryMatrix(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (!matrix_.square()) throw_invalid("UnitaryMatrix: matrix is not square");
  const double residual = unitarity_residual(matrix_);
  if (!(residual <= kUnitarityTolerance))
    throw_invalid("UnitaryMatrix: unitarity residual " + std::to_string(residual) +
                    " exceeds tolerance");
}

UnitaryMatrix haar_random_unitary(std::size_t m, std::uint64_t seed) {
  if (m == 0) throw_invalid("haar_random_unitary: m must be >= 1");
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(2.0);
  // Column-major working copy; modified Gram-Schmidt is a QR whose R has
  // a positive real diagonal, which is exactly the phase-fixed Q.
  std::vector<std::vector<Complex>> cols(m, std::vector<Complex>(m));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) cols[c][r] = Complex(rng.normal(), rng.normal()) * scale;

  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t c = 0; c < m; ++c) {
      for (std::size_t p = 0; p < c; ++p) {
        Complex proj = 0.0;
        for (std::size_t r = 0; r < m; ++r) proj += std::conj(cols[p][r]) * cols[c][r];
        for (std::size_t r = 0; r < m; ++r) cols[c][r] -= proj * cols[p][r];
      }
      double norm = 0.0;
      for (const Complex& z : cols[c]) norm += std::norm(z);
      norm = std::sqrt(norm);
      if (norm == 0.0) throw_numerical("haar_random_unitary: rank-deficient Ginibre draw");
      for (Complex& z : cols[c]) z /= norm;
    }
  }

  ComplexMatrix q(m, m);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) q(r, c) = cols[c][r];
  return UnitaryMatrix(std::move(q));
}

Complex permanent_naive(const ComplexMatrix& a) {
  if (!a.square()) throw_invalid("permanent_naive: matrix is not square");
  const std::size_t n = a.rows();
  if (n > 8) throw_invalid("permanent_naive: oracle limited to n <= 8");
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  Complex total = 0.0;
  do {
    Complex term = 1.0;
    for (std::size_t i = 0; i < n; ++i) term *= a(i, sigma[i]);
    total += term;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return total;
}

Complex permanent_ryser(const ComplexMatrix& a) {
  if (!a.square()) throw_invalid("permanent_ryser: matrix is not square");
  const std::size_t n = a.rows();
  if (n > 30) throw_invalid("permanent_ryser: n > 30 overflows the subset counter");

  std::vector<Complex> row_sums(n, 0.0);
  std::uint32_t gray = 0;
  Complex total = 0.0;
  const std::uint32_t subsets = std::uint32_t{1} << n;
  for (std::uint32_t step = 1; step < subsets; ++step) {
    const int column = std::countr_zero(step);
    const std::uint32_t bit = std::uint32_t{1} << column;
    gray ^= bit;
    if (gray & bit) {
      for (std::size_t i = 0; i < n; ++i) row_sums[i] += a(i, column);
    } else {
      for (std::size_t i = 0; i < n; ++i) row_sums[i] -= a(i, column);
    }
    Complex prod = row_sums[0];
    for (std::size_t i = 1; i < n; ++i) prod *= row_sums[i];
    // (-1)^{n - |S|}
    if ((n - std::popcount(gray)) & 1) {
      total -= prod;
    } else {
      total += prod;
    }
  }
  return total;
}

ComplexMatrix submatrix_collision_free(const UnitaryMatrix& u, const OutputPattern& input,
                                       const OutputPattern& output) {
  if (input.photons() != output.photons())
    throw_invalid("submatrix: input has " + std::to_string(input.photons()) +
                  " photons, output has " + std::to_string(output.photons()));
  const auto m = static_cast<int>(u.dim());
  if (input.mode_count() != m || output.mode_count() != m)
    throw_invalid("submatrix: pattern mode count does not match the matrix dimension");
  const auto n = static_cast<std::size_t>(input.photons());
  ComplexMatrix out(n, n);
  auto rows = input.modes();
  auto cols = output.modes();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) out(a, b) = u(rows[a], cols[b]);
  return out;
}

void save_matrix_json(const UnitaryMatrix& u, const std::filesystem::path& path) {
  nlohmann::json j;
  j["m"] = u.dim();
  std::vector<double> re, im;
  re.reserve(u.dim() * u.dim());
  im.reserve(u.dim() * u.dim());
  for (const Complex& z : u.matrix().data()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  j["re"] = re;
  j["im"] = im;
  std::ofstream out(path);
  if (!out) throw_io("cannot open " + path.string() + " for writing");
  out << j.dump(1) << '\n';
  if (!out) throw_io("write failed: " + path.string());
}

UnitaryMatrix load_matrix_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    const auto m = j.at("m").get<std::size_t>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != m * m || im.size() != m * m)
      throw_invalid("matrix file " + path.string() + ": expected " + std::to_string(m * m) +
                    " entries");
    std::vector<Complex> entries(m * m);
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i] = Complex(re[i], im[i]);
    return UnitaryMatrix(ComplexMatrix(m, m, std::move(entries)));
  } catch (const nlohmann::json::exception& e) {
    throw_io("matrix file " + path.string() + ": " + e.what());
  }
}

}  // namespace bsval
