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

#include <cstddef>
#include <vector>

#include "bsval/linalg.hpp"
#include "bsval/pattern.hpp"

namespace bsval {

/// Uniform pairwise photon overlap: S_ij = x + (1 - x) delta_ij.
class DistinguishabilityModel {
 public:
  explicit DistinguishabilityModel(double x_ind);

  double x_ind() const { return x_ind_; }
  double overlap(int i, int j) const { return i == j ? 1.0 : x_ind_; }

 private:
  double x_ind_;
};

/// Largest photon number for which the n! permutation sum is evaluated.
inline constexpr int kMaxInterferencePhotons = 8;

/// Tolerance on the imaginary residue of the permutation sum.
inline constexpr double kImaginaryResidueTolerance = 1e-10;

/// Evaluates sum_sigma x^{d(sigma)} Perm(M o conj(M_sigma)) for n x n
/// submatrices M, where M_sigma has its columns permuted by sigma and d
/// counts the points sigma moves. Terms with d(sigma) > max_order are
/// dropped; max_order = n gives the exact partially distinguishable
/// probability, smaller values the cutoff approximation.
///
/// The permutation list is built once per kernel, so reuse one kernel
/// across all patterns of a table.
class InterferenceKernel {
 public:
  InterferenceKernel(int photons, double x_ind, int max_order);

  int photons() const { return n_; }
  int max_order() const { return max_order_; }
  std::size_t term_count() const { return weights_.size(); }

  /// Real part of the truncated sum; may be slightly negative. Throws a
  /// numerical error if the imaginary residue exceeds
  /// kImaginaryResidueTolerance.
  double evaluate(const ComplexMatrix& sub) const;

 private:
  int n_;
  int max_order_;
  std::vector<int> perms_;  // term_count() permutations, n entries each
  std::vector<double> weights_;
};

/// Number of points moved by a permutation.
int displacement(std::span<const int> sigma);

/// |Perm(U[input, output])|^2 for collision-free patterns.
double ideal_probability(const UnitaryMatrix& u, const OutputPattern& input,
                         const OutputPattern& output);

/// Partially distinguishable probability with uniform overlap x_ind; n <= 8.
double partial_probability(const UnitaryMatrix& u, const OutputPattern& input,
                           const OutputPattern& output, const DistinguishabilityModel& model);

/// Cutoff approximation: only permutations moving at most n_cutoff photons.
/// Negative truncation results are clamped to 0.
double approx_probability(const UnitaryMatrix& u, const OutputPattern& input,
                          const OutputPattern& output, const DistinguishabilityModel& model,
                          int n_cutoff);

}  // namespace bsval
