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

#include "bsval/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bsval/error.hpp"

namespace bsval {

DistinguishabilityModel::DistinguishabilityModel(double x_ind) : x_ind_(x_ind) {
  if (!(x_ind >= 0.0 && x_ind <= 1.0))
    throw_invalid("indistinguishability must lie in [0, 1], got " + std::to_string(x_ind));
}

int displacement(std::span<const int> sigma) {
  int moved = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i)
    if (sigma[i] != static_cast<int>(i)) ++moved;
  return moved;
}

InterferenceKernel::InterferenceKernel(int photons, double x_ind, int max_order)
    : n_(photons), max_order_(max_order) {
  if (photons < 1) throw_invalid("InterferenceKernel: need at least one photon");
  if (photons > kMaxInterferencePhotons)
    throw_invalid("InterferenceKernel: n = " + std::to_string(photons) +
                  " exceeds the n! permutation-sum limit of " +
                  std::to_string(kMaxInterferencePhotons));
  if (max_order < 0 || max_order > photons)
    throw_invalid("InterferenceKernel: cutoff " + std::to_string(max_order) +
                  " outside [0, n = " + std::to_string(photons) + "]");
  DistinguishabilityModel model(x_ind);

  std::vector<int> sigma(static_cast<std::size_t>(n_));
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    const int d = displacement(sigma);
    if (d > max_order_) continue;
    const double weight = d == 0 ? 1.0 : std::pow(model.x_ind(), d);
    if (weight == 0.0) continue;
    perms_.insert(perms_.end(), sigma.begin(), sigma.end());
    weights_.push_back(weight);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
}

double InterferenceKernel::evaluate(const ComplexMatrix& sub) const {
  if (!sub.square() || static_cast<int>(sub.rows()) != n_)
    throw_invalid("InterferenceKernel: submatrix size does not match photon number");
  const auto n = static_cast<std::size_t>(n_);
  ComplexMatrix product(n, n);
  Complex total = 0.0;
  for (std::size_t t = 0; t < weights_.size(); ++t) {
    const int* sigma = perms_.data() + t * n;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) product(a, b) = sub(a, b) * std::conj(sub(a, sigma[b]));
    total += weights_[t] * permanent_ryser(product);
  }
  if (std::abs(total.imag()) > kImaginaryResidueTolerance)
    throw_numerical("interference sum has imaginary residue " + std::to_string(total.imag()));
  return total.real();
}

double ideal_probability(const UnitaryMatrix& u, const OutputPattern& input,
                         const OutputPattern& output) {
  return std::norm(permanent_ryser(submatrix_collision_free(u, input, output)));
}

double partial_probability(const UnitaryMatrix& u, const OutputPattern& input,
                           const OutputPattern& output, const DistinguishabilityModel& model) {
  const ComplexMatrix sub = submatrix_collision_free(u, input, output);
  InterferenceKernel kernel(input.photons(), model.x_ind(), input.photons());
  return std::max(0.0, kernel.evaluate(sub));
}

double approx_probability(const UnitaryMatrix& u, const OutputPattern& input,
                          const OutputPattern& output, const DistinguishabilityModel& model,
                          int n_cutoff) {
  if (n_cutoff < 0 || n_cutoff > input.photons())
    throw_invalid("approx_probability: n_cutoff " + std::to_string(n_cutoff) +
                  " outside [0, n]");
  const ComplexMatrix sub = submatrix_collision_free(u, input, output);
  InterferenceKernel kernel(input.photons(), model.x_ind(), n_cutoff);
  return std::max(0.0, kernel.evaluate(sub));
}

}  // namespace bsval
