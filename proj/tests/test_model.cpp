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

#include <cmath>

#include <gtest/gtest.h>

#include "bsval/error.hpp"
#include "bsval/linalg.hpp"
#include "bsval/model.hpp"

namespace bsval {
namespace {

UnitaryMatrix beam_splitter() {
  const double h = 1.0 / std::sqrt(2.0);
  return UnitaryMatrix(ComplexMatrix(2, 2, {h, h, h, -h}));
}

TEST(DistinguishabilityModel, Bounds) {
  EXPECT_THROW(DistinguishabilityModel(-0.1), Error);
  EXPECT_THROW(DistinguishabilityModel(1.1), Error);
  const DistinguishabilityModel model(0.3);
  EXPECT_EQ(model.overlap(2, 2), 1.0);
  EXPECT_EQ(model.overlap(1, 2), 0.3);
}

TEST(Displacement, CountsNonFixedPoints) {
  EXPECT_EQ(displacement(std::vector<int>{0, 1, 2}), 0);
  EXPECT_EQ(displacement(std::vector<int>{1, 0, 2}), 2);
  EXPECT_EQ(displacement(std::vector<int>{1, 2, 0}), 3);
}

TEST(IdealProbability, TrivialCases) {
  const UnitaryMatrix one(ComplexMatrix::identity(1));
  EXPECT_DOUBLE_EQ(ideal_probability(one, OutputPattern({0}, 1), OutputPattern({0}, 1)), 1.0);
  const OutputPattern both({0, 1}, 2);
  EXPECT_NEAR(ideal_probability(beam_splitter(), both, both), 0.0, 1e-15);
  EXPECT_THROW(ideal_probability(one, OutputPattern({0}, 1), OutputPattern({0, 1}, 2)), Error);
}

TEST(PartialProbability, HongOuMandelClosedForm) {
  const OutputPattern both({0, 1}, 2);
  for (int i = 0; i <= 20; ++i) {
    const double x = i / 20.0;
    EXPECT_NEAR(partial_probability(beam_splitter(), both, both, DistinguishabilityModel(x)),
                (1.0 - x * x) / 2.0, 1e-10)
        << "x = " << x;
  }
}

TEST(PartialProbability, FullyIndistinguishableIsIdeal) {
  const UnitaryMatrix u = haar_random_unitary(8, 13);
  const OutputPattern in = OutputPattern::leading(4, 8);
  for (const auto& out : enumerate_collision_free(8, 4))
    ASSERT_NEAR(partial_probability(u, in, out, DistinguishabilityModel(1.0)),
                ideal_probability(u, in, out), 1e-12);
}

// With x = 0 only the identity permutation survives, leaving the permanent of
// the elementwise squared moduli.
TEST(PartialProbability, DistinguishableIsPermanentOfModuli) {
  const UnitaryMatrix u = haar_random_unitary(9, 21);
  const OutputPattern in = OutputPattern::leading(4, 9);
  for (const auto& out : enumerate_collision_free(9, 4)) {
    const ComplexMatrix sub = submatrix_collision_free(u, in, out);
    ComplexMatrix moduli(4, 4);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) moduli(r, c) = std::norm(sub(r, c));
    ASSERT_NEAR(partial_probability(u, in, out, DistinguishabilityModel(0.0)),
                permanent_naive(moduli).real(), 1e-12);
  }
}

TEST(ApproxProbability, CutoffIdentities) {
  const UnitaryMatrix u = haar_random_unitary(10, 4);
  const OutputPattern in = OutputPattern::leading(4, 10);
  const DistinguishabilityModel model(0.7);
  for (const auto& out : enumerate_collision_free(10, 4)) {
    ASSERT_NEAR(approx_probability(u, in, out, model, 4), partial_probability(u, in, out, model),
                1e-12);
    ASSERT_EQ(approx_probability(u, in, out, model, 1), approx_probability(u, in, out, model, 0));
    ASSERT_NEAR(approx_probability(u, in, out, model, 0),
                partial_probability(u, in, out, DistinguishabilityModel(0.0)), 1e-12);
  }
  EXPECT_THROW(approx_probability(u, in, OutputPattern::leading(4, 10), model, 5), Error);
  EXPECT_THROW(approx_probability(u, in, OutputPattern::leading(4, 10), model, -1), Error);
}

TEST(InterferenceKernel, TermCounts) {
  // Permutations of 4 by displacement: 1 (d=0), 6 (d=2), 8 (d=3), 9 (d=4).
  EXPECT_EQ(InterferenceKernel(4, 0.5, 4).term_count(), 24u);
  EXPECT_EQ(InterferenceKernel(4, 0.5, 3).term_count(), 15u);
  EXPECT_EQ(InterferenceKernel(4, 0.5, 2).term_count(), 7u);
  EXPECT_EQ(InterferenceKernel(4, 0.5, 0).term_count(), 1u);
  EXPECT_EQ(InterferenceKernel(4, 0.0, 4).term_count(), 1u);
  EXPECT_THROW(InterferenceKernel(9, 0.5, 9), Error);
}

}  // namespace
}  // namespace bsval
