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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bsval {

/// Collision-free Fock state: n distinct occupied modes out of m, held in
/// ascending order. The ascending list is the canonical form, so equal
/// patterns compare equal and patterns can key ordered maps.
class OutputPattern {
 public:
  OutputPattern(std::vector<int> modes, int mode_count);

  /// Modes {0, 1, ..., n-1}.
  static OutputPattern leading(int photons, int mode_count);

  /// Parses the dash-joined form used in CSV files ("0-3-7-12").
  static OutputPattern parse(std::string_view text, int mode_count);

  std::span<const int> modes() const { return modes_; }
  int photons() const { return static_cast<int>(modes_.size()); }
  int mode_count() const { return mode_count_; }
  bool occupied(int mode) const;

  /// 0/1 occupation vector of length m.
  std::vector<double> occupation() const;

  std::string to_string() const;

  auto operator<=>(const OutputPattern&) const = default;

 private:
  std::vector<int> modes_;
  int mode_count_;
};

/// Number of modes occupied in both patterns.
int shared_modes(const OutputPattern& a, const OutputPattern& b);

/// Squared Euclidean distance of the occupation vectors, 2 * (n - shared).
int squared_l2(const OutputPattern& a, const OutputPattern& b);

/// Exact binomial coefficient; throws when the result exceeds 2^63.
std::uint64_t binomial(int n, int k);

/// All C(m, n) collision-free patterns in lexicographic order.
std::vector<OutputPattern> enumerate_collision_free(int mode_count, int photons);

/// Position of a pattern in the lexicographic enumeration.
std::size_t lex_rank(const OutputPattern& pattern);

/// Inverse of lex_rank.
OutputPattern lex_unrank(std::size_t rank, int mode_count, int photons);

/// Lexicographic ranking for fixed (m, n) with a precomputed binomial
/// table; the hot loops of the samplers use this instead of lex_rank.
class PatternIndexer {
 public:
  PatternIndexer(int mode_count, int photons);

  int mode_count() const { return m_; }
  int photons() const { return n_; }
  std::size_t size() const { return size_; }

  /// modes must be strictly ascending and in range.
  std::size_t rank(std::span<const int> modes) const;
  void unrank(std::size_t rank, std::span<int> modes) const;

 private:
  std::uint64_t choose(int a, int b) const {
    return (b < 0 || a < b) ? 0 : table_[static_cast<std::size_t>(a) * (n_ + 1) + b];
  }

  int m_;
  int n_;
  std::size_t size_;
  std::vector<std::uint64_t> table_;
};

}  // namespace bsval
