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

#include "bsval/pattern.hpp"

#include <algorithm>
#include <charconv>

#include "bsval/error.hpp"

namespace bsval {

OutputPattern::OutputPattern(std::vector<int> modes, int mode_count)
    : modes_(std::move(modes)), mode_count_(mode_count) {
  if (mode_count_ < 1) throw_invalid("pattern: mode count must be >= 1");
  if (modes_.empty()) throw_invalid("pattern: at least one photon is required");
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (modes_[i] < 0 || modes_[i] >= mode_count_)
      throw_invalid("pattern: mode index " + std::to_string(modes_[i]) + " outside [0, " +
                    std::to_string(mode_count_) + ")");
    if (i > 0 && modes_[i] <= modes_[i - 1])
      throw_invalid("pattern: modes must be strictly ascending (collision-free)");
  }
}

OutputPattern OutputPattern::leading(int photons, int mode_count) {
  std::vector<int> modes(static_cast<std::size_t>(std::max(photons, 0)));
  for (int i = 0; i < photons; ++i) modes[i] = i;
  return OutputPattern(std::move(modes), mode_count);
}

OutputPattern OutputPattern::parse(std::string_view text, int mode_count) {
  std::vector<int> modes;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('-', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view field = text.substr(pos, end - pos);
    int value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
      throw_invalid("pattern: cannot parse '" + std::string(text) + "'");
    modes.push_back(value);
    pos = end + 1;
  }
  return OutputPattern(std::move(modes), mode_count);
}

bool OutputPattern::occupied(int mode) const {
  return std::binary_search(modes_.begin(), modes_.end(), mode);
}

std::vector<double> OutputPattern::occupation() const {
  std::vector<double> occ(static_cast<std::size_t>(mode_count_), 0.0);
  for (int mode : modes_) occ[mode] = 1.0;
  return occ;
}

std::string OutputPattern::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (i) out.push_back('-');
    out += std::to_string(modes_[i]);
  }
  return out;
}

int shared_modes(const OutputPattern& a, const OutputPattern& b) {
  auto x = a.modes();
  auto y = b.modes();
  int shared = 0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i] == y[j]) {
      ++shared;
      ++i;
      ++j;
    } else if (x[i] < y[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return shared;
}

int squared_l2(const OutputPattern& a, const OutputPattern& b) {
  if (a.mode_count() != b.mode_count())
    throw_invalid("squared_l2: patterns live on different mode counts");
  return a.photons() + b.photons() - 2 * shared_modes(a, b);
}

__extension__ using Wide = unsigned __int128;

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  Wide result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (result > (static_cast<Wide>(1) << 63))
      throw_invalid("binomial(" + std::to_string(n) + ", " + std::to_string(k) + ") overflows");
  }
  return static_cast<std::uint64_t>(result);
}

std::vector<OutputPattern> enumerate_collision_free(int mode_count, int photons) {
  if (photons < 1 || mode_count < 1) throw_invalid("enumerate: need 1 <= n <= m");
  if (photons > mode_count)
    throw_invalid("enumerate: n = " + std::to_string(photons) + " exceeds m = " +
                  std::to_string(mode_count));
  const std::uint64_t total = binomial(mode_count, photons);
  std::vector<OutputPattern> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<int> modes(static_cast<std::size_t>(photons));
  for (int i = 0; i < photons; ++i) modes[i] = i;
  while (true) {
    out.emplace_back(modes, mode_count);
    int i = photons - 1;
    while (i >= 0 && modes[i] == mode_count - photons + i) --i;
    if (i < 0) break;
    ++modes[i];
    for (int j = i + 1; j < photons; ++j) modes[j] = modes[j - 1] + 1;
  }
  return out;
}

std::size_t lex_rank(const OutputPattern& pattern) {
  return PatternIndexer(pattern.mode_count(), pattern.photons()).rank(pattern.modes());
}

OutputPattern lex_unrank(std::size_t rank, int mode_count, int photons) {
  PatternIndexer indexer(mode_count, photons);
  std::vector<int> modes(static_cast<std::size_t>(photons));
  indexer.unrank(rank, modes);
  return OutputPattern(std::move(modes), mode_count);
}

PatternIndexer::PatternIndexer(int mode_count, int photons) : m_(mode_count), n_(photons) {
  if (photons < 1 || photons > mode_count) throw_invalid("PatternIndexer: need 1 <= n <= m");
  size_ = static_cast<std::size_t>(binomial(m_, n_));
  table_.assign(static_cast<std::size_t>(m_ + 1) * (n_ + 1), 0);
  for (int a = 0; a <= m_; ++a)
    for (int b = 0; b <= std::min(a, n_); ++b)
      table_[static_cast<std::size_t>(a) * (n_ + 1) + b] = binomial(a, b);
}

// Patterns preceding `modes` lexicographically: at slot i, every choice of
// a smaller mode v (prev < v < modes[i]) leaves C(m-1-v, n-1-i) completions.
std::size_t PatternIndexer::rank(std::span<const int> modes) const {
  std::uint64_t r = 0;
  int prev = -1;
  for (int i = 0; i < n_; ++i) {
    for (int v = prev + 1; v < modes[i]; ++v) r += choose(m_ - 1 - v, n_ - 1 - i);
    prev = modes[i];
  }
  return static_cast<std::size_t>(r);
}

void PatternIndexer::unrank(std::size_t rank, std::span<int> modes) const {
  if (rank >= size_) throw_invalid("unrank: rank out of range");
  std::uint64_t r = rank;
  int v = 0;
  for (int i = 0; i < n_; ++i) {
    while (true) {
      const std::uint64_t block = choose(m_ - 1 - v, n_ - 1 - i);
      if (r < block) break;
      r -= block;
      ++v;
    }
    modes[i] = v;
    ++v;
  }
}

}  // namespace bsval
