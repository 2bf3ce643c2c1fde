/*
 * Copyright 2026 The nerve-euler Authors
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

// Permutations with signs, shuffles, and the Pfaffian-type index contraction
//   P(A_1, ..., A_p) = sum_{tau in S_2p} sgn(tau) prod_k (A_k)_{tau(2k-1) tau(2k)}.

#include <algorithm>
#include <cstddef>
#include <map>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "matgroup.hpp"

namespace nerve_euler {

struct SignedPermutation {
  std::vector<int> image;  // 0-based: image[i] = tau(i)
  int sign = 1;
};

inline int permutation_sign(std::span<const int> image) {
  int sign = 1;
  for (std::size_t i = 0; i < image.size(); ++i)
    for (std::size_t j = i + 1; j < image.size(); ++j)
      if (image[i] > image[j]) sign = -sign;
  return sign;
}

/// All n! permutations in lexicographic order.
inline std::vector<SignedPermutation> all_permutations(int n) {
  std::vector<int> image(static_cast<std::size_t>(n));
  std::iota(image.begin(), image.end(), 0);
  std::vector<SignedPermutation> out;
  do {
    out.push_back({image, permutation_sign(image)});
  } while (std::next_permutation(image.begin(), image.end()));
  return out;
}

/// A (d_1, ..., d_m)-shuffle: argument slots assigned to each factor, in
/// increasing order within a factor, with the sign of the permutation.
struct Shuffle {
  std::vector<std::vector<int>> blocks;
  int sign = 1;
};

inline std::vector<Shuffle> shuffles(std::span<const int> degrees) {
  const int total = std::accumulate(degrees.begin(), degrees.end(), 0);
  std::vector<Shuffle> out;
  // Assign each slot a factor label; labels in slot order enumerate shuffles.
  std::vector<int> labels;
  for (std::size_t f = 0; f < degrees.size(); ++f) labels.insert(labels.end(), degrees[f], static_cast<int>(f));
  do {
    Shuffle s;
    s.blocks.assign(degrees.size(), {});
    for (int slot = 0; slot < total; ++slot) s.blocks[labels[slot]].push_back(slot);
    std::vector<int> image;
    for (const auto& b : s.blocks) image.insert(image.end(), b.begin(), b.end());
    s.sign = permutation_sign(image);
    out.push_back(std::move(s));
  } while (std::next_permutation(labels.begin(), labels.end()));
  return out;
}

/// Cached shuffle table for a degree pattern; safe for concurrent readers.
inline const std::vector<Shuffle>& shuffle_table(const std::vector<int>& degrees) {
  static std::mutex mutex;
  static std::map<std::vector<int>, std::vector<Shuffle>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(degrees);
  if (it == cache.end()) it = cache.emplace(degrees, shuffles(degrees)).first;
  return it->second;
}

/// Literal contraction over all of S_2p. Used where the sum is the definition
/// (Pfaffian, Pfaffian pairing); the hot loops use pair_contract.
inline double full_contract(std::span<const Matrix> factors) {
  const int p = static_cast<int>(factors.size());
  static std::mutex mutex;
  static std::map<int, std::vector<SignedPermutation>> cache;
  const std::vector<SignedPermutation>* perms = nullptr;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(2 * p);
    if (it == cache.end()) it = cache.emplace(2 * p, all_permutations(2 * p)).first;
    perms = &it->second;
  }
  double total = 0.0;
  for (const auto& tau : *perms) {
    double term = tau.sign;
    for (int k = 0; k < p; ++k) term *= factors[k](tau.image[2 * k], tau.image[2 * k + 1]);
    total += term;
  }
  return total;
}

namespace detail {

struct PairTable {
  std::vector<int> rows;  // flattened, 2p entries per row
  std::vector<double> signs;
};

/// Rows of S_2p with tau(2k-1) < tau(2k) for every k.
inline PairTable make_pair_table(int p) {
  PairTable t;
  for (const auto& tau : all_permutations(2 * p)) {
    bool ordered = true;
    for (int k = 0; k < p && ordered; ++k) ordered = tau.image[2 * k] < tau.image[2 * k + 1];
    if (!ordered) continue;
    t.rows.insert(t.rows.end(), tau.image.begin(), tau.image.end());
    t.signs.push_back(tau.sign);
  }
  return t;
}

inline const PairTable& pair_table(int p) {
  static std::mutex mutex;
  static std::map<int, PairTable> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, make_pair_table(p)).first;
  return it->second;
}

}  // namespace detail

/// Same value as full_contract for skew factors. Each transposition inside a
/// pair flips both sgn(tau) and the skew entry, so only ordered pairs are
/// summed and the result is scaled by 2^p.
inline double pair_contract(std::span<const Matrix> factors) {
  const int p = static_cast<int>(factors.size());
  const auto& table = detail::pair_table(p);
  const std::size_t width = static_cast<std::size_t>(2 * p);
  double total = 0.0;
  for (std::size_t r = 0; r < table.signs.size(); ++r) {
    const int* row = &table.rows[r * width];
    double term = table.signs[r];
    for (int k = 0; k < p; ++k) term *= factors[k](row[2 * k], row[2 * k + 1]);
    total += term;
  }
  return total * static_cast<double>(1 << p);
}

}  // namespace nerve_euler
