// Copyright 2026 The Clockforge Authors.
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

#ifndef CLOCKFORGE_BUNDLE_H_
#define CLOCKFORGE_BUNDLE_H_

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace clockforge {

// Hard ceiling on the item count representable in a bundle mask. Exact
// winner determination has its own, much lower, cap.
inline constexpr int kMaxItems = 20;

// A subset of the items, bit j set iff item j is in the bundle. The empty
// bundle is "no purchase".
struct Bundle {
  std::uint32_t mask = 0;

  constexpr Bundle() = default;
  constexpr explicit Bundle(std::uint32_t m) : mask(m) {}

  static Bundle FromItems(const std::vector<int>& items);

  constexpr bool empty() const { return mask == 0; }
  constexpr int size() const { return std::popcount(mask); }
  constexpr bool Contains(int item) const { return (mask >> item) & 1u; }
  constexpr bool IsSubsetOf(Bundle other) const {
    return (mask & ~other.mask) == 0;
  }
  constexpr bool Overlaps(Bundle other) const {
    return (mask & other.mask) != 0;
  }
  // True iff no bit is set at a position >= item_count.
  constexpr bool FitsIn(int item_count) const {
    return item_count >= 32 || (mask >> item_count) == 0;
  }

  std::vector<int> Items() const;
  // "{0,2}" style; "{}" for the empty bundle.
  std::string ToString() const;

  friend constexpr auto operator<=>(Bundle, Bundle) = default;
};

// All non-empty subsets of m items with at most max_size elements, ordered
// by size and then lexicographically by sorted item list: for items a,b,c
// that is a, b, c, ab, ac, bc, abc.
std::vector<Bundle> GradedLexBundles(int item_count, int max_size);

// Strict-weak order implementing the graded-lexicographic convention.
bool GradedLexLess(Bundle lhs, Bundle rhs);

}  // namespace clockforge

template <>
struct std::hash<clockforge::Bundle> {
  std::size_t operator()(clockforge::Bundle b) const noexcept {
    return std::hash<std::uint32_t>{}(b.mask);
  }
};

#endif  // CLOCKFORGE_BUNDLE_H_
