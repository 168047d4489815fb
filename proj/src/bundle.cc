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

#include "clockforge/bundle.h"

#include <algorithm>

#include "clockforge/errors.h"

namespace clockforge {

Bundle Bundle::FromItems(const std::vector<int>& items) {
  std::uint32_t mask = 0;
  for (int item : items) {
    if (item < 0 || item >= kMaxItems) {
      throw InvalidInputError("item index " + std::to_string(item) +
                              " out of range");
    }
    mask |= 1u << item;
  }
  return Bundle(mask);
}

std::vector<int> Bundle::Items() const {
  std::vector<int> items;
  for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
    items.push_back(std::countr_zero(rest));
  }
  return items;
}

std::string Bundle::ToString() const {
  std::string out = "{";
  bool first = true;
  for (int item : Items()) {
    if (!first) out += ',';
    out += std::to_string(item);
    first = false;
  }
  out += '}';
  return out;
}

bool GradedLexLess(Bundle lhs, Bundle rhs) {
  if (lhs.size() != rhs.size()) return lhs.size() < rhs.size();
  // Same size: compare sorted item lists. The first differing item decides;
  // the bundle holding the smaller item comes first.
  const std::uint32_t diff = lhs.mask ^ rhs.mask;
  if (diff == 0) return false;
  const std::uint32_t lowest = diff & (~diff + 1);
  return (lhs.mask & lowest) != 0;
}

std::vector<Bundle> GradedLexBundles(int item_count, int max_size) {
  if (item_count < 0 || item_count > kMaxItems) {
    throw InvalidInputError("item count " + std::to_string(item_count) +
                            " out of range");
  }
  std::vector<Bundle> out;
  const std::uint32_t limit = 1u << item_count;
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    if (std::popcount(mask) <= max_size) out.emplace_back(mask);
  }
  std::sort(out.begin(), out.end(), GradedLexLess);
  return out;
}

}  // namespace clockforge
