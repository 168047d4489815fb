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

#include "clockforge/encodings.h"

#include <algorithm>
#include <cmath>

namespace clockforge {

std::string ToString(PricingScheme scheme) {
  switch (scheme) {
    case PricingScheme::kLinear:
      return "linear";
    case PricingScheme::kPolynomial:
      return "poly";
    case PricingScheme::kBundle:
      return "bundle";
  }
  return "unknown";
}

FeatureMap::FeatureMap(PricingScheme scheme, int item_count, int agent_count,
                       int degree, bool personalized,
                       std::vector<Bundle> bundles)
    : scheme_(scheme),
      item_count_(item_count),
      agent_count_(agent_count),
      degree_(degree),
      personalized_(personalized) {
  if (item_count < 1 || item_count > kMaxItems) {
    throw InvalidInputError("item count must be in [1, " +
                            std::to_string(kMaxItems) + "], got " +
                            std::to_string(item_count));
  }
  if (agent_count < 1) {
    throw InvalidInputError("agent count must be >= 1");
  }
  switch (scheme) {
    case PricingScheme::kLinear:
      degree_ = 1;
      break;
    case PricingScheme::kPolynomial:
      if (degree < 1 || degree > item_count) {
        throw InvalidInputError("polynomial degree must be in [1, " +
                                std::to_string(item_count) + "], got " +
                                std::to_string(degree));
      }
      break;
    case PricingScheme::kBundle:
      degree_ = 0;
      break;
  }

  if (bundles.empty()) {
    bundles_ = GradedLexBundles(item_count, item_count);
  } else {
    for (Bundle b : bundles) {
      if (b.empty() || !b.FitsIn(item_count)) {
        throw InvalidInputError("bundle " + b.ToString() +
                                " is not a non-empty subset of the items");
      }
    }
    std::sort(bundles.begin(), bundles.end(), GradedLexLess);
    bundles.erase(std::unique(bundles.begin(), bundles.end()), bundles.end());
    bundles_ = std::move(bundles);
  }

  index_.assign(std::size_t{1} << item_count, -1);
  if (scheme_ == PricingScheme::kBundle) {
    features_ = bundles_;
  } else {
    features_ = GradedLexBundles(item_count, degree_);
  }
  for (std::size_t k = 0; k < features_.size(); ++k) {
    index_[features_[k].mask] = static_cast<std::int32_t>(k);
  }
  inner_dimension_ = features_.size();
  dimension_ = personalized_ ? inner_dimension_ * agent_count_
                             : inner_dimension_;
}

FeatureMap FeatureMap::Linear(int items, int agents, bool personalized) {
  return FeatureMap(PricingScheme::kLinear, items, agents, 1, personalized);
}

FeatureMap FeatureMap::Polynomial(int items, int agents, int degree,
                                  bool personalized) {
  return FeatureMap(PricingScheme::kPolynomial, items, agents, degree,
                    personalized);
}

FeatureMap FeatureMap::BundleIdentity(int items, int agents, bool personalized,
                                      std::vector<Bundle> bundles) {
  return FeatureMap(PricingScheme::kBundle, items, agents, 0, personalized,
                    std::move(bundles));
}

std::optional<std::size_t> FeatureMap::BundleIndex(Bundle x) const {
  auto it = std::lower_bound(bundles_.begin(), bundles_.end(), x,
                             GradedLexLess);
  if (it == bundles_.end() || *it != x) return std::nullopt;
  return static_cast<std::size_t>(it - bundles_.begin());
}

Bundle FeatureMap::FeatureSubset(std::size_t inner_feature) const {
  if (inner_feature >= features_.size()) {
    throw InvalidInputError("feature index out of range");
  }
  return features_[inner_feature];
}

SparseFeatures FeatureMap::Encode(int agent, Bundle x) const {
  SparseFeatures row;
  ForEachFeature(agent, x, [&](std::size_t k) {
    row.push_back(static_cast<std::uint32_t>(k));
  });
  std::sort(row.begin(), row.end());
  return row;
}

void FeatureMap::Accumulate(int agent, Bundle x, double scale,
                            std::span<double> out) const {
  CheckParams(out.size());
  ForEachFeature(agent, x, [&](std::size_t k) { out[k] += scale; });
}

double FeatureMap::GNorm2Inf() const {
  if (scheme_ == PricingScheme::kBundle) return 1.0;
  return std::pow(static_cast<double>(item_count_), degree_ / 2.0);
}

bool FeatureMap::HasFullRowRank() const {
  const bool separate_agents = personalized_ || agent_count_ == 1;
  if (!separate_agents) return false;
  if (scheme_ == PricingScheme::kBundle) return true;
  return degree_ == item_count_;
}

std::string FeatureMap::Describe() const {
  std::string out = ToString(scheme_);
  if (scheme_ == PricingScheme::kPolynomial) {
    out += "(" + std::to_string(degree_) + ")";
  }
  if (personalized_) out += "+personalized";
  out += " m=" + std::to_string(item_count_) +
         " n=" + std::to_string(agent_count_) +
         " d=" + std::to_string(dimension_);
  return out;
}

}  // namespace clockforge
