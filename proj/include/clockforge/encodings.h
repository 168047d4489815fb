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

// Bundle representations. A FeatureMap plays the role of the representation
// matrix G: row (agent, bundle) is a 0/1 feature vector of dimension d and
// bundle prices are linear in those features, p = G w. Rows are produced on
// demand; G is never stored densely.

#ifndef CLOCKFORGE_ENCODINGS_H_
#define CLOCKFORGE_ENCODINGS_H_

#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clockforge/bundle.h"
#include "clockforge/errors.h"

namespace clockforge {

enum class PricingScheme {
  kLinear,      // one feature per item
  kPolynomial,  // one feature per item subset of size 1..degree
  kBundle,      // one feature per bundle in X
};

std::string ToString(PricingScheme scheme);

// Indices of the nonzero (all equal to one) entries of a feature row.
using SparseFeatures = std::vector<std::uint32_t>;

// Price parameter vector w.
using PriceParams = std::vector<double>;

class FeatureMap {
 public:
  // `bundles` restricts the choice set X; when empty X is every non-empty
  // bundle. Stored in graded-lexicographic order.
  FeatureMap(PricingScheme scheme, int item_count, int agent_count,
             int degree = 1, bool personalized = false,
             std::vector<Bundle> bundles = {});

  static FeatureMap Linear(int items, int agents, bool personalized = false);
  static FeatureMap Polynomial(int items, int agents, int degree,
                               bool personalized = false);
  static FeatureMap BundleIdentity(int items, int agents,
                                   bool personalized = false,
                                   std::vector<Bundle> bundles = {});

  PricingScheme scheme() const { return scheme_; }
  // Polynomial degree; 1 for linear, 0 for bundle identity.
  int degree() const { return degree_; }
  bool personalized() const { return personalized_; }
  int item_count() const { return item_count_; }
  int agent_count() const { return agent_count_; }
  std::size_t dimension() const { return dimension_; }
  // Dimension of one agent's block (equal to dimension() when anonymous).
  std::size_t inner_dimension() const { return inner_dimension_; }
  // The choice set X, excluding the empty bundle.
  const std::vector<Bundle>& bundles() const { return bundles_; }
  // Position of `x` in bundles(), or nullopt.
  std::optional<std::size_t> BundleIndex(Bundle x) const;

  // Subset of items represented by inner feature k (bundle identity: the
  // k-th bundle of X).
  Bundle FeatureSubset(std::size_t inner_feature) const;

  // Calls fn(feature_index) for every feature equal to one in row (agent, x).
  template <class Fn>
  void ForEachFeature(int agent, Bundle x, Fn&& fn) const {
    CheckRow(agent, x);
    if (x.empty()) return;
    const std::size_t offset = personalized_ ? agent * inner_dimension_ : 0;
    if (scheme_ == PricingScheme::kBundle) {
      fn(offset + static_cast<std::size_t>(index_[x.mask]));
      return;
    }
    // Polynomial and linear: every non-empty subset of x of size <= degree.
    for (std::uint32_t s = x.mask; s != 0; s = (s - 1) & x.mask) {
      if (std::popcount(s) <= degree_) {
        fn(offset + static_cast<std::size_t>(index_[s]));
      }
    }
  }

  SparseFeatures Encode(int agent, Bundle x) const;

  // Dot product of row (agent, x) with w. Zero for the empty bundle.
  template <class T>
  T PriceOf(std::span<const T> w, int agent, Bundle x) const {
    CheckParams(w.size());
    T total{};
    ForEachFeature(agent, x, [&](std::size_t k) { total += w[k]; });
    return total;
  }
  double PriceOf(const PriceParams& w, int agent, Bundle x) const {
    return PriceOf<double>(std::span<const double>(w), agent, x);
  }

  // out += scale * row(agent, x).
  void Accumulate(int agent, Bundle x, double scale,
                  std::span<double> out) const;

  // Upper bound on max_{i,x} ||G_i(x)||_2.
  double GNorm2Inf() const;

  // True when G has full row rank, so the unregularized dual has an integer
  // optimum: personalized (or single-agent) bundle identity, or polynomial
  // of degree m.
  bool HasFullRowRank() const;

  std::string Describe() const;

  void CheckParams(std::size_t size) const {
    if (size != dimension_) {
      throw InvalidInputError("price parameter has dimension " +
                              std::to_string(size) + ", expected " +
                              std::to_string(dimension_));
    }
  }

 private:
  void CheckRow(int agent, Bundle x) const {
    if (agent < 0 || agent >= agent_count_) {
      throw InvalidInputError("agent " + std::to_string(agent) +
                              " out of range");
    }
    if (!x.FitsIn(item_count_)) {
      throw InvalidInputError("bundle " + x.ToString() + " exceeds " +
                              std::to_string(item_count_) + " items");
    }
    if (scheme_ == PricingScheme::kBundle && !x.empty() &&
        index_[x.mask] < 0) {
      throw InvalidInputError("bundle " + x.ToString() +
                              " is not in the priced bundle set");
    }
  }

  PricingScheme scheme_;
  int item_count_;
  int agent_count_;
  int degree_;
  bool personalized_;
  std::vector<Bundle> bundles_;
  // mask -> inner feature index (polynomial: subset feature; bundle: position
  // in X); -1 when the mask is not a feature.
  std::vector<std::int32_t> index_;
  std::vector<Bundle> features_;
  std::size_t inner_dimension_ = 0;
  std::size_t dimension_ = 0;
};

// Recovers polynomial coefficients from explicit prices on every bundle of
// size <= degree: w(x) = sum over x' subset of x of (-1)^{|x \ x'|} p(x').
// Exact for integer T. The empty bundle's price is taken as zero.
template <class T>
std::vector<T> MobiusInvert(const FeatureMap& fm,
                            const std::map<Bundle, T>& explicit_prices) {
  if (fm.scheme() == PricingScheme::kBundle || fm.personalized()) {
    throw InvalidInputError(
        "Moebius inversion needs an anonymous linear or polynomial map");
  }
  std::vector<T> w(fm.dimension(), T{});
  for (std::size_t k = 0; k < fm.dimension(); ++k) {
    const Bundle x = fm.FeatureSubset(k);
    T acc{};
    for (std::uint32_t s = x.mask;; s = (s - 1) & x.mask) {
      const Bundle sub(s);
      T price{};
      if (!sub.empty()) {
        auto it = explicit_prices.find(sub);
        if (it == explicit_prices.end()) {
          throw InvalidInputError("missing explicit price for bundle " +
                                  sub.ToString());
        }
        price = it->second;
      }
      if ((x.size() - sub.size()) % 2 == 0) {
        acc += price;
      } else {
        acc -= price;
      }
      if (s == 0) break;
    }
    w[k] = acc;
  }
  return w;
}

}  // namespace clockforge

#endif  // CLOCKFORGE_ENCODINGS_H_
