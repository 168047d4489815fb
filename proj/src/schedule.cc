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

#include "clockforge/schedule.h"

#include <cmath>
#include <string>

#include "clockforge/errors.h"

namespace clockforge {

StepSchedule StepSchedule::InverseSqrt(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidInputError("step scale must be positive and finite");
  }
  StepSchedule s;
  s.scale_ = scale;
  return s;
}

StepSchedule StepSchedule::Explicit(std::vector<double> steps) {
  if (steps.empty()) throw InvalidInputError("explicit schedule is empty");
  for (double eta : steps) {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
      throw InvalidInputError("step sizes must be positive and finite");
    }
  }
  StepSchedule s;
  s.explicit_ = std::move(steps);
  return s;
}

double StepSchedule::operator()(int t) const {
  if (t < 1) throw InvalidInputError("rounds are numbered from 1");
  if (explicit_.empty()) return scale_ / std::sqrt(static_cast<double>(t));
  const std::size_t k = static_cast<std::size_t>(t - 1);
  return k < explicit_.size() ? explicit_[k] : explicit_.back();
}

}  // namespace clockforge
