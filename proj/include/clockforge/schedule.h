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

#ifndef CLOCKFORGE_SCHEDULE_H_
#define CLOCKFORGE_SCHEDULE_H_

#include <vector>

namespace clockforge {

// Step sizes eta^t for t = 1, 2, ...
class StepSchedule {
 public:
  // eta^t = scale / sqrt(t).
  static StepSchedule InverseSqrt(double scale);
  // eta^t = steps[t - 1]; rounds past the end reuse the last entry.
  static StepSchedule Explicit(std::vector<double> steps);

  double operator()(int t) const;

  bool is_inverse_sqrt() const { return explicit_.empty(); }
  // The constant c of c / sqrt(t); zero for explicit schedules.
  double scale() const { return scale_; }
  const std::vector<double>& explicit_steps() const { return explicit_; }

 private:
  StepSchedule() = default;

  double scale_ = 0.0;
  std::vector<double> explicit_;
};

}  // namespace clockforge

#endif  // CLOCKFORGE_SCHEDULE_H_
