// Copyright 2026 The evgrid Authors
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

#ifndef EVGRID_COMMON_H_
#define EVGRID_COMMON_H_

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace evgrid {

// Tolerance for every mass-sum check.
inline constexpr double kMassEpsilon = 1e-9;

inline constexpr double kPi = std::numbers::pi;

inline constexpr double DegToRad(double deg) { return deg * kPi / 180.0; }
inline constexpr double RadToDeg(double rad) { return rad * 180.0 / kPi; }

// Marker for pixels or cells without a measurement.
inline constexpr double kUnknown = std::numeric_limits<double>::quiet_NaN();
inline bool IsKnown(double v) { return !std::isnan(v); }

// Invalid parameters or calibration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double Logistic(double x, double slope) {
  return 1.0 / (1.0 + std::exp(-slope * x));
}

// Runs fn(begin, end) over contiguous chunks of [0, n). Chunking is static so
// any per-index output is independent of the worker count.
void ParallelFor(std::size_t n, int workers,
                 const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace evgrid

#endif  // EVGRID_COMMON_H_
