// Copyright 2026 The sketchsaddle Authors
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

#pragma once

#include <string>

#include "sketchsaddle/regbounds.hpp"
#include "sketchsaddle/solver.hpp"

namespace sketchsaddle {

/// One JSON object: residuals, iterations, converged, wall_time_ms and the
/// operator-norm estimate. Vectors are not included.
std::string to_json(const SolveReport& report, int indent = 2);

/// Rule, both parameters, scale_factor and every populated input.
std::string to_json(const RegPrescription& prescription, int indent = 2);

/// Inverse of to_json(RegPrescription); gamma values are re-evaluated from
/// the inputs and must match the stored ones bit for bit.
RegPrescription prescription_from_json(const std::string& text);

}  // namespace sketchsaddle
