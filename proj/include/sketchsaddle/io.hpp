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

#include <filesystem>
#include <string>
#include <vector>

#include "sketchsaddle/model.hpp"

namespace sketchsaddle::io {

/// Contents of a Matrix Market file. Comment lines (after the banner) are
/// kept verbatim without the leading '%'.
struct MarketMatrix {
  CouplingMatrix matrix{Matrix()};
  std::vector<std::string> comments;
};

/// Reads `matrix {coordinate|array} {real|integer} {general|symmetric}`.
MarketMatrix read_matrix_market(const std::filesystem::path& path);

/// Dense matrices are written in array format, sparse ones in coordinate
/// format. Values use 17 significant digits so a round trip is exact.
void write_matrix_market(const std::filesystem::path& path, const CouplingMatrix& matrix,
                         const std::vector<std::string>& comments = {});
void write_matrix_market(const std::filesystem::path& path, const Matrix& matrix,
                         const std::vector<std::string>& comments = {});

/// Plain text, one value per line.
Vector read_vector(const std::filesystem::path& path);
void write_vector(const std::filesystem::path& path, const Vector& values);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace sketchsaddle::io
