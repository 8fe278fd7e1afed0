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

#include "sketchsaddle/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace sketchsaddle::io {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

MarketMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open Matrix Market file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw IoError("empty Matrix Market file: " + path.string());
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix") {
    throw IoError("not a Matrix Market matrix: " + path.string());
  }
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer" && field != "double") {
    throw IoError("unsupported Matrix Market field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw IoError("unsupported Matrix Market symmetry '" + symmetry + "'");
  }
  const bool symmetric = symmetry == "symmetric";

  MarketMatrix result;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '%') {
      result.comments.push_back(line.substr(1));
      continue;
    }
    break;
  }

  std::istringstream header(line);
  Index rows = 0, cols = 0, nnz = 0;
  if (format == "coordinate") {
    if (!(header >> rows >> cols >> nnz)) throw IoError("bad coordinate size line in " + path.string());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
    for (Index k = 0; k < nnz; ++k) {
      Index i = 0, j = 0;
      double v = 0.0;
      if (!(in >> i >> j >> v)) throw IoError("truncated coordinate data in " + path.string());
      if (i < 1 || i > rows || j < 1 || j > cols) throw IoError("entry index out of range in " + path.string());
      triplets.emplace_back(i - 1, j - 1, v);
      if (symmetric && i != j) triplets.emplace_back(j - 1, i - 1, v);
    }
    SparseMatrix sparse(rows, cols);
    sparse.setFromTriplets(triplets.begin(), triplets.end());
    result.matrix = CouplingMatrix(std::move(sparse));
  } else if (format == "array") {
    if (!(header >> rows >> cols)) throw IoError("bad array size line in " + path.string());
    Matrix dense = Matrix::Zero(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = symmetric ? j : 0; i < rows; ++i) {
        double v = 0.0;
        if (!(in >> v)) throw IoError("truncated array data in " + path.string());
        dense(i, j) = v;
        if (symmetric) dense(j, i) = v;
      }
    }
    result.matrix = CouplingMatrix(std::move(dense));
  } else {
    throw IoError("unsupported Matrix Market format '" + format + "'");
  }
  return result;
}

void write_matrix_market(const std::filesystem::path& path, const Matrix& matrix,
                         const std::vector<std::string>& comments) {
  auto out = open_for_write(path);
  out << "%%MatrixMarket matrix array real general\n";
  for (const auto& c : comments) out << '%' << c << '\n';
  out << matrix.rows() << ' ' << matrix.cols() << '\n';
  for (Index j = 0; j < matrix.cols(); ++j) {
    for (Index i = 0; i < matrix.rows(); ++i) out << format_double(matrix(i, j)) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_matrix_market(const std::filesystem::path& path, const CouplingMatrix& matrix,
                         const std::vector<std::string>& comments) {
  if (!matrix.is_sparse()) {
    write_matrix_market(path, matrix.to_dense(), comments);
    return;
  }
  const SparseMatrix& sparse = *matrix.sparse_storage();
  auto out = open_for_write(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  for (const auto& c : comments) out << '%' << c << '\n';
  out << sparse.rows() << ' ' << sparse.cols() << ' ' << sparse.nonZeros() << '\n';
  for (Index j = 0; j < sparse.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(sparse, j); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_double(it.value()) << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Vector read_vector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vector file: " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      values.push_back(std::stod(line.substr(first)));
    } catch (const std::exception&) {
      throw IoError("bad value '" + line + "' in " + path.string());
    }
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

void write_vector(const std::filesystem::path& path, const Vector& values) {
  auto out = open_for_write(path);
  for (Index i = 0; i < values.size(); ++i) out << format_double(values[i]) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace sketchsaddle::io
