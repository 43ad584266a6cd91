/* Copyright 2026 The BECR Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "becr/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "becr/errors.hpp"

namespace becr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_cell(std::string_view cell, std::size_t line_no, std::size_t col_no) {
  const std::string_view trimmed = trim(cell);
  const auto where = [&] {
    return "row " + std::to_string(line_no) + ", column " + std::to_string(col_no);
  };
  double value = 0.0;
  const auto [end, ec] =
      std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
  if (ec != std::errc() || end != trimmed.data() + trimmed.size()) {
    throw ParseError(where() + ": cell '" + std::string(cell) + "' is not a number");
  }
  if (!std::isfinite(value)) {
    throw ParseError(where() + ": cell '" + std::string(cell) + "' is not finite");
  }
  return value;
}

}  // namespace

Matrix read_embedding_csv(std::istream& in, bool skip_header) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::size_t pending_blank_line = 0;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skip_header && line_no == 1) continue;
    if (trim(line).empty()) {
      // tolerated only as trailing blank lines
      if (pending_blank_line == 0) pending_blank_line = line_no;
      continue;
    }
    if (pending_blank_line != 0) {
      throw ParseError("row " + std::to_string(pending_blank_line) + ": empty line");
    }

    std::size_t col_no = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view cell =
          std::string_view(line).substr(start, comma == std::string::npos
                                                   ? std::string::npos
                                                   : comma - start);
      ++col_no;
      values.push_back(parse_cell(cell, line_no, col_no));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cols == 0) {
      cols = col_no;
    } else if (col_no != cols) {
      throw ParseError("row " + std::to_string(line_no) + " has " +
                       std::to_string(col_no) + " cells, expected " +
                       std::to_string(cols));
    }
    ++rows;
  }

  if (rows == 0) throw ParseError("no data rows");
  Matrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.data());
  return m;
}

Matrix read_embedding_csv_file(const std::string& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  try {
    return read_embedding_csv(in, skip_header);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string format_double(double value) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end - buf);
}

void write_spectrogram_csv(std::ostream& out, const Spectrogram& spec) {
  for (std::size_t b = 0; b < spec.bin_frequencies.size(); ++b) {
    if (b) out << ',';
    out << format_double(spec.bin_frequencies[b]);
  }
  out << '\n';
  const Matrix& mag = spec.magnitudes;
  for (std::size_t r = 0; r < mag.rows(); ++r) {
    for (std::size_t c = 0; c < mag.cols(); ++c) {
      if (c) out << ',';
      out << format_double(mag(r, c));
    }
    out << '\n';
  }
}

}  // namespace becr
