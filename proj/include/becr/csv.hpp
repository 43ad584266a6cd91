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

#ifndef BECR_CSV_HPP_
#define BECR_CSV_HPP_

#include <iosfwd>
#include <string>

#include "becr/audio.hpp"
#include "becr/matrix.hpp"

namespace becr {

// Embedding CSV: one row per sample, one column per dimension, plain decimal
// floats, no header unless skip_header. Rectangular and finite, or ParseError
// with the offending 1-based row and column in the message.
Matrix read_embedding_csv(std::istream& in, bool skip_header);
Matrix read_embedding_csv_file(const std::string& path, bool skip_header);

// Shortest round-trip decimal representation.
std::string format_double(double value);

// Header row of bin center frequencies, then one row of magnitudes per frame.
void write_spectrogram_csv(std::ostream& out, const Spectrogram& spec);

}  // namespace becr

#endif  // BECR_CSV_HPP_
