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

#ifndef BECR_ERRORS_HPP_
#define BECR_ERRORS_HPP_

#include <stdexcept>

namespace becr {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value or shape violates a precondition (range, non-finite, asymmetry, ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Fewer than two samples; batch covariance is undefined.
class InsufficientSamplesError : public Error {
 public:
  using Error::Error;
};

// All covariance eigenvalues are zero; the Gini index is undefined.
class DegenerateSpectrumError : public Error {
 public:
  using Error::Error;
};

// An iterative solver hit its iteration cap before reaching tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Recognized container, unsupported codec/bit depth/channel layout.
class UnsupportedFormatError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace becr

#endif  // BECR_ERRORS_HPP_
