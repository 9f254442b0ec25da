/*
 * Copyright 2026 The kernelgen Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef KERNELGEN_ERRORS_HPP
#define KERNELGEN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kernelgen {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A kernel expression or hyperparameter violates its invariants.
class InvalidKernel : public Error {
 public:
  using Error::Error;
};

/// Kernel text could not be parsed. `offset()` is the byte offset of the
/// offending token in the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class InvalidDataset : public Error {
 public:
  using Error::Error;
};

/// Every rung of the jitter ladder failed to factorize the matrix.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// Every optimizer restart ended with a non-finite objective.
class OptimizationFailed : public Error {
 public:
  using Error::Error;
};

/// An emitted program does not reproduce the engine's posterior.
class SemanticsMismatch : public Error {
 public:
  using Error::Error;
};

/// CSV ingestion failure; message carries row/column when known.
class IngestError : public Error {
 public:
  using Error::Error;
};

/// An output file could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace kernelgen

#endif  // KERNELGEN_ERRORS_HPP
