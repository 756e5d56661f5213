/*
 * Copyright 2026 The FogLab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FOGLAB_ERROR_H_
#define FOGLAB_ERROR_H_

#include <stdexcept>
#include <string>

namespace foglab {

// Error categories. The category decides the CLI exit code: configuration
// and validation problems exit with 2, runtime and numeric failures with 3.
enum class ErrorKind {
  kSchema,       // Missing/unknown columns or config keys.
  kParse,        // Malformed input text.
  kValidation,   // Well-formed input violating a domain invariant.
  kArgument,     // Bad arguments to a library call.
  kSpec,         // Layer chain does not compose.
  kNumeric,      // Non-finite values during computation.
  kAggregation,  // Federated update layouts disagree.
  kUnsupported,  // Recognised but unimplemented option.
  kRuntime,      // Everything else (I/O, aborted runs).
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace foglab

#endif  // FOGLAB_ERROR_H_
