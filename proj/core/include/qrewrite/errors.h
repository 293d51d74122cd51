// Copyright 2026 The QRewrite Authors.
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

#ifndef QREWRITE_ERRORS_H_
#define QREWRITE_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrewrite {

// Root of every error the library throws. Callers that only need to report
// a failure can catch this; the subclasses let the CLI map failures to exit
// codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a documented precondition or record invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The operating system refused a read or write.
class IoError : public Error {
 public:
  using Error::Error;
};

// A text record (JSON line, TSV row, config entry) could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A binary artifact is truncated or internally inconsistent.
class CorruptFileError : public Error {
 public:
  using Error::Error;
};

// A binary artifact carries a magic tag for a different format version.
class VersionError : public Error {
 public:
  using Error::Error;
};

// Shapes of two artifacts that must agree (checkpoint, vocabulary, index)
// do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Training hit a non-finite gradient or loss.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace qrewrite

#endif  // QREWRITE_ERRORS_H_
