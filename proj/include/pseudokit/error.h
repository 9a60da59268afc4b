// Copyright 2026 The Pseudokit Authors.
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

#ifndef PSEUDOKIT_ERROR_H_
#define PSEUDOKIT_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pseudokit {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input at a known line (CoNLL, JSONL documents, KG, lexicon).
// Line numbers are 1-based; 0 means "not tied to a line".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed JSON that violates a record schema or invariant.
class SchemaError : public ParseError {
 public:
  SchemaError(std::size_t line, const std::string& field,
              const std::string& what)
      : ParseError(line, "field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Span lists that overlap or fall outside their text.
class SpanError : public Error {
 public:
  using Error::Error;
};

class DetectorError : public Error {
 public:
  DetectorError(const std::string& what, std::string diagnostics = {})
      : Error(diagnostics.empty() ? what : what + "\n" + diagnostics),
        diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  std::string diagnostics_;
};

// The candidate pool contained only the original surface.
class NoSurrogate : public Error {
 public:
  using Error::Error;
};

class EmptyExtraction : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  AlignmentError(std::vector<std::string> extracted,
                 std::vector<std::string> replaced);
  const std::vector<std::string>& extracted() const { return extracted_; }
  const std::vector<std::string>& replaced() const { return replaced_; }

 private:
  std::vector<std::string> extracted_;
  std::vector<std::string> replaced_;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

// Bad command-line or configuration input. Maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace pseudokit

#endif  // PSEUDOKIT_ERROR_H_
