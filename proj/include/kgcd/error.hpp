// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace kgcd {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based line number.
class FormatError : public Error {
 public:
  FormatError(std::string file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Text that cannot be represented in the engine vocabulary.
class TokenizeError : public Error {
 public:
  using Error::Error;
};

/// A token that the query grammar does not admit at the current state.
class GrammarError : public Error {
 public:
  using Error::Error;
};

/// Query text that does not conform to the query template.
class QueryParseError : public Error {
 public:
  QueryParseError(std::size_t position, const std::string& what)
      : Error("offset " + std::to_string(position) + ": " + what),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace kgcd
