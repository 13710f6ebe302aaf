#pragma once

#include <stdexcept>
#include <string>

namespace bitext {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid combination of options or missing required inputs. The CLI maps
/// this to exit code 1, like a usage error.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data. The CLI maps this to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

/// Two inputs that must be row-aligned are not.
class AlignmentError : public DataError {
 public:
  using DataError::DataError;
};

/// A per-pair file does not cover every pair index exactly once.
class CoverageError : public DataError {
 public:
  using DataError::DataError;
};

class LookupError : public DataError {
 public:
  using DataError::DataError;
};

class TrainingError : public DataError {
 public:
  using DataError::DataError;
};

/// A margin ratio whose neighbor-similarity denominator is not positive.
class UndefinedScoreError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace bitext
