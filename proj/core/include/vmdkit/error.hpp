#pragma once

#include <stdexcept>
#include <string>

namespace vmdkit {

// Every failure raised by the library derives from Error. The CLI maps the
// category onto its exit code, so keep categories coarse.
enum class ErrorKind {
  InvalidInput,
  InvalidConfig,
  DegenerateInput,
  DataError,
  NumericFailure,
  TrainingFailure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& m) : Error(ErrorKind::InvalidInput, m) {}
};

class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(const std::string& m) : Error(ErrorKind::InvalidConfig, m) {}
};

class DegenerateInput : public Error {
 public:
  explicit DegenerateInput(const std::string& m) : Error(ErrorKind::DegenerateInput, m) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& m) : Error(ErrorKind::DataError, m) {}
};

class NumericFailure : public Error {
 public:
  explicit NumericFailure(const std::string& m) : Error(ErrorKind::NumericFailure, m) {}
};

class TrainingFailure : public Error {
 public:
  explicit TrainingFailure(const std::string& m) : Error(ErrorKind::TrainingFailure, m) {}
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace vmdkit
