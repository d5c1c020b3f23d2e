#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace macgrid {

// Base of every error thrown by the library. Callers that only need to
// distinguish "bad configuration" from "bad data at runtime" can catch
// ConfigError separately and treat everything else as a runtime failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid option values, duplicate type inventories, thresholds outside (0,1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed corpus text. Carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

class DecodingError : public Error {
 public:
  using Error::Error;
};

// Sentence does not fit the model (too long, wrong shape).
class InputError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  TrainingError(std::size_t epoch, const std::string& message)
      : Error("epoch " + std::to_string(epoch) + ": " + message), epoch_(epoch) {}

  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace macgrid
