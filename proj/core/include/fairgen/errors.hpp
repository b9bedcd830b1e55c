#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairgen {

/// Root of every error thrown by the library. Callers that only need a
/// message can catch this; the CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimensionError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  DimensionMismatchError(std::size_t expected, std::size_t actual, const std::string& context = {});
  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class DegenerateVectorError : public Error {
 public:
  using Error::Error;
};

/// Training data that cannot produce a model, e.g. only one class present.
class DegenerateTrainingError : public Error {
 public:
  using Error::Error;
};

class MissingGroupError : public Error {
 public:
  MissingGroupError(std::size_t group, const std::string& name);
  std::size_t group() const noexcept { return group_; }

 private:
  std::size_t group_;
};

/// A model trained over one space (feature/latent) used where the other is required.
class WrongSpaceError : public Error {
 public:
  using Error::Error;
};

class QuotaUnreachableError : public Error {
 public:
  QuotaUnreachableError(std::size_t group, std::size_t accepted, std::size_t attempts);
  std::size_t group() const noexcept { return group_; }
  std::size_t accepted() const noexcept { return accepted_; }
  std::size_t attempts() const noexcept { return attempts_; }

 private:
  std::size_t group_;
  std::size_t accepted_;
  std::size_t attempts_;
};

/// Network-level failure talking to an external generator. Retryable.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int attempts);
  int attempts() const noexcept { return attempts_; }
  static constexpr bool retryable() noexcept { return true; }

 private:
  int attempts_;
};

/// Well-formed transport, malformed payload. `index` names the offending batch item when known.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, std::optional<std::size_t> index = std::nullopt);
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason);
  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& reason);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class InvalidValueError : public Error {
 public:
  InvalidValueError(const std::string& value, std::vector<std::string> allowed);
  const std::vector<std::string>& allowed() const noexcept { return allowed_; }

 private:
  std::vector<std::string> allowed_;
};

}  // namespace fairgen
