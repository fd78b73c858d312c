#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace linkgraph {

enum class ErrorKind {
  Parse,
  Integrity,
  UndefinedValue,
  UnknownType,
  Precondition,
  Exhaustion,
  InsufficientData,
  EmptyVocabulary,
  UnknownKey,
  Validation,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Base class for every error raised by the library. The kind lets callers
/// (the CLI in particular) map failures to exit codes without RTTI chains.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message) : Error(ErrorKind::Parse, message) {}
};

class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& message) : Error(ErrorKind::Integrity, message) {}
};

class UndefinedValueError : public Error {
 public:
  explicit UndefinedValueError(const std::string& message)
      : Error(ErrorKind::UndefinedValue, message) {}
};

class UnknownTypeError : public Error {
 public:
  explicit UnknownTypeError(std::string raw_name);

  const std::string& raw_name() const noexcept { return raw_name_; }

 private:
  std::string raw_name_;
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& message)
      : Error(ErrorKind::Precondition, message) {}
};

/// Raised when a sampler cannot produce the requested number of items.
class ExhaustionError : public Error {
 public:
  ExhaustionError(const std::string& message, std::size_t produced)
      : Error(ErrorKind::Exhaustion, message), produced_(produced) {}

  std::size_t produced() const noexcept { return produced_; }

 private:
  std::size_t produced_;
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& message)
      : Error(ErrorKind::InsufficientData, message) {}
};

class EmptyVocabularyError : public Error {
 public:
  explicit EmptyVocabularyError(const std::string& message)
      : Error(ErrorKind::EmptyVocabulary, message) {}
};

class UnknownKeyError : public Error {
 public:
  explicit UnknownKeyError(const std::string& key)
      : Error(ErrorKind::UnknownKey, "unknown issue key '" + key + "'") {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message) : Error(ErrorKind::Validation, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::Io, message) {}
};

}  // namespace linkgraph
