#include "linkgraph/errors.hpp"

namespace linkgraph {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Integrity: return "integrity error";
    case ErrorKind::UndefinedValue: return "undefined value";
    case ErrorKind::UnknownType: return "unknown link type";
    case ErrorKind::Precondition: return "precondition violated";
    case ErrorKind::Exhaustion: return "exhausted";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::EmptyVocabulary: return "empty vocabulary";
    case ErrorKind::UnknownKey: return "unknown key";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

UnknownTypeError::UnknownTypeError(std::string raw_name)
    : Error(ErrorKind::UnknownType, "unknown link type '" + raw_name + "'"),
      raw_name_(std::move(raw_name)) {}

}  // namespace linkgraph
