#pragma once

#include <stdexcept>
#include <string>

namespace mdv {

// Malformed input document (bad JSON, bad zip, bad delimited text).
class ParseError : public std::runtime_error {
public:
  ParseError(std::string message, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(line > 0 ? message + " (line " + std::to_string(line) +
                                          ", column " + std::to_string(column) + ")"
                                    : message),
        line(line), column(column) {}
  std::size_t line;
  std::size_t column;
};

// Well-formed document that violates a model invariant. Names the offending
// field key when one exists.
class SemanticError : public std::runtime_error {
public:
  explicit SemanticError(std::string message, std::string field_key = {})
      : std::runtime_error(std::move(message)), field_key(std::move(field_key)) {}
  std::string field_key;
};

class NotFoundError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Backend unreachable; distinct from NotFoundError so callers can retry.
class TransportError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mdv
