#pragma once

#include <stdexcept>
#include <string>

namespace pungan {

// Dimension or shape violations in the numeric core.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed input files (TSV/JSONL); carries the offending line number in the message.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid input that violates a domain rule (unknown lemma,
// target index out of range, duplicate inventory row, ...).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A command was invoked before the artifacts it depends on exist.
class PrerequisiteError : public std::runtime_error {
 public:
  explicit PrerequisiteError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pungan
