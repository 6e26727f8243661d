#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vocot {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Value violates a domain invariant (inverted box, zero image size, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Malformed text; offset is the byte position where scanning failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ProgramParseError : public Error {
 public:
  ProgramParseError(const std::string& what, std::size_t segment)
      : Error(what + " in segment " + std::to_string(segment)), segment_(segment) {}
  std::size_t segment() const noexcept { return segment_; }

 private:
  std::size_t segment_;
};

// A program step names an object the scene graph cannot supply.
class GroundingMiss : public Error {
 public:
  explicit GroundingMiss(std::string name)
      : Error("grounding miss: " + name), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// Program contains a step with no verbalization rule.
class UnknownOperation : public Error {
 public:
  explicit UnknownOperation(std::string op)
      : Error("unknown operation: " + op), op_(std::move(op)) {}
  const std::string& op() const noexcept { return op_; }

 private:
  std::string op_;
};

class StreamError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vocot
