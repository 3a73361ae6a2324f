#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace liftode {

/// Malformed text handed to one of the parsers. `position` is a byte offset
/// into the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, std::vector<std::string> expected, const std::string& detail);

  std::size_t position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

/// A function node evaluated outside its domain (ln of a non-positive value,
/// division by zero, ...).
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string node, double x, const std::string& detail);

  const std::string& node() const noexcept { return node_; }
  double x() const noexcept { return x_; }

 private:
  std::string node_;
  double x_;
};

class MissingSymbolError : public std::runtime_error {
 public:
  explicit MissingSymbolError(std::string symbol)
      : std::runtime_error("no value assigned to symbol " + symbol), symbol_(std::move(symbol)) {}

  const std::string& symbol() const noexcept { return symbol_; }

 private:
  std::string symbol_;
};

/// Invalid numeric configuration (empty interval, too coarse a grid, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fixture file with the wrong number of lines or an unparsable line.
class FixtureFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace liftode
