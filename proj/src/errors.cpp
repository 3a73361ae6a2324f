#include "liftode/errors.hpp"

#include <sstream>

namespace liftode {

namespace {

std::string parse_message(std::size_t position, const std::vector<std::string>& expected,
                          const std::string& detail) {
  std::ostringstream os;
  os << "syntax error at offset " << position << ": " << detail;
  if (!expected.empty()) {
    os << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) os << (i + 1 == expected.size() ? " or " : ", ");
      os << expected[i];
    }
    os << ')';
  }
  return os.str();
}

std::string domain_message(const std::string& node, double x, const std::string& detail) {
  std::ostringstream os;
  os.precision(17);
  os << node << " is undefined at x = " << x << ": " << detail;
  return os.str();
}

}  // namespace

ParseError::ParseError(std::size_t position, std::vector<std::string> expected,
                       const std::string& detail)
    : std::runtime_error(parse_message(position, expected, detail)),
      position_(position),
      expected_(std::move(expected)) {}

DomainError::DomainError(std::string node, double x, const std::string& detail)
    : std::runtime_error(domain_message(node, x, detail)), node_(std::move(node)), x_(x) {}

}  // namespace liftode
