#include "fairgen/errors.hpp"

namespace fairgen {

namespace {
std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ", ";
    out += item;
  }
  return out;
}
}  // namespace

DimensionMismatchError::DimensionMismatchError(std::size_t expected, std::size_t actual,
                                               const std::string& context)
    : Error((context.empty() ? std::string() : context + ": ") + "dimension mismatch (expected " +
            std::to_string(expected) + ", got " + std::to_string(actual) + ")"),
      expected_(expected),
      actual_(actual) {}

MissingGroupError::MissingGroupError(std::size_t group, const std::string& name)
    : Error("group " + std::to_string(group) + (name.empty() ? "" : " (" + name + ")") +
            " has no samples"),
      group_(group) {}

QuotaUnreachableError::QuotaUnreachableError(std::size_t group, std::size_t accepted, std::size_t attempts)
    : Error("quota unreachable for group " + std::to_string(group) + ": " + std::to_string(accepted) +
            " accepted after " + std::to_string(attempts) + " attempts"),
      group_(group),
      accepted_(accepted),
      attempts_(attempts) {}

TransportError::TransportError(const std::string& what, int attempts)
    : Error(what + " (after " + std::to_string(attempts) + " attempt" + (attempts == 1 ? "" : "s") + ")"),
      attempts_(attempts) {}

ProtocolError::ProtocolError(const std::string& what, std::optional<std::size_t> index)
    : Error(index ? what + " at index " + std::to_string(*index) : what), index_(index) {}

ParseError::ParseError(std::size_t line, const std::string& reason)
    : Error("line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}

SchemaError::SchemaError(std::size_t line, const std::string& reason)
    : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}

InvalidValueError::InvalidValueError(const std::string& value, std::vector<std::string> allowed)
    : Error("invalid value '" + value + "'; allowed: " + join(allowed)), allowed_(std::move(allowed)) {}

}  // namespace fairgen
