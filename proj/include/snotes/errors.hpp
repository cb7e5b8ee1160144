#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace snotes {

/// Malformed input data (CSV rows, JSON documents). Carries the 1-based
/// line number for line-oriented sources, 0 otherwise; the message already
/// names the line when one is known.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(line > 0 ? message + " (line " + std::to_string(line) + ")"
                                    : message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace snotes
