#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lmkit {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Formula text that does not conform to the grammar. Carries the byte
// offset of the offending token within the input string.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace lmkit
