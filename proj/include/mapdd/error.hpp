#pragma once

#include <stdexcept>
#include <string>

namespace mapdd {

/// Malformed input text (map or instance files). Carries the 1-based
/// line/column of the offending character when known (0 otherwise).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    std::string s = "line " + std::to_string(line);
    if (column > 0) s += ", column " + std::to_string(column);
    return s + ": " + what;
  }

  int line_;
  int column_;
};

/// Input that parses but is semantically invalid (bad spec, bad instance).
class InputError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A run exceeded its step cap without finishing all tasks.
class LivenessError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mapdd
