#ifndef MLN_ERRORS_HPP
#define MLN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mln {

/// Syntax or semantic error in a KB, evidence or query file.
/// line/column are 1-based; 0 means "not tied to a position".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, int line = 0, int column = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ":" +
                                          std::to_string(column) + ": " + msg
                                    : msg),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Evidence violates a hard formula, or the hard clause set admits no world.
class UnsatisfiableError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A configurable ceiling (ground clause count, enumeration size) was hit.
class ResourceLimitError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mln

#endif
