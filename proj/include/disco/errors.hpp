#ifndef DISCO_ERRORS_HPP
#define DISCO_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace disco {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line_number)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + msg),
        line(line_number) {}
  int line;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Iterative solver failed to reach its tolerance; carries the best iterate.
struct SolveError : std::runtime_error {
  SolveError(const std::string& msg, std::vector<double> iterate)
      : std::runtime_error(msg), best_iterate(std::move(iterate)) {}
  std::vector<double> best_iterate;
};

}  // namespace disco

#endif
