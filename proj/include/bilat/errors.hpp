#ifndef BILAT_ERRORS_HPP
#define BILAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bilat {

// A group-stratum without responders (or J too small for a test): the
// requested estimate or statistic is undefined for this data.
struct DegenerateDataError : std::runtime_error {
  explicit DegenerateDataError(const std::string& msg) : std::runtime_error(msg) {}
};

// The stationarity equation for pi1 has no root in the feasible interval even
// though the likelihood diverges at its edge; indicates a numerical fault.
struct NoFeasibleSolutionError : std::runtime_error {
  explicit NoFeasibleSolutionError(const std::string& msg) : std::runtime_error(msg) {}
};

// An information (or contrast covariance) matrix could not be inverted.
struct SingularInformationError : std::runtime_error {
  explicit SingularInformationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed count-table input; line is 1-based, 0 when unknown.
struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& msg, int line_no = 0)
      : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg : msg),
        line(line_no) {}
};

}  // namespace bilat

#endif  // BILAT_ERRORS_HPP
