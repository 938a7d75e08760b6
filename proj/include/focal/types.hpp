#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace focal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Closed time interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double t, double slack = 1e-9) const {
    return t >= lo - slack && t <= hi + slack;
  }
  bool valid() const { return hi >= lo; }
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an operation needs the evaluation map to have full rank and it
// does not (e.g. asking for the Riccati operator at a focal time).
class SingularEvaluation : public Error {
 public:
  SingularEvaluation(const std::string& what, double t) : Error(what), time(t) {}
  double time;
};

// Raised when a kernel of the evaluation map escapes the chosen subfamily.
class FullIndexViolation : public Error {
 public:
  FullIndexViolation(const std::string& what, double t) : Error(what), time(t) {}
  double time;
};

// Scenario/config validation failure; maps to CLI exit code 1.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace focal
