#ifndef XFPT_ERRORS_HPP
#define XFPT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace xfpt {

// Raised when an input (graph file, query, CLI argument combination) violates
// a structural or semantic requirement. Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a numerical routine cannot deliver its contract (non-convergent
// quadrature, infinite moment, null conditioning event). Maps to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace xfpt

#endif  // XFPT_ERRORS_HPP
