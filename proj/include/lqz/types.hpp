#ifndef LQZ_TYPES_HPP
#define LQZ_TYPES_HPP

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lqz {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at or too close to a logarithmic singularity.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw DomainError(msg);
}

}  // namespace lqz

#endif
