#ifndef LAPLAB_CORE_TYPES_HPP
#define LAPLAB_CORE_TYPES_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace laplab {

using Complex = std::complex<double>;
using Index = std::int64_t;

// Spatial point; only the first N components are meaningful.
using Point = std::array<double, 3>;

inline double dot(const Point& a, const Point& b, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Point& a, int n) { return std::sqrt(dot(a, a, n)); }

enum class ErrorCode {
  Config = 1,
  Precondition,
  OutOfWindow,
  NotOnBoundary,
  WrongArity,
  EmptyWindow,
  NonPositiveMedium,
  NotDifferentiable,
  DeltaOutOfRange,
  BadResolution,
  ShapeMismatch,
  NoConvergence,
  SingularSystem,
  DegenerateSystem,
  ShellTooThin,
  NotHomogeneous,
  Io,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Config: return "Config";
    case ErrorCode::Precondition: return "Precondition";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::NotOnBoundary: return "NotOnBoundary";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NonPositiveMedium: return "NonPositiveMedium";
    case ErrorCode::NotDifferentiable: return "NotDifferentiable";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::BadResolution: return "BadResolution";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DegenerateSystem: return "DegenerateSystem";
    case ErrorCode::ShellTooThin: return "ShellTooThin";
    case ErrorCode::NotHomogeneous: return "NotHomogeneous";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

// Which boundary value of the resolvent is being approached: R(lambda + i0)
// for Plus, R(lambda - i0) for Minus. Auto follows sign(Im z), Plus at 0.
enum class Side { Auto, Plus, Minus };

inline int side_sign(Side s, Complex z) {
  if (s == Side::Plus) return +1;
  if (s == Side::Minus) return -1;
  return z.imag() >= 0 ? +1 : -1;
}

inline const char* side_name(int sgn) { return sgn >= 0 ? "+" : "-"; }

}  // namespace laplab

#endif
