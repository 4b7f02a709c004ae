#pragma once

#include <stdexcept>
#include <string>

namespace climbtp {

/// Malformed or inconsistent configuration (bad key, violated invariant).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CSV input that cannot be parsed; carries the 1-based offending line.
class CsvParseError : public std::runtime_error {
 public:
  CsvParseError(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// State outside the aircraft flight envelope.
class EnvelopeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The CAS and Mach speed curves never intersect on the search interval.
class NoCrossoverError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite value produced during integration; carries the offending state.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double t, double h, double v)
      : std::runtime_error(what + " at t=" + std::to_string(t) + " h=" + std::to_string(h) +
                           " v=" + std::to_string(v)),
        t_(t),
        h_(h),
        v_(v) {}
  double t() const { return t_; }
  double h() const { return h_; }
  double v() const { return v_; }

 private:
  double t_, h_, v_;
};

/// Optimizer-level failure (non-finite objective value and the like).
class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Online prediction requested on an observation window that is too short.
class PrefixTooShortError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace climbtp
