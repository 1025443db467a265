#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chslab {

// Argument outside the domain of a graph or operator.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Scalar root finder failed to reach tolerance.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Input that must be mean-free is not.
struct MeanError : std::runtime_error {
  explicit MeanError(const std::string& what) : std::runtime_error(what) {}
};

// Linear solver stalled or produced a non-finite result.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Newton iteration failed to converge, including the retry path.
struct NewtonDivergence : std::runtime_error {
  explicit NewtonDivergence(const std::string& what) : std::runtime_error(what) {}
};

// Malformed configuration file.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration violates one or more admissibility conditions; carries all of them.
struct ValidationError : std::runtime_error {
  std::vector<std::string> violations;
  explicit ValidationError(std::vector<std::string> v)
      : std::runtime_error(join(v)), violations(std::move(v)) {}

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "configuration invalid:";
    for (const auto& m : v) {
      s += "\n  - ";
      s += m;
    }
    return s;
  }
};

// File could not be read or written.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chslab
