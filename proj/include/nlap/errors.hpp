#pragma once

#include <stdexcept>
#include <string>

namespace nlap {

enum class Failure {
  domain,
  range,
  precondition,
  grid_too_coarse,
  window_too_narrow,
  under_resolved,
  degenerate_input,
  schema,
  overflow,
  non_convergence,
  step_underflow,
  max_steps,
  bracket,
  tail_inconsistency,
};

inline const char* to_string(Failure f) {
  switch (f) {
    case Failure::domain: return "domain";
    case Failure::range: return "range";
    case Failure::precondition: return "precondition";
    case Failure::grid_too_coarse: return "grid-too-coarse";
    case Failure::window_too_narrow: return "window-too-narrow";
    case Failure::under_resolved: return "under-resolved";
    case Failure::degenerate_input: return "degenerate-input";
    case Failure::schema: return "schema";
    case Failure::overflow: return "overflow";
    case Failure::non_convergence: return "non-convergence";
    case Failure::step_underflow: return "step-underflow";
    case Failure::max_steps: return "max-steps";
    case Failure::bracket: return "bracket-failure";
    case Failure::tail_inconsistency: return "tail-inconsistency";
  }
  return "unknown";
}

/// Violated input contract. The CLI maps these to exit status 2.
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(Failure kind, const std::string& what)
      : std::invalid_argument(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  Failure kind() const noexcept { return kind_; }

 private:
  Failure kind_;
};

/// A numerical procedure could not deliver its result. Exit status 3.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(Failure kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  Failure kind() const noexcept { return kind_; }

 private:
  Failure kind_;
};

inline void require(bool ok, Failure kind, const std::string& what) {
  if (!ok) throw PreconditionError(kind, what);
}

}  // namespace nlap
