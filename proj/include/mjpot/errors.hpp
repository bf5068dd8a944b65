#pragma once

#include <stdexcept>
#include <string>

namespace mjpot {

/// Base class for every failure this library reports deliberately.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Defects in user-supplied data: graph files, fields, flags. The command
/// line maps these to exit code 2, everything else Error-derived to 1.
struct InputError : Error {
  using Error::Error;
};

struct DuplicateArc : InputError {
  DuplicateArc(const std::string& from, const std::string& to)
      : InputError("duplicate arc (" + from + ", " + to + ")") {}
};

struct SelfLoop : InputError {
  explicit SelfLoop(const std::string& state)
      : InputError("self-loop at state " + state) {}
};

struct NonpositiveRate : InputError {
  NonpositiveRate(const std::string& from, const std::string& to, double rate)
      : InputError("arc (" + from + ", " + to + ") has nonpositive or non-finite rate " +
                   std::to_string(rate)) {}
};

struct UnknownState : InputError {
  explicit UnknownState(const std::string& state)
      : InputError("unknown state " + state) {}
};

struct NotStronglyConnected : InputError {
  NotStronglyConnected(const std::string& from, const std::string& to)
      : InputError("graph is not strongly connected: no directed path from " + from + " to " + to) {}
};

struct MissingState : InputError {
  explicit MissingState(const std::string& state)
      : InputError("field is missing a value for state " + state) {}
};

struct NonNumeric : InputError {
  explicit NonNumeric(const std::string& where)
      : InputError("non-numeric value for " + where) {}
};

struct FormatError : InputError {
  explicit FormatError(const std::string& what) : InputError(what) {}
};

struct EmptyInterior : InputError {
  EmptyInterior() : InputError("interior state set is empty") {}
};

struct NotCentered : InputError {
  explicit NotCentered(double mean)
      : InputError("field is not centered: stationary mean " + std::to_string(mean)) {}
};

struct HorizonTooShort : InputError {
  HorizonTooShort(double T, double needed)
      : InputError("horizon " + std::to_string(T) + " is below the mixing requirement " +
                   std::to_string(needed)) {}
};

struct CapExceeded : InputError {
  CapExceeded(int n, int cap)
      : InputError("forest enumeration requested for " + std::to_string(n) +
                   " states, above the cap " + std::to_string(cap)) {}
};

/// Numeric failures: the input looked valid but a solve or identity check
/// broke down. These indicate either near-degenerate data or a bug.
struct SingularBeyondNullity : Error {
  explicit SingularBeyondNullity(const std::string& what)
      : Error("generator rank deficiency beyond the stationary direction: " + what) {}
};

struct SingularStoppedGenerator : Error {
  explicit SingularStoppedGenerator(const std::string& what)
      : Error("stopped generator is numerically singular: " + what) {}
};

struct XDependenceDetected : Error {
  explicit XDependenceDetected(double spread)
      : Error("total two-tree weight varies with the probe state by " + std::to_string(spread)) {}
};

struct DecompositionInvalid : Error {
  explicit DecompositionInvalid(const std::string& state)
      : Error("decomposition residual does not vanish outside the declared set, state " + state) {}
};

}  // namespace mjpot
