#pragma once

#include <stdexcept>
#include <string>

namespace splitsea {

/// Base of every numerical failure raised by the library.  `name()` is the
/// stable identifier printed by the CLI on stderr.
class NumericalError : public std::runtime_error {
public:
  NumericalError(std::string name, const std::string &what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

  const std::string &name() const noexcept { return name_; }

private:
  std::string name_;
};

/// Invalid user input (bad flag, empty gamma list, out-of-range argument).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define SPLITSEA_DEFINE_ERROR(Name)                                            \
  class Name : public NumericalError {                                         \
  public:                                                                      \
    explicit Name(const std::string &what) : NumericalError(#Name, what) {}    \
  }

SPLITSEA_DEFINE_ERROR(SolverFailure);
SPLITSEA_DEFINE_ERROR(DegenerateEdge);
SPLITSEA_DEFINE_ERROR(OracleMismatch);
SPLITSEA_DEFINE_ERROR(BandTooNarrow);
SPLITSEA_DEFINE_ERROR(NoConvergence);
SPLITSEA_DEFINE_ERROR(UnsupportedEdge);
SPLITSEA_DEFINE_ERROR(TruncationFailure);
SPLITSEA_DEFINE_ERROR(NodeCountInsufficient);
SPLITSEA_DEFINE_ERROR(NotPositiveDefinite);
SPLITSEA_DEFINE_ERROR(WindowTooSmall);
SPLITSEA_DEFINE_ERROR(LeakageTooLarge);
SPLITSEA_DEFINE_ERROR(CoincidentAngles);
SPLITSEA_DEFINE_ERROR(SubcriticalPhase);

#undef SPLITSEA_DEFINE_ERROR

} // namespace splitsea
