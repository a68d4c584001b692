#pragma once

#include <stdexcept>
#include <string>

namespace floodmra {

// Malformed input files (ASCII grids, hydrograph CSVs, .nug files).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent scenario configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem problems (missing files, unwritable paths).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated structural preconditions (ungraded grids, bad tree shapes).
struct StructureError : std::logic_error {
  using std::logic_error::logic_error;
};

// Out-of-domain arguments to numerical kernels.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A simulation produced non-finite state.
struct BlowUpError : std::runtime_error {
  BlowUpError(const std::string& what, double t_fail) : std::runtime_error(what), t(t_fail) {}
  double t;
};

}  // namespace floodmra
