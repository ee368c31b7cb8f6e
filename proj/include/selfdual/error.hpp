#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace selfdual {

// Error variants raised by the library. Each variant belongs to exactly one
// module; the CLI prints "module::Variant: detail" on stderr.
enum class Errc {
  // lattice_core
  NonSymmetric,
  Degenerate,
  NotPositiveDefinite,
  BoundTooLarge,
  DimensionMismatch,
  // polarization
  IncompatibleVielbein,
  SingularVielbein,
  InvalidPeriodMatrix,
  // theta_engine
  InvalidTau,
  ImTauTooSmall,
  Inconclusive,
  FitIllConditioned,
  ThetaVanishes,
  // refinements
  NonPrincipal,
  GenusTooLarge,
  TailBoundFailure,
  // manifolds
  InvalidData,
  // reduction
  NonPositiveRadius,
  DegenerateLattice,
  // shared plumbing
  InvalidArgument,
  CatalogError,
  UnknownEntry,
};

std::string_view to_string(Errc code) noexcept;
std::string_view module_of(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  std::string_view variant() const noexcept { return to_string(code_); }
  std::string_view module() const noexcept { return module_of(code_); }

 private:
  Errc code_;
};

}  // namespace selfdual
