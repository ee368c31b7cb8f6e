#include "selfdual/error.hpp"

namespace selfdual {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NonSymmetric: return "NonSymmetric";
    case Errc::Degenerate: return "Degenerate";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::BoundTooLarge: return "BoundTooLarge";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::IncompatibleVielbein: return "IncompatibleVielbein";
    case Errc::SingularVielbein: return "SingularVielbein";
    case Errc::InvalidPeriodMatrix: return "InvalidPeriodMatrix";
    case Errc::InvalidTau: return "InvalidTau";
    case Errc::ImTauTooSmall: return "ImTauTooSmall";
    case Errc::Inconclusive: return "Inconclusive";
    case Errc::FitIllConditioned: return "FitIllConditioned";
    case Errc::ThetaVanishes: return "ThetaVanishes";
    case Errc::NonPrincipal: return "NonPrincipal";
    case Errc::GenusTooLarge: return "GenusTooLarge";
    case Errc::TailBoundFailure: return "TailBoundFailure";
    case Errc::InvalidData: return "InvalidData";
    case Errc::NonPositiveRadius: return "NonPositiveRadius";
    case Errc::DegenerateLattice: return "DegenerateLattice";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::CatalogError: return "CatalogError";
    case Errc::UnknownEntry: return "UnknownEntry";
  }
  return "Unknown";
}

std::string_view module_of(Errc code) noexcept {
  switch (code) {
    case Errc::NonSymmetric:
    case Errc::Degenerate:
    case Errc::NotPositiveDefinite:
    case Errc::BoundTooLarge:
    case Errc::DimensionMismatch:
      return "lattice_core";
    case Errc::IncompatibleVielbein:
    case Errc::SingularVielbein:
    case Errc::InvalidPeriodMatrix:
      return "polarization";
    case Errc::InvalidTau:
    case Errc::ImTauTooSmall:
    case Errc::Inconclusive:
    case Errc::FitIllConditioned:
    case Errc::ThetaVanishes:
      return "theta_engine";
    case Errc::NonPrincipal:
    case Errc::GenusTooLarge:
    case Errc::TailBoundFailure:
      return "refinements";
    case Errc::InvalidData:
      return "manifolds";
    case Errc::NonPositiveRadius:
    case Errc::DegenerateLattice:
      return "reduction";
    case Errc::InvalidArgument:
    case Errc::CatalogError:
    case Errc::UnknownEntry:
      return "cli";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(module_of(code)) + "::" +
                         std::string(to_string(code)) + ": " + detail),
      code_(code) {}

}  // namespace selfdual
