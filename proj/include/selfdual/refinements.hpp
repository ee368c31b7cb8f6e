#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "selfdual/lattice.hpp"
#include "selfdual/polarization.hpp"
#include "selfdual/theta.hpp"

namespace selfdual {

// [[0, I_g], [-I_g, 0]]
IntMatrix standard_symplectic_form(int genus);

// Rank-2g lattice with a unimodular alternating pairing (x,y) = x^T J y.
class SkewLattice {
 public:
  // Errors: InvalidArgument (not alternating or odd rank), Degenerate
  // (det J = 0), NonPrincipal (det J != 1).
  explicit SkewLattice(IntMatrix form);

  int rank() const { return static_cast<int>(form_.rows()); }
  int genus() const { return rank() / 2; }
  const IntMatrix& form() const { return form_; }

 private:
  IntMatrix form_;
};

// Unimodular U with U^T J U = standard_symplectic_form(g), found by integral
// symplectic Gram-Schmidt (Euclid-style pivoting on the smallest entry).
// Errors: InvalidArgument, Degenerate, NonPrincipal.
IntMatrix symplectic_basis(const IntMatrix& form);

inline constexpr int kMaxRefinementGenus = 6;
inline constexpr int kMaxThetaGenus = 3;

// Z/2-valued refinement of the standard skew form on Z^{2g}, stored as the
// half-characteristic (a, b) in {0, 1/2}^g: bit i of a_bits means a_i = 1/2.
// For x = (m, n):  phi(x) = m.n + 2a.m + 2b.n  (mod 2).
class QuadraticRefinement {
 public:
  QuadraticRefinement(int genus, std::uint32_t a_bits, std::uint32_t b_bits);

  int genus() const { return genus_; }
  std::uint32_t a_bits() const { return a_bits_; }
  std::uint32_t b_bits() const { return b_bits_; }
  double a(int i) const { return (a_bits_ >> i) & 1u ? 0.5 : 0.0; }
  double b(int i) const { return (b_bits_ >> i) & 1u ? 0.5 : 0.0; }

  // x has length 2g, laid out as (m, n). Errors: DimensionMismatch.
  int operator()(std::span<const std::int64_t> x) const;

  bool operator==(const QuadraticRefinement&) const = default;

 private:
  int genus_;
  std::uint32_t a_bits_;
  std::uint32_t b_bits_;
};

// (x,y) = m.n' - n.m' reduced mod 2.
int standard_pairing_mod2(std::span<const std::int64_t> x, std::span<const std::int64_t> y);

// All 2^{2g} refinements, ordered by (a_bits, b_bits).
// Errors: InvalidArgument (g < 1), GenusTooLarge (g > 6).
std::vector<QuadraticRefinement> enumerate_refinements(int genus);

// Closed form 4 a.b mod 2.
int arf(const QuadraticRefinement& phi);
// 0 iff phi vanishes on strictly more than half of (Z/2)^{2g}.
int arf_by_majority(const QuadraticRefinement& phi);

// theta[a,b](0|Omega) = sum_n exp(i pi (n+a)^T Omega (n+a) + 2 pi i (n+a)^T b).
// Errors: DimensionMismatch, GenusTooLarge (g > 3), TailBoundFailure
// (smallest eigenvalue of Im Omega below 0.05), InvalidArgument.
ThetaResult riemann_theta_constant(const QuadraticRefinement& phi, const PeriodMatrix& omega,
                                   double eps);

struct FactorizationReport {
  double lattice_sum = 0.0;      // L = pform_theta(metric(Omega), t = 1)
  double holomorphic_sum = 0.0;  // R = sum_phi |theta_phi|^2
  double ratio = 0.0;            // L / R
  double det_im = 0.0;           // det Im Omega
  std::vector<Complex> theta_constants;  // in enumerate_refinements order
};

FactorizationReport factorization_residual(const PeriodMatrix& omega, double eps);

struct CalibrationPoint {
  double det_im = 0.0;
  double lattice_sum = 0.0;
  double holomorphic_sum = 0.0;
};

// Least-squares fit of log L - log R = log kappa + alpha log det Im Omega.
struct CalibrationFit {
  double kappa = 0.0;
  double alpha = 0.0;
  double max_residual = 0.0;
  bool normalization_constant_found = false;  // max_residual < 1e-6
};

// Errors: FitIllConditioned (fewer than two distinct det Im Omega values).
CalibrationFit fit_normalization(std::span<const CalibrationPoint> points);

struct CalibrationReport {
  std::vector<PeriodMatrix> omegas;
  std::vector<FactorizationReport> samples;
  CalibrationFit fit;
};

// Errors: InvalidArgument (fewer than 6 samples), GenusTooLarge (g > 2),
// FitIllConditioned, plus anything from factorization_residual.
CalibrationReport calibrate_factorization(std::span<const PeriodMatrix> omegas, double eps);

}  // namespace selfdual
