#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "selfdual/lattice.hpp"
#include "selfdual/polarization.hpp"

namespace selfdual {

using Complex = std::complex<double>;

// A point tau of the upper half-plane. The gauge-theory parameters are
// tau = theta/(2 pi) + 4 pi i / e^2.
class ModularPoint {
 public:
  // Errors: InvalidTau (Im tau <= 0 or non-finite).
  explicit ModularPoint(Complex tau);
  static ModularPoint from_coupling(double theta_angle, double coupling_e2);

  Complex tau() const { return tau_; }
  double theta_angle() const;
  double coupling_e2() const;

 private:
  Complex tau_;
};

struct ThetaResult {
  Complex value;
  double tail_bound = 0.0;  // certified bound on the omitted terms
  std::size_t terms_used = 0;
};

inline constexpr double kMinImTau = 0.05;

// Truncation radius for sum_x exp(-decay * q(x)) over a lattice with metric q
// (optionally shifted). For any 0 < s < 1,
//   sum_{q(x) > B} e^{-a q(x)} <= e^{-a(1-s)B} prod_i (1 + sqrt(pi / (a s d_i))),
// with d_i the Gram-Schmidt norms of q; s is optimized on a grid.
struct TruncationPlan {
  double norm_bound = 0.0;
  double tail_bound = 0.0;
};
TruncationPlan plan_truncation(const Eigen::VectorXd& gram_schmidt_norms, double decay,
                               double target_tail);

// Sum over x in Lambda of exp(i pi tau x+^2 - i pi conj(tau) x-^2), truncated
// so that the certified tail is below eps.
// Errors: ImTauTooSmall (Im tau < 0.05), InvalidArgument (eps <= 0),
// BoundTooLarge.
ThetaResult siegel_narain(const Polarization& pol, const ModularPoint& tau, double eps);

// Sum over x of exp(-(pi/t) <x,x>) for a positive-definite metric.
// Errors: NotPositiveDefinite, InvalidArgument (t <= 0 or eps <= 0),
// BoundTooLarge.
ThetaResult pform_theta(const Eigen::MatrixXd& posdef_gram, double t, double eps);

// The summand written with gauge couplings:
//   exp(-(4 pi^2/e^2) <x,x> + i (theta/2) (x,x)).
Complex coupling_form_summand(double metric_norm, std::int64_t form_norm, double theta_angle,
                              double coupling_e2);

// 1 if Theta(tau+1) = Theta(tau) at five points near tau, else 2 once
// Theta(tau+2) = Theta(tau) is confirmed there. Errors: Inconclusive.
int t_periodicity(const Polarization& pol, const ModularPoint& tau, double eps);

struct AutomorphyFit {
  double w_hol = 0.0;
  double w_antihol = 0.0;
  Complex phase;
  double residual = 0.0;
};

// Fits log Theta(-1/tau) - log Theta(tau) = w_hol log tau + w_antihol log
// conj(tau) + log c on the first three samples and reports the largest
// deviation on the remaining ones. The imaginary parts are unwrapped relative
// to the first sample, which needs (rank/2) * spread(arg tau) < pi.
// Errors: InvalidArgument (fewer than 4 samples, duplicates, Im tau outside
// [0.3, 3]), FitIllConditioned, ThetaVanishes.
AutomorphyFit measure_automorphy(const Polarization& pol, std::span<const ModularPoint> samples,
                                 double eps);

// |Theta_L(t) - t^{n/2} det(G)^{-1/2} Theta_{L*}(1/t)| / |Theta_L(t)| where the
// dual sum uses G^{-1}. Errors: DimensionMismatch, plus those of pform_theta.
double poisson_check(const IntegralLattice& lat, const Eigen::MatrixXd& posdef_gram, double t,
                     double eps);

}  // namespace selfdual
