#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "selfdual/theta.hpp"

namespace selfdual {

// Integer 2x2 matrix [[a, b], [c, d]] acting by Moebius transformation.
struct ModularMatrix {
  std::int64_t a = 1, b = 0, c = 0, d = 1;

  static ModularMatrix identity() { return {}; }
  static ModularMatrix s() { return {0, -1, 1, 0}; }
  static ModularMatrix t(std::int64_t k = 1) { return {1, k, 0, 1}; }

  std::int64_t determinant() const { return a * d - b * c; }
  ModularMatrix inverse() const { return {d, -b, -c, a}; }  // for det = 1
  // gamma and -gamma act identically; picks c > 0, or c = 0 and d > 0.
  ModularMatrix normalized() const;
  Complex apply(Complex tau) const;

  ModularMatrix operator*(const ModularMatrix& o) const;
  bool operator==(const ModularMatrix&) const = default;
};

// Rectangular torus S x S' with circumferences S and R.
struct TorusGeometry {
  double s_length;
  double r_length;

  // Errors: NonPositiveRadius.
  TorusGeometry(double s, double r);
};

// Lattice L in R^2 with generators v1, v2.
class PlanarLattice {
 public:
  // Errors: DegenerateLattice.
  PlanarLattice(Eigen::Vector2d v1, Eigen::Vector2d v2);

  const Eigen::Vector2d& v1() const { return v1_; }
  const Eigen::Vector2d& v2() const { return v2_; }

 private:
  Eigen::Vector2d v1_, v2_;
};

// tau = v2 / v1 as complex numbers, negated if needed so Im tau > 0.
ModularPoint tau_of_lattice(const PlanarLattice& lattice);

enum class ReductionOrder {
  SprimeThenS,  // reduce on S' (circumference R) first: tau' = iS/R
  SThenSprime,  // reduce on S first: tau' = iR/S
};

ModularPoint reduce_two_step(const TorusGeometry& geometry, ReductionOrder order);

// Coupling t of the circle-reduced theory from the circle circumference:
// matching 1/(2 pi t) against 1/(4 pi R) gives t = 2R.
inline constexpr double kCouplingPerRadius = 2.0;

// Errors: NonPositiveRadius.
double coupling_from_radius(double radius, double coefficient = kCouplingPerRadius);

struct FundamentalReduction {
  ModularPoint tau;
  ModularMatrix gamma;  // gamma . tau_in = tau
};

// Standard fundamental domain: Re tau in (-1/2, 1/2], |tau| >= 1, and on the
// unit circle only Re tau >= 0 is kept.
FundamentalReduction sl2z_reduce(const ModularPoint& tau);

// Some gamma in SL(2,Z) with gamma . tau1 = tau2, if the two reduce to the
// same point of the fundamental domain (up to tol, relative to |tau|).
std::optional<ModularMatrix> equivalent(const ModularPoint& tau1, const ModularPoint& tau2,
                                        double tol = 1e-9);

}  // namespace selfdual
