#pragma once

#include <complex>

#include <Eigen/Dense>

#include "selfdual/lattice.hpp"

namespace selfdual {

// Splitting of the real span of an integral lattice into positive and
// negative parts. The vielbein E maps lattice coordinates to an orthonormal
// frame whose first b+ components are the positive part, so that
//   (x,x) = |E_+ x|^2 - |E_- x|^2   and   <x,x> = |E x|^2.
class Polarization {
 public:
  const IntegralLattice& lattice() const { return lattice_; }
  const Eigen::MatrixXd& vielbein() const { return vielbein_; }

  // Positive-definite Gram matrix E^T E of the metric <,>.
  const Eigen::MatrixXd& metric() const { return metric_; }

  double metric_norm(const LatticeVector& x) const;

 private:
  friend Polarization make_polarization(const IntegralLattice&, const Eigen::MatrixXd&);

  IntegralLattice lattice_;
  Eigen::MatrixXd vielbein_;
  Eigen::MatrixXd metric_;
};

inline constexpr double kVielbeinTolerance = 1e-10;

// Errors: DimensionMismatch, SingularVielbein, IncompatibleVielbein
// (some entry of E^T eta E - gram exceeds 1e-10).
Polarization make_polarization(const IntegralLattice& lat, const Eigen::MatrixXd& vielbein);

// The polarization obtained from the eigendecomposition of the Gram matrix:
// E = |Lambda|^{1/2} V^T with positive eigenvalues ordered first. For a
// definite lattice this gives metric = |gram|.
Polarization standard_polarization(const IntegralLattice& lat);

struct Projection {
  double plus_normsq = 0.0;
  double minus_normsq = 0.0;
};

// Errors: DimensionMismatch.
Projection project(const Polarization& pol, const LatticeVector& x);

// Point of the Siegel upper half-space: symmetric g x g complex matrix with
// positive-definite imaginary part.
class PeriodMatrix {
 public:
  // Errors: InvalidPeriodMatrix (not square, not symmetric to 1e-12, or
  // Im part not positive definite).
  explicit PeriodMatrix(Eigen::MatrixXcd omega);

  static PeriodMatrix from_parts(const Eigen::MatrixXd& re, const Eigen::MatrixXd& im);

  int genus() const { return static_cast<int>(omega_.rows()); }
  const Eigen::MatrixXcd& omega() const { return omega_; }
  Eigen::MatrixXd real_part() const { return omega_.real(); }
  Eigen::MatrixXd imag_part() const { return omega_.imag(); }

 private:
  Eigen::MatrixXcd omega_;
};

// Gram matrix on Z^{2g}, coordinates x = (m, n), of
//   <x,x> = (n + Omega m)^dagger (Im Omega)^{-1} (n + Omega m).
// With Omega = X + iY this is [[X Y^-1 X + Y, X Y^-1], [Y^-1 X, Y^-1]].
Eigen::MatrixXd metric_from_period_matrix(const PeriodMatrix& omega);

}  // namespace selfdual
