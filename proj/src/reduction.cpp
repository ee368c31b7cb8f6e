#include "selfdual/reduction.hpp"

#include <array>
#include <cmath>

namespace selfdual {

namespace {
constexpr double kBoundaryTol = 1e-12;
constexpr int kMaxReductionSteps = 100000;
}  // namespace

ModularMatrix ModularMatrix::normalized() const {
  if (c < 0 || (c == 0 && d < 0)) return {-a, -b, -c, -d};
  return *this;
}

Complex ModularMatrix::apply(Complex tau) const {
  return (static_cast<double>(a) * tau + static_cast<double>(b)) /
         (static_cast<double>(c) * tau + static_cast<double>(d));
}

ModularMatrix ModularMatrix::operator*(const ModularMatrix& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

TorusGeometry::TorusGeometry(double s, double r) : s_length(s), r_length(r) {
  if (!(s > 0.0) || !(r > 0.0) || !std::isfinite(s) || !std::isfinite(r)) {
    throw Error(Errc::NonPositiveRadius, "circumferences must be positive and finite");
  }
}

PlanarLattice::PlanarLattice(Eigen::Vector2d v1, Eigen::Vector2d v2)
    : v1_(std::move(v1)), v2_(std::move(v2)) {
  const double det = v1_.x() * v2_.y() - v1_.y() * v2_.x();
  if (!std::isfinite(det) || std::abs(det) <= 1e-14 * v1_.norm() * v2_.norm()) {
    throw Error(Errc::DegenerateLattice, "generators are linearly dependent");
  }
}

ModularPoint tau_of_lattice(const PlanarLattice& lattice) {
  Complex tau = Complex(lattice.v2().x(), lattice.v2().y()) /
                Complex(lattice.v1().x(), lattice.v1().y());
  if (tau.imag() < 0.0) tau = -tau;
  return ModularPoint(tau);
}

ModularPoint reduce_two_step(const TorusGeometry& geometry, ReductionOrder order) {
  // Reducing on a circle of circumference R puts R in the denominator of the
  // action; integrating the remaining circle of length S over the fiber then
  // multiplies by S, so the 4d coupling is S/R.
  const double ratio = order == ReductionOrder::SprimeThenS
                           ? geometry.s_length / geometry.r_length
                           : geometry.r_length / geometry.s_length;
  return ModularPoint(Complex(0.0, ratio));
}

double coupling_from_radius(double radius, double coefficient) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(Errc::NonPositiveRadius, "radius must be positive");
  }
  return coefficient * radius;
}

FundamentalReduction sl2z_reduce(const ModularPoint& tau) {
  Complex z = tau.tau();
  ModularMatrix m;
  for (int step = 0; step < kMaxReductionSteps; ++step) {
    const double n = std::ceil(z.real() - 0.5);
    if (n != 0.0) {
      z -= n;
      m = ModularMatrix::t(-static_cast<std::int64_t>(n)) * m;
    }
    if (std::norm(z) < 1.0 - kBoundaryTol) {
      z = -1.0 / z;
      m = ModularMatrix::s() * m;
      continue;
    }
    break;
  }
  if (std::norm(z) <= 1.0 + kBoundaryTol && z.real() < 0.0) {
    z = -1.0 / z;
    m = ModularMatrix::s() * m;
  }
  return {ModularPoint(z), m};
}

std::optional<ModularMatrix> equivalent(const ModularPoint& tau1, const ModularPoint& tau2,
                                        double tol) {
  const FundamentalReduction r1 = sl2z_reduce(tau1);
  const FundamentalReduction r2 = sl2z_reduce(tau2);
  // Boundary points of the domain are identified by T (vertical edges) and S
  // (unit arc), so a near-boundary point may reduce to either side.
  static const std::array<ModularMatrix, 6> kBoundaryMaps = {
      ModularMatrix::identity(), ModularMatrix::t(1), ModularMatrix::t(-1), ModularMatrix::s(),
      ModularMatrix::t(1) * ModularMatrix::s(), ModularMatrix::t(-1) * ModularMatrix::s()};
  const Complex f1 = r1.tau.tau();
  const Complex f2 = r2.tau.tau();
  const double scale = std::max(1.0, std::abs(f2));
  for (const ModularMatrix& c : kBoundaryMaps) {
    if (std::abs(c.apply(f1) - f2) <= tol * scale) {
      return (r2.gamma.inverse() * c * r1.gamma).normalized();
    }
  }
  return std::nullopt;
}

}  // namespace selfdual
