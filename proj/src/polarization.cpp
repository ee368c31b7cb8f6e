#include "selfdual/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace selfdual {

double Polarization::metric_norm(const LatticeVector& x) const {
  if (x.size() != lattice_.rank()) {
    throw Error(Errc::DimensionMismatch, "vector length does not match lattice rank");
  }
  const Eigen::VectorXd v = vielbein_ * x.coords.cast<double>();
  return v.squaredNorm();
}

Polarization make_polarization(const IntegralLattice& lat, const Eigen::MatrixXd& vielbein) {
  const int n = lat.rank();
  if (vielbein.rows() != n || vielbein.cols() != n) {
    throw Error(Errc::DimensionMismatch, "vielbein must be rank x rank");
  }
  if (n > 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(vielbein);
    if (!lu.isInvertible()) throw Error(Errc::SingularVielbein, "vielbein is not invertible");
  }
  Eigen::VectorXd eta(n);
  const Signature sig = lat.signature();
  for (int i = 0; i < n; ++i) eta(i) = i < sig.plus ? 1.0 : -1.0;
  const Eigen::MatrixXd form = vielbein.transpose() * eta.asDiagonal() * vielbein;
  const Eigen::MatrixXd diff = form - lat.gram().cast<double>();
  if (n > 0 && diff.cwiseAbs().maxCoeff() > kVielbeinTolerance) {
    throw Error(Errc::IncompatibleVielbein,
                "E^T eta E differs from the Gram matrix by " +
                    std::to_string(diff.cwiseAbs().maxCoeff()));
  }
  Polarization pol;
  pol.lattice_ = lat;
  pol.vielbein_ = vielbein;
  pol.metric_ = vielbein.transpose() * vielbein;
  pol.metric_ = 0.5 * (pol.metric_ + pol.metric_.transpose());
  return pol;
}

Polarization standard_polarization(const IntegralLattice& lat) {
  const int n = lat.rank();
  if (n == 0) return make_polarization(lat, Eigen::MatrixXd(0, 0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lat.gram().cast<double>());
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const Eigen::MatrixXd& v = es.eigenvectors();

  // Positive eigenvalues first (largest first), then negative ones.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const bool pa = lambda(a) > 0, pb = lambda(b) > 0;
    if (pa != pb) return pa;
    return std::abs(lambda(a)) > std::abs(lambda(b));
  });
  Eigen::MatrixXd e(n, n);
  for (int r = 0; r < n; ++r) {
    const int k = order[static_cast<std::size_t>(r)];
    e.row(r) = std::sqrt(std::abs(lambda(k))) * v.col(k).transpose();
  }
  return make_polarization(lat, e);
}

Projection project(const Polarization& pol, const LatticeVector& x) {
  if (x.size() != pol.lattice().rank()) {
    throw Error(Errc::DimensionMismatch, "vector length does not match lattice rank");
  }
  const Eigen::VectorXd v = pol.vielbein() * x.coords.cast<double>();
  const int bp = pol.lattice().signature().plus;
  Projection p;
  p.plus_normsq = v.head(bp).squaredNorm();
  p.minus_normsq = v.tail(v.size() - bp).squaredNorm();
  return p;
}

PeriodMatrix::PeriodMatrix(Eigen::MatrixXcd omega) : omega_(std::move(omega)) {
  if (omega_.rows() != omega_.cols() || omega_.rows() == 0) {
    throw Error(Errc::InvalidPeriodMatrix, "period matrix must be square with genus >= 1");
  }
  if ((omega_ - omega_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(Errc::InvalidPeriodMatrix, "period matrix is not symmetric");
  }
  // Symmetrize exactly so downstream quadratic forms are symmetric.
  omega_ = 0.5 * (omega_ + omega_.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(omega_.imag());
  if (llt.info() != Eigen::Success) {
    throw Error(Errc::InvalidPeriodMatrix, "imaginary part is not positive definite");
  }
}

PeriodMatrix PeriodMatrix::from_parts(const Eigen::MatrixXd& re, const Eigen::MatrixXd& im) {
  if (re.rows() != im.rows() || re.cols() != im.cols()) {
    throw Error(Errc::InvalidPeriodMatrix, "real and imaginary parts differ in shape");
  }
  Eigen::MatrixXcd omega(re.rows(), re.cols());
  omega.real() = re;
  omega.imag() = im;
  return PeriodMatrix(std::move(omega));
}

Eigen::MatrixXd metric_from_period_matrix(const PeriodMatrix& omega) {
  const int g = omega.genus();
  const Eigen::MatrixXd x = omega.real_part();
  const Eigen::MatrixXd y = omega.imag_part();
  const Eigen::MatrixXd yinv = y.llt().solve(Eigen::MatrixXd::Identity(g, g));
  Eigen::MatrixXd m(2 * g, 2 * g);
  m.topLeftCorner(g, g) = x * yinv * x + y;
  m.topRightCorner(g, g) = x * yinv;
  m.bottomLeftCorner(g, g) = yinv * x;
  m.bottomRightCorner(g, g) = yinv;
  return 0.5 * (m + m.transpose());
}

}  // namespace selfdual
