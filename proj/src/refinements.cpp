#include "selfdual/refinements.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "gaussian_sum.hpp"

namespace selfdual {

IntMatrix standard_symplectic_form(int genus) {
  IntMatrix j = IntMatrix::Zero(2 * genus, 2 * genus);
  j.topRightCorner(genus, genus) = IntMatrix::Identity(genus, genus);
  j.bottomLeftCorner(genus, genus) = -IntMatrix::Identity(genus, genus);
  return j;
}

namespace {

void require_alternating(const IntMatrix& form) {
  if (form.rows() != form.cols() || form.rows() % 2 != 0 || form.rows() == 0) {
    throw Error(Errc::InvalidArgument, "skew form must be square of even positive rank");
  }
  if (form != -form.transpose()) throw Error(Errc::InvalidArgument, "form is not alternating");
  for (Eigen::Index i = 0; i < form.rows(); ++i) {
    if (form(i, i) != 0) throw Error(Errc::InvalidArgument, "form has non-zero diagonal");
  }
}

void require_principal(const IntMatrix& form) {
  const Rational det = exact_determinant(form);
  if (det == 0) throw Error(Errc::Degenerate, "skew form is degenerate");
  if (det != 1) {
    throw Error(Errc::NonPrincipal, "skew form has determinant " + det.str() + ", expected 1");
  }
}

}  // namespace

SkewLattice::SkewLattice(IntMatrix form) : form_(std::move(form)) {
  require_alternating(form_);
  require_principal(form_);
}

IntMatrix symplectic_basis(const IntMatrix& form) {
  require_alternating(form);
  const int n = static_cast<int>(form.rows());
  IntMatrix a = form;
  IntMatrix u = IntMatrix::Identity(n, n);

  auto swap_basis = [&](int i, int j) {
    if (i == j) return;
    u.col(i).swap(u.col(j));
    a.col(i).swap(a.col(j));
    a.row(i).swap(a.row(j));
  };
  // e_k <- e_k + c e_j, applied as a congruence.
  auto add_multiple = [&](int k, int j, std::int64_t c) {
    if (c == 0) return;
    u.col(k) += c * u.col(j);
    a.col(k) += c * a.col(j);
    a.row(k) += c * a.row(j);
  };

  for (int p = 0; p < n; p += 2) {
    for (;;) {
      int bi = -1, bj = -1;
      std::int64_t best = 0;
      for (int i = p; i < n; ++i)
        for (int j = p; j < n; ++j) {
          const std::int64_t v = std::abs(a(i, j));
          if (v != 0 && (best == 0 || v < best)) {
            best = v;
            bi = i;
            bj = j;
          }
        }
      if (best == 0) throw Error(Errc::Degenerate, "skew form is degenerate");
      swap_basis(p, bi);
      if (bj == p) bj = bi;
      swap_basis(p + 1, bj);

      const std::int64_t pivot = a(p, p + 1);
      bool clean = true;
      for (int k = p + 2; k < n; ++k) {
        add_multiple(k, p + 1, -(a(p, k) / pivot));
        add_multiple(k, p, a(p + 1, k) / pivot);
        if (a(p, k) != 0 || a(p + 1, k) != 0) clean = false;
      }
      if (clean) break;
    }
    const std::int64_t pivot = a(p, p + 1);
    if (pivot != 1 && pivot != -1) {
      throw Error(Errc::NonPrincipal,
                  "elementary divisor " + std::to_string(std::abs(pivot)) + " != 1");
    }
    if (pivot == -1) swap_basis(p, p + 1);
  }

  // (e1, f1, e2, f2, ...) -> (e1, ..., eg, f1, ..., fg)
  const int g = n / 2;
  IntMatrix out(n, n);
  for (int i = 0; i < g; ++i) {
    out.col(i) = u.col(2 * i);
    out.col(g + i) = u.col(2 * i + 1);
  }
  return out;
}

QuadraticRefinement::QuadraticRefinement(int genus, std::uint32_t a_bits, std::uint32_t b_bits)
    : genus_(genus), a_bits_(a_bits), b_bits_(b_bits) {
  if (genus < 1 || genus > 16) throw Error(Errc::InvalidArgument, "genus out of range");
  const std::uint32_t mask = (1u << genus) - 1u;
  if ((a_bits & ~mask) != 0 || (b_bits & ~mask) != 0) {
    throw Error(Errc::InvalidArgument, "characteristic bits exceed the genus");
  }
}

int QuadraticRefinement::operator()(std::span<const std::int64_t> x) const {
  if (static_cast<int>(x.size()) != 2 * genus_) {
    throw Error(Errc::DimensionMismatch, "vector length must be 2g");
  }
  std::int64_t acc = 0;
  for (int i = 0; i < genus_; ++i) {
    const std::int64_t m = x[static_cast<std::size_t>(i)];
    const std::int64_t n = x[static_cast<std::size_t>(genus_ + i)];
    acc += (m & 1) * (n & 1);
    if ((a_bits_ >> i) & 1u) acc += m & 1;
    if ((b_bits_ >> i) & 1u) acc += n & 1;
  }
  return static_cast<int>(acc & 1);
}

int standard_pairing_mod2(std::span<const std::int64_t> x, std::span<const std::int64_t> y) {
  if (x.size() != y.size() || x.size() % 2 != 0) {
    throw Error(Errc::DimensionMismatch, "vectors must have equal even length");
  }
  const std::size_t g = x.size() / 2;
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < g; ++i) {
    acc += (x[i] & 1) * (y[g + i] & 1);
    acc += (x[g + i] & 1) * (y[i] & 1);
  }
  return static_cast<int>(acc & 1);
}

std::vector<QuadraticRefinement> enumerate_refinements(int genus) {
  if (genus < 1) throw Error(Errc::InvalidArgument, "genus must be at least 1");
  if (genus > kMaxRefinementGenus) {
    throw Error(Errc::GenusTooLarge, "refinement enumeration is limited to genus 6");
  }
  const std::uint32_t count = 1u << genus;
  std::vector<QuadraticRefinement> out;
  out.reserve(static_cast<std::size_t>(count) * count);
  for (std::uint32_t a = 0; a < count; ++a)
    for (std::uint32_t b = 0; b < count; ++b) out.emplace_back(genus, a, b);
  return out;
}

int arf(const QuadraticRefinement& phi) {
  return std::popcount(phi.a_bits() & phi.b_bits()) & 1;
}

int arf_by_majority(const QuadraticRefinement& phi) {
  const int g = phi.genus();
  const std::uint64_t total = std::uint64_t{1} << (2 * g);
  std::vector<std::int64_t> x(static_cast<std::size_t>(2 * g));
  std::uint64_t zeros = 0;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    for (int i = 0; i < 2 * g; ++i) x[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
    if (phi(x) == 0) ++zeros;
  }
  return 2 * zeros > total ? 0 : 1;
}

ThetaResult riemann_theta_constant(const QuadraticRefinement& phi, const PeriodMatrix& omega,
                                   double eps) {
  const int g = phi.genus();
  if (omega.genus() != g) throw Error(Errc::DimensionMismatch, "genus mismatch");
  if (g > kMaxThetaGenus) throw Error(Errc::GenusTooLarge, "theta constants limited to genus 3");
  const Eigen::MatrixXd x = omega.real_part();
  const Eigen::MatrixXd y = omega.imag_part();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < 0.05) {
    throw Error(Errc::TailBoundFailure, "smallest eigenvalue of Im Omega is below 0.05");
  }

  std::vector<double> shift(static_cast<std::size_t>(g));
  Eigen::VectorXd b(g);
  for (int i = 0; i < g; ++i) {
    shift[static_cast<std::size_t>(i)] = phi.a(i);
    b(i) = phi.b(i);
  }
  Eigen::VectorXd v(g);
  return detail::gaussian_sum(
      y, shift, std::numbers::pi, eps, [&](std::span<const std::int64_t> n, double norm) {
        for (int i = 0; i < g; ++i) {
          v(i) = static_cast<double>(n[static_cast<std::size_t>(i)]) + shift[static_cast<std::size_t>(i)];
        }
        const double phase = v.dot(x * v) + 2.0 * v.dot(b);
        return std::exp(-std::numbers::pi * norm) * detail::unit_phase(phase);
      });
}

FactorizationReport factorization_residual(const PeriodMatrix& omega, double eps) {
  FactorizationReport r;
  r.lattice_sum = pform_theta(metric_from_period_matrix(omega), 1.0, eps).value.real();
  for (const auto& phi : enumerate_refinements(omega.genus())) {
    const Complex th = riemann_theta_constant(phi, omega, eps).value;
    r.theta_constants.push_back(th);
    r.holomorphic_sum += std::norm(th);
  }
  r.ratio = r.lattice_sum / r.holomorphic_sum;
  r.det_im = omega.imag_part().determinant();
  return r;
}

CalibrationFit fit_normalization(std::span<const CalibrationPoint> points) {
  const auto count = static_cast<Eigen::Index>(points.size());
  if (count < 2) throw Error(Errc::FitIllConditioned, "need at least two samples");
  Eigen::MatrixXd design(count, 2);
  Eigen::VectorXd rhs(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const auto& p = points[static_cast<std::size_t>(k)];
    design(k, 0) = 1.0;
    design(k, 1) = std::log(p.det_im);
    rhs(k) = std::log(p.lattice_sum) - std::log(p.holomorphic_sum);
  }
  const double spread = design.col(1).maxCoeff() - design.col(1).minCoeff();
  if (!(spread > 1e-9)) {
    throw Error(Errc::FitIllConditioned, "all samples share the same det Im Omega");
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  CalibrationFit fit;
  fit.kappa = std::exp(coef(0));
  fit.alpha = coef(1);
  fit.max_residual = (design * coef - rhs).cwiseAbs().maxCoeff();
  fit.normalization_constant_found = fit.max_residual < 1e-6;
  return fit;
}

CalibrationReport calibrate_factorization(std::span<const PeriodMatrix> omegas, double eps) {
  if (omegas.size() < 6) throw Error(Errc::InvalidArgument, "need at least 6 period matrices");
  CalibrationReport report;
  std::vector<CalibrationPoint> points;
  for (const auto& omega : omegas) {
    if (omega.genus() > 2) throw Error(Errc::GenusTooLarge, "calibration supports genus 1 and 2");
    report.omegas.push_back(omega);
    report.samples.push_back(factorization_residual(omega, eps));
    const auto& s = report.samples.back();
    points.push_back({s.det_im, s.lattice_sum, s.holomorphic_sum});
  }
  report.fit = fit_normalization(points);
  return report;
}

}  // namespace selfdual
