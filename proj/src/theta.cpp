#include "selfdual/theta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "gaussian_sum.hpp"

namespace selfdual {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

std::int64_t form_norm(const IntMatrix& gram, std::span<const std::int64_t> x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  std::int64_t acc = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (x[static_cast<std::size_t>(i)] == 0) continue;
    std::int64_t row = 0;
    for (Eigen::Index j = 0; j < n; ++j) row += gram(i, j) * x[static_cast<std::size_t>(j)];
    acc += x[static_cast<std::size_t>(i)] * row;
  }
  return acc;
}

}  // namespace

ModularPoint::ModularPoint(Complex tau) : tau_(tau) {
  if (!std::isfinite(tau.real()) || !std::isfinite(tau.imag()) || !(tau.imag() > 0.0)) {
    throw Error(Errc::InvalidTau, "tau must lie in the upper half-plane");
  }
}

ModularPoint ModularPoint::from_coupling(double theta_angle, double coupling_e2) {
  if (!(coupling_e2 > 0.0)) throw Error(Errc::InvalidTau, "e^2 must be positive");
  return ModularPoint(Complex(theta_angle / (2.0 * kPi), 4.0 * kPi / coupling_e2));
}

double ModularPoint::theta_angle() const { return 2.0 * kPi * tau_.real(); }
double ModularPoint::coupling_e2() const { return 4.0 * kPi / tau_.imag(); }

namespace detail {

double estimated_points(const Eigen::MatrixXd& metric, double norm_bound) {
  const auto n = static_cast<double>(metric.rows());
  if (metric.rows() == 0) return 1.0;
  const double log_det = 2.0 * metric.llt().matrixLLT().diagonal().array().log().sum();
  const double log_vol = 0.5 * n * std::log(kPi) + 0.5 * n * std::log(std::max(norm_bound, 1e-300)) -
                         std::lgamma(0.5 * n + 1.0) - 0.5 * log_det;
  return 1.0 + std::exp(std::min(log_vol, 700.0));
}

}  // namespace detail

TruncationPlan plan_truncation(const Eigen::VectorXd& gram_schmidt_norms, double decay,
                               double target_tail) {
  if (!(decay > 0.0) || !(target_tail > 0.0)) {
    throw Error(Errc::InvalidArgument, "decay and target tail must be positive");
  }
  if (gram_schmidt_norms.size() == 0) return {0.0, 0.0};
  TruncationPlan best{std::numeric_limits<double>::infinity(), 0.0};
  const double log_target = std::log(target_tail);
  for (int k = 1; k < 100; ++k) {
    const double s = k / 100.0;
    double log_f = 0.0;
    for (Eigen::Index i = 0; i < gram_schmidt_norms.size(); ++i) {
      const double di = gram_schmidt_norms(i) * (1.0 - 1e-8);
      log_f += std::log1p(std::sqrt(kPi / (decay * s * di)));
    }
    const double rate = decay * (1.0 - s);
    // The small offset keeps the tail strictly below target after rounding.
    const double bound = std::max(0.0, (log_f - log_target) / rate + 1e-9);
    if (bound < best.norm_bound) {
      best.norm_bound = bound;
      best.tail_bound = std::exp(log_f - rate * bound);
    }
  }
  return best;
}

ThetaResult siegel_narain(const Polarization& pol, const ModularPoint& tau, double eps) {
  const Complex t = tau.tau();
  if (t.imag() < kMinImTau) {
    throw Error(Errc::ImTauTooSmall,
                "Im tau = " + std::to_string(t.imag()) +
                    " is below 0.05; apply a modular transformation first");
  }
  const IntMatrix& gram = pol.lattice().gram();
  const double decay = kPi * t.imag();
  const double re = t.real();
  return detail::gaussian_sum(
      pol.metric(), {}, decay, eps, [&](std::span<const std::int64_t> x, double norm) {
        const auto n = form_norm(gram, x);
        return std::exp(-decay * norm) * detail::unit_phase(re * static_cast<double>(n));
      });
}

ThetaResult pform_theta(const Eigen::MatrixXd& posdef_gram, double t, double eps) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(Errc::InvalidArgument, "t must be positive");
  const double decay = kPi / t;
  return detail::gaussian_sum(posdef_gram, {}, decay, eps,
                              [&](std::span<const std::int64_t>, double norm) {
                                return Complex(std::exp(-decay * norm), 0.0);
                              });
}

Complex coupling_form_summand(double metric_norm, std::int64_t form_norm, double theta_angle,
                              double coupling_e2) {
  const double damping = -(4.0 * kPi * kPi / coupling_e2) * metric_norm;
  return std::exp(Complex(damping, 0.5 * theta_angle * static_cast<double>(form_norm)));
}

int t_periodicity(const Polarization& pol, const ModularPoint& tau, double eps) {
  static constexpr std::array<Complex, 5> kOffsets = {
      Complex(0.0, 0.0), Complex(0.13, 0.0), Complex(-0.21, 0.07), Complex(0.37, 0.11),
      Complex(-0.44, 0.03)};
  auto periodic_under = [&](double shift) {
    for (const Complex& off : kOffsets) {
      const ModularPoint base(tau.tau() + off);
      const Complex a = siegel_narain(pol, base, eps).value;
      const Complex b = siegel_narain(pol, ModularPoint(base.tau() + shift), eps).value;
      if (!(std::abs(b - a) < 10.0 * eps * (1.0 + std::abs(a)))) return false;
    }
    return true;
  };
  if (periodic_under(1.0)) return 1;
  if (periodic_under(2.0)) return 2;
  throw Error(Errc::Inconclusive, "neither tau -> tau+1 nor tau -> tau+2 periodicity verified");
}

AutomorphyFit measure_automorphy(const Polarization& pol, std::span<const ModularPoint> samples,
                                 double eps) {
  if (samples.size() < 4) throw Error(Errc::InvalidArgument, "need at least 4 samples");
  std::vector<Complex> taus;
  taus.reserve(samples.size());
  for (const auto& s : samples) {
    Complex t = s.tau();
    if (t.imag() < 0.3 || t.imag() > 3.0) {
      throw Error(Errc::InvalidArgument, "sample Im tau must lie in [0.3, 3]");
    }
    if (t.real() == 0.0) t += 1e-3;
    taus.push_back(t);
  }
  for (std::size_t i = 0; i < taus.size(); ++i)
    for (std::size_t j = i + 1; j < taus.size(); ++j)
      if (std::abs(taus[i] - taus[j]) < 1e-12) {
        throw Error(Errc::InvalidArgument, "samples must be pairwise distinct");
      }

  double spread = 0.0;
  for (const Complex& t : taus) spread = std::max(spread, std::abs(std::arg(t) - std::arg(taus[0])));
  if (0.5 * pol.lattice().rank() * spread >= kPi) {
    throw Error(Errc::FitIllConditioned,
                "sample arguments spread too widely to unwrap log Theta");
  }

  // rho_j = log Theta(-1/tau_j) - log Theta(tau_j), principal logs.
  std::vector<Complex> rho;
  for (const Complex& t : taus) {
    const Complex direct = siegel_narain(pol, ModularPoint(t), eps).value;
    const Complex inverted = siegel_narain(pol, ModularPoint(-1.0 / t), eps).value;
    if (std::abs(direct) < 1e-8 || std::abs(inverted) < 1e-8) {
      throw Error(Errc::ThetaVanishes, "|Theta| below 1e-8 at a sample");
    }
    rho.push_back(std::log(inverted) - std::log(direct));
  }

  // Real part: (w_hol + w_antihol) ln|tau| + Re log c.
  // Imaginary part: (w_hol - w_antihol) arg tau + Im log c.
  Eigen::Matrix<double, 3, 2> a_re, a_im;
  Eigen::Vector3d b_re, b_im;
  for (int j = 0; j < 3; ++j) {
    const Complex lt = std::log(taus[static_cast<std::size_t>(j)]);
    a_re(j, 0) = lt.real();
    a_re(j, 1) = 1.0;
    a_im(j, 0) = lt.imag();
    a_im(j, 1) = 1.0;
    b_re(j) = rho[static_cast<std::size_t>(j)].real();
    b_im(j) = rho[0].imag() + wrap_angle(rho[static_cast<std::size_t>(j)].imag() - rho[0].imag());
  }
  auto solve = [](const Eigen::Matrix<double, 3, 2>& a, const Eigen::Vector3d& b) {
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(1) > 1e-8 * sv(0))) {
      throw Error(Errc::FitIllConditioned, "samples do not separate the fit parameters");
    }
    return Eigen::Vector2d(svd.solve(b));
  };
  const Eigen::Vector2d re_fit = solve(a_re, b_re);
  const Eigen::Vector2d im_fit = solve(a_im, b_im);

  AutomorphyFit fit;
  fit.w_hol = 0.5 * (re_fit(0) + im_fit(0));
  fit.w_antihol = 0.5 * (re_fit(0) - im_fit(0));
  fit.phase = std::exp(Complex(re_fit(1), im_fit(1)));
  for (std::size_t j = 3; j < taus.size(); ++j) {
    const Complex lt = std::log(taus[j]);
    const double dre = re_fit(0) * lt.real() + re_fit(1) - rho[j].real();
    const double dim = wrap_angle(im_fit(0) * lt.imag() + im_fit(1) - rho[j].imag());
    fit.residual = std::max(fit.residual, std::hypot(dre, dim));
  }
  return fit;
}

double poisson_check(const IntegralLattice& lat, const Eigen::MatrixXd& posdef_gram, double t,
                     double eps) {
  if (posdef_gram.rows() != lat.rank() || posdef_gram.cols() != lat.rank()) {
    throw Error(Errc::DimensionMismatch, "metric size does not match lattice rank");
  }
  const auto n = static_cast<double>(lat.rank());
  Eigen::LLT<Eigen::MatrixXd> llt(posdef_gram);
  if (llt.info() != Eigen::Success) {
    throw Error(Errc::NotPositiveDefinite, "metric is not positive definite");
  }
  Eigen::MatrixXd dual = llt.solve(Eigen::MatrixXd::Identity(lat.rank(), lat.rank()));
  dual = 0.5 * (dual + dual.transpose()).eval();
  const double sqrt_det = llt.matrixLLT().diagonal().prod();

  const double lhs = pform_theta(posdef_gram, t, eps).value.real();
  const double rhs = std::pow(t, 0.5 * n) / sqrt_det * pform_theta(dual, 1.0 / t, eps).value.real();
  return std::abs(lhs - rhs) / std::abs(lhs);
}

}  // namespace selfdual
