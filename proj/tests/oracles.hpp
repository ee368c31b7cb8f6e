#pragma once

// Slow, independent reference implementations. Nothing here calls into the
// library's summation or enumeration code.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;

inline void box(int n, std::int64_t half, const std::function<void(const Eigen::VectorXd&)>& f) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, static_cast<double>(-half));
  if (n == 0) {
    f(x);
    return;
  }
  for (;;) {
    f(x);
    int k = n - 1;
    while (k >= 0 && x(k) == static_cast<double>(half)) x(k--) = static_cast<double>(-half);
    if (k < 0) return;
    x(k) += 1.0;
  }
}

// |G| = V |Lambda| V^T, the metric of the eigenvector polarization.
inline Eigen::MatrixXd abs_matrix(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  return es.eigenvectors() * es.eigenvalues().cwiseAbs().asDiagonal() * es.eigenvectors().transpose();
}

// sum_x exp(i pi tau x+^2 - i pi conj(tau) x-^2) with
// x+^2 = (<x,x> + (x,x))/2 and x-^2 = (<x,x> - (x,x))/2.
inline Complex siegel_narain_box(const Eigen::MatrixXd& form, const Eigen::MatrixXd& metric,
                                 Complex tau, std::int64_t half) {
  Complex sum = 0.0;
  box(static_cast<int>(form.rows()), half, [&](const Eigen::VectorXd& x) {
    const double q = x.dot(form * x);
    const double m = x.dot(metric * x);
    const double plus = 0.5 * (m + q), minus = 0.5 * (m - q);
    sum += std::exp(Complex(0.0, kPi) * tau * plus - Complex(0.0, kPi) * std::conj(tau) * minus);
  });
  return sum;
}

inline double gaussian_box(const Eigen::MatrixXd& metric, double decay, std::int64_t half) {
  // Smallest terms first to keep the sum accurate.
  std::vector<double> terms;
  box(static_cast<int>(metric.rows()), half,
      [&](const Eigen::VectorXd& x) { terms.push_back(std::exp(-decay * x.dot(metric * x))); });
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

// Jacobi triple products, q = exp(i pi tau).
inline Complex theta3_product(Complex tau) {
  const Complex q = std::exp(Complex(0.0, kPi) * tau);
  Complex p = 1.0;
  for (int m = 1; m < 400; ++m) {
    const Complex q2m = std::pow(q, 2 * m), q2m1 = std::pow(q, 2 * m - 1);
    p *= (1.0 - q2m) * (1.0 + q2m1) * (1.0 + q2m1);
  }
  return p;
}

inline Complex theta4_product(Complex tau) {
  const Complex q = std::exp(Complex(0.0, kPi) * tau);
  Complex p = 1.0;
  for (int m = 1; m < 400; ++m) {
    const Complex q2m = std::pow(q, 2 * m), q2m1 = std::pow(q, 2 * m - 1);
    p *= (1.0 - q2m) * (1.0 - q2m1) * (1.0 - q2m1);
  }
  return p;
}

inline Complex theta2_product(Complex tau) {
  const Complex q = std::exp(Complex(0.0, kPi) * tau);
  Complex p = 2.0 * std::exp(Complex(0.0, kPi / 4.0) * tau);
  for (int m = 1; m < 400; ++m) {
    const Complex q2m = std::pow(q, 2 * m);
    p *= (1.0 - q2m) * (1.0 + q2m) * (1.0 + q2m);
  }
  return p;
}

// theta[a,b](0|Omega) = sum_n exp(i pi (n+a)^T Omega (n+a) + 2 pi i (n+a)^T b).
inline Complex riemann_theta_box(const Eigen::MatrixXcd& omega, const Eigen::VectorXd& a,
                                 const Eigen::VectorXd& b, std::int64_t half) {
  Complex sum = 0.0;
  box(static_cast<int>(omega.rows()), half, [&](const Eigen::VectorXd& n) {
    const Eigen::VectorXcd v = (n + a).cast<Complex>();
    const Complex quad = v.transpose() * omega * v;
    sum += std::exp(Complex(0.0, kPi) * quad + Complex(0.0, 2.0 * kPi) * (n + a).dot(b));
  });
  return sum;
}

// Number of x in Z^n with x^T G x <= bound, by box search.
inline std::size_t count_box(const Eigen::MatrixXd& g, double bound, std::int64_t half) {
  std::size_t c = 0;
  box(static_cast<int>(g.rows()), half, [&](const Eigen::VectorXd& x) {
    if (x.dot(g * x) <= bound + 1e-9) ++c;
  });
  return c;
}

inline int sigma3(int n) {
  int s = 0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) s += d * d * d;
  return s;
}

inline Eigen::MatrixXd random_posdef(std::mt19937_64& rng, int n, double shift = 0.3) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = u(rng);
  Eigen::MatrixXd g = b.transpose() * b + shift * Eigen::MatrixXd::Identity(n, n);
  return 0.5 * (g + g.transpose());
}

inline Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> random_unimodular(
    std::mt19937_64& rng, int n, int steps) {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> u =
      Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n);
  if (n < 2) return u;
  std::uniform_int_distribution<int> pick(0, n - 1), coin(0, 1);
  for (int s = 0; s < steps; ++s) {
    const int i = pick(rng);
    int j = pick(rng);
    if (j == i) j = (i + 1) % n;
    u.col(i) += (coin(rng) ? 1 : -1) * u.col(j);
  }
  return u;
}

// Values frozen from a 30-digit mpmath evaluation of the defining series.
inline constexpr double kTheta3AtI = 1.08643481121330801457531612151;
inline constexpr double kTheta2AtI = 0.913579138156116821407242593401;
inline constexpr double kZ2LatticeSumAtI = 1.18034059901609622604533794056;
inline constexpr double kHolomorphicSumAtI = 2.84959428236424259860819740616;
inline constexpr double kRatioAtI = 0.41421356237309504880168872421;
inline constexpr double kTheta3AtQuarterI = 2.00001394936942483598255871491;

}  // namespace oracle
