#include "selfdual/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "selfdual/catalog.hpp"
#include "selfdual/manifolds.hpp"
#include "selfdual/polarization.hpp"
#include "selfdual/reduction.hpp"
#include "selfdual/refinements.hpp"
#include "selfdual/theta.hpp"

namespace selfdual {

namespace {

constexpr double kPi = std::numbers::pi;

using Rng = std::mt19937_64;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && passed) {
      passed = false;
      detail = what;
    }
  }
};

struct Context {
  const SelftestOptions& options;
  const Catalog* catalog = nullptr;  // null when the catalog failed to load
  std::string catalog_error;
};

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

IntMatrix random_unimodular(Rng& rng, int n, int steps) {
  IntMatrix u = IntMatrix::Identity(n, n);
  if (n < 2) {
    if (n == 1 && uniform_int(rng, 0, 1) == 1) u(0, 0) = -1;
    return u;
  }
  for (int s = 0; s < steps; ++s) {
    const int i = uniform_int(rng, 0, n - 1);
    int j = uniform_int(rng, 0, n - 2);
    if (j >= i) ++j;
    switch (uniform_int(rng, 0, 2)) {
      case 0: u.col(i) += (uniform_int(rng, 0, 1) ? 1 : -1) * u.col(j); break;
      case 1: u.col(i).swap(u.col(j)); break;
      default: u.col(i) = -u.col(i); break;
    }
  }
  return u;
}

Eigen::MatrixXd random_posdef(Rng& rng, int n) {
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = uniform(rng, -1.0, 1.0);
  Eigen::MatrixXd g = b.transpose() * b + 0.3 * Eigen::MatrixXd::Identity(n, n);
  return 0.5 * (g + g.transpose());
}

PeriodMatrix random_period_matrix(Rng& rng, int g) {
  Eigen::MatrixXd x(g, g), b(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      x(i, j) = uniform(rng, -1.0, 1.0);
      b(i, j) = uniform(rng, -0.4, 0.4);
    }
  x = 0.5 * (x + x.transpose()).eval();
  Eigen::MatrixXd y = b.transpose() * b + uniform(rng, 0.6, 1.5) * Eigen::MatrixXd::Identity(g, g);
  return PeriodMatrix::from_parts(x, 0.5 * (y + y.transpose()));
}

// Box summation of f over coordinates with |x_i| <= half.
void box_visit(int n, std::int64_t half, const std::function<void(const IntVector&)>& f) {
  IntVector x = IntVector::Constant(n, -half);
  if (n == 0) {
    f(x);
    return;
  }
  for (;;) {
    f(x);
    int k = n - 1;
    while (k >= 0 && x(k) == half) x(k--) = -half;
    if (k < 0) return;
    ++x(k);
  }
}

Complex box_siegel_narain(const Polarization& pol, Complex tau, std::int64_t half) {
  Complex sum = 0.0;
  box_visit(pol.lattice().rank(), half, [&](const IntVector& x) {
    const Projection p = project(pol, LatticeVector(x));
    sum += std::exp(Complex(0.0, kPi) * tau * p.plus_normsq -
                    Complex(0.0, kPi) * std::conj(tau) * p.minus_normsq);
  });
  return sum;
}

// --- properties ------------------------------------------------------------

Outcome catalog_schema(Context& ctx, Rng&) {
  Outcome o;
  if (ctx.catalog == nullptr) {
    o.require(false, ctx.catalog_error);
    return o;
  }
  o.detail = std::to_string(ctx.catalog->lattices().size()) + " lattices, " +
             std::to_string(ctx.catalog->manifolds().size()) + " manifolds";
  for (const auto& m : ctx.catalog->manifolds()) {
    o.require(!m.spin() || m.intersection_form().is_even(), m.name() + ": spin with odd form");
  }
  return o;
}

Outcome enumeration_completeness(Context&, Rng& rng) {
  Outcome o;
  int trials = 0;
  for (int t = 0; t < 20; ++t) {
    const int n = uniform_int(rng, 2, 3);
    const Eigen::MatrixXd g = random_posdef(rng, n);
    const double bound = uniform(rng, 0.0, 25.0);
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues()(0);
    const auto half = static_cast<std::int64_t>(std::ceil(std::sqrt(bound / lmin)));
    std::set<std::vector<std::int64_t>> brute;
    box_visit(n, half, [&](const IntVector& x) {
      const Eigen::VectorXd y = x.cast<double>();
      if (y.dot(g * y) <= bound) brute.insert(std::vector<std::int64_t>(x.data(), x.data() + n));
    });
    std::vector<std::vector<std::int64_t>> got;
    enumerate_by_norm(g, bound, [&](std::span<const std::int64_t> c, double) {
      got.emplace_back(c.begin(), c.end());
    });
    const std::set<std::vector<std::int64_t>> got_set(got.begin(), got.end());
    o.require(got.size() == got_set.size(), "duplicate vectors emitted");
    o.require(std::is_sorted(got.begin(), got.end()), "emission order is not lexicographic");
    o.require(got_set == brute, "enumeration differs from box search");
    ++trials;
  }
  if (o.passed) o.detail = std::to_string(trials) + " random Gram matrices";
  return o;
}

Outcome signature_invariance(Context& ctx, Rng& rng) {
  Outcome o;
  if (ctx.catalog == nullptr) {
    o.require(false, "catalog unavailable");
    return o;
  }
  int checks = 0;
  for (const auto& e : ctx.catalog->lattices()) {
    for (int t = 0; t < 5; ++t) {
      const IntMatrix u = random_unimodular(rng, e.lattice.rank(), 6);
      const IntegralLattice moved = analyze(u.transpose() * e.lattice.gram() * u);
      o.require(moved.signature() == e.lattice.signature(), e.name + ": signature changed");
      o.require(moved.is_even() == e.lattice.is_even(), e.name + ": evenness changed");
      o.require(std::abs(moved.determinant()) == std::abs(e.lattice.determinant()),
                e.name + ": |det| changed");
      ++checks;
    }
  }
  if (o.passed) o.detail = std::to_string(checks) + " unimodular changes of basis";
  return o;
}

Outcome dual_involution(Context&, Rng& rng) {
  Outcome o;
  int checks = 0;
  while (checks < 20) {
    const int n = uniform_int(rng, 1, 4);
    IntMatrix g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) g(i, j) = g(j, i) = uniform_int(rng, -3, 3);
    if (exact_determinant(g) == 0) continue;
    const IntegralLattice lat = analyze(g);
    o.require(inverse(dual_gram(lat)) == RationalMatrix::from_integer(g), "dual of dual != G");
    ++checks;
  }
  if (o.passed) o.detail = "20 random non-degenerate forms";
  return o;
}

Outcome polarization_consistency(Context& ctx, Rng& rng) {
  Outcome o;
  if (ctx.catalog == nullptr) {
    o.require(false, "catalog unavailable");
    return o;
  }
  double worst = 0.0;
  for (const auto& e : ctx.catalog->lattices()) {
    const Polarization pol = standard_polarization(e.lattice);
    for (int t = 0; t < 100; ++t) {
      IntVector x(e.lattice.rank());
      for (int i = 0; i < x.size(); ++i) x(i) = uniform_int(rng, -6, 6);
      const LatticeVector v(x);
      const Projection p = project(pol, v);
      const double err = std::abs((p.plus_normsq - p.minus_normsq) -
                                  static_cast<double>(e.lattice.norm(v)));
      const double metric = p.plus_normsq + p.minus_normsq;
      worst = std::max(worst, err / (1.0 + metric));
      o.require(err <= 1e-9 * (1.0 + metric), e.name + ": x+^2 - x-^2 != (x,x)");
      o.require(std::abs(metric - pol.metric_norm(v)) <= 1e-9 * (1.0 + metric),
                e.name + ": x+^2 + x-^2 != <x,x>");
    }
  }
  if (o.passed) o.detail = "max scaled error " + sci(worst);
  return o;
}

Outcome period_metric_posdef(Context&, Rng& rng) {
  Outcome o;
  for (int t = 0; t < 50; ++t) {
    const int g = uniform_int(rng, 1, 3);
    const PeriodMatrix omega = random_period_matrix(rng, g);
    const Eigen::MatrixXd m = metric_from_period_matrix(omega);
    o.require(Eigen::LLT<Eigen::MatrixXd>(m).info() == Eigen::Success, "metric not positive definite");
    const double lambda = std::exp(uniform(rng, std::log(0.1), std::log(10.0)));
    const PeriodMatrix scaled =
        PeriodMatrix::from_parts(omega.real_part(), lambda * omega.imag_part());
    const double smallest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                metric_from_period_matrix(scaled)).eigenvalues()(0);
    o.require(smallest > 0.0, "scaled metric degenerate");
  }
  if (o.passed) o.detail = "50 random period matrices";
  return o;
}

Outcome theta_oracle(Context&, Rng& rng) {
  Outcome o;
  const std::pair<const char*, IntMatrix> lats[] = {
      {"Z", identity_gram(1)},
      {"Z2", identity_gram(2)},
      {"H", hyperbolic_gram()},
      {"diag(1,-1)", (IntMatrix(2, 2) << 1, 0, 0, -1).finished()}};
  double worst = 0.0;
  for (const auto& [name, gram] : lats) {
    const Polarization pol = standard_polarization(analyze(gram));
    for (int t = 0; t < 3; ++t) {
      const Complex tau(uniform(rng, -1.0, 1.0), uniform(rng, 0.3, 2.0));
      const Complex got = siegel_narain(pol, ModularPoint(tau), 1e-13).value;
      const Complex want = box_siegel_narain(pol, tau, 14);
      const double rel = std::abs(got - want) / std::abs(want);
      worst = std::max(worst, rel);
      o.require(rel < 1e-10, std::string(name) + ": relative error " + sci(rel));
    }
  }
  if (o.passed) o.detail = "max relative error " + sci(worst);
  return o;
}

Outcome convention_bridge(Context& ctx, Rng& rng) {
  Outcome o;
  const std::pair<const char*, IntMatrix> lats[] = {
      {"Z", identity_gram(1)}, {"H", hyperbolic_gram()}, {"E8", e8_gram()}};
  double worst = 0.0;
  for (const auto& [name, gram] : lats) {
    const IntegralLattice lat = analyze(gram);
    const Polarization pol = standard_polarization(lat);
    const int samples = lat.rank() > 2 ? 2 : 6;
    for (int t = 0; t < samples; ++t) {
      const double theta = uniform(rng, -2.0 * kPi, 2.0 * kPi);
      const double e2 = uniform(rng, 4.0 * kPi / 2.0, 4.0 * kPi / 0.7);
      const ModularPoint tau = ModularPoint::from_coupling(theta, e2);
      const ThetaResult sn = siegel_narain(pol, tau, 1e-13);
      Complex sum = 0.0;
      enumerate_by_norm(pol.metric(), 60.0 / tau.tau().imag(),
                        [&](std::span<const std::int64_t> c, double norm) {
                          IntVector x(static_cast<Eigen::Index>(c.size()));
                          for (std::size_t i = 0; i < c.size(); ++i) x(static_cast<Eigen::Index>(i)) = c[i];
                          sum += coupling_form_summand(norm, lat.norm(LatticeVector(x)), theta, e2);
                        });
      const double rel = std::abs(sum - sn.value) / std::abs(sn.value);
      worst = std::max(worst, rel);
      o.require(rel < 1e-10, std::string(name) + ": bridge mismatch " + sci(rel));
    }
  }
  (void)ctx;
  if (o.passed) o.detail = "max relative error " + sci(worst);
  return o;
}

Outcome certified_tails(Context&, Rng& rng) {
  Outcome o;
  const Polarization pol = standard_polarization(analyze(identity_gram(3)));
  for (int t = 0; t < 5; ++t) {
    const ModularPoint tau(Complex(uniform(rng, -0.5, 0.5), uniform(rng, 0.3, 1.5)));
    double eps = 1e-3;
    ThetaResult prev = siegel_narain(pol, tau, eps);
    for (int k = 0; k < 12; ++k) {
      eps *= 0.5;
      const ThetaResult next = siegel_narain(pol, tau, eps);
      o.require(next.tail_bound <= eps, "tail bound exceeds eps");
      o.require(std::abs(next.value - prev.value) <=
                    prev.tail_bound + next.tail_bound + 1e-14 * std::abs(prev.value),
                "halving eps moved the value beyond the previous tail bound");
      prev = next;
    }
  }
  if (o.passed) o.detail = "5 points, 12 halvings each";
  return o;
}

Outcome e8_q_expansion(Context&, Rng&) {
  Outcome o;
  const IntegralLattice e8 = analyze(e8_gram());
  const Polarization pol = standard_polarization(e8);
  std::size_t roots = 0;
  enumerate_by_norm(e8.gram().cast<double>(), 2.0, [&](std::span<const std::int64_t>, double n) {
    if (n == 2.0) ++roots;
  });
  o.require(roots == 240, "norm-2 count " + std::to_string(roots));
  // Theta_E8 = E4 = 1 + 240 q + 2160 q^2 + ..., every coefficient positive and
  // bounded by 240 * 1.21 n^3, so the q coefficient can be read off at moderate y.
  const double y = 1.5;
  const Complex theta = siegel_narain(pol, ModularPoint(Complex(0.0, y)), 1e-14).value;
  const double q = std::exp(-2.0 * kPi * y);
  const double coeff = (theta.real() - 1.0) / q;
  double tail = 0.0;
  for (int n = 3; n < 60; ++n) tail += 240.0 * 1.21 * n * n * n * std::pow(q, n - 1);
  o.require(std::abs(coeff - 240.0 - 2160.0 * q) <= tail + 1e-8, "q^1 coefficient " + sci(coeff));
  if (o.passed) o.detail = "240 roots; fitted q coefficient " + sci(coeff);
  return o;
}

std::vector<ModularPoint> automorphy_samples() {
  return {ModularPoint(Complex(0.15, 0.95)), ModularPoint(Complex(-0.2, 1.1)),
          ModularPoint(Complex(0.3, 1.25)), ModularPoint(Complex(-0.1, 0.85)),
          ModularPoint(Complex(0.05, 1.05))};
}

Outcome automorphy_weights(Context&, Rng&) {
  Outcome o;
  struct Case {
    const char* name;
    IntMatrix gram;
    double wh, wa;
  };
  const Case cases[] = {{"E8", e8_gram(), 4.0, 0.0},
                        {"H", hyperbolic_gram(), 0.5, 0.5},
                        {"diag(1,-1)", (IntMatrix(2, 2) << 1, 0, 0, -1).finished(), 0.5, 0.5},
                        {"Z2", identity_gram(2), 1.0, 0.0}};
  const auto samples = automorphy_samples();
  std::ostringstream detail;
  for (const Case& c : cases) {
    const AutomorphyFit fit =
        measure_automorphy(standard_polarization(analyze(c.gram)), samples, 1e-12);
    o.require(std::abs(fit.w_hol - c.wh) < 1e-5 && std::abs(fit.w_antihol - c.wa) < 1e-5,
              std::string(c.name) + ": weights (" + sci(fit.w_hol) + ", " + sci(fit.w_antihol) + ")");
    o.require(fit.residual < 1e-6, std::string(c.name) + ": residual " + sci(fit.residual));
    o.require(std::abs(std::abs(fit.phase) - 1.0) < 1e-6, std::string(c.name) + ": |phase| != 1");
  }
  // Additivity: H + diag(1,-1).
  const IntegralLattice a = analyze(hyperbolic_gram());
  const IntegralLattice b = analyze((IntMatrix(2, 2) << 1, 0, 0, -1).finished());
  const auto fa = measure_automorphy(standard_polarization(a), samples, 1e-12);
  const auto fb = measure_automorphy(standard_polarization(b), samples, 1e-12);
  const auto fs = measure_automorphy(standard_polarization(direct_sum(a, b)), samples, 1e-12);
  o.require(std::abs(fs.w_hol - fa.w_hol - fb.w_hol) < 1e-5 &&
                std::abs(fs.w_antihol - fa.w_antihol - fb.w_antihol) < 1e-5,
            "weights not additive under direct sum");
  o.require(fs.residual < 1e-5, "direct-sum residual " + sci(fs.residual));
  if (o.passed) o.detail = "E8, H, diag(1,-1), Z2 and H+diag(1,-1)";
  return o;
}

Outcome periodicity_catalog(Context& ctx, Rng&) {
  Outcome o;
  if (ctx.catalog == nullptr) {
    o.require(false, "catalog unavailable");
    return o;
  }
  int count = 0;
  auto check = [&](const std::string& name, const IntegralLattice& lat, int expected) {
    const double y = lat.rank() > 10 ? 3.0 : 1.0;
    const double eps = lat.rank() > 10 ? 1e-6 : 1e-10;
    const int period = t_periodicity(standard_polarization(lat), ModularPoint(Complex(0.1, y)), eps);
    o.require(period == expected, name + ": period " + std::to_string(period));
    ++count;
  };
  for (const auto& e : ctx.catalog->lattices()) check(e.name, e.lattice, e.lattice.is_even() ? 1 : 2);
  for (const auto& m : ctx.catalog->manifolds()) {
    const DerivedData d = derive(m);
    const int expected = d.duality_group == DualityGroup::SL2Z ? 1 : 2;
    check(m.name(), m.intersection_form(), expected);
  }
  if (o.passed) o.detail = std::to_string(count) + " catalog forms";
  return o;
}

Outcome poisson(Context&, Rng& rng) {
  Outcome o;
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const int n = uniform_int(rng, 1, 3);
    const IntegralLattice lat = analyze(identity_gram(n));
    const Eigen::MatrixXd metric = random_posdef(rng, n) + 0.5 * Eigen::MatrixXd::Identity(n, n);
    const double tt = uniform(rng, 0.5, 2.0);
    const double r = poisson_check(lat, metric, tt, 1e-12);
    worst = std::max(worst, r);
    o.require(r < 1e-9, "residual " + sci(r));
  }
  if (o.passed) o.detail = "max residual " + sci(worst);
  return o;
}

Outcome refinement_axiom(Context&, Rng& rng) {
  Outcome o;
  for (int g = 1; g <= 3; ++g) {
    for (const auto& phi : enumerate_refinements(g)) {
      for (int t = 0; t < 50; ++t) {
        std::vector<std::int64_t> x(2 * g), y(2 * g), s(2 * g);
        for (int i = 0; i < 2 * g; ++i) {
          x[i] = uniform_int(rng, -9, 9);
          y[i] = uniform_int(rng, -9, 9);
          s[i] = x[i] + y[i];
        }
        o.require(phi(s) == (phi(x) + phi(y) + standard_pairing_mod2(x, y)) % 2,
                  "refinement axiom fails at genus " + std::to_string(g));
      }
    }
  }
  if (o.passed) o.detail = "all refinements of genus 1..3, 50 pairs each";
  return o;
}

Outcome arf_counts(Context&, Rng&) {
  Outcome o;
  std::ostringstream detail;
  for (int g = 1; g <= 3; ++g) {
    const auto all = enumerate_refinements(g);
    o.require(all.size() == (std::size_t{1} << (2 * g)), "wrong refinement count");
    int even = 0;
    for (const auto& phi : all) {
      o.require(arf(phi) == arf_by_majority(phi), "closed-form and majority Arf disagree");
      if (arf(phi) == 0) ++even;
    }
    const int expected = (1 << (g - 1)) * ((1 << g) + 1);
    o.require(even == expected, "Arf-even count " + std::to_string(even));
    detail << (g > 1 ? ", " : "") << "g=" << g << ": " << even;
  }
  if (o.passed) o.detail = "Arf-even counts " + detail.str();
  return o;
}

Outcome odd_characteristics(Context&, Rng& rng) {
  Outcome o;
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const int g = uniform_int(rng, 1, 2);
    const PeriodMatrix omega = random_period_matrix(rng, g);
    for (const auto& phi : enumerate_refinements(g)) {
      const ThetaResult th = riemann_theta_constant(phi, omega, 1e-13);
      if (arf(phi) == 1) {
        worst = std::max(worst, std::abs(th.value));
        o.require(std::abs(th.value) < 1e-12, "odd characteristic theta " + sci(std::abs(th.value)));
      }
      // Omega -> Omega + 2B multiplies every summand by exp(2 pi i a^T B a).
      Eigen::MatrixXd shift = Eigen::MatrixXd::Zero(g, g);
      const int i = uniform_int(rng, 0, g - 1), j = uniform_int(rng, 0, g - 1);
      shift(i, j) += 2.0;
      if (i != j) shift(j, i) += 2.0;
      double aba = 0.0;
      for (int r = 0; r < g; ++r)
        for (int c = 0; c < g; ++c) aba += phi.a(r) * 0.5 * shift(r, c) * phi.a(c);
      const PeriodMatrix moved =
          PeriodMatrix::from_parts(omega.real_part() + shift, omega.imag_part());
      const Complex th2 = riemann_theta_constant(phi, moved, 1e-13).value *
                          std::exp(Complex(0.0, -2.0 * kPi * aba));
      o.require(std::abs(th2 - th.value) < 1e-12, "theta(Omega + 2B) != exp(2 pi i a.Ba) theta(Omega)");
    }
  }
  if (o.passed) o.detail = "max |odd theta| " + sci(worst);
  return o;
}

Outcome factorization_calibration(Context&, Rng&) {
  Outcome o;
  std::vector<CalibrationPoint> synthetic;
  for (double y : {0.5, 1.0, 2.0, 3.0, 4.0, 1.5}) {
    const double r = 1.0 + 0.37 * y;
    synthetic.push_back({y, r * 2.0 * std::sqrt(y), r});
  }
  const CalibrationFit planted = fit_normalization(synthetic);
  o.require(std::abs(planted.kappa - 2.0) < 1e-9 && std::abs(planted.alpha - 0.5) < 1e-9,
            "synthetic fit did not recover (2, 1/2)");
  std::vector<PeriodMatrix> omegas;
  for (double y : {0.5, 1.0, 2.0, 3.0, 4.0}) {
    omegas.emplace_back((Eigen::MatrixXcd(1, 1) << Complex(0.0, y)).finished());
  }
  omegas.emplace_back((Eigen::MatrixXcd(1, 1) << Complex(0.3, 1.2)).finished());
  const CalibrationReport report = calibrate_factorization(omegas, 1e-12);
  for (const auto& s : report.samples) o.require(std::isfinite(s.ratio) && s.ratio > 0.0, "ratio not finite");
  if (o.passed) {
    o.detail = "kappa=" + sci(report.fit.kappa) + " alpha=" + sci(report.fit.alpha) +
               " max_residual=" + sci(report.fit.max_residual) +
               (report.fit.normalization_constant_found ? " (power law)" : " (no power law)");
  }
  return o;
}

Outcome manifold_weights(Context& ctx, Rng&) {
  Outcome o;
  if (ctx.catalog == nullptr) {
    o.require(false, "catalog unavailable");
    return o;
  }
  int disagreements = 0;
  for (const auto& m : ctx.catalog->manifolds()) {
    const DerivedData d = derive(m);
    const auto [wp, wm] = d.weights_chi_sigma;
    o.require(wp + wm == d.chi && wp - wm == d.sigma, m.name() + ": weight identities fail");
    const auto c = counterterm_weight(m);
    o.require(c.first + wp == 0.0 && c.second + wm == 0.0, m.name() + ": counterterm");
    o.require((d.duality_group == DualityGroup::SL2Z) == m.intersection_form().is_even(),
              m.name() + ": duality group");
    if (!d.weights_agree) ++disagreements;
  }
  if (o.passed) {
    o.detail = std::to_string(disagreements) + " of " +
               std::to_string(ctx.catalog->manifolds().size()) +
               " entries where the Betti and (chi, sigma) weights differ";
  }
  return o;
}

Outcome novikov_additivity(Context& ctx, Rng&) {
  Outcome o;
  if (ctx.catalog == nullptr) {
    o.require(false, "catalog unavailable");
    return o;
  }
  int pairs = 0;
  for (const auto& a : ctx.catalog->manifolds()) {
    for (const auto& b : ctx.catalog->manifolds()) {
      if (a.b2() + b.b2() > 24) continue;
      const FourManifoldData s = connected_sum(a, b);
      o.require(s.signature() == a.signature() + b.signature(), s.name() + ": sigma not additive");
      o.require(s.euler_characteristic() == a.euler_characteristic() + b.euler_characteristic() - 2,
                s.name() + ": chi");
      ++pairs;
    }
  }
  if (o.passed) o.detail = std::to_string(pairs) + " connected sums";
  return o;
}

Outcome reduction_words(Context&, Rng& rng) {
  Outcome o;
  for (int t = 0; t < 200; ++t) {
    const ModularPoint tau(Complex(uniform(rng, -2.0, 2.0), uniform(rng, 0.2, 3.0)));
    ModularMatrix gamma;
    const int len = uniform_int(rng, 0, 8);
    for (int k = 0; k < len; ++k) {
      switch (uniform_int(rng, 0, 2)) {
        case 0: gamma = ModularMatrix::s() * gamma; break;
        case 1: gamma = ModularMatrix::t(1) * gamma; break;
        default: gamma = ModularMatrix::t(-1) * gamma; break;
      }
    }
    const ModularPoint image(gamma.apply(tau.tau()));
    const auto found = equivalent(tau, image);
    o.require(found.has_value(), "equivalence not detected");
    if (found) {
      o.require(found->determinant() == 1, "gamma not in SL(2,Z)");
      o.require(std::abs(found->apply(tau.tau()) - image.tau()) < 1e-8 * (1.0 + std::abs(image.tau())),
                "gamma does not map tau1 to tau2");
    }
  }
  if (o.passed) o.detail = "200 random words of length <= 8";
  return o;
}

Outcome reduction_two_step(Context&, Rng& rng) {
  Outcome o;
  for (int t = 0; t < 50; ++t) {
    const TorusGeometry g(uniform(rng, 0.1, 10.0), uniform(rng, 0.1, 10.0));
    const ModularPoint a = reduce_two_step(g, ReductionOrder::SprimeThenS);
    const ModularPoint b = reduce_two_step(g, ReductionOrder::SThenSprime);
    o.require(a.tau() == Complex(0.0, g.s_length / g.r_length), "tau' != iS/R");
    o.require(b.tau() == Complex(0.0, g.r_length / g.s_length), "tau' != iR/S");
    const auto gamma = equivalent(a, b);
    o.require(gamma.has_value() && *gamma == ModularMatrix::s(), "orders not related by S");
    const double k = uniform(rng, 0.1, 10.0);
    const TorusGeometry scaled(k * g.s_length, k * g.r_length);
    o.require(std::abs(reduce_two_step(scaled, ReductionOrder::SprimeThenS).tau() - a.tau()) <=
                  1e-15 * std::abs(a.tau()),
              "tau' changed under overall rescaling");
  }
  o.require(coupling_from_radius(0.5) == 1.0 && coupling_from_radius(3.0) == 3.0 * coupling_from_radius(1.0),
            "coupling is not 2R");
  if (o.passed) o.detail = "50 random rectangular tori";
  return o;
}

Outcome lattice_generators(Context&, Rng& rng) {
  Outcome o;
  for (int t = 0; t < 50; ++t) {
    const Eigen::Vector2d v1(uniform(rng, 0.5, 2.0), uniform(rng, -0.5, 0.5));
    const Eigen::Vector2d v2(uniform(rng, -1.0, 1.0), uniform(rng, 0.5, 2.0));
    const IntMatrix u = random_unimodular(rng, 2, 4);
    const Eigen::Vector2d w1 = static_cast<double>(u(0, 0)) * v1 + static_cast<double>(u(1, 0)) * v2;
    const Eigen::Vector2d w2 = static_cast<double>(u(0, 1)) * v1 + static_cast<double>(u(1, 1)) * v2;
    const auto gamma = equivalent(tau_of_lattice(PlanarLattice(v1, v2)),
                                  tau_of_lattice(PlanarLattice(w1, w2)), 1e-8);
    o.require(gamma.has_value(), "tau changed under GL(2,Z) change of generators");
  }
  if (o.passed) o.detail = "50 random changes of generators";
  return o;
}

Outcome symplectic_reduction(Context&, Rng& rng) {
  Outcome o;
  for (int t = 0; t < 20; ++t) {
    const int g = uniform_int(rng, 1, 3);
    const IntMatrix w = random_unimodular(rng, 2 * g, 8);
    const IntMatrix j = w.transpose() * standard_symplectic_form(g) * w;
    const IntMatrix u = symplectic_basis(j);
    o.require(u.transpose() * j * u == standard_symplectic_form(g), "U^T J U is not standard");
    o.require(std::abs(exact_determinant(u).convert_to<double>()) == 1.0, "U not unimodular");
  }
  if (o.passed) o.detail = "20 random principal skew forms";
  return o;
}

struct Property {
  const char* name;
  Outcome (*run)(Context&, Rng&);
};

const Property kProperties[] = {
    {"catalog-schema", catalog_schema},
    {"lattice-enumeration", enumeration_completeness},
    {"lattice-signature-invariance", signature_invariance},
    {"lattice-dual-involution", dual_involution},
    {"polarization-consistency", polarization_consistency},
    {"period-metric-posdef", period_metric_posdef},
    {"theta-oracle", theta_oracle},
    {"theta-convention-bridge", convention_bridge},
    {"theta-certified-tails", certified_tails},
    {"theta-e8-q-expansion", e8_q_expansion},
    {"theta-automorphy-weights", automorphy_weights},
    {"theta-periodicity-catalog", periodicity_catalog},
    {"theta-poisson", poisson},
    {"refinement-axiom", refinement_axiom},
    {"refinement-arf-counts", arf_counts},
    {"refinement-symplectic-basis", symplectic_reduction},
    {"refinement-odd-characteristics", odd_characteristics},
    {"refinement-factorization-calibration", factorization_calibration},
    {"manifold-weights", manifold_weights},
    {"manifold-novikov-additivity", novikov_additivity},
    {"reduction-words", reduction_words},
    {"reduction-two-step", reduction_two_step},
    {"reduction-lattice-generators", lattice_generators},
};

}  // namespace

std::vector<std::string> selftest_property_names() {
  std::vector<std::string> out;
  for (const auto& p : kProperties) out.emplace_back(p.name);
  return out;
}

std::vector<PropertyResult> run_selftest(const SelftestOptions& options) {
  Context ctx{options, nullptr, {}};
  std::optional<Catalog> catalog;
  try {
    catalog = load_catalogs(options.catalog_paths);
    ctx.catalog = &*catalog;
  } catch (const std::exception& e) {
    ctx.catalog_error = e.what();
  }

  std::vector<PropertyResult> results;
  std::uint64_t index = 0;
  for (const auto& p : kProperties) {
    ++index;
    const std::string name = p.name;
    if (!options.only.empty() && name.find(options.only) == std::string::npos) continue;
    // Each property draws from its own stream so filtering never changes results.
    Rng rng(options.seed * 1000003ULL + index);
    PropertyResult r{name, false, {}};
    try {
      Outcome o = p.run(ctx, rng);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_selftest_report(const std::vector<PropertyResult>& results) {
  std::ostringstream out;
  int failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) out << ": " << r.detail;
    out << '\n';
    if (!r.passed) ++failed;
  }
  out << results.size() - static_cast<std::size_t>(failed) << "/" << results.size()
      << " properties passed\n";
  return out.str();
}

}  // namespace selfdual
