// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "selfdual/catalog.hpp"
#include "selfdual/cli.hpp"
#include "selfdual/manifolds.hpp"
#include "selfdual/reduction.hpp"
#include "selfdual/refinements.hpp"
#include "selfdual/theta.hpp"

using namespace selfdual;
using oracle::kPi;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
  std::string first_failure;

  void check(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      first_failure = what;
    }
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

IntMatrix diag_pm() { return (IntMatrix(2, 2) << 1, 0, 0, -1).finished(); }

std::vector<ModularPoint> unit_circle_samples() {
  return {ModularPoint({0.15, 0.95}), ModularPoint({-0.2, 1.1}), ModularPoint({0.3, 1.25}),
          ModularPoint({-0.1, 0.85}), ModularPoint({0.05, 1.05})};
}

Verdict theta_oracle() {
  Verdict v;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.3, 2.0);
  double worst = 0.0;
  const std::pair<const char*, IntMatrix> lats[] = {
      {"Z", identity_gram(1)}, {"Z2", identity_gram(2)}, {"H", hyperbolic_gram()}, {"diag(1,-1)", diag_pm()}};
  for (const auto& [name, g] : lats) {
    const auto pol = standard_polarization(analyze(g));
    const Eigen::MatrixXd form = g.cast<double>();
    const Eigen::MatrixXd metric = oracle::abs_matrix(form);
    for (int t = 0; t < 10; ++t) {
      const Complex tau(ux(rng), uy(rng));
      const Complex sn = siegel_narain(pol, ModularPoint(tau), 1e-13).value;
      const Complex box = oracle::siegel_narain_box(form, metric, tau, 14);
      const double e1 = std::abs(sn - box) / std::abs(box);
      const double pf = pform_theta(pol.metric(), 1.0 / tau.imag(), 1e-13).value.real();
      const double pbox = oracle::gaussian_box(metric, kPi * tau.imag(), 14);
      const double e2 = std::abs(pf - pbox) / pbox;
      worst = std::max({worst, e1, e2});
      v.check(e1 < 1e-10, std::string(name) + " siegel_narain " + sci(e1));
      v.check(e2 < 1e-10, std::string(name) + " pform_theta " + sci(e2));
    }
  }
  v.detail = "40 (lattice, tau) pairs, max relative error " + sci(worst);
  return v;
}

Verdict convention_bridge() {
  Verdict v;
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> uth(-4.0 * kPi, 4.0 * kPi), uinv(0.3, 2.0);
  const IntMatrix grams[] = {identity_gram(1), hyperbolic_gram(), diag_pm(), identity_gram(2)};
  double worst_term = 0.0, worst_sum = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto lat = analyze(grams[t % 4]);
    const auto pol = standard_polarization(lat);
    const double theta = uth(rng);
    const double e2 = 4.0 * kPi / uinv(rng);
    const ModularPoint tau = ModularPoint::from_coupling(theta, e2);
    Complex sum = 0.0;
    for (const LatticeVector& x : collect_by_norm(pol.metric(), 40.0 / tau.tau().imag())) {
      const Projection p = project(pol, x);
      const Complex tau_form = std::exp(Complex(0, kPi) * tau.tau() * p.plus_normsq -
                                        Complex(0, kPi) * std::conj(tau.tau()) * p.minus_normsq);
      const Complex bridge = coupling_form_summand(pol.metric_norm(x), lat.norm(x), theta, e2);
      if (std::abs(tau_form) > 1e-250) {
        worst_term = std::max(worst_term, std::abs(bridge - tau_form) / std::abs(tau_form));
      }
      sum += bridge;
    }
    const Complex sn = siegel_narain(pol, tau, 1e-14).value;
    worst_sum = std::max(worst_sum, std::abs(sum - sn) / std::abs(sn));
  }
  v.check(worst_term < 1e-10, "term-wise " + sci(worst_term));
  v.check(worst_sum < 1e-10, "summed " + sci(worst_sum));
  v.detail = "20 (theta, e^2) points, max term error " + sci(worst_term) + ", sum error " + sci(worst_sum);
  return v;
}

Verdict e8() {
  Verdict v;
  std::size_t roots = 0;
  enumerate_by_norm(e8_gram().cast<double>(), 2.0, [&](std::span<const std::int64_t>, double n) {
    if (std::lround(n) == 2) ++roots;
  });
  v.check(roots == 240, "q^1 coefficient " + std::to_string(roots));
  const AutomorphyFit fit =
      measure_automorphy(standard_polarization(analyze(e8_gram())), unit_circle_samples(), 1e-13);
  v.check(std::abs(fit.w_hol - 4.0) <= 1e-5 && std::abs(fit.w_antihol) <= 1e-5,
          "weights (" + sci(fit.w_hol) + ", " + sci(fit.w_antihol) + ")");
  v.check(fit.residual < 1e-6, "residual " + sci(fit.residual));
  v.detail = "q^1 coefficient " + std::to_string(roots) + ", weights (" + sci(fit.w_hol) + ", " +
             sci(fit.w_antihol) + "), residual " + sci(fit.residual);
  return v;
}

Verdict periodicity() {
  Verdict v;
  const Catalog cat = Catalog::builtin();
  int even = 0, odd = 0;
  auto one = [&](const std::string& name, const IntegralLattice& lat) {
    const bool big = lat.rank() > 10;
    const int p = t_periodicity(standard_polarization(lat), ModularPoint({0.1, big ? 3.0 : 1.0}),
                                big ? 1e-6 : 1e-10);
    v.check(p == (lat.is_even() ? 1 : 2), name + " period " + std::to_string(p));
    (lat.is_even() ? even : odd)++;
  };
  for (const auto& e : cat.lattices()) one(e.name, e.lattice);
  for (const auto& m : cat.manifolds()) one(m.name(), m.intersection_form());
  v.detail = std::to_string(even) + " even forms with period 1, " + std::to_string(odd) +
             " odd forms with period 2";
  return v;
}

Verdict signature_weights() {
  Verdict v;
  const auto samples = unit_circle_samples();
  const auto h = analyze(hyperbolic_gram());
  const auto d = analyze(diag_pm());
  const auto fh = measure_automorphy(standard_polarization(h), samples, 1e-13);
  const auto fd = measure_automorphy(standard_polarization(d), samples, 1e-13);
  const auto fs = measure_automorphy(standard_polarization(direct_sum(h, d)), samples, 1e-13);
  for (const auto& [name, f] : {std::pair{"H", fh}, std::pair{"diag(1,-1)", fd}}) {
    v.check(std::abs(f.w_hol - 0.5) <= 1e-4 && std::abs(f.w_antihol - 0.5) <= 1e-4,
            std::string(name) + " weights (" + sci(f.w_hol) + ", " + sci(f.w_antihol) + ")");
  }
  const double add = std::max(std::abs(fs.w_hol - fh.w_hol - fd.w_hol),
                              std::abs(fs.w_antihol - fh.w_antihol - fd.w_antihol));
  v.check(add <= 1e-4, "additivity defect " + sci(add));
  v.detail = "H (" + sci(fh.w_hol) + ", " + sci(fh.w_antihol) + "), diag(1,-1) (" + sci(fd.w_hol) +
             ", " + sci(fd.w_antihol) + "), additivity defect " + sci(add);
  return v;
}

Verdict poisson() {
  Verdict v;
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> ut(0.5, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const int n = 1 + t % 4;
    const Eigen::MatrixXd m = oracle::random_posdef(rng, n, 0.5);
    const double r = poisson_check(analyze(identity_gram(n)), m, ut(rng), 1e-13);
    worst = std::max(worst, r);
    v.check(r < 1e-9, "residual " + sci(r));
  }
  v.detail = "10 random triples, max residual " + sci(worst);
  return v;
}

Verdict refinement_combinatorics() {
  Verdict v;
  std::mt19937_64 rng(107);
  std::uniform_int_distribution<int> c(-100, 100);
  const int expected_even[] = {3, 10, 36};
  std::string counts;
  for (int g = 1; g <= 3; ++g) {
    const auto all = enumerate_refinements(g);
    v.check(all.size() == (std::size_t{1} << (2 * g)), "count at genus " + std::to_string(g));
    int even = 0;
    for (const auto& phi : all) {
      even += arf(phi) == 0;
      for (int t = 0; t < 200; ++t) {
        std::vector<std::int64_t> x(2 * g), y(2 * g), s(2 * g);
        for (int i = 0; i < 2 * g; ++i) {
          x[i] = c(rng);
          y[i] = c(rng);
          s[i] = x[i] + y[i];
        }
        v.check(phi(s) == (phi(x) + phi(y) + standard_pairing_mod2(x, y)) % 2, "axiom");
      }
    }
    v.check(even == expected_even[g - 1], "Arf-even count " + std::to_string(even));
    counts += (g > 1 ? ", " : "") + std::to_string(even);
  }
  v.detail = "4/16/64 refinements, Arf-even {" + counts + "}, axiom on 200 pairs per refinement";
  return v;
}

Verdict odd_characteristic() {
  Verdict v;
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.3, 3.0);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const PeriodMatrix omega((Eigen::MatrixXcd(1, 1) << Complex(ux(rng), uy(rng))).finished());
    const double a = std::abs(riemann_theta_constant(QuadraticRefinement(1, 1, 1), omega, 1e-13).value);
    worst = std::max(worst, a);
    v.check(a < 1e-12, "|theta[1/2,1/2]| " + sci(a));
  }
  v.detail = "20 random genus-1 period matrices, max |theta[1/2,1/2]| " + sci(worst);
  return v;
}

Verdict factorization(std::string& report) {
  Verdict v;
  std::vector<PeriodMatrix> omegas;
  for (double y : {0.5, 1.0, 2.0, 3.0, 4.0}) omegas.emplace_back((Eigen::MatrixXcd(1, 1) << Complex(0, y)).finished());
  for (Complex tau : {Complex(0.25, 0.8), Complex(-0.4, 1.3), Complex(0.5, 2.2)}) {
    omegas.emplace_back((Eigen::MatrixXcd(1, 1) << tau).finished());
  }
  const CalibrationReport cal = calibrate_factorization(omegas, 1e-13);
  for (const auto& s : cal.samples) v.check(std::isfinite(s.ratio) && s.ratio > 0.0, "non-finite ratio");

  std::vector<CalibrationPoint> planted;
  for (const auto& s : cal.samples) planted.push_back({s.det_im, 2.0 * std::sqrt(s.det_im) * s.holomorphic_sum, s.holomorphic_sum});
  const CalibrationFit fit = fit_normalization(planted);
  v.check(std::abs(fit.kappa - 2.0) <= 1e-9 && std::abs(fit.alpha - 0.5) <= 1e-9,
          "planted fit (" + sci(fit.kappa) + ", " + sci(fit.alpha) + ")");

  std::ostringstream out;
  out << "    measured: kappa=" << cli::format_double(cal.fit.kappa)
      << " alpha=" << cli::format_double(cal.fit.alpha)
      << " max_residual=" << cli::format_double(cal.fit.max_residual)
      << (cal.fit.normalization_constant_found ? " (power law holds)" : " (no single power law)") << '\n';
  for (std::size_t k = 0; k < cal.samples.size(); ++k) {
    const Complex tau = cal.omegas[k].omega()(0, 0);
    out << "    Omega=" << cli::format_double(tau.real()) << "+" << cli::format_double(tau.imag())
        << "i L=" << cli::format_double(cal.samples[k].lattice_sum)
        << " R=" << cli::format_double(cal.samples[k].holomorphic_sum)
        << " L/R=" << cli::format_double(cal.samples[k].ratio) << '\n';
  }
  report = out.str();
  v.detail = "8 finite ratios; planted (2, 1/2) recovered as (" + cli::format_double(fit.kappa) + ", " +
             cli::format_double(fit.alpha) + ")";
  return v;
}

Verdict manifold_weights() {
  Verdict v;
  const Catalog cat = Catalog::builtin();
  struct Row {
    const char* name;
    int chi, sigma;
    double wp, wm;
  };
  for (const Row& r : {Row{"K3", 24, -16, 4, 20}, Row{"CP2", 3, 1, 2, 1}, Row{"T4", 0, 0, 0, 0}}) {
    const DerivedData d = derive(cat.manifold(r.name));
    v.check(d.chi == r.chi && d.sigma == r.sigma && d.weights_chi_sigma == WeightPair(r.wp, r.wm),
            std::string(r.name) + " derived data");
  }
  for (const auto& m : cat.manifolds()) {
    const auto expected = m.intersection_form().is_even() ? DualityGroup::SL2Z : DualityGroup::Gamma0_2;
    v.check(derive(m).duality_group == expected, m.name() + " duality group");
  }
  v.detail = "K3 (24, -16, (4, 20)), CP2 (3, 1, (2, 1)), T4 (0, 0, (0, 0)); duality group of " +
             std::to_string(cat.manifolds().size()) + " manifolds";
  return v;
}

Verdict reduction() {
  Verdict v;
  std::mt19937_64 rng(111);
  std::uniform_real_distribution<double> ul(0.1, 10.0), ux(-2.0, 2.0), uy(0.2, 3.0);
  std::uniform_int_distribution<int> letter(0, 2), length(0, 10);
  for (int t = 0; t < 50; ++t) {
    const TorusGeometry g(ul(rng), ul(rng));
    const ModularPoint a = reduce_two_step(g, ReductionOrder::SprimeThenS);
    const ModularPoint b = reduce_two_step(g, ReductionOrder::SThenSprime);
    v.check(a.tau() == Complex(0.0, g.s_length / g.r_length), "iS/R");
    v.check(b.tau() == Complex(0.0, g.r_length / g.s_length), "iR/S");
    const auto gamma = equivalent(a, b);
    v.check(gamma.has_value() && *gamma == ModularMatrix::s(), "gamma != S");
  }
  for (int t = 0; t < 200; ++t) {
    const ModularPoint tau({ux(rng), uy(rng)});
    ModularMatrix w;
    for (int k = length(rng); k > 0; --k) {
      const int l = letter(rng);
      w = (l == 0 ? ModularMatrix::s() : ModularMatrix::t(l == 1 ? 1 : -1)) * w;
    }
    const ModularPoint image(w.apply(tau.tau()));
    const auto gamma = equivalent(tau, image);
    v.check(gamma.has_value() && gamma->determinant() == 1 &&
                std::abs(gamma->apply(tau.tau()) - image.tau()) < 1e-8 * (1.0 + std::abs(image.tau())),
            "word equivalence");
  }
  v.detail = "50 tori related by S, 200 random words";
  return v;
}

Verdict determinism() {
  Verdict v;
  std::ostringstream a, b, ea, eb;
  const int ca = cli::dispatch({"selftest", "--seed", "0"}, a, ea);
  const int cb = cli::dispatch({"selftest", "--seed", "0"}, b, eb);
  v.check(ca == 0 && cb == 0, "selftest did not pass");
  v.check(a.str() == b.str() && !a.str().empty(), "reports differ");
  v.detail = "two selftest runs, " + std::to_string(a.str().size()) + " identical bytes";
  return v;
}

}  // namespace

int main() {
  std::string factorization_report;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"theta oracle equivalence", theta_oracle},
      {"convention bridge", convention_bridge},
      {"E8 q-expansion and weights", e8},
      {"periodicity and spin", periodicity},
      {"signature-to-weight measurement", signature_weights},
      {"Poisson duality", poisson},
      {"refinement combinatorics", refinement_combinatorics},
      {"odd-characteristic vanishing", odd_characteristic},
      {"factorization calibration", [&] { return factorization(factorization_report); }},
      {"manifold weights", manifold_weights},
      {"reduction duality", reduction},
      {"determinism", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.ok = false;
      v.first_failure = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.check(secs < 60.0, "took longer than 60 s");
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::cout << "AC" << index << (index < 10 ? "  " : " ") << (v.ok ? "PASS " : "FAIL ") << name << ": "
              << (v.ok ? v.detail : v.first_failure) << " [" << timing << "]\n";
    if (index == 9 && !factorization_report.empty()) std::cout << factorization_report;
    if (!v.ok) ++failed;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " acceptance criteria passed\n";
  return failed == 0 ? 0 : 1;
}
