#pragma once

// Shared summation kernel for lattice Gaussian sums with certified tails.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "selfdual/lattice.hpp"
#include "selfdual/theta.hpp"

namespace selfdual::detail {

// Refuse sums that would visit more than this many lattice points.
inline constexpr double kMaxEstimatedTerms = 5e7;

struct KahanComplex {
  double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;

  void add(Complex z) {
    const double yr = z.real() - cre;
    const double tr = re + yr;
    cre = (tr - re) - yr;
    re = tr;
    const double yi = z.imag() - cim;
    const double ti = im + yi;
    cim = (ti - im) - yi;
    im = ti;
  }
  Complex value() const { return {re, im}; }
};

double estimated_points(const Eigen::MatrixXd& metric, double norm_bound);

// Sums term(coords, norm) over {x : q(x+shift) <= B}, where |term| <=
// exp(-decay * q) is the caller's promise that makes the tail certified.
// Terms are accumulated into norm shells (bins) with compensated summation and
// the shells are added from the largest norm down to the smallest.
template <class Term>
ThetaResult gaussian_sum(const Eigen::MatrixXd& metric, std::span<const double> shift,
                         double decay, double eps, Term&& term) {
  if (!(eps > 0.0)) throw Error(Errc::InvalidArgument, "eps must be positive");
  const Eigen::VectorXd d = gram_schmidt_norms(metric);
  const TruncationPlan plan = plan_truncation(d, decay, 0.5 * eps);
  if (estimated_points(metric, plan.norm_bound) > kMaxEstimatedTerms) {
    throw Error(Errc::BoundTooLarge,
                "truncation radius needs too many lattice points; raise Im tau or eps");
  }

  constexpr int kBins = 4096;
  std::vector<KahanComplex> shells(kBins);
  const double width = plan.norm_bound > 0.0 ? plan.norm_bound / kBins : 1.0;
  auto visit = [&](std::span<const std::int64_t> x, double norm) {
    int bin = static_cast<int>(norm / width);
    if (bin >= kBins) bin = kBins - 1;
    shells[static_cast<std::size_t>(bin)].add(term(x, norm));
  };

  ThetaResult out;
  if (shift.empty()) {
    out.terms_used = enumerate_by_norm(metric, plan.norm_bound, visit);
  } else {
    out.terms_used = enumerate_shifted_by_norm(metric, shift, plan.norm_bound, visit);
  }
  KahanComplex total;
  for (int b = kBins - 1; b >= 0; --b) total.add(shells[static_cast<std::size_t>(b)].value());
  out.value = total.value();
  out.tail_bound = plan.tail_bound;
  return out;
}

// exp(i pi a) with the argument reduced mod 2 first.
inline Complex unit_phase(double a) {
  double r = std::fmod(a, 2.0);
  if (r > 1.0) r -= 2.0;
  if (r <= -1.0) r += 2.0;
  return std::polar(1.0, std::numbers::pi * r);
}

}  // namespace selfdual::detail
