#include "selfdual/manifolds.hpp"

namespace selfdual {

std::string_view to_string(DualityGroup g) noexcept {
  return g == DualityGroup::SL2Z ? "SL2Z" : "Gamma0_2";
}

FourManifoldData::FourManifoldData(std::string name, int b1, IntegralLattice intersection_form,
                                   bool spin)
    : name_(std::move(name)), b1_(b1), form_(std::move(intersection_form)), spin_(spin) {
  if (b1_ < 0) throw Error(Errc::InvalidData, name_ + ": b1 must be non-negative");
  if (!form_.is_unimodular()) {
    throw Error(Errc::InvalidData, name_ + ": intersection form of a closed manifold is unimodular");
  }
  if (spin_ && !form_.is_even()) {
    throw Error(Errc::InvalidData, name_ + ": spin manifold with odd intersection form");
  }
}

DerivedData derive(const FourManifoldData& m) {
  DerivedData d;
  d.chi = m.euler_characteristic();
  d.sigma = m.signature();
  d.weights_chi_sigma = {(d.chi + d.sigma) / 2.0, (d.chi - d.sigma) / 2.0};
  d.weights_betti = {1.0 - m.b1() + m.b2_plus() / 2.0, 1.0 - m.b1() + m.b2_minus() / 2.0};
  d.weights_agree = d.weights_chi_sigma == d.weights_betti;
  d.duality_group = m.intersection_form().is_even() ? DualityGroup::SL2Z : DualityGroup::Gamma0_2;
  // Rokhlin: a closed smooth spin 4-manifold has signature divisible by 16.
  if (m.spin() && d.sigma % 16 != 0) {
    d.warnings.push_back("Rokhlin: spin manifold with signature " + std::to_string(d.sigma) +
                         " not divisible by 16");
  }
  return d;
}

WeightPair counterterm_weight(const FourManifoldData& m) {
  const auto w = derive(m).weights_chi_sigma;
  return {0.0 - w.first, 0.0 - w.second};
}

FourManifoldData connected_sum(const FourManifoldData& a, const FourManifoldData& b) {
  return FourManifoldData(a.name() + "#" + b.name(), a.b1() + b.b1(),
                          direct_sum(a.intersection_form(), b.intersection_form()),
                          a.spin() && b.spin());
}

}  // namespace selfdual
