#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selfdual/lattice.hpp"

namespace selfdual {

enum class DualityGroup { SL2Z, Gamma0_2 };

std::string_view to_string(DualityGroup g) noexcept;

// Topological data of a closed oriented four-manifold: b1 and the
// intersection form on H^2 modulo torsion.
class FourManifoldData {
 public:
  // Errors: InvalidData (negative b1, or spin with an odd form).
  FourManifoldData(std::string name, int b1, IntegralLattice intersection_form, bool spin);

  const std::string& name() const { return name_; }
  int b1() const { return b1_; }
  const IntegralLattice& intersection_form() const { return form_; }
  bool spin() const { return spin_; }

  int b2() const { return form_.rank(); }
  int b2_plus() const { return form_.signature().plus; }
  int b2_minus() const { return form_.signature().minus; }
  int euler_characteristic() const { return 2 - 2 * b1_ + b2(); }
  int signature() const { return b2_plus() - b2_minus(); }

 private:
  std::string name_;
  int b1_;
  IntegralLattice form_;
  bool spin_;
};

using WeightPair = std::pair<double, double>;

struct DerivedData {
  int chi = 0;
  int sigma = 0;
  WeightPair weights_chi_sigma;  // ((chi + sigma)/2, (chi - sigma)/2)
  WeightPair weights_betti;      // (1 - b1 + b2+/2, 1 - b1 + b2-/2)
  bool weights_agree = false;
  DualityGroup duality_group = DualityGroup::Gamma0_2;
  std::vector<std::string> warnings;  // e.g. Rokhlin violations
};

DerivedData derive(const FourManifoldData& m);

// The c-number weight that brings the total to (0, 0): -weights_chi_sigma.
WeightPair counterterm_weight(const FourManifoldData& m);

// M1 # M2: direct sum of forms, b1 additive, spin iff both are spin.
FourManifoldData connected_sum(const FourManifoldData& a, const FourManifoldData& b);

}  // namespace selfdual
