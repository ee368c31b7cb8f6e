#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "selfdual/lattice.hpp"
#include "selfdual/manifolds.hpp"

namespace selfdual {

struct LatticeEntry {
  std::string name;
  IntegralLattice lattice;
};

// Named lattices and four-manifolds. A catalog file is a JSON object
//   {"lattices":  [{"name": str, "gram": [[int]]}, ...],
//    "manifolds": [{"name": str, "b1": int, "spin": bool, "gram": [[int]]}, ...]}
// where either key may be omitted.
class Catalog {
 public:
  // The catalog compiled into the library (data/catalog.json).
  static Catalog builtin();

  // Errors: CatalogError on any schema or lattice validation failure.
  static Catalog from_json(const nlohmann::json& doc, std::string_view source);
  static Catalog from_file(const std::string& path);

  // Errors: CatalogError on duplicate names.
  void merge(const Catalog& other);

  const std::vector<LatticeEntry>& lattices() const { return lattices_; }
  const std::vector<FourManifoldData>& manifolds() const { return manifolds_; }

  // Errors: UnknownEntry.
  const IntegralLattice& lattice(std::string_view name) const;
  const FourManifoldData& manifold(std::string_view name) const;

 private:
  std::vector<LatticeEntry> lattices_;
  std::vector<FourManifoldData> manifolds_;
};

std::string_view builtin_catalog_text();

// Paths listed in SELFDUAL_CATALOG (colon separated), empty when unset.
std::vector<std::string> catalog_paths_from_environment();

// Loads and merges the given files; the built-in catalog when paths is empty.
Catalog load_catalogs(std::span<const std::string> paths);

}  // namespace selfdual
