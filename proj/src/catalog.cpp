#include "selfdual/catalog.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "builtin_catalog.hpp"

namespace selfdual {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(std::string_view source, const std::string& what) {
  throw Error(Errc::CatalogError, std::string(source) + ": " + what);
}

IntMatrix parse_gram(const json& j, std::string_view source, const std::string& name) {
  if (!j.is_array()) schema_error(source, name + ": gram must be an array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  IntMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      schema_error(source, name + ": gram must be square");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number_integer()) schema_error(source, name + ": gram entries must be integers");
      g(i, k) = v.get<std::int64_t>();
    }
  }
  return g;
}

IntegralLattice parse_lattice(const json& gram, std::string_view source, const std::string& name) {
  try {
    return analyze(parse_gram(gram, source, name));
  } catch (const Error& e) {
    if (e.code() == Errc::CatalogError) throw;
    schema_error(source, name + ": " + e.what());
  }
}

std::string require_name(const json& entry, std::string_view source) {
  if (!entry.is_object()) schema_error(source, "entries must be objects");
  auto it = entry.find("name");
  if (it == entry.end() || !it->is_string() || it->get<std::string>().empty()) {
    schema_error(source, "entry without a non-empty string name");
  }
  return it->get<std::string>();
}

void require_keys(const json& entry, std::initializer_list<const char*> allowed,
                  std::string_view source, const std::string& name) {
  for (auto it = entry.begin(); it != entry.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) schema_error(source, name + ": unexpected key '" + it.key() + "'");
  }
  for (const char* k : allowed) {
    if (!entry.contains(k)) schema_error(source, name + ": missing key '" + k + "'");
  }
}

}  // namespace

std::string_view builtin_catalog_text() { return kBuiltinCatalogJson; }

Catalog Catalog::builtin() {
  return from_json(json::parse(builtin_catalog_text()), "<builtin>");
}

Catalog Catalog::from_json(const json& doc, std::string_view source) {
  if (!doc.is_object()) schema_error(source, "catalog must be a JSON object");
  Catalog cat;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() != "lattices" && it.key() != "manifolds") {
      schema_error(source, "unexpected top-level key '" + it.key() + "'");
    }
    if (!it->is_array()) schema_error(source, it.key() + " must be an array");
  }
  if (doc.contains("lattices")) {
    for (const json& entry : doc["lattices"]) {
      const std::string name = require_name(entry, source);
      require_keys(entry, {"name", "gram"}, source, name);
      Catalog one;
      one.lattices_.push_back({name, parse_lattice(entry["gram"], source, name)});
      cat.merge(one);
    }
  }
  if (doc.contains("manifolds")) {
    for (const json& entry : doc["manifolds"]) {
      const std::string name = require_name(entry, source);
      require_keys(entry, {"name", "b1", "spin", "gram"}, source, name);
      if (!entry["b1"].is_number_integer()) schema_error(source, name + ": b1 must be an integer");
      if (!entry["spin"].is_boolean()) schema_error(source, name + ": spin must be a boolean");
      IntegralLattice form = parse_lattice(entry["gram"], source, name);
      Catalog one;
      try {
        one.manifolds_.emplace_back(name, entry["b1"].get<int>(), std::move(form),
                                    entry["spin"].get<bool>());
      } catch (const Error& e) {
        schema_error(source, e.what());
      }
      cat.merge(one);
    }
  }
  return cat;
}

Catalog Catalog::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::CatalogError, "cannot open catalog file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(Errc::CatalogError, path + ": " + e.what());
  }
  return from_json(doc, path);
}

void Catalog::merge(const Catalog& other) {
  for (const auto& e : other.lattices_) {
    for (const auto& mine : lattices_) {
      if (mine.name == e.name) throw Error(Errc::CatalogError, "duplicate lattice " + e.name);
    }
    lattices_.push_back(e);
  }
  for (const auto& m : other.manifolds_) {
    for (const auto& mine : manifolds_) {
      if (mine.name() == m.name()) throw Error(Errc::CatalogError, "duplicate manifold " + m.name());
    }
    manifolds_.push_back(m);
  }
}

const IntegralLattice& Catalog::lattice(std::string_view name) const {
  for (const auto& e : lattices_)
    if (e.name == name) return e.lattice;
  throw Error(Errc::UnknownEntry, "no lattice named '" + std::string(name) + "' in catalog");
}

const FourManifoldData& Catalog::manifold(std::string_view name) const {
  for (const auto& m : manifolds_)
    if (m.name() == name) return m;
  throw Error(Errc::UnknownEntry, "no manifold named '" + std::string(name) + "' in catalog");
}

std::vector<std::string> catalog_paths_from_environment() {
  std::vector<std::string> out;
  const char* env = std::getenv("SELFDUAL_CATALOG");
  if (env == nullptr) return out;
  std::stringstream ss(env);
  std::string item;
  while (std::getline(ss, item, ':')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Catalog load_catalogs(std::span<const std::string> paths) {
  if (paths.empty()) return Catalog::builtin();
  Catalog cat;
  for (const auto& p : paths) cat.merge(Catalog::from_file(p));
  return cat;
}

}  // namespace selfdual
