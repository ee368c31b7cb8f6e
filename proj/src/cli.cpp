#include "selfdual/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "selfdual/catalog.hpp"
#include "selfdual/error.hpp"
#include "selfdual/polarization.hpp"
#include "selfdual/reduction.hpp"
#include "selfdual/refinements.hpp"
#include "selfdual/selftest.hpp"
#include "selfdual/theta.hpp"

namespace selfdual::cli {

namespace {

using json = nlohmann::ordered_json;
using Cell = std::variant<std::monostate, std::int64_t, double, bool, std::string>;

// Bad flag values detected after CLI11 accepted the syntax.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every command produces a flat table. JSON renders a single-row report as an
// object and anything else as an array of objects, so csv and json always
// carry the same cells.
struct Report {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  bool single = false;
};

Report single_row(std::vector<std::pair<std::string, Cell>> fields) {
  Report r;
  r.single = true;
  r.rows.emplace_back();
  for (auto& [k, v] : fields) {
    r.columns.push_back(k);
    r.rows.back().push_back(std::move(v));
  }
  return r;
}

Cell int_cell(std::int64_t v) { return Cell(v); }

json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else {
          return v;
        }
      },
      c);
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return v;
        }
      },
      c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

void emit(const Report& r, OutputFormat format, std::ostream& out) {
  switch (format) {
    case OutputFormat::Json: {
      auto object = [&](const std::vector<Cell>& row) {
        json o = json::object();
        for (std::size_t k = 0; k < r.columns.size(); ++k) o[r.columns[k]] = cell_json(row[k]);
        return o;
      };
      json doc;
      if (r.single) {
        doc = object(r.rows.front());
      } else {
        doc = json::array();
        for (const auto& row : r.rows) doc.push_back(object(row));
      }
      out << doc.dump(2) << '\n';
      break;
    }
    case OutputFormat::Csv: {
      for (std::size_t k = 0; k < r.columns.size(); ++k) out << (k ? "," : "") << csv_field(r.columns[k]);
      out << '\n';
      for (const auto& row : r.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << csv_field(cell_text(row[k]));
        out << '\n';
      }
      break;
    }
    case OutputFormat::Table: {
      std::vector<std::size_t> width(r.columns.size());
      for (std::size_t k = 0; k < r.columns.size(); ++k) width[k] = r.columns[k].size();
      for (const auto& row : r.rows)
        for (std::size_t k = 0; k < row.size(); ++k) width[k] = std::max(width[k], cell_text(row[k]).size());
      auto line = [&](auto&& text_of) {
        std::string s;
        for (std::size_t k = 0; k < r.columns.size(); ++k) {
          std::string t = text_of(k);
          if (k + 1 < r.columns.size()) t.resize(width[k] + 2, ' ');
          s += t;
        }
        s.erase(s.find_last_not_of(' ') + 1);
        out << s << '\n';
      };
      line([&](std::size_t k) { return r.columns[k]; });
      for (const auto& row : r.rows) line([&](std::size_t k) { return cell_text(row[k]); });
      break;
    }
  }
}

// --- argument helpers --------------------------------------------------------

double parse_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a real number: '" + std::string(s) + "'");
  }
  return v;
}

IntMatrix parse_int_matrix(const std::string& text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw UsageError(std::string(what) + " must be a JSON array of integer rows");
  }
  if (!j.is_array()) throw UsageError(std::string(what) + " must be a JSON array of integer rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  IntMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw UsageError(std::string(what) + " must be square");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number_integer()) throw UsageError(std::string(what) + " entries must be integers");
      m(i, k) = v.get<std::int64_t>();
    }
  }
  return m;
}

Eigen::MatrixXd parse_real_matrix(const json& j, const char* what) {
  if (!j.is_array()) throw UsageError(std::string(what) + " must be an array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw UsageError(std::string(what) + " must be square");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw UsageError(std::string(what) + " entries must be numbers");
      m(i, k) = v.get<double>();
    }
  }
  return m;
}

// --omega takes inline JSON or a file holding {"re": [[..]], "im": [[..]]}.
PeriodMatrix parse_omega(const std::string& text) {
  std::string body = text;
  if (text.find('{') == std::string::npos) {
    std::ifstream in(text);
    if (!in) throw UsageError("cannot open period matrix file " + text);
    std::stringstream buf;
    buf << in.rdbuf();
    body = buf.str();
  }
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error&) {
    throw UsageError("period matrix is not valid JSON");
  }
  if (!j.is_object() || !j.contains("re") || !j.contains("im") || j.size() != 2) {
    throw UsageError("period matrix must be an object with keys re and im");
  }
  const Eigen::MatrixXd re = parse_real_matrix(j["re"], "re");
  const Eigen::MatrixXd im = parse_real_matrix(j["im"], "im");
  if (re.rows() != im.rows()) throw UsageError("re and im differ in size");
  return PeriodMatrix::from_parts(re, im);
}

Complex parse_tau(const std::string& text) {
  try {
    return parse_complex(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

Eigen::Vector2d parse_vector2(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("expected 'x,y', got '" + text + "'");
  try {
    return {parse_real(std::string_view(text).substr(0, comma)),
            parse_real(std::string_view(text).substr(comma + 1))};
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::string row_entries(const IntMatrix& m, Eigen::Index i) {
  std::string s;
  for (Eigen::Index k = 0; k < m.cols(); ++k) s += (k ? " " : "") + std::to_string(m(i, k));
  return s;
}

std::string matrix_text(const Eigen::MatrixXcd& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s += i ? ";" : "";
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      const Complex z = m(i, k);
      s += (k ? " " : "") + format_double(z.real()) + (z.imag() < 0 || std::signbit(z.imag()) ? "-" : "+") +
           format_double(std::abs(z.imag())) + "i";
    }
  }
  return s + "]";
}

// --- session -----------------------------------------------------------------

struct Session {
  RunConfig config;
  std::string format_text = "json";
  std::optional<Catalog> catalog;

  const Catalog& cat() {
    if (!catalog) catalog = load_catalogs(config.catalog_paths);
    return *catalog;
  }
};

struct LatticeChoice {
  std::string name;
  std::string gram;
  std::string manifold;
};

void add_lattice_options(CLI::App* sub, LatticeChoice& c, bool allow_manifold) {
  sub->add_option("--lattice,--name", c.name, "catalog lattice name");
  sub->add_option("--gram", c.gram, "Gram matrix as JSON, e.g. [[0,1],[1,0]]");
  if (allow_manifold) sub->add_option("--manifold", c.manifold, "catalog manifold (its intersection form)");
}

IntegralLattice resolve_lattice(Session& s, const LatticeChoice& c) {
  const int given = !c.name.empty() + !c.gram.empty() + !c.manifold.empty();
  if (given != 1) throw UsageError("give exactly one of --lattice, --gram, --manifold");
  if (!c.name.empty()) return s.cat().lattice(c.name);
  if (!c.manifold.empty()) return s.cat().manifold(c.manifold).intersection_form();
  return analyze(parse_int_matrix(c.gram, "--gram"));
}

std::string display_name(const LatticeChoice& c) {
  if (!c.name.empty()) return c.name;
  if (!c.manifold.empty()) return c.manifold;
  return c.gram;
}

Eigen::MatrixXd enumeration_metric(const IntegralLattice& lat) {
  if (lat.signature().minus == 0) return lat.gram().cast<double>();
  return standard_polarization(lat).metric();
}

std::vector<std::pair<std::string, Cell>> theta_fields(const ThetaResult& r) {
  return {{"value_re", r.value.real()},
          {"value_im", r.value.imag()},
          {"tail_bound", r.tail_bound},
          {"terms_used", int_cell(static_cast<std::int64_t>(r.terms_used))}};
}

std::vector<std::pair<std::string, Cell>> matrix_fields(const std::optional<ModularMatrix>& m) {
  if (!m) return {{"a", {}}, {"b", {}}, {"c", {}}, {"d", {}}};
  return {{"a", m->a}, {"b", m->b}, {"c", m->c}, {"d", m->d}};
}

std::vector<std::pair<std::string, Cell>> manifold_fields(const FourManifoldData& m) {
  const DerivedData d = derive(m);
  const WeightPair ct = counterterm_weight(m);
  std::string warnings;
  for (const auto& w : d.warnings) warnings += (warnings.empty() ? "" : "; ") + w;
  return {{"name", m.name()},
          {"b1", int_cell(m.b1())},
          {"b2", int_cell(m.b2())},
          {"b2_plus", int_cell(m.b2_plus())},
          {"b2_minus", int_cell(m.b2_minus())},
          {"spin", m.spin()},
          {"even", m.intersection_form().is_even()},
          {"chi", int_cell(d.chi)},
          {"sigma", int_cell(d.sigma)},
          {"weight_plus", d.weights_chi_sigma.first},
          {"weight_minus", d.weights_chi_sigma.second},
          {"betti_weight_plus", d.weights_betti.first},
          {"betti_weight_minus", d.weights_betti.second},
          {"weights_agree", d.weights_agree},
          {"counterterm_plus", ct.first},
          {"counterterm_minus", ct.second},
          {"duality_group", std::string(to_string(d.duality_group))},
          {"warnings", warnings}};
}

Report rows_from(std::vector<std::vector<std::pair<std::string, Cell>>> records,
                 std::vector<std::string> columns_if_empty) {
  Report r;
  r.columns = std::move(columns_if_empty);
  if (!records.empty()) {
    r.columns.clear();
    for (const auto& [k, v] : records.front()) r.columns.push_back(k);
  }
  for (auto& rec : records) {
    r.rows.emplace_back();
    for (auto& [k, v] : rec) r.rows.back().push_back(std::move(v));
  }
  return r;
}

const char* const kDefaultAutomorphyTaus[] = {"0.15+0.95i", "-0.2+1.1i", "0.3+1.25i", "-0.1+0.85i",
                                              "0.05+1.05i"};

}  // namespace

std::complex<double> parse_complex(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ') s += ch;
  if (s.empty()) throw std::invalid_argument("empty complex number");
  if (s.back() != 'i') return {parse_real(s), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  double re = 0.0;
  std::string im_text = s;
  if (split != std::string::npos) {
    re = parse_real(std::string_view(s).substr(0, split));
    im_text = s.substr(split);
  }
  double im = 0.0;
  if (im_text.empty() || im_text == "+") {
    im = 1.0;
  } else if (im_text == "-") {
    im = -1.0;
  } else {
    im = parse_real(im_text);
  }
  return {re, im};
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Session session;
  CLI::App app{"Lattice theta functions, quadratic refinements and torus reductions", "selfdual"};
  app.require_subcommand(1);
  app.fallthrough();
  std::vector<std::string> catalog_flags;
  app.add_option("--format", session.format_text, "json, csv or table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--catalog", catalog_flags, "catalog JSON file (repeatable)");
  app.add_option("--eps", session.config.precision_eps, "target absolute error")
      ->check(CLI::Validator(
          [](std::string& s) -> std::string {
            try {
              const double v = parse_real(s);
              if (v > 1e-15 && v < 1e-2) return {};
            } catch (const std::invalid_argument&) {
            }
            return "eps must lie in (1e-15, 1e-2)";
          },
          "EPS"));
  app.add_option("--seed", session.config.seed, "seed for randomized sampling");

  std::function<int()> action;
  auto leaf = [&](CLI::App* parent, const char* name, const char* help, std::function<int()> fn) {
    CLI::App* sub = parent->add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&action, fn] { action = fn; });
    return sub;
  };
  auto group = [&](const char* name, const char* help) {
    CLI::App* g = app.add_subcommand(name, help);
    g->require_subcommand(1);
    g->fallthrough();
    return g;
  };
  auto show = [&](const Report& r) {
    emit(r, session.config.output_format, out);
    return 0;
  };
  const double& eps = session.config.precision_eps;

  // lattice ------------------------------------------------------------------
  CLI::App* lattice = group("lattice", "integral lattices");
  leaf(lattice, "list", "catalog lattices", [&] {
    std::vector<std::vector<std::pair<std::string, Cell>>> recs;
    for (const auto& e : session.cat().lattices()) {
      recs.push_back({{"name", e.name},
                      {"rank", int_cell(e.lattice.rank())},
                      {"b_plus", int_cell(e.lattice.signature().plus)},
                      {"b_minus", int_cell(e.lattice.signature().minus)},
                      {"even", e.lattice.is_even()},
                      {"unimodular", e.lattice.is_unimodular()},
                      {"determinant", e.lattice.determinant()}});
    }
    return show(rows_from(std::move(recs), {"name"}));
  });

  LatticeChoice analyze_choice;
  add_lattice_options(leaf(lattice, "analyze", "signature, parity, determinant", [&] {
    const IntegralLattice lat = resolve_lattice(session, analyze_choice);
    return show(single_row({{"name", display_name(analyze_choice)},
                            {"rank", int_cell(lat.rank())},
                            {"b_plus", int_cell(lat.signature().plus)},
                            {"b_minus", int_cell(lat.signature().minus)},
                            {"signature", int_cell(lat.signature().plus - lat.signature().minus)},
                            {"even", lat.is_even()},
                            {"unimodular", lat.is_unimodular()},
                            {"definite", lat.is_definite()},
                            {"determinant", lat.determinant()}}));
  }), analyze_choice, true);

  LatticeChoice dual_choice;
  add_lattice_options(leaf(lattice, "dual", "Gram matrix of the dual lattice", [&] {
    const RationalMatrix d = dual_gram(resolve_lattice(session, dual_choice));
    std::vector<std::vector<std::pair<std::string, Cell>>> recs;
    for (int i = 0; i < d.rows(); ++i) {
      std::string entries;
      for (int k = 0; k < d.cols(); ++k) entries += (k ? " " : "") + d(i, k).str();
      recs.push_back({{"row", int_cell(i)}, {"entries", entries}});
    }
    return show(rows_from(std::move(recs), {"row", "entries"}));
  }), dual_choice, true);

  LatticeChoice enum_choice;
  double enum_bound = 0.0;
  CLI::App* enumerate = leaf(lattice, "enumerate", "lattice vectors below a norm bound", [&] {
    const IntegralLattice lat = resolve_lattice(session, enum_choice);
    std::vector<std::vector<std::pair<std::string, Cell>>> recs;
    for (const LatticeVector& v : collect_by_norm(enumeration_metric(lat), enum_bound)) {
      std::string coords;
      for (int k = 0; k < v.size(); ++k) coords += (k ? " " : "") + std::to_string(v.coords(k));
      const double metric_norm = static_cast<double>(
          (v.coords.cast<double>().transpose() * enumeration_metric(lat) * v.coords.cast<double>())(0, 0));
      recs.push_back({{"coords", coords}, {"norm", metric_norm}, {"form_norm", lat.norm(v)}});
    }
    return show(rows_from(std::move(recs), {"coords", "norm", "form_norm"}));
  });
  add_lattice_options(enumerate, enum_choice, true);
  enumerate->add_option("--bound", enum_bound, "norm bound")->required();

  // theta --------------------------------------------------------------------
  CLI::App* theta = group("theta", "Siegel-Narain and p-form theta functions");
  LatticeChoice eval_choice;
  std::string eval_tau;
  CLI::App* eval = leaf(theta, "eval", "Siegel-Narain theta function", [&] {
    const Polarization pol = standard_polarization(resolve_lattice(session, eval_choice));
    return show(single_row(theta_fields(siegel_narain(pol, ModularPoint(parse_tau(eval_tau)), eps))));
  });
  add_lattice_options(eval, eval_choice, true);
  eval->add_option("--tau", eval_tau, "modular parameter a+bi")->required();

  LatticeChoice pform_choice;
  double pform_t = 1.0;
  CLI::App* pform = leaf(theta, "pform", "sum of exp(-(pi/t)<x,x>) with the standard metric", [&] {
    const Polarization pol = standard_polarization(resolve_lattice(session, pform_choice));
    return show(single_row(theta_fields(pform_theta(pol.metric(), pform_t, eps))));
  });
  add_lattice_options(pform, pform_choice, true);
  pform->add_option("--t", pform_t, "coupling t > 0");

  LatticeChoice period_choice;
  std::string period_tau = "0.1+1i";
  CLI::App* periodicity = leaf(theta, "periodicity", "period of tau -> tau + 1", [&] {
    const IntegralLattice lat = resolve_lattice(session, period_choice);
    const int p = t_periodicity(standard_polarization(lat), ModularPoint(parse_tau(period_tau)), eps);
    return show(single_row({{"name", display_name(period_choice)},
                            {"even", lat.is_even()},
                            {"period", int_cell(p)},
                            {"expected", int_cell(lat.is_even() ? 1 : 2)}}));
  });
  add_lattice_options(periodicity, period_choice, true);
  periodicity->add_option("--tau", period_tau, "base point");

  LatticeChoice auto_choice;
  std::vector<std::string> auto_taus;
  CLI::App* automorphy = leaf(theta, "automorphy", "fit weights of tau -> -1/tau", [&] {
    const IntegralLattice lat = resolve_lattice(session, auto_choice);
    std::vector<ModularPoint> samples;
    if (auto_taus.empty()) {
      for (const char* t : kDefaultAutomorphyTaus) samples.emplace_back(parse_tau(t));
    } else {
      for (const auto& t : auto_taus) samples.emplace_back(parse_tau(t));
    }
    const AutomorphyFit fit = measure_automorphy(standard_polarization(lat), samples, eps);
    return show(single_row({{"w_hol", fit.w_hol},
                            {"w_antihol", fit.w_antihol},
                            {"phase_re", fit.phase.real()},
                            {"phase_im", fit.phase.imag()},
                            {"residual", fit.residual},
                            {"expected_w_hol", lat.signature().plus / 2.0},
                            {"expected_w_antihol", lat.signature().minus / 2.0}}));
  });
  add_lattice_options(automorphy, auto_choice, true);
  automorphy->add_option("--tau", auto_taus, "sample point (repeat, at least 4)");

  LatticeChoice poisson_choice;
  double poisson_t = 1.0;
  CLI::App* poisson = leaf(theta, "poisson", "Poisson summation residual", [&] {
    const IntegralLattice lat = resolve_lattice(session, poisson_choice);
    const double r = poisson_check(lat, standard_polarization(lat).metric(), poisson_t, eps);
    return show(single_row({{"t", poisson_t}, {"residual", r}}));
  });
  add_lattice_options(poisson, poisson_choice, true);
  poisson->add_option("--t", poisson_t, "coupling t > 0");

  // refine -------------------------------------------------------------------
  CLI::App* refine = group("refine", "quadratic refinements and theta constants");
  int genus = 1;
  leaf(refine, "enumerate", "all quadratic refinements of genus g", [&] {
    std::vector<std::vector<std::pair<std::string, Cell>>> recs;
    for (const auto& phi : enumerate_refinements(genus)) {
      recs.push_back({{"a_bits", int_cell(phi.a_bits())},
                      {"b_bits", int_cell(phi.b_bits())},
                      {"arf", int_cell(arf(phi))},
                      {"arf_majority", int_cell(arf_by_majority(phi))}});
    }
    return show(rows_from(std::move(recs), {"a_bits", "b_bits", "arf", "arf_majority"}));
  })->add_option("--genus", genus, "genus g")->required();

  std::string skew_form;
  leaf(refine, "symplectic", "symplectic basis of a unimodular skew form", [&] {
    const IntMatrix u = symplectic_basis(parse_int_matrix(skew_form, "--form"));
    std::vector<std::vector<std::pair<std::string, Cell>>> recs;
    for (Eigen::Index i = 0; i < u.rows(); ++i) recs.push_back({{"row", int_cell(i)}, {"entries", row_entries(u, i)}});
    return show(rows_from(std::move(recs), {"row", "entries"}));
  })->add_option("--form", skew_form, "skew form as JSON")->required();

  std::string omega_text, omega_tau;
  auto period_matrix = [&] {
    if (omega_text.empty() == omega_tau.empty()) throw UsageError("give exactly one of --omega, --tau");
    if (!omega_tau.empty()) {
      return PeriodMatrix((Eigen::MatrixXcd(1, 1) << parse_tau(omega_tau)).finished());
    }
    return parse_omega(omega_text);
  };
  CLI::App* rtheta = leaf(refine, "theta", "theta constants for every characteristic", [&] {
    const PeriodMatrix omega = period_matrix();
    std::vector<std::vector<std::pair<std::string, Cell>>> recs;
    for (const auto& phi : enumerate_refinements(omega.genus())) {
      const ThetaResult th = riemann_theta_constant(phi, omega, eps);
      recs.push_back({{"a_bits", int_cell(phi.a_bits())},
                      {"b_bits", int_cell(phi.b_bits())},
                      {"arf", int_cell(arf(phi))},
                      {"value_re", th.value.real()},
                      {"value_im", th.value.imag()},
                      {"tail_bound", th.tail_bound}});
    }
    return show(rows_from(std::move(recs), {"a_bits"}));
  });
  rtheta->add_option("--omega", omega_text, "period matrix JSON (inline or file)");
  rtheta->add_option("--tau", omega_tau, "genus-1 period a+bi");

  int samples = 8;
  CLI::App* factorize = leaf(refine, "factorize", "calibrate lattice sum against sum |theta|^2", [&] {
    const PeriodMatrix base = period_matrix();
    if (samples < 6) throw UsageError("--samples must be at least 6");
    std::vector<PeriodMatrix> omegas;
    std::vector<double> scales;
    for (int k = 0; k < samples; ++k) {
      const double s = 0.5 * std::pow(8.0, static_cast<double>(k) / (samples - 1));
      scales.push_back(s);
      omegas.push_back(PeriodMatrix::from_parts(base.real_part(), s * base.imag_part()));
    }
    const CalibrationReport report = calibrate_factorization(omegas, eps);
    std::vector<std::vector<std::pair<std::string, Cell>>> recs;
    for (std::size_t k = 0; k < report.samples.size(); ++k) {
      const auto& s = report.samples[k];
      recs.push_back({{"kind", std::string("sample")},
                      {"scale", scales[k]},
                      {"omega", matrix_text(report.omegas[k].omega())},
                      {"det_im", s.det_im},
                      {"lattice_sum", s.lattice_sum},
                      {"holomorphic_sum", s.holomorphic_sum},
                      {"ratio", s.ratio},
                      {"kappa", {}},
                      {"alpha", {}},
                      {"max_residual", {}},
                      {"power_law", {}}});
    }
    recs.push_back({{"kind", std::string("fit")},
                    {"scale", {}},
                    {"omega", {}},
                    {"det_im", {}},
                    {"lattice_sum", {}},
                    {"holomorphic_sum", {}},
                    {"ratio", {}},
                    {"kappa", report.fit.kappa},
                    {"alpha", report.fit.alpha},
                    {"max_residual", report.fit.max_residual},
                    {"power_law", report.fit.normalization_constant_found}});
    return show(rows_from(std::move(recs), {"kind"}));
  });
  factorize->add_option("--omega", omega_text, "base period matrix JSON (inline or file)");
  factorize->add_option("--tau", omega_tau, "genus-1 base period a+bi");
  factorize->add_option("--samples", samples, "number of scalings of Im Omega (>= 6)");

  // manifold -----------------------------------------------------------------
  CLI::App* manifold = group("manifold", "four-manifold catalog");
  leaf(manifold, "list", "catalog manifolds", [&] {
    std::vector<std::vector<std::pair<std::string, Cell>>> recs;
    for (const auto& m : session.cat().manifolds()) recs.push_back(manifold_fields(m));
    return show(rows_from(std::move(recs), {"name"}));
  });
  std::string manifold_name;
  leaf(manifold, "info", "derived data for one manifold", [&] {
    return show(single_row(manifold_fields(session.cat().manifold(manifold_name))));
  })->add_option("--name", manifold_name, "catalog name")->required();

  // reduce -------------------------------------------------------------------
  CLI::App* reduce = group("reduce", "torus reductions and SL(2,Z)");
  double torus_s = 0.0, torus_r = 0.0;
  std::string order = "sprime-first";
  CLI::App* torus = leaf(reduce, "torus", "tau' of a rectangular torus", [&] {
    const ReductionOrder o = order == "sprime-first" ? ReductionOrder::SprimeThenS : ReductionOrder::SThenSprime;
    const ModularPoint tau = reduce_two_step(TorusGeometry(torus_s, torus_r), o);
    return show(single_row({{"order", order}, {"tau_re", tau.tau().real()}, {"tau_im", tau.tau().imag()}}));
  });
  torus->add_option("--S", torus_s, "circumference S")->required();
  torus->add_option("--R", torus_r, "circumference R")->required();
  torus->add_option("--order", order, "sprime-first or s-first")
      ->check(CLI::IsMember({"sprime-first", "s-first"}));

  std::string tau1, tau2;
  double equiv_tol = 1e-9;
  CLI::App* equiv = leaf(reduce, "equiv", "SL(2,Z) equivalence of two points", [&] {
    const auto gamma = equivalent(ModularPoint(parse_tau(tau1)), ModularPoint(parse_tau(tau2)), equiv_tol);
    auto fields = matrix_fields(gamma);
    fields.insert(fields.begin(), {"equivalent", gamma.has_value()});
    return show(single_row(std::move(fields)));
  });
  equiv->add_option("--tau1", tau1, "first point")->required();
  equiv->add_option("--tau2", tau2, "second point")->required();
  equiv->add_option("--tol", equiv_tol, "relative tolerance");

  std::string fund_tau;
  leaf(reduce, "fundamental", "reduce into the standard fundamental domain", [&] {
    const FundamentalReduction r = sl2z_reduce(ModularPoint(parse_tau(fund_tau)));
    auto fields = matrix_fields(r.gamma);
    fields.insert(fields.begin(), {{"tau_re", r.tau.tau().real()}, {"tau_im", r.tau.tau().imag()}});
    return show(single_row(std::move(fields)));
  })->add_option("--tau", fund_tau, "point of the upper half plane")->required();

  std::string v1_text, v2_text;
  CLI::App* planar = leaf(reduce, "lattice", "tau of a planar lattice", [&] {
    const ModularPoint tau = tau_of_lattice(PlanarLattice(parse_vector2(v1_text), parse_vector2(v2_text)));
    return show(single_row({{"tau_re", tau.tau().real()}, {"tau_im", tau.tau().imag()}}));
  });
  planar->add_option("--v1", v1_text, "first generator x,y")->required();
  planar->add_option("--v2", v2_text, "second generator x,y")->required();

  double radius = 0.0, coefficient = kCouplingPerRadius;
  CLI::App* coupling = leaf(reduce, "coupling", "p-form coupling from a circle radius", [&] {
    return show(single_row({{"radius", radius}, {"t", coupling_from_radius(radius, coefficient)}}));
  });
  coupling->add_option("--radius", radius, "radius R")->required();
  coupling->add_option("--coefficient", coefficient, "t / R");

  // selftest -----------------------------------------------------------------
  SelftestOptions st;
  leaf(&app, "selftest", "run the invariant suite", [&] {
    st.seed = session.config.seed;
    st.catalog_paths = session.config.catalog_paths;
    const auto results = run_selftest(st);
    out << format_selftest_report(results);
    for (const auto& r : results)
      if (!r.passed) return 1;
    return 0;
  })->add_option("--only", st.only, "run properties whose name contains this");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    const std::string what = e.what();
    const bool command = dynamic_cast<const CLI::ExtrasError*>(&e) != nullptr ||
                         what.find("ubcommand") != std::string::npos;
    err << "error: cli::" << (command ? "UnknownCommand" : "BadFlag") << ": " << e.what() << '\n';
    return 2;
  }

  session.config.output_format = session.format_text == "csv"     ? OutputFormat::Csv
                                 : session.format_text == "table" ? OutputFormat::Table
                                                                  : OutputFormat::Json;
  session.config.catalog_paths =
      catalog_flags.empty() ? catalog_paths_from_environment() : catalog_flags;

  if (!action) {
    err << "error: cli::UnknownCommand: no command given\n";
    return 2;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: cli::BadFlag: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace selfdual::cli
