#include "phi4lab/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "phi4lab/errors.h"
#include "phi4lab/grid.h"

namespace phi4lab {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"model", {"dimension", "mass"}},
      {"grid", {"K", "points", "modes", "weights"}},
      {"truncation", {"n_max", "max_basis_dim"}},
      {"chi_b", {"kind", "center", "radius", "sigma", "scale", "table"}},
      {"chi_I", {"kind", "center", "radius", "sigma", "scale", "table"}},
      {"quadrature", {"nodes", "rule"}},
      {"coupling", {"kappa"}},
      {"solver", {"eig_tol", "lin_tol", "max_iter", "krylov_dim", "degeneracy_rel"}},
      {"run", {"seed"}},
      {"epsilon", {"policy", "value"}},
      {"checks", {"random_vectors", "verify_n_max", "pullthrough_tol"}},
      {"output", {"dir", "dump_vectors"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& field, const std::string& raw) {
  const std::string s = trim(raw);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x))
    throw ConfigError(field, "expected a finite number, got '" + raw + "'");
  return x;
}

template <class Int>
Int to_int(const std::string& field, const std::string& raw) {
  const std::string s = trim(raw);
  Int x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(field, "expected an integer, got '" + raw + "'");
  return x;
}

bool to_bool(const std::string& field, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(field, "expected true or false, got '" + raw + "'");
}

// Comma and/or whitespace separated numbers.
std::vector<double> to_list(const std::string& field, const std::string& raw) {
  std::string s = raw;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double(field, tok));
  return out;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt(xs[i]);
  return out;
}

const char* kind_name(CutoffKind k) {
  switch (k) {
    case CutoffKind::indicator: return "indicator";
    case CutoffKind::gaussian: return "gaussian";
    case CutoffKind::tabulated: return "tabulated";
  }
  return "?";
}

CutoffSpec parse_cutoff(const pt::ptree& sec, const std::string& name, const std::string& base_dir) {
  CutoffSpec c;
  if (auto v = sec.get_optional<std::string>("kind")) {
    const std::string k = trim(*v);
    if (k == "indicator")
      c.kind = CutoffKind::indicator;
    else if (k == "gaussian")
      c.kind = CutoffKind::gaussian;
    else if (k == "tabulated")
      c.kind = CutoffKind::tabulated;
    else
      throw ConfigError(name + ".kind", "expected indicator, gaussian or tabulated, got '" + k + "'");
  }
  if (auto v = sec.get_optional<std::string>("center")) c.center = to_list(name + ".center", *v);
  if (auto v = sec.get_optional<std::string>("radius")) c.radius = to_double(name + ".radius", *v);
  if (auto v = sec.get_optional<std::string>("sigma")) c.sigma = to_double(name + ".sigma", *v);
  if (auto v = sec.get_optional<std::string>("scale")) c.scale = to_double(name + ".scale", *v);
  if (auto v = sec.get_optional<std::string>("table")) {
    std::filesystem::path p = trim(*v);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    c.table_path = std::filesystem::absolute(p).lexically_normal().string();
  }
  if (c.kind == CutoffKind::tabulated) {
    if (c.table_path.empty()) throw ConfigError(name + ".table", "required for kind = tabulated");
    try {
      c.table = read_cutoff_table(c.table_path);
    } catch (const FormatError& e) {
      throw ConfigError(name + ".table", e.what());
    }
  }
  return c;
}

void echo_cutoff(std::ostream& out, const std::string& name, const CutoffSpec& c) {
  out << "\n[" << name << "]\n";
  out << "kind = " << kind_name(c.kind) << "\n";
  if (!c.center.empty()) out << "center = " << fmt_list(c.center) << "\n";
  out << "radius = " << fmt(c.radius) << "\n";
  out << "sigma = " << fmt(c.sigma) << "\n";
  out << "scale = " << fmt(c.scale) << "\n";
  if (!c.table_path.empty()) out << "table = " << c.table_path << "\n";
}

void check_cutoff(const CutoffSpec& c, const std::string& name, int d) {
  if (!c.center.empty() && c.center.size() != static_cast<std::size_t>(d))
    throw ConfigError(name + ".center", "needs " + std::to_string(d) + " coordinates");
  if (!(c.radius > 0.0)) throw ConfigError(name + ".radius", "must be > 0");
  if (!(c.sigma > 0.0)) throw ConfigError(name + ".sigma", "must be > 0");
  if (c.kind == CutoffKind::tabulated && c.table.size() < 2)
    throw ConfigError(name + ".table", "needs at least two rows");
}

}  // namespace

void validate(const ModelParams& p) {
  if (p.dimension < 1 || p.dimension > 3) throw ConfigError("model.dimension", "must be 1, 2 or 3");
  if (!(p.mass >= 0.0)) throw ConfigError("model.mass", "must be >= 0");
  if (!p.grid.explicit_modes.empty() || !p.grid.explicit_weights.empty()) {
    if (p.grid.explicit_modes.size() % static_cast<std::size_t>(p.dimension) != 0)
      throw ConfigError("grid.modes", "entry count must be a multiple of the dimension");
    if (p.grid.explicit_weights.size() * static_cast<std::size_t>(p.dimension) != p.grid.explicit_modes.size())
      throw ConfigError("grid.weights", "one weight per mode required");
    for (double w : p.grid.explicit_weights)
      if (!(w > 0.0)) throw ConfigError("grid.weights", "weights must be > 0");
  } else {
    if (!(p.grid.cutoff > 0.0)) throw ConfigError("grid.K", "must be > 0");
    if (p.grid.points_per_axis < 1) throw ConfigError("grid.points", "must be >= 1");
  }
  if (p.n_max < 0) throw ConfigError("truncation.n_max", "must be >= 0");
  if (p.max_basis_dim < 1) throw ConfigError("truncation.max_basis_dim", "must be >= 1");
  check_cutoff(p.chi_b, "chi_b", p.dimension);
  check_cutoff(p.chi_I, "chi_I", p.dimension);
  if (p.chi_I.scale < 0.0) throw ConfigError("chi_I.scale", "spatial cutoff must be nonnegative");
  if (p.chi_I.kind == CutoffKind::tabulated)
    for (const auto& [x, v] : p.chi_I.table)
      if (v < 0.0) throw ConfigError("chi_I.table", "spatial cutoff must be nonnegative");
  if (p.quadrature.nodes_per_axis < 1) throw ConfigError("quadrature.nodes", "must be >= 1");
  if (p.quadrature.rule != "trapezoid" && p.quadrature.rule != "midpoint")
    throw ConfigError("quadrature.rule", "expected trapezoid or midpoint");
  for (double k : p.kappas)
    if (!(k >= 0.0)) throw ConfigError("coupling.kappa", "couplings must be >= 0");
  if (!(p.solver.eig_tol > 0.0)) throw ConfigError("solver.eig_tol", "must be > 0");
  if (!(p.solver.lin_tol > 0.0)) throw ConfigError("solver.lin_tol", "must be > 0");
  if (p.solver.max_iter < 1) throw ConfigError("solver.max_iter", "must be >= 1");
  if (p.solver.krylov_dim < 2) throw ConfigError("solver.krylov_dim", "must be >= 2");
  if (!(p.solver.degeneracy_rel >= 0.0)) throw ConfigError("solver.degeneracy_rel", "must be >= 0");
  if (p.epsilon_policy == EpsilonPolicy::fixed && !(p.epsilon > 0.0))
    throw ConfigError("epsilon.value", "must be > 0 for policy = fixed");
  if (p.checks.random_vectors < 1) throw ConfigError("checks.random_vectors", "must be >= 1");
  if (p.checks.verify_n_max < 0) throw ConfigError("checks.verify_n_max", "must be >= 0");
  if (!(p.checks.pullthrough_tol > 0.0)) throw ConfigError("checks.pullthrough_tol", "must be > 0");
  if (p.output.dir.empty()) throw ConfigError("output.dir", "must not be empty");
}

ModelParams parse_config_string(const std::string& text, const std::string& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  for (const auto& [section, body] : tree) {
    auto it = schema().find(section);
    if (it == schema().end()) {
      if (body.empty()) throw ConfigError(section, "key outside of any section");
      throw ConfigError(section, "unknown section");
    }
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError(section + "." + key, "unknown key");
  }

  ModelParams p;
  auto get = [&](const std::string& path) { return tree.get_optional<std::string>(pt::ptree::path_type(path, '.')); };
  if (auto v = get("model.dimension")) p.dimension = to_int<int>("model.dimension", *v);
  if (auto v = get("model.mass")) p.mass = to_double("model.mass", *v);
  if (auto v = get("grid.K")) p.grid.cutoff = to_double("grid.K", *v);
  if (auto v = get("grid.points")) p.grid.points_per_axis = to_int<int>("grid.points", *v);
  if (auto v = get("grid.modes")) p.grid.explicit_modes = to_list("grid.modes", *v);
  if (auto v = get("grid.weights")) p.grid.explicit_weights = to_list("grid.weights", *v);
  if (auto v = get("truncation.n_max")) p.n_max = to_int<int>("truncation.n_max", *v);
  if (auto v = get("truncation.max_basis_dim")) p.max_basis_dim = to_int<std::size_t>("truncation.max_basis_dim", *v);
  const pt::ptree empty;
  p.chi_b = parse_cutoff(tree.get_child("chi_b", empty), "chi_b", base_dir);
  p.chi_I = parse_cutoff(tree.get_child("chi_I", empty), "chi_I", base_dir);
  if (auto v = get("quadrature.nodes")) p.quadrature.nodes_per_axis = to_int<int>("quadrature.nodes", *v);
  if (auto v = get("quadrature.rule")) p.quadrature.rule = trim(*v);
  if (auto v = get("coupling.kappa")) p.kappas = to_list("coupling.kappa", *v);
  if (auto v = get("solver.eig_tol")) p.solver.eig_tol = to_double("solver.eig_tol", *v);
  if (auto v = get("solver.lin_tol")) p.solver.lin_tol = to_double("solver.lin_tol", *v);
  if (auto v = get("solver.max_iter")) p.solver.max_iter = to_int<int>("solver.max_iter", *v);
  if (auto v = get("solver.krylov_dim")) p.solver.krylov_dim = to_int<int>("solver.krylov_dim", *v);
  if (auto v = get("solver.degeneracy_rel")) p.solver.degeneracy_rel = to_double("solver.degeneracy_rel", *v);
  if (auto v = get("run.seed")) p.seed = to_int<std::uint64_t>("run.seed", *v);
  if (auto v = get("epsilon.policy")) {
    const std::string s = trim(*v);
    if (s == "optimized")
      p.epsilon_policy = EpsilonPolicy::optimized;
    else if (s == "fixed")
      p.epsilon_policy = EpsilonPolicy::fixed;
    else
      throw ConfigError("epsilon.policy", "expected optimized or fixed, got '" + s + "'");
  }
  if (auto v = get("epsilon.value")) p.epsilon = to_double("epsilon.value", *v);
  if (auto v = get("checks.random_vectors")) p.checks.random_vectors = to_int<int>("checks.random_vectors", *v);
  if (auto v = get("checks.verify_n_max")) p.checks.verify_n_max = to_int<int>("checks.verify_n_max", *v);
  if (auto v = get("checks.pullthrough_tol")) p.checks.pullthrough_tol = to_double("checks.pullthrough_tol", *v);
  if (auto v = get("output.dir")) p.output.dir = trim(*v);
  if (auto v = get("output.dump_vectors")) p.output.dump_vectors = to_bool("output.dump_vectors", *v);
  validate(p);
  return p;
}

ModelParams parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config_string(buf.str(), dir.empty() ? "." : dir);
}

std::string echo_config(const ModelParams& p) {
  std::ostringstream out;
  out << "[model]\n";
  out << "dimension = " << p.dimension << "\n";
  out << "mass = " << fmt(p.mass) << "\n";
  out << "\n[grid]\n";
  if (!p.grid.explicit_modes.empty()) {
    out << "modes = " << fmt_list(p.grid.explicit_modes) << "\n";
    out << "weights = " << fmt_list(p.grid.explicit_weights) << "\n";
  }
  out << "K = " << fmt(p.grid.cutoff) << "\n";
  out << "points = " << p.grid.points_per_axis << "\n";
  out << "\n[truncation]\n";
  out << "n_max = " << p.n_max << "\n";
  out << "max_basis_dim = " << p.max_basis_dim << "\n";
  echo_cutoff(out, "chi_b", p.chi_b);
  echo_cutoff(out, "chi_I", p.chi_I);
  out << "\n[quadrature]\n";
  out << "nodes = " << p.quadrature.nodes_per_axis << "\n";
  out << "rule = " << p.quadrature.rule << "\n";
  out << "\n[coupling]\n";
  out << "kappa = " << fmt_list(p.kappas) << "\n";
  out << "\n[solver]\n";
  out << "eig_tol = " << fmt(p.solver.eig_tol) << "\n";
  out << "lin_tol = " << fmt(p.solver.lin_tol) << "\n";
  out << "max_iter = " << p.solver.max_iter << "\n";
  out << "krylov_dim = " << p.solver.krylov_dim << "\n";
  out << "degeneracy_rel = " << fmt(p.solver.degeneracy_rel) << "\n";
  out << "\n[run]\n";
  out << "seed = " << p.seed << "\n";
  out << "\n[epsilon]\n";
  out << "policy = " << (p.epsilon_policy == EpsilonPolicy::fixed ? "fixed" : "optimized") << "\n";
  out << "value = " << fmt(p.epsilon) << "\n";
  out << "\n[checks]\n";
  out << "random_vectors = " << p.checks.random_vectors << "\n";
  out << "verify_n_max = " << p.checks.verify_n_max << "\n";
  out << "pullthrough_tol = " << fmt(p.checks.pullthrough_tol) << "\n";
  out << "\n[output]\n";
  out << "dir = " << p.output.dir << "\n";
  out << "dump_vectors = " << (p.output.dump_vectors ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace phi4lab
