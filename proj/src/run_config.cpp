#include "lightcone/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace lce {

namespace {

struct Ctx {
  std::string origin;

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) const {
    std::ostringstream os;
    os << origin;
    const YAML::Mark m = node.Mark();
    if (m.line >= 0) os << ":" << m.line + 1 << ":" << m.column + 1;
    os << ": " << field << ": " << msg;
    throw ConfigError(os.str());
  }

  void allow_keys(const YAML::Node& node, const std::string& field,
                  const std::set<std::string>& keys) const {
    if (!node.IsMap()) fail(node, field, "expected a mapping");
    for (const auto& kv : node) {
      const std::string k = kv.first.as<std::string>();
      if (!keys.count(k)) fail(kv.first, field, "unknown key '" + k + "'");
    }
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, field, "invalid value '" + node.Scalar() + "'");
    }
  }

  double number(const YAML::Node& node, const std::string& field) const {
    return scalar<double>(node, field);
  }

  FourVector vec4(const YAML::Node& node, const std::string& field) const {
    if (!node.IsSequence() || node.size() != 4) fail(node, field, "expected a list of 4 numbers");
    FourVector v;
    for (int i = 0; i < 4; ++i) v[i] = number(node[i], field);
    return v;
  }

  cplx entry(const YAML::Node& node, const std::string& field) const {
    if (node.IsScalar()) return number(node, field);
    if (node.IsSequence() && node.size() == 2) return {number(node[0], field), number(node[1], field)};
    fail(node, field, "matrix entries must be numbers or [re, im] pairs");
  }

  FlavorMatrix matrix(const YAML::Node& node, const std::string& field, int n) const {
    if (node.IsScalar()) return number(node, field) * FlavorMatrix::Identity(n, n);
    if (!node.IsSequence() || static_cast<int>(node.size()) != n)
      fail(node, field, "expected a scalar or " + std::to_string(n) + " rows");
    FlavorMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
      const YAML::Node row = node[i];
      if (!row.IsSequence() || static_cast<int>(row.size()) != n)
        fail(row, field, "expected " + std::to_string(n) + " entries per row");
      for (int j = 0; j < n; ++j) m(i, j) = entry(row[j], field);
    }
    return m;
  }

  FlavorMatrix hermitian(const YAML::Node& node, const std::string& field, int n) const {
    FlavorMatrix m = matrix(node, field, n);
    if (!is_hermitian(m, 1e-12 * (1.0 + max_abs(m)))) fail(node, field, "matrix must be hermitian");
    return m;
  }

  ScalarProfile profile(const YAML::Node& node, const std::string& field) const {
    allow_keys(node, field, {"kind", "center", "scale", "amplitude", "power"});
    ScalarProfile p;
    if (node["kind"]) {
      const std::string k = scalar<std::string>(node["kind"], field + ".kind");
      if (k == "gaussian") p.kind = ScalarProfile::Kind::gaussian;
      else if (k == "window") p.kind = ScalarProfile::Kind::window;
      else fail(node["kind"], field + ".kind", "expected 'gaussian' or 'window'");
    }
    if (node["center"]) p.center = vec4(node["center"], field + ".center");
    if (!node["scale"]) fail(node, field, "missing 'scale'");
    p.scale = number(node["scale"], field + ".scale");
    if (p.scale <= 0.0) fail(node["scale"], field + ".scale", "must be positive");
    if (node["amplitude"]) p.amplitude = number(node["amplitude"], field + ".amplitude");
    if (node["power"]) {
      p.power = scalar<int>(node["power"], field + ".power");
      if (p.power < 3) fail(node["power"], field + ".power", "must be >= 3 (C^2 profiles)");
    }
    return p;
  }

  std::vector<UnitaryFactor> factors(const YAML::Node& node, const std::string& field, int n) const {
    if (!node.IsSequence()) fail(node, field, "expected a list");
    std::vector<UnitaryFactor> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
      const std::string f = field + "[" + std::to_string(i) + "]";
      allow_keys(node[i], f, {"profile", "generator"});
      if (!node[i]["profile"] || !node[i]["generator"]) fail(node[i], f, "needs 'profile' and 'generator'");
      out.push_back({profile(node[i]["profile"], f + ".profile"),
                     hermitian(node[i]["generator"], f + ".generator", n)});
    }
    return out;
  }

  UnitaryField unitary(const YAML::Node& node, const std::string& field, int n) const {
    allow_keys(node, field, {"factors"});
    if (!node["factors"]) fail(node, field, "missing 'factors'");
    return exp_unitary(n, factors(node["factors"], field + ".factors", n));
  }

  MatrixField matrix_field(const YAML::Node& node, const std::string& field, int n) const {
    allow_keys(node, field, {"terms"});
    if (!node["terms"]) fail(node, field, "missing 'terms'");
    std::vector<MatrixTerm> terms;
    for (const auto& f : factors(node["terms"], field + ".terms", n))
      terms.push_back({f.profile, f.generator});
    return matrix_field_from_terms(n, terms);
  }

  VectorFlavorField potential(const YAML::Node& node, const std::string& field, int n,
                              const YAML::Node& fields) const {
    allow_keys(node, field, {"terms", "pure_gauge"});
    if (node["terms"] && node["pure_gauge"]) fail(node, field, "use either 'terms' or 'pure_gauge'");
    if (node["pure_gauge"]) {
      const YAML::Node pg = node["pure_gauge"];
      if (pg.IsScalar()) {
        const std::string ref = pg.as<std::string>();
        if (ref != "U_L" && ref != "U_R") fail(pg, field + ".pure_gauge", "must name U_L or U_R");
        if (!fields[ref]) fail(pg, field + ".pure_gauge", "references undefined field '" + ref + "'");
        return pure_gauge_potential(unitary(fields[ref], ref, n));
      }
      return pure_gauge_potential(unitary(pg, field + ".pure_gauge", n));
    }
    if (!node["terms"]) fail(node, field, "missing 'terms'");
    const YAML::Node ts = node["terms"];
    if (!ts.IsSequence()) fail(ts, field + ".terms", "expected a list");
    std::vector<PotentialTerm> terms;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const std::string f = field + ".terms[" + std::to_string(i) + "]";
      allow_keys(ts[i], f, {"profile", "polarization", "generator"});
      if (!ts[i]["profile"] || !ts[i]["polarization"] || !ts[i]["generator"])
        fail(ts[i], f, "needs 'profile', 'polarization' and 'generator'");
      terms.push_back({profile(ts[i]["profile"], f + ".profile"), vec4(ts[i]["polarization"], f + ".polarization"),
                       hermitian(ts[i]["generator"], f + ".generator", n)});
    }
    return potential_from_terms(n, terms);
  }
};

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  const Ctx c{origin};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ":" +
                      std::to_string(e.mark.column + 1) + ": syntax: " + e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError(origin + ": empty document");
  c.allow_keys(root, "<root>",
               {"flavors", "mass", "epsilon", "X_L", "X_R", "Y", "fields", "chords", "sides", "families",
                "orders", "quadrature", "output", "verify"});
  RunConfig rc;
  const int n = root["flavors"] ? c.scalar<int>(root["flavors"], "flavors") : 1;
  if (n < 1 || n > 16) c.fail(root["flavors"], "flavors", "must be in [1, 16]");
  rc.cfg = ChiralConfig::free(n, root["mass"] ? c.number(root["mass"], "mass") : 0.0);
  ChiralConfig& cfg = rc.cfg;
  if (root["epsilon"]) {
    const std::string e = c.scalar<std::string>(root["epsilon"], "epsilon");
    if (e == "upper") cfg.epsilon = EpsilonConvention::upper_0123_positive;
    else if (e == "lower") cfg.epsilon = EpsilonConvention::lower_0123_positive;
    else c.fail(root["epsilon"], "epsilon", "expected 'upper' or 'lower'");
  }
  if (root["X_L"]) cfg.X_L = c.matrix(root["X_L"], "X_L", n);
  if (root["X_R"]) cfg.X_R = c.matrix(root["X_R"], "X_R", n);
  if (root["Y"]) cfg.Y = c.hermitian(root["Y"], "Y", n);

  if (const YAML::Node f = root["fields"]) {
    c.allow_keys(f, "fields", {"A_L", "A_R", "U_L", "U_R", "Xi", "Phi"});
    if (f["U_L"]) cfg.U_L = c.unitary(f["U_L"], "fields.U_L", n);
    if (f["U_R"]) cfg.U_R = c.unitary(f["U_R"], "fields.U_R", n);
    if (f["A_L"]) cfg.A_L = c.potential(f["A_L"], "fields.A_L", n, f);
    if (f["A_R"]) cfg.A_R = c.potential(f["A_R"], "fields.A_R", n, f);
    if (f["Xi"]) cfg.Xi = c.matrix_field(f["Xi"], "fields.Xi", n);
    if (f["Phi"]) cfg.Phi = c.matrix_field(f["Phi"], "fields.Phi", n);
  }

  if (const YAML::Node ch = root["chords"]) {
    if (!ch.IsSequence()) c.fail(ch, "chords", "expected a list");
    for (std::size_t i = 0; i < ch.size(); ++i) {
      const std::string f = "chords[" + std::to_string(i) + "]";
      c.allow_keys(ch[i], f, {"x", "y"});
      if (!ch[i]["x"] || !ch[i]["y"]) c.fail(ch[i], f, "needs 'x' and 'y'");
      Chord chord{c.vec4(ch[i]["x"], f + ".x"), c.vec4(ch[i]["y"], f + ".y")};
      if (chord.x == chord.y) c.fail(ch[i], f, "x and y coincide");
      rc.chords.push_back(chord);
    }
  }
  if (const YAML::Node s = root["sides"]) {
    if (!s.IsSequence() || s.size() == 0) c.fail(s, "sides", "expected a non-empty list");
    rc.sides.clear();
    for (const auto& e : s) {
      const std::string v = c.scalar<std::string>(e, "sides");
      if (v == "L") rc.sides.push_back(Side::L);
      else if (v == "R") rc.sides.push_back(Side::R);
      else c.fail(e, "sides", "expected 'L' or 'R'");
    }
  }
  if (const YAML::Node fam = root["families"]) {
    if (!fam.IsSequence() || fam.size() == 0) c.fail(fam, "families", "expected a non-empty list");
    rc.families.clear();
    for (const auto& e : fam) {
      const std::string v = c.scalar<std::string>(e, "families");
      if (v == "p") rc.families.push_back(KernelFamily::p);
      else if (v == "k") rc.families.push_back(KernelFamily::k);
      else c.fail(e, "families", "expected 'p' or 'k'");
    }
  }
  if (const YAML::Node o = root["orders"]) {
    c.allow_keys(o, "orders", {"first", "mass2"});
    if (o["first"]) rc.first_order = c.scalar<bool>(o["first"], "orders.first");
    if (o["mass2"]) rc.mass2 = c.scalar<bool>(o["mass2"], "orders.mass2");
  }
  if (const YAML::Node q = root["quadrature"]) {
    c.allow_keys(q, "quadrature", {"rel_tol", "abs_tol", "max_subdivisions", "parallel"});
    if (q["rel_tol"]) rc.quadrature.rel_tol = c.number(q["rel_tol"], "quadrature.rel_tol");
    if (q["abs_tol"]) rc.quadrature.abs_tol = c.number(q["abs_tol"], "quadrature.abs_tol");
    if (q["max_subdivisions"])
      rc.quadrature.max_subdivisions = c.scalar<int>(q["max_subdivisions"], "quadrature.max_subdivisions");
    if (q["parallel"]) rc.quadrature.parallel = c.scalar<bool>(q["parallel"], "quadrature.parallel");
    try {
      rc.quadrature.validate();
    } catch (const Error& e) {
      c.fail(q, "quadrature", e.what());
    }
  }
  if (const YAML::Node o = root["output"]) {
    c.allow_keys(o, "output", {"dir", "csv", "lambda_grid"});
    if (o["dir"]) rc.output.dir = c.scalar<std::string>(o["dir"], "output.dir");
    if (o["csv"]) rc.output.csv = c.scalar<bool>(o["csv"], "output.csv");
    if (o["lambda_grid"]) {
      rc.output.lambda_grid = c.scalar<int>(o["lambda_grid"], "output.lambda_grid");
      if (rc.output.lambda_grid < 1) c.fail(o["lambda_grid"], "output.lambda_grid", "must be >= 1");
    }
  }
  if (const YAML::Node v = root["verify"]) {
    c.allow_keys(v, "verify", {"seed", "random_configs", "texp_chords"});
    if (v["seed"]) rc.verify.seed = c.scalar<std::uint64_t>(v["seed"], "verify.seed");
    if (v["random_configs"]) {
      rc.verify.random_configs = c.scalar<int>(v["random_configs"], "verify.random_configs");
      if (rc.verify.random_configs < 1) c.fail(v["random_configs"], "verify.random_configs", "must be >= 1");
    }
    if (v["texp_chords"]) {
      rc.verify.texp_chords = c.scalar<int>(v["texp_chords"], "verify.texp_chords");
      if (rc.verify.texp_chords < 1) c.fail(v["texp_chords"], "verify.texp_chords", "must be >= 1");
    }
  }
  if (rc.mass2 && (!cfg.A_L.is_trivial() || !cfg.A_R.is_trivial()))
    c.fail(root["orders"], "orders.mass2", "m^2 terms require A_L = A_R = 0");
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path);
}

}  // namespace lce
