#include "lightcone/serialize.hpp"

namespace lce {

Json matrix_to_json(const Eigen::MatrixXcd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXcd matrix_from_json(const Json& j) {
  if (!j.is_array()) throw Error("matrix: expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw Error("matrix: ragged rows");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Json& e = row[static_cast<std::size_t>(k)];
      if (e.is_number()) m(i, k) = e.get<double>();
      else if (e.is_array() && e.size() == 2) m(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
      else throw Error("matrix: entries must be numbers or [re, im] pairs");
    }
  }
  return m;
}

Json four_vector_to_json(const FourVector& v) { return Json::array({v[0], v[1], v[2], v[3]}); }

FourVector four_vector_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw Error("four-vector: expected 4 numbers");
  return FourVector(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

namespace {

const char* family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::p: return "p";
    case KernelFamily::k: return "k";
    case KernelFamily::symbolic: return "C";
  }
  return "?";
}

KernelFamily parse_family(const std::string& s) {
  if (s == "p") return KernelFamily::p;
  if (s == "k") return KernelFamily::k;
  if (s == "C") return KernelFamily::symbolic;
  throw Error("unknown kernel family '" + s + "'");
}

}  // namespace

Json expansion_to_json(const ExpansionResult& r) {
  Json j;
  j["side"] = to_string(r.side);
  j["family"] = family_name(r.family);
  j["x"] = four_vector_to_json(r.x);
  j["y"] = four_vector_to_json(r.y);
  j["n"] = r.n;
  Json terms = Json::array();
  for (const auto& t : r.terms) {
    Json e;
    e["tag"] = t.tag.str();
    e["coeff"] = matrix_to_json(t.coeff);
    e["provenance"] = t.provenance;
    e["mass_order"] = t.mass_order;
    e["derivative_order"] = t.derivative_order;
    e["xi_factors"] = t.xi_factors;
    terms.push_back(std::move(e));
  }
  j["terms"] = std::move(terms);
  Json tr = Json::array();
  for (Truncation t : r.truncation) tr.push_back(to_string(t));
  j["truncation"] = std::move(tr);
  return j;
}

ExpansionResult expansion_from_json(const Json& j) {
  ExpansionResult r;
  const std::string side = j.at("side").get<std::string>();
  if (side != "L" && side != "R") throw Error("unknown side '" + side + "'");
  r.side = side == "L" ? Side::L : Side::R;
  r.family = parse_family(j.at("family").get<std::string>());
  r.x = four_vector_from_json(j.at("x"));
  r.y = four_vector_from_json(j.at("y"));
  r.n = j.at("n").get<int>();
  for (const Json& e : j.at("terms")) {
    ExpansionTerm t;
    t.tag = KernelTag::parse(e.at("tag").get<std::string>());
    t.coeff = matrix_from_json(e.at("coeff"));
    if (t.coeff.rows() != 4 * r.n || t.coeff.cols() != 4 * r.n)
      throw DimensionError("term coefficient does not match n");
    t.provenance = e.at("provenance").get<std::string>();
    t.mass_order = e.value("mass_order", 0);
    t.derivative_order = e.value("derivative_order", 0);
    t.xi_factors = e.value("xi_factors", 0);
    r.terms.push_back(std::move(t));
  }
  for (const Json& t : j.at("truncation")) r.truncation.push_back(parse_truncation(t.get<std::string>()));
  return r;
}

std::string to_json_line(const ExpansionResult& r) { return expansion_to_json(r).dump(); }

}  // namespace lce
