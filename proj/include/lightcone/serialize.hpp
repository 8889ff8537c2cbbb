#pragma once

#include <string>

#include <json.hpp>

#include "lightcone/expansion.hpp"

namespace lce {

using Json = nlohmann::ordered_json;

// Complex entries as [re, im]; matrices as arrays of rows.
Json matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const Json& j);
Json four_vector_to_json(const FourVector& v);
FourVector four_vector_from_json(const Json& j);

// {side, family, x, y, n, terms: [{tag, coeff, provenance, mass_order,
// derivative_order, xi_factors}], truncation}
Json expansion_to_json(const ExpansionResult& r);
ExpansionResult expansion_from_json(const Json& j);

// Single-line dump; floats use shortest round-trip formatting, so output is
// byte-stable for equal inputs.
std::string to_json_line(const ExpansionResult& r);

}  // namespace lce
