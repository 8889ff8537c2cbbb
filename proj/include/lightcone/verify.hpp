#pragma once

#include <string>
#include <vector>

#include "lightcone/run_config.hpp"
#include "lightcone/serialize.hpp"

namespace lce {

struct Check {
  std::string group;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::vector<Check> checks;
  double seconds = 0.0;

  bool all_pass() const;
  Json to_json() const;
};

// Max over kernel orders of |C_a - C_b| / max(1, |C_a|), max norm.
double coefficient_residual(const ExpansionResult& a, const ExpansionResult& b);

// Texp identities, reduction chain, hermiticity, kernel and classifier checks
// on seeded random data, plus hermiticity of the configured fields along the
// configured chords when they meet the hypotheses (X_L = X_R hermitian).
VerifyReport run_verification(const RunConfig& rc);

}  // namespace lce
