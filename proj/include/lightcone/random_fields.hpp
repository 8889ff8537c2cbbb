#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "lightcone/fields.hpp"

namespace lce {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
FourVector random_point(Rng& rng, double radius);

// Entries with real and imaginary parts uniform in [-scale, scale], symmetrized.
FlavorMatrix random_hermitian(Rng& rng, int n, double scale = 1.0);
// Component of h commuting with the hermitian matrix c (block-diagonal in c's
// eigenspaces).
FlavorMatrix commutant_part(const FlavorMatrix& h, const FlavorMatrix& c);
// Real diagonal matrix whose entries are drawn from `levels`, so eigenvalues
// repeat and the commutant is not just diagonal.
FlavorMatrix random_block_diagonal(Rng& rng, int n, const std::vector<double>& levels);

struct RandomFieldOptions {
  int terms = 2;
  double amplitude = 0.4;
  double spread = 0.4;   // centers drawn from a ball of this radius
  double width = 0.5;    // Gaussian width / window radius scale
  bool window = false;   // window profiles instead of Gaussians
  // When non-empty, generators are projected onto the commutant of this matrix.
  FlavorMatrix commute_with;
};

ScalarProfile random_profile(Rng& rng, const RandomFieldOptions& opts);
VectorFlavorField random_potential(Rng& rng, int n, const RandomFieldOptions& opts);
MatrixField random_matrix_field(Rng& rng, int n, const RandomFieldOptions& opts);
UnitaryField random_unitary_field(Rng& rng, int n, const RandomFieldOptions& opts);

// Chord x -> y with |x| <= radius and the requested causal type.
std::pair<FourVector, FourVector> random_chord(Rng& rng, CausalClass type, double radius = 1.0);

struct RandomConfigOptions {
  int n = 2;
  double m = 0.7;
  bool potentials = true;
  bool unitaries = true;
  bool scalars = true;   // nonzero Xi, Phi
  bool nontrivial_xy = true;
  RandomFieldOptions field;
};

// Configuration satisfying the hypotheses of the hermiticity identity:
// X_L = X_R = X hermitian, [X, Y] = 0, and every generator of A, Xi, Phi
// commuting with X.
ChiralConfig random_config(Rng& rng, const RandomConfigOptions& opts);

}  // namespace lce
