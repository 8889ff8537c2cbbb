#include "lightcone/random_fields.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace lce {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

FourVector random_point(Rng& rng, double radius) {
  // Rejection sampling in the cube.
  while (true) {
    FourVector p(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    if (euclidean_norm(p) <= 1.0) return radius * p;
  }
}

FlavorMatrix random_hermitian(Rng& rng, int n, double scale) {
  FlavorMatrix h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = cplx(uniform(rng, -scale, scale), uniform(rng, -scale, scale));
  return 0.5 * (h + h.adjoint());
}

FlavorMatrix commutant_part(const FlavorMatrix& h, const FlavorMatrix& c) {
  Eigen::SelfAdjointEigenSolver<FlavorMatrix> es(c);
  const FlavorMatrix& v = es.eigenvectors();
  const Eigen::VectorXd& d = es.eigenvalues();
  FlavorMatrix t = v.adjoint() * h * v;
  const double tol = 1e-9 * (1.0 + d.cwiseAbs().maxCoeff());
  for (int i = 0; i < t.rows(); ++i)
    for (int j = 0; j < t.cols(); ++j)
      if (std::abs(d(i) - d(j)) > tol) t(i, j) = 0.0;
  FlavorMatrix out = v * t * v.adjoint();
  return 0.5 * (out + out.adjoint());
}

FlavorMatrix random_block_diagonal(Rng& rng, int n, const std::vector<double>& levels) {
  FlavorMatrix d = FlavorMatrix::Zero(n, n);
  std::uniform_int_distribution<std::size_t> pick(0, levels.size() - 1);
  for (int i = 0; i < n; ++i) d(i, i) = levels[pick(rng)];
  return d;
}

namespace {

FlavorMatrix generator(Rng& rng, int n, const RandomFieldOptions& opts) {
  FlavorMatrix h = random_hermitian(rng, n);
  if (opts.commute_with.size() > 0) h = commutant_part(h, opts.commute_with);
  return h;
}

}  // namespace

ScalarProfile random_profile(Rng& rng, const RandomFieldOptions& opts) {
  ScalarProfile p;
  p.kind = opts.window ? ScalarProfile::Kind::window : ScalarProfile::Kind::gaussian;
  p.center = random_point(rng, opts.spread);
  const double w = opts.width * uniform(rng, 0.8, 1.25);
  p.scale = opts.window ? 3.0 * w : w;
  p.power = 4;
  p.amplitude = opts.amplitude * uniform(rng, 0.5, 1.0);
  return p;
}

VectorFlavorField random_potential(Rng& rng, int n, const RandomFieldOptions& opts) {
  std::vector<PotentialTerm> terms;
  for (int t = 0; t < opts.terms; ++t) {
    PotentialTerm term;
    term.profile = random_profile(rng, opts);
    for (int j = 0; j < 4; ++j) term.polarization[j] = uniform(rng, -1, 1);
    term.generator = generator(rng, n, opts);
    terms.push_back(term);
  }
  return potential_from_terms(n, terms);
}

MatrixField random_matrix_field(Rng& rng, int n, const RandomFieldOptions& opts) {
  std::vector<MatrixTerm> terms;
  for (int t = 0; t < opts.terms; ++t) terms.push_back({random_profile(rng, opts), generator(rng, n, opts)});
  return matrix_field_from_terms(n, terms);
}

UnitaryField random_unitary_field(Rng& rng, int n, const RandomFieldOptions& opts) {
  std::vector<UnitaryFactor> factors;
  for (int t = 0; t < opts.terms; ++t) factors.push_back({random_profile(rng, opts), generator(rng, n, opts)});
  return exp_unitary(n, factors);
}

std::pair<FourVector, FourVector> random_chord(Rng& rng, CausalClass type, double radius) {
  const FourVector x = random_point(rng, radius);
  FourVector dir = random_point(rng, 1.0);
  double spatial = 0.0;
  for (int i = 1; i < 4; ++i) spatial += dir[i] * dir[i];
  spatial = std::sqrt(spatial);
  if (spatial < 1e-3) {
    dir[1] = 0.5;
    spatial = 0.5;
  }
  const double sign = uniform(rng, -1, 1) < 0 ? -1.0 : 1.0;
  switch (type) {
    case CausalClass::timelike: dir[0] = sign * spatial * uniform(rng, 1.3, 3.0); break;
    case CausalClass::spacelike: dir[0] = sign * spatial * uniform(rng, 0.0, 0.7); break;
    case CausalClass::lightlike: dir[0] = sign * spatial; break;
  }
  const double len = uniform(rng, 0.4, 1.2) * radius / euclidean_norm(dir);
  return {x, x + len * dir};
}

ChiralConfig random_config(Rng& rng, const RandomConfigOptions& opts) {
  const int n = opts.n;
  ChiralConfig cfg = ChiralConfig::free(n, opts.m);
  RandomFieldOptions fo = opts.field;
  if (opts.nontrivial_xy) {
    cfg.X_L = random_block_diagonal(rng, n, {1.0, 0.6, 0.3});
    cfg.X_R = cfg.X_L;
    fo.commute_with = cfg.X_L;
    cfg.Y = FlavorMatrix::Identity(n, n) + 0.5 * commutant_part(random_hermitian(rng, n), cfg.X_L);
  }
  if (opts.potentials) {
    cfg.A_L = random_potential(rng, n, fo);
    cfg.A_R = random_potential(rng, n, fo);
  }
  RandomFieldOptions uo = opts.field;
  if (opts.unitaries) {
    cfg.U_L = random_unitary_field(rng, n, uo);
    cfg.U_R = random_unitary_field(rng, n, uo);
  }
  if (opts.scalars) {
    cfg.Xi = random_matrix_field(rng, n, fo);
    cfg.Phi = random_matrix_field(rng, n, fo);
  }
  return cfg;
}

}  // namespace lce
