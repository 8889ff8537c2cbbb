#include "lightcone/fields.hpp"

#include <algorithm>
#include <cmath>

namespace lce {

namespace {

const double kEps = std::numeric_limits<double>::epsilon();

FlavorMatrix lin(double a, const FlavorMatrix& x, double b, const FlavorMatrix& y) {
  return a * x + b * y;
}
FlavorVector lin(double a, const FlavorVector& x, double b, const FlavorVector& y) {
  FlavorVector out;
  for (int j = 0; j < 4; ++j) out[j] = a * x[j] + b * y[j];
  return out;
}
FlavorMatrix zero_like(int n, const FlavorMatrix*) { return FlavorMatrix::Zero(n, n); }
FlavorVector zero_like(int n, const FlavorVector*) { return zero_flavor_vector(n); }

double matrix_scale(const FlavorMatrix& m) { return 1.0 + max_abs(m); }

void check_hermitian_samples(const std::vector<FourVector>& pts,
                             const std::function<FlavorMatrix(const FourVector&, int)>& comp,
                             int ncomp, const char* what) {
  for (const auto& z : pts)
    for (int j = 0; j < ncomp; ++j) {
      const FlavorMatrix m = comp(z, j);
      if (!is_hermitian(m, 1e-10 * matrix_scale(m)))
        throw PreconditionError(std::string(what) + ": component not hermitian at a sample point");
    }
}

std::array<double, 4> zero4() { return {0.0, 0.0, 0.0, 0.0}; }

}  // namespace

Support enclose(const Support& a, const Support& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  const FourVector d = b.center - a.center;
  const double dist = euclidean_norm(d);
  if (dist + b.radius <= a.radius) return a;
  if (dist + a.radius <= b.radius) return b;
  Support s;
  s.radius = 0.5 * (dist + a.radius + b.radius);
  s.center = a.center + ((s.radius - a.radius) / dist) * d;
  return s;
}

std::vector<FourVector> support_samples(const Support& s) {
  std::vector<FourVector> pts;
  if (s.empty()) return pts;
  pts.push_back(s.center);
  for (int k = 0; k < 4; ++k) {
    pts.push_back(s.center + (0.5 * s.radius) * unit_vector(k));
    pts.push_back(s.center - (0.3 * s.radius) * unit_vector(k));
  }
  pts.push_back(s.center + (0.35 * s.radius) * FourVector(1, -1, 1, -1));
  pts.push_back(s.center + (0.2 * s.radius) * FourVector(-1, 1, 1, 0.5));
  pts.push_back(s.center + (0.1 * s.radius) * FourVector(0.3, 2, -1, 1));
  return pts;
}

// ---------------------------------------------------------------- profiles

double ScalarProfile::value(const FourVector& z) const {
  const FourVector d = z - center;
  const double r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3];
  if (kind == Kind::gaussian) {
    const double w2 = scale * scale;
    if (r2 > kGaussianCutoffWidths * kGaussianCutoffWidths * w2) return 0.0;
    return amplitude * std::exp(-0.5 * r2 / w2);
  }
  const double u = 1.0 - r2 / (scale * scale);
  if (u <= 0.0) return 0.0;
  return amplitude * std::pow(u, power);
}

std::array<double, 4> ScalarProfile::gradient(const FourVector& z) const {
  const FourVector d = z - center;
  const double r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3];
  std::array<double, 4> g = zero4();
  if (kind == Kind::gaussian) {
    const double w2 = scale * scale;
    if (r2 > kGaussianCutoffWidths * kGaussianCutoffWidths * w2) return g;
    const double phi = amplitude * std::exp(-0.5 * r2 / w2);
    for (int a = 0; a < 4; ++a) g[a] = -phi * d[a] / w2;
    return g;
  }
  const double R2 = scale * scale;
  const double u = 1.0 - r2 / R2;
  if (u <= 0.0) return g;
  const double f = amplitude * power * std::pow(u, power - 1) * (-2.0 / R2);
  for (int a = 0; a < 4; ++a) g[a] = f * d[a];
  return g;
}

std::array<std::array<double, 4>, 4> ScalarProfile::hessian(const FourVector& z) const {
  const FourVector d = z - center;
  const double r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3];
  std::array<std::array<double, 4>, 4> h{zero4(), zero4(), zero4(), zero4()};
  if (kind == Kind::gaussian) {
    const double w2 = scale * scale;
    if (r2 > kGaussianCutoffWidths * kGaussianCutoffWidths * w2) return h;
    const double phi = amplitude * std::exp(-0.5 * r2 / w2);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        h[a][b] = phi * (d[a] * d[b] / (w2 * w2) - (a == b ? 1.0 / w2 : 0.0));
    return h;
  }
  const double R2 = scale * scale;
  const double u = 1.0 - r2 / R2;
  if (u <= 0.0) return h;
  const double p = power;
  const double c2 = amplitude * p * (p - 1) * (power >= 2 ? std::pow(u, power - 2) : 0.0) * 4.0 / (R2 * R2);
  const double c1 = amplitude * p * std::pow(u, power - 1) * (-2.0 / R2);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) h[a][b] = c2 * d[a] * d[b] + (a == b ? c1 : 0.0);
  return h;
}

Support ScalarProfile::support() const {
  Support s;
  s.center = center;
  s.radius = kind == Kind::gaussian ? kGaussianCutoffWidths * scale : scale;
  return s;
}

namespace {
double profile_length(const ScalarProfile& p) {
  return p.kind == ScalarProfile::Kind::gaussian ? p.scale : 0.5 * p.scale;
}
}  // namespace

// -------------------------------------------------------------- BasicField

template <class V>
V BasicField<V>::zero_value() const {
  return zero_like(n_, static_cast<const V*>(nullptr));
}

template <class V>
V BasicField<V>::value(const FourVector& z) const {
  if (!value_fn_ || !support_.contains(z)) return background_;
  return value_fn_(z);
}

template <class V>
V BasicField<V>::d1(const FourVector& z, int a) const {
  if (!value_fn_ || !support_.contains(z)) return zero_value();
  if (d1_fn_) return d1_fn_(z, a);
  if (!fd_fallback_) throw DerivativeUnavailable("first derivative unavailable (fallback disabled)");
  const double h = std::cbrt(kEps) * length_scale_;
  const FourVector e = h * unit_vector(a);
  return lin(0.5 / h, value(z + e), -0.5 / h, value(z - e));
}

template <class V>
V BasicField<V>::d2(const FourVector& z, int a, int b) const {
  if (!value_fn_ || !support_.contains(z)) return zero_value();
  if (d2_fn_) return d2_fn_(z, a, b);
  if (!fd_fallback_) throw DerivativeUnavailable("second derivative unavailable (fallback disabled)");
  if (d1_fn_) {
    const double h = std::cbrt(kEps) * length_scale_;
    const FourVector e = h * unit_vector(b);
    return lin(0.5 / h, d1(z + e, a), -0.5 / h, d1(z - e, a));
  }
  const double h = std::pow(kEps, 0.25) * length_scale_;
  if (a == b) {
    const FourVector e = h * unit_vector(a);
    V s = lin(1.0, value(z + e), 1.0, value(z - e));
    return lin(1.0 / (h * h), s, -2.0 / (h * h), value(z));
  }
  const FourVector ea = h * unit_vector(a);
  const FourVector eb = h * unit_vector(b);
  V pp = lin(1.0, value(z + ea + eb), -1.0, value(z + ea - eb));
  V mm = lin(1.0, value(z - ea - eb), -1.0, value(z - ea + eb));
  return lin(0.25 / (h * h), pp, 0.25 / (h * h), mm);
}

template class BasicField<FlavorMatrix>;
template class BasicField<FlavorVector>;

VectorFlavorField::VectorFlavorField(int n, Support support, ValueFn value, D1Fn d1, D2Fn d2,
                                     bool validate)
    : BasicField(n, zero_flavor_vector(n), support, std::move(value), std::move(d1), std::move(d2)) {
  if (validate && value_fn_) {
    check_hermitian_samples(
        support_samples(support_), [this](const FourVector& z, int j) { return this->value(z)[j]; },
        4, "vector potential");
  }
}

FlavorMatrix VectorFlavorField::contract(const FourVector& z, const FourVector& xi) const {
  if (is_trivial()) return FlavorMatrix::Zero(n_, n_);
  const FlavorVector a = value(z);
  FlavorMatrix out = FlavorMatrix::Zero(n_, n_);
  for (int j = 0; j < 4; ++j)
    if (xi[j] != 0.0) out += (kMetric[j] * xi[j]) * a[j];
  return out;
}

MatrixField::MatrixField(int n, Support support, ValueFn value, D1Fn d1, D2Fn d2, bool validate)
    : BasicField(n, FlavorMatrix::Zero(n, n), support, std::move(value), std::move(d1),
                 std::move(d2)) {
  if (validate && value_fn_) {
    check_hermitian_samples(
        support_samples(support_), [this](const FourVector& z, int) { return this->value(z); }, 1,
        "matrix field");
  }
}

UnitaryField::UnitaryField(int n, Support support, ValueFn value, D1Fn d1, D2Fn d2, bool validate)
    : BasicField(n, FlavorMatrix::Identity(n, n), support, std::move(value), std::move(d1),
                 std::move(d2)) {
  if (validate && value_fn_) {
    for (const auto& z : support_samples(support_))
      if (!is_unitary(this->value(z), 1e-10))
        throw PreconditionError("unitary field: value not unitary at a sample point");
  }
}

// ---------------------------------------------------------- built-in fields

VectorFlavorField potential_from_terms(int n, const std::vector<PotentialTerm>& terms) {
  if (terms.empty()) return VectorFlavorField::zero(n);
  Support sup;
  double len = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    if (t.generator.rows() != n || t.generator.cols() != n)
      throw DimensionError("potential term generator has wrong flavor dimension");
    sup = enclose(sup, t.profile.support());
    len = std::min(len, profile_length(t.profile));
  }
  auto value = [n, terms](const FourVector& z) {
    FlavorVector a = zero_flavor_vector(n);
    for (const auto& t : terms) {
      const double phi = t.profile.value(z);
      if (phi == 0.0) continue;
      for (int j = 0; j < 4; ++j)
        if (t.polarization[j] != 0.0) a[j] += (phi * t.polarization[j]) * t.generator;
    }
    return a;
  };
  auto d1 = [n, terms](const FourVector& z, int c) {
    FlavorVector a = zero_flavor_vector(n);
    for (const auto& t : terms) {
      const double g = t.profile.gradient(z)[c];
      if (g == 0.0) continue;
      for (int j = 0; j < 4; ++j)
        if (t.polarization[j] != 0.0) a[j] += (g * t.polarization[j]) * t.generator;
    }
    return a;
  };
  auto d2 = [n, terms](const FourVector& z, int c, int d) {
    FlavorVector a = zero_flavor_vector(n);
    for (const auto& t : terms) {
      const double h = t.profile.hessian(z)[c][d];
      if (h == 0.0) continue;
      for (int j = 0; j < 4; ++j)
        if (t.polarization[j] != 0.0) a[j] += (h * t.polarization[j]) * t.generator;
    }
    return a;
  };
  VectorFlavorField f(n, sup, value, d1, d2);
  f.set_length_scale(len);
  return f;
}

MatrixField matrix_field_from_terms(int n, const std::vector<MatrixTerm>& terms) {
  if (terms.empty()) return MatrixField::zero(n);
  Support sup;
  double len = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    if (t.generator.rows() != n || t.generator.cols() != n)
      throw DimensionError("matrix term generator has wrong flavor dimension");
    sup = enclose(sup, t.profile.support());
    len = std::min(len, profile_length(t.profile));
  }
  auto value = [n, terms](const FourVector& z) {
    FlavorMatrix m = FlavorMatrix::Zero(n, n);
    for (const auto& t : terms) m += t.profile.value(z) * t.generator;
    return m;
  };
  auto d1 = [n, terms](const FourVector& z, int c) {
    FlavorMatrix m = FlavorMatrix::Zero(n, n);
    for (const auto& t : terms) m += t.profile.gradient(z)[c] * t.generator;
    return m;
  };
  auto d2 = [n, terms](const FourVector& z, int c, int d) {
    FlavorMatrix m = FlavorMatrix::Zero(n, n);
    for (const auto& t : terms) m += t.profile.hessian(z)[c][d] * t.generator;
    return m;
  };
  MatrixField f(n, sup, value, d1, d2);
  f.set_length_scale(len);
  return f;
}

namespace {

struct ExpFactor {
  ScalarProfile profile;
  FlavorMatrix h, h2, vecs;
  Eigen::VectorXd evals;

  FlavorMatrix exp_i(double phi) const {
    const Eigen::VectorXcd d = (kI * phi * evals.cast<cplx>()).array().exp();
    return vecs * d.asDiagonal() * vecs.adjoint();
  }
};

}  // namespace

UnitaryField exp_unitary(int n, const std::vector<UnitaryFactor>& factors) {
  if (factors.empty()) return UnitaryField::identity(n);
  Support sup;
  double len = std::numeric_limits<double>::infinity();
  std::vector<ExpFactor> fs;
  for (const auto& f : factors) {
    if (f.generator.rows() != n || f.generator.cols() != n)
      throw DimensionError("unitary factor generator has wrong flavor dimension");
    if (!is_hermitian(f.generator, 1e-12 * matrix_scale(f.generator)))
      throw PreconditionError("unitary factor generator must be hermitian");
    Eigen::SelfAdjointEigenSolver<FlavorMatrix> es(f.generator);
    ExpFactor e{f.profile, f.generator, f.generator * f.generator, es.eigenvectors(),
                es.eigenvalues()};
    fs.push_back(e);
    sup = enclose(sup, f.profile.support());
    len = std::min(len, profile_length(f.profile));
  }
  const std::size_t K = fs.size();

  auto factors_at = [fs, K](const FourVector& z) {
    std::vector<FlavorMatrix> e(K);
    for (std::size_t k = 0; k < K; ++k) e[k] = fs[k].exp_i(fs[k].profile.value(z));
    return e;
  };
  auto value = [n, factors_at](const FourVector& z) {
    FlavorMatrix u = FlavorMatrix::Identity(n, n);
    for (const auto& e : factors_at(z)) u = u * e;
    return u;
  };
  auto d1 = [n, fs, K, factors_at](const FourVector& z, int a) {
    const std::vector<FlavorMatrix> e = factors_at(z);
    FlavorMatrix out = FlavorMatrix::Zero(n, n);
    for (std::size_t k = 0; k < K; ++k) {
      const double g = fs[k].profile.gradient(z)[a];
      if (g == 0.0) continue;
      FlavorMatrix p = FlavorMatrix::Identity(n, n);
      for (std::size_t l = 0; l < K; ++l) p = p * (l == k ? FlavorMatrix(kI * g * fs[k].h * e[k]) : e[l]);
      out += p;
    }
    return out;
  };
  auto d2 = [n, fs, K, factors_at](const FourVector& z, int a, int b) {
    const std::vector<FlavorMatrix> e = factors_at(z);
    std::vector<FlavorMatrix> da(K), db(K);
    std::vector<std::array<double, 4>> grad(K);
    for (std::size_t k = 0; k < K; ++k) {
      grad[k] = fs[k].profile.gradient(z);
      da[k] = kI * grad[k][a] * fs[k].h * e[k];
      db[k] = kI * grad[k][b] * fs[k].h * e[k];
    }
    FlavorMatrix out = FlavorMatrix::Zero(n, n);
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t l = 0; l < K; ++l) {
        FlavorMatrix p = FlavorMatrix::Identity(n, n);
        for (std::size_t q = 0; q < K; ++q) {
          if (k == l && q == k) {
            const double hab = fs[k].profile.hessian(z)[a][b];
            p = p * FlavorMatrix((kI * hab * fs[k].h - grad[k][a] * grad[k][b] * fs[k].h2) * e[k]);
          } else if (q == k) {
            p = p * da[k];
          } else if (q == l) {
            p = p * db[l];
          } else {
            p = p * e[q];
          }
        }
        out += p;
      }
    return out;
  };
  UnitaryField u(n, sup, value, d1, d2);
  u.set_length_scale(len);
  return u;
}

VectorFlavorField pure_gauge_potential(const UnitaryField& u, bool fd_second_derivatives) {
  const int n = u.flavors();
  if (u.is_trivial()) return VectorFlavorField::zero(n);
  if (!u.has_d1()) throw DerivativeUnavailable("pure_gauge_potential needs first derivatives of U");
  auto value = [n, u](const FourVector& z) {
    const FlavorMatrix uz = u.value(z);
    FlavorVector a = zero_flavor_vector(n);
    for (int j = 0; j < 4; ++j) a[j] = (kMetric[j] * kI) * uz * u.d1(z, j).adjoint();
    return a;
  };
  VectorFlavorField::D1Fn d1;
  if (u.has_d2()) {
    d1 = [n, u](const FourVector& z, int c) {
      const FlavorMatrix uz = u.value(z);
      const FlavorMatrix dc = u.d1(z, c);
      FlavorVector a = zero_flavor_vector(n);
      for (int j = 0; j < 4; ++j)
        a[j] = (kMetric[j] * kI) * (dc * u.d1(z, j).adjoint() + uz * u.d2(z, c, j).adjoint());
      return a;
    };
  }
  VectorFlavorField a(n, u.support(), value, d1, {});
  a.set_length_scale(u.length_scale());
  if (fd_second_derivatives) a.enable_fd_fallback();
  return a;
}

VectorFlavorField gauge_transform(const VectorFlavorField& a, const UnitaryField& u,
                                  bool fd_second_derivatives) {
  const int n = a.flavors();
  if (u.flavors() != n) throw DimensionError("gauge_transform: flavor dimension mismatch");
  if (u.is_trivial()) return a;
  const VectorFlavorField pg = pure_gauge_potential(u);
  auto value = [a, u, pg](const FourVector& z) {
    const FlavorMatrix uz = u.value(z);
    FlavorVector out = pg.value(z);
    if (!a.is_trivial()) {
      const FlavorVector av = a.value(z);
      for (int j = 0; j < 4; ++j) out[j] += uz * av[j] * uz.adjoint();
    }
    return out;
  };
  VectorFlavorField::D1Fn d1;
  if (u.has_d2() && a.has_d1()) {
    d1 = [a, u, pg](const FourVector& z, int c) {
      FlavorVector out = pg.d1(z, c);
      if (!a.is_trivial()) {
        const FlavorMatrix uz = u.value(z);
        const FlavorMatrix dc = u.d1(z, c);
        const FlavorVector av = a.value(z);
        const FlavorVector dav = a.d1(z, c);
        for (int j = 0; j < 4; ++j)
          out[j] += dc * av[j] * uz.adjoint() + uz * dav[j] * uz.adjoint() +
                    uz * av[j] * dc.adjoint();
      }
      return out;
    };
  }
  VectorFlavorField out(n, enclose(a.support(), u.support()), value, d1, {});
  out.set_length_scale(std::min(a.is_trivial() ? u.length_scale() : a.length_scale(),
                                u.length_scale()));
  if (fd_second_derivatives) out.enable_fd_fallback();
  return out;
}

VectorFlavorField scaled(const VectorFlavorField& a, double s) {
  const int n = a.flavors();
  if (a.is_trivial() || s == 0.0) return VectorFlavorField::zero(n);
  auto scale = [s](FlavorVector v) {
    for (auto& m : v) m *= s;
    return v;
  };
  auto value = [a, scale](const FourVector& z) { return scale(a.value(z)); };
  VectorFlavorField::D1Fn d1;
  VectorFlavorField::D2Fn d2;
  if (a.has_d1()) d1 = [a, scale](const FourVector& z, int c) { return scale(a.d1(z, c)); };
  if (a.has_d2())
    d2 = [a, scale](const FourVector& z, int c, int d) { return scale(a.d2(z, c, d)); };
  VectorFlavorField out(n, a.support(), value, d1, d2, false);
  out.set_length_scale(a.length_scale());
  return out;
}

VectorFlavorField sum(const VectorFlavorField& a, const VectorFlavorField& b) {
  const int n = a.flavors();
  if (b.flavors() != n) throw DimensionError("sum: flavor dimension mismatch");
  if (a.is_trivial()) return b;
  if (b.is_trivial()) return a;
  auto add = [](FlavorVector u, const FlavorVector& v) {
    for (int j = 0; j < 4; ++j) u[j] += v[j];
    return u;
  };
  auto value = [a, b, add](const FourVector& z) { return add(a.value(z), b.value(z)); };
  VectorFlavorField::D1Fn d1;
  VectorFlavorField::D2Fn d2;
  if (a.has_d1() && b.has_d1())
    d1 = [a, b, add](const FourVector& z, int c) { return add(a.d1(z, c), b.d1(z, c)); };
  if (a.has_d2() && b.has_d2())
    d2 = [a, b, add](const FourVector& z, int c, int d) { return add(a.d2(z, c, d), b.d2(z, c, d)); };
  VectorFlavorField out(n, enclose(a.support(), b.support()), value, d1, d2, false);
  out.set_length_scale(std::min(a.length_scale(), b.length_scale()));
  return out;
}

// ------------------------------------------------------------ ChiralConfig

ChiralConfig ChiralConfig::free(int n, double m) {
  ChiralConfig c;
  c.n = n;
  c.m = m;
  c.A_L = VectorFlavorField::zero(n);
  c.A_R = VectorFlavorField::zero(n);
  c.U_L = UnitaryField::identity(n);
  c.U_R = UnitaryField::identity(n);
  c.Xi = MatrixField::zero(n);
  c.Phi = MatrixField::zero(n);
  c.Y = FlavorMatrix::Identity(n, n);
  c.X_L = FlavorMatrix::Identity(n, n);
  c.X_R = FlavorMatrix::Identity(n, n);
  return c;
}

Support ChiralConfig::support() const {
  Support s;
  if (!A_L.is_trivial()) s = enclose(s, A_L.support());
  if (!A_R.is_trivial()) s = enclose(s, A_R.support());
  if (!U_L.is_trivial()) s = enclose(s, U_L.support());
  if (!U_R.is_trivial()) s = enclose(s, U_R.support());
  if (!Xi.is_trivial()) s = enclose(s, Xi.support());
  if (!Phi.is_trivial()) s = enclose(s, Phi.support());
  return s;
}

double ChiralConfig::length_scale() const {
  double len = std::numeric_limits<double>::infinity();
  auto take = [&len](bool trivial, double l) {
    if (!trivial) len = std::min(len, l);
  };
  take(A_L.is_trivial(), A_L.length_scale());
  take(A_R.is_trivial(), A_R.length_scale());
  take(U_L.is_trivial(), U_L.length_scale());
  take(U_R.is_trivial(), U_R.length_scale());
  take(Xi.is_trivial(), Xi.length_scale());
  take(Phi.is_trivial(), Phi.length_scale());
  return std::isfinite(len) ? len : 1.0;
}

void ChiralConfig::validate() const {
  if (n < 1) throw DimensionError("flavor dimension must be positive");
  auto check_dim = [this](int d, const char* what) {
    if (d != n) throw DimensionError(std::string(what) + " has flavor dimension inconsistent with n");
  };
  check_dim(A_L.flavors(), "A_L");
  check_dim(A_R.flavors(), "A_R");
  check_dim(U_L.flavors(), "U_L");
  check_dim(U_R.flavors(), "U_R");
  check_dim(Xi.flavors(), "Xi");
  check_dim(Phi.flavors(), "Phi");
  for (const auto* m : {&Y, &X_L, &X_R})
    if (m->rows() != n || m->cols() != n)
      throw DimensionError("constant flavor matrix has wrong dimension");
  if (!is_hermitian(Y, 1e-12 * matrix_scale(Y))) throw PreconditionError("Y must be hermitian");
}

// ---------------------------------------------------- derived field data

FlavorTensor field_strength(const VectorFlavorField& a, const FourVector& z) {
  const int n = a.flavors();
  FlavorTensor f = zero_flavor_tensor(n);
  if (a.is_trivial() || !a.support().contains(z)) return f;
  const FlavorVector av = a.value(z);
  std::array<FlavorVector, 4> d;  // d[c][j] = d_c A^j
  for (int c = 0; c < 4; ++c) d[c] = a.d1(z, c);
  for (int j = 0; j < 4; ++j)
    for (int k = j + 1; k < 4; ++k) {
      f[j][k] = kMetric[j] * d[j][k] - kMetric[k] * d[k][j] - kI * (av[j] * av[k] - av[k] * av[j]);
      f[k][j] = -f[j][k];
    }
  return f;
}

FlavorVector current(const VectorFlavorField& a, const FourVector& z) {
  const int n = a.flavors();
  FlavorVector jv = zero_flavor_vector(n);
  if (a.is_trivial() || !a.support().contains(z)) return jv;
  const FlavorVector av = a.value(z);
  std::array<FlavorVector, 4> d;
  for (int c = 0; c < 4; ++c) d[c] = a.d1(z, c);
  std::array<std::array<FlavorVector, 4>, 4> dd;  // dd[c][e][j] = d_c d_e A^j
  for (int c = 0; c < 4; ++c)
    for (int e = c; e < 4; ++e) {
      dd[c][e] = a.d2(z, c, e);
      dd[e][c] = dd[c][e];
    }
  const FlavorTensor f = field_strength(a, z);
  auto comm = [](const FlavorMatrix& x, const FlavorMatrix& y) -> FlavorMatrix { return x * y - y * x; };
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) {
      if (k == l) continue;
      // d_l F^{kl}
      FlavorMatrix dF = kMetric[k] * dd[l][k][l] - kMetric[l] * dd[l][l][k] -
                        kI * (comm(d[l][k], av[l]) + comm(av[k], d[l][l]));
      jv[k] += dF - kI * kMetric[l] * comm(av[l], f[k][l]);
    }
  return jv;
}

std::pair<FlavorMatrix, FlavorMatrix> dynamical_mass(const ChiralConfig& cfg, const FourVector& z) {
  FlavorMatrix base = cfg.Y;
  if (!cfg.Xi.is_trivial()) base += cfg.Xi.value(z);
  if (cfg.Phi.is_trivial()) return {base, base};
  const FlavorMatrix p = kI * cfg.Phi.value(z);
  return {base + p, base - p};
}

FlavorMatrix dynamical_mass(const ChiralConfig& cfg, const FourVector& z, Side s) {
  auto [yl, yr] = dynamical_mass(cfg, z);
  return s == Side::L ? yl : yr;
}

bool commutes_with_X(const VectorFlavorField& a, const FlavorMatrix& x_l, const FlavorMatrix& x_r,
                     const std::vector<FourVector>& samples, double tol) {
  if (a.is_trivial()) return true;
  for (const auto& z : samples) {
    const FlavorVector v = a.value(z);
    for (int j = 0; j < 4; ++j) {
      if (max_abs(v[j] * x_l - x_l * v[j]) > tol) return false;
      if (max_abs(v[j] * x_r - x_r * v[j]) > tol) return false;
    }
  }
  return true;
}

// -------------------------------------------------------- composite fields

CompositeField as_composite(const UnitaryField& u, bool adjoint) {
  CompositeField c;
  c.length_scale = u.length_scale();
  if (adjoint) {
    c.value = [u](const FourVector& z) { return FlavorMatrix(u.value(z).adjoint()); };
    c.d1 = [u](const FourVector& z, int a) { return FlavorMatrix(u.d1(z, a).adjoint()); };
    if (u.has_d2())
      c.d2 = [u](const FourVector& z, int a, int b) { return FlavorMatrix(u.d2(z, a, b).adjoint()); };
  } else {
    c.value = [u](const FourVector& z) { return u.value(z); };
    c.d1 = [u](const FourVector& z, int a) { return u.d1(z, a); };
    if (u.has_d2()) c.d2 = [u](const FourVector& z, int a, int b) { return u.d2(z, a, b); };
  }
  return c;
}

CompositeField as_composite(const MatrixField& m) {
  CompositeField c;
  c.length_scale = m.length_scale();
  c.value = [m](const FourVector& z) { return m.value(z); };
  c.d1 = [m](const FourVector& z, int a) { return m.d1(z, a); };
  if (m.has_d2()) c.d2 = [m](const FourVector& z, int a, int b) { return m.d2(z, a, b); };
  return c;
}

CompositeField constant_composite(const FlavorMatrix& k) {
  CompositeField c;
  const Eigen::Index n = k.rows();
  c.value = [k](const FourVector&) { return k; };
  c.d1 = [n](const FourVector&, int) { return FlavorMatrix(FlavorMatrix::Zero(n, n)); };
  c.d2 = [n](const FourVector&, int, int) { return FlavorMatrix(FlavorMatrix::Zero(n, n)); };
  c.length_scale = std::numeric_limits<double>::infinity();
  return c;
}

CompositeField product(const std::vector<CompositeField>& factors) {
  if (factors.empty()) throw DimensionError("product of no factors");
  if (factors.size() == 1) return factors.front();
  CompositeField c;
  bool all_d2 = true;
  double len = std::numeric_limits<double>::infinity();
  for (const auto& f : factors) {
    all_d2 = all_d2 && f.has_d2();
    len = std::min(len, f.length_scale);
  }
  c.length_scale = std::isfinite(len) ? len : 1.0;
  c.value = [factors](const FourVector& z) {
    FlavorMatrix p = factors[0].value(z);
    for (std::size_t k = 1; k < factors.size(); ++k) p = p * factors[k].value(z);
    return p;
  };
  c.d1 = [factors](const FourVector& z, int a) {
    const std::size_t K = factors.size();
    std::vector<FlavorMatrix> v(K);
    for (std::size_t k = 0; k < K; ++k) v[k] = factors[k].value(z);
    FlavorMatrix out = FlavorMatrix::Zero(v[0].rows(), v[0].cols());
    for (std::size_t k = 0; k < K; ++k) {
      FlavorMatrix p = k == 0 ? factors[0].d1(z, a) : v[0];
      for (std::size_t q = 1; q < K; ++q) p = p * (q == k ? factors[q].d1(z, a) : v[q]);
      out += p;
    }
    return out;
  };
  if (all_d2) {
    c.d2 = [factors](const FourVector& z, int a, int b) {
      const std::size_t K = factors.size();
      std::vector<FlavorMatrix> v(K), da(K), db(K);
      for (std::size_t k = 0; k < K; ++k) {
        v[k] = factors[k].value(z);
        da[k] = factors[k].d1(z, a);
        db[k] = factors[k].d1(z, b);
      }
      FlavorMatrix out = FlavorMatrix::Zero(v[0].rows(), v[0].cols());
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t l = 0; l < K; ++l) {
          FlavorMatrix p;
          for (std::size_t q = 0; q < K; ++q) {
            FlavorMatrix f;
            if (k == l && q == k) f = factors[q].d2(z, a, b);
            else if (q == k) f = da[q];
            else if (q == l) f = db[q];
            else f = v[q];
            p = q == 0 ? f : FlavorMatrix(p * f);
          }
          out += p;
        }
      return out;
    };
  }
  return c;
}

CompositeField operator+(const CompositeField& a, const CompositeField& b) {
  CompositeField c;
  c.length_scale = std::min(a.length_scale, b.length_scale);
  c.value = [a, b](const FourVector& z) { return FlavorMatrix(a.value(z) + b.value(z)); };
  c.d1 = [a, b](const FourVector& z, int i) { return FlavorMatrix(a.d1(z, i) + b.d1(z, i)); };
  if (a.has_d2() && b.has_d2())
    c.d2 = [a, b](const FourVector& z, int i, int j) { return FlavorMatrix(a.d2(z, i, j) + b.d2(z, i, j)); };
  return c;
}

CompositeField scaled(const CompositeField& a, cplx s) {
  CompositeField c;
  c.length_scale = a.length_scale;
  c.value = [a, s](const FourVector& z) { return FlavorMatrix(s * a.value(z)); };
  c.d1 = [a, s](const FourVector& z, int i) { return FlavorMatrix(s * a.d1(z, i)); };
  if (a.has_d2())
    c.d2 = [a, s](const FourVector& z, int i, int j) { return FlavorMatrix(s * a.d2(z, i, j)); };
  return c;
}

CompositeField dynamical_mass_field(const ChiralConfig& cfg, Side s) {
  CompositeField y = constant_composite(cfg.Y);
  if (!cfg.Xi.is_trivial()) y = y + as_composite(cfg.Xi);
  if (!cfg.Phi.is_trivial()) y = y + scaled(as_composite(cfg.Phi), s == Side::L ? kI : -kI);
  return y;
}

CompositeField mass_link(const ChiralConfig& cfg, Side s) {
  const Side o = other(s);
  std::vector<CompositeField> f;
  if (!cfg.U(s).is_trivial()) f.push_back(as_composite(cfg.U(s), true));
  f.push_back(dynamical_mass_field(cfg, s));
  if (!cfg.U(o).is_trivial()) f.push_back(as_composite(cfg.U(o)));
  CompositeField c = product(f);
  if (!std::isfinite(c.length_scale)) c.length_scale = 1.0;
  return c;
}

CompositeField mass_square_link(const ChiralConfig& cfg, Side s) {
  const Side o = other(s);
  std::vector<CompositeField> f;
  if (!cfg.U(s).is_trivial()) f.push_back(as_composite(cfg.U(s), true));
  f.push_back(dynamical_mass_field(cfg, s));
  f.push_back(dynamical_mass_field(cfg, o));
  if (!cfg.U(s).is_trivial()) f.push_back(as_composite(cfg.U(s)));
  CompositeField c = product(f);
  if (!std::isfinite(c.length_scale)) c.length_scale = 1.0;
  return c;
}

FlavorMatrix box(const CompositeField& f, const FourVector& z, BoxMethod method) {
  const bool analytic =
      method == BoxMethod::analytic || (method == BoxMethod::automatic && f.has_d2());
  if (analytic) {
    if (!f.has_d2()) throw DerivativeUnavailable("box: analytic second derivatives unavailable");
    FlavorMatrix out = f.d2(z, 0, 0);
    for (int a = 1; a < 4; ++a) out -= f.d2(z, a, a);
    return out;
  }
  // Sixth-order central stencil for each diagonal second derivative.
  static const double w[7] = {2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0};
  const double len = std::isfinite(f.length_scale) ? f.length_scale : 1.0;
  const double h = std::pow(kEps, 0.125) * len;
  const FlavorMatrix centre = f.value(z);
  FlavorMatrix out = FlavorMatrix::Zero(centre.rows(), centre.cols());
  for (int a = 0; a < 4; ++a) {
    FlavorMatrix s = w[3] * centre;
    for (int q = -3; q <= 3; ++q) {
      if (q == 0) continue;
      s += w[q + 3] * f.value(z + (q * h) * unit_vector(a));
    }
    out += (kMetric[a] / (180.0 * h * h)) * s;
  }
  return out;
}

bool is_hermitian(const FlavorMatrix& m, double tol) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

bool is_unitary(const FlavorMatrix& m, double tol) {
  return m.rows() == m.cols() &&
         max_abs(m.adjoint() * m - FlavorMatrix::Identity(m.rows(), m.cols())) <= tol;
}

}  // namespace lce
