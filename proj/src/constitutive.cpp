#include "implicitfluid/constitutive.hpp"

#include <cmath>
#include <initializer_list>
#include <random>

namespace ifluid {

namespace {

struct FamilyName {
  Family family;
  std::string_view name;
};

constexpr std::array<FamilyName, 5> kFamilyNames{{
    {Family::GeneralImplicit, "general_implicit"},
    {Family::StressLinear, "stress_linear"},
    {Family::ImplicitEuler, "implicit_euler"},
    {Family::ClassicalEuler, "classical_euler"},
    {Family::IdealGas, "ideal_gas"},
}};

bool is_zero(const std::optional<Expr>& e) { return !e || e->is_literal_zero(); }

void require_absent(CoefficientSet& c, std::initializer_list<int> which, std::string_view family) {
  for (int i : which) {
    if (!is_zero(c[i]))
      throw ValidationError(std::string(family) + ": alpha" + std::to_string(i) + " must be zero");
    c[i].reset();
  }
}

void require_arguments(const CoefficientSet& c, std::initializer_list<int> which,
                       std::initializer_list<Var> allowed, std::string_view family) {
  for (int i : which) {
    if (!c[i]) continue;
    for (Var v : c[i]->variables()) {
      bool ok = false;
      for (Var a : allowed) ok = ok || a == v;
      if (!ok)
        throw ValidationError(std::string(family) + ": alpha" + std::to_string(i) +
                              " may not depend on " + std::string(var_name(v)));
    }
  }
}

double eval_coefficient(const std::optional<Expr>& e, int index, const EvalContext& ctx) {
  if (!e) return 0.0;
  try {
    return e->eval(ctx);
  } catch (const DomainError& err) {
    throw EvaluationError("alpha" + std::to_string(index) + " at rho=" + std::to_string(ctx.rho()) +
                          ": " + err.what());
  }
}

// a1 I + a2 T + a4 T^2, shared so that the general and Euler residuals agree
// bitwise when the gradient terms are absent.
SymTensor3 stress_part(const Moduli& m, const SymTensor3& t, bool has_a4) {
  SymTensor3 r = SymTensor3::spherical(m[1]);
  r += m[2] * t;
  if (has_a4) r += m[4] * square(t);
  return r;
}

void add_frame_bias(SymTensor3& r, double bias) {
  if (bias != 0.0) r.xx += bias;
}

}  // namespace

std::string_view family_name(Family f) {
  for (const auto& fn : kFamilyNames)
    if (fn.family == f) return fn.name;
  return "?";
}

Family family_from_name(std::string_view name) {
  for (const auto& fn : kFamilyNames)
    if (fn.name == name) return fn.family;
  throw ValidationError("unknown relation family '" + std::string(name) + "'");
}

ConstitutiveRelation ConstitutiveRelation::general_implicit(CoefficientSet c) {
  ConstitutiveRelation r;
  r.family_ = Family::GeneralImplicit;
  for (int i = 1; i <= 6; ++i)
    if (is_zero(c[i])) c[i].reset();
  r.coeffs_ = std::move(c);
  return r;
}

ConstitutiveRelation ConstitutiveRelation::stress_linear(CoefficientSet c) {
  constexpr std::string_view name = "stress_linear";
  require_absent(c, {4, 6}, name);
  require_arguments(c, {1, 3}, {Var::rho, Var::i1, Var::phi, Var::i4, Var::i5}, name);
  require_arguments(c, {2, 5}, {Var::rho, Var::i4}, name);
  ConstitutiveRelation r;
  r.family_ = Family::StressLinear;
  r.coeffs_ = std::move(c);
  return r;
}

ConstitutiveRelation ConstitutiveRelation::implicit_euler(CoefficientSet c) {
  constexpr std::string_view name = "implicit_euler";
  require_absent(c, {3, 5, 6}, name);
  require_arguments(c, {1, 2, 4}, {Var::rho, Var::i1, Var::i2, Var::i3, Var::phi}, name);
  ConstitutiveRelation r;
  r.family_ = Family::ImplicitEuler;
  r.coeffs_ = std::move(c);
  return r;
}

ConstitutiveRelation ConstitutiveRelation::classical_euler(Expr pressure) {
  for (Var v : pressure.variables())
    if (v != Var::rho)
      throw ValidationError("classical_euler: pressure may not depend on " +
                            std::string(var_name(v)));
  ConstitutiveRelation r;
  r.family_ = Family::ClassicalEuler;
  r.pressure_ = std::move(pressure);
  return r;
}

ConstitutiveRelation ConstitutiveRelation::ideal_gas(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("ideal_gas: C must be positive");
  ConstitutiveRelation r;
  r.family_ = Family::IdealGas;
  r.gas_constant_ = c;
  return r;
}

ConstitutiveRelation ConstitutiveRelation::with_frame_bias(double bias) const {
  ConstitutiveRelation r = *this;
  r.frame_bias_ = bias;
  return r;
}

bool ConstitutiveRelation::is_euler_type() const {
  return family_ == Family::ImplicitEuler || family_ == Family::ClassicalEuler ||
         family_ == Family::IdealGas;
}

std::optional<double> ConstitutiveRelation::euler_pressure(double rho) const {
  if (family_ == Family::IdealGas) return gas_constant_ * rho;
  if (family_ == Family::ClassicalEuler) {
    const EvalContext ctx(rho, {});
    try {
      return pressure_->eval(ctx);
    } catch (const DomainError& err) {
      throw EvaluationError("pressure at rho=" + std::to_string(rho) + ": " + err.what());
    }
  }
  return std::nullopt;
}

Moduli ConstitutiveRelation::moduli(double rho, const InvariantSet& inv) const {
  Moduli m;
  if (family_ == Family::IdealGas || family_ == Family::ClassicalEuler) {
    m.a[0] = *euler_pressure(rho);
    m.a[1] = 1.0;
    return m;
  }
  const EvalContext ctx(rho, inv);
  for (int i = 1; i <= 6; ++i) m.a[i - 1] = eval_coefficient(coeffs_[i], i, ctx);
  return m;
}

void KortewegParams::validate() const {
  if (!(mu >= 0.0)) throw ValidationError("korteweg: mu must be nonnegative");
  if (!(3.0 * lambda + 2.0 * mu >= 0.0))
    throw ValidationError("korteweg: bulk modulus 3 lambda + 2 mu must be nonnegative");
  for (Var v : alpha0.variables())
    if (v != Var::rho)
      throw ValidationError("korteweg: alpha0 may not depend on " + std::string(var_name(v)));
}

SymTensor3 residual_general(const ConstitutiveRelation& rel, double rho, const Vec3& g,
                            const SymTensor3& t) {
  const Moduli m = rel.moduli(rho, invariants(t, g));
  const CoefficientSet& c = rel.coefficients();
  SymTensor3 r = stress_part(m, t, c[4].has_value());
  if (c[3]) r += m[3] * outer(g, g);
  if (c[5] || c[6]) {
    const Vec3 tg = t.apply(g);
    // g(x)Tg + Tg(x)g is twice the symmetrized outer product
    if (c[5]) r += (2.0 * m[5]) * outer(g, tg);
    if (c[6]) r += (2.0 * m[6]) * outer(g, t.apply(tg));
  }
  add_frame_bias(r, rel.frame_bias());
  return r;
}

SymTensor3 residual_implicit_euler(const ConstitutiveRelation& rel, double rho,
                                   const SymTensor3& t) {
  if (!rel.is_euler_type())
    throw ValidationError("residual_implicit_euler needs an implicit_euler, classical_euler or "
                          "ideal_gas relation, got " + std::string(family_name(rel.family())));
  const Moduli m = rel.moduli(rho, invariants(t, {}));
  SymTensor3 r = stress_part(m, t, rel.coefficients()[4].has_value());
  add_frame_bias(r, rel.frame_bias());
  return r;
}

SphericalBalance spherical_balance(const ConstitutiveRelation& rel, double rho, double phi) {
  const EvalContext ctx = EvalContext::spherical(rho, phi);
  const Moduli m = rel.moduli(rho, ctx.invariants());
  SphericalBalance b;
  b.alpha1 = m[1];
  b.alpha2 = m[2];
  b.alpha4 = m[4];
  b.h = m[1] - m[2] * phi + m[4] * phi * phi;
  b.scale = std::abs(m[1]) + std::abs(m[2] * phi) + std::abs(m[4] * phi * phi);
  return b;
}

SymTensor3 korteweg_stress(const KortewegParams& p, double rho, const Vec3& g,
                           const SymTensor3& hess, const SymTensor3& dv) {
  p.validate();
  double a0 = 0.0;
  try {
    a0 = p.alpha0.eval(EvalContext(rho, {}));
  } catch (const DomainError& err) {
    throw EvaluationError("alpha0 at rho=" + std::to_string(rho) + ": " + err.what());
  }
  const double iso = a0 + p.a1 * hess.trace() + p.a2 * g.norm2() + p.lambda * dv.trace();
  SymTensor3 t = SymTensor3::spherical(iso);
  if (p.a3 != 0.0) t += p.a3 * outer(g, g);
  if (p.a4 != 0.0) t += p.a4 * hess;
  if (p.mu != 0.0) t += (2.0 * p.mu) * dv;
  return t;
}

double isotropy_check(const ResidualFn& f, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> density(0.5, 2.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double rho = density(rng);
    const Vec3 g{normal(rng), normal(rng), normal(rng)};
    std::array<double, 6> c;
    for (double& v : c) v = normal(rng);
    const SymTensor3 t = SymTensor3::from_array(c);
    const OrthogonalMatrix q = random_orthogonal(rng());

    const SymTensor3 base = f(rho, g, t);
    const SymTensor3 turned = f(rho, q.apply(g), q.rotate(t));
    const double err = (turned - q.rotate(base)).max_abs() / (base.max_abs() + 1.0);
    worst = std::max(worst, err);
  }
  return worst;
}

double isotropy_check(const ConstitutiveRelation& rel, int samples, std::uint64_t seed) {
  return isotropy_check(
      [&rel](double rho, const Vec3& g, const SymTensor3& t) {
        return residual_general(rel, rho, g, t);
      },
      samples, seed);
}

}  // namespace ifluid
