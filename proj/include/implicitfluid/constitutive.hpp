#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "implicitfluid/expr.hpp"
#include "implicitfluid/tensor3.hpp"

namespace ifluid {

enum class Family { GeneralImplicit, StressLinear, ImplicitEuler, ClassicalEuler, IdealGas };

std::string_view family_name(Family f);
/// Accepts the snake_case names used in configuration files.
Family family_from_name(std::string_view name);

/// A relation violates its family's coefficient restrictions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A coefficient expression failed to evaluate. The message names the
/// coefficient and the state at which it failed.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// alpha_1 .. alpha_6 (index 0 .. 5). An absent coefficient is zero.
struct CoefficientSet {
  std::array<std::optional<Expr>, 6> alpha;

  const std::optional<Expr>& operator[](int i) const { return alpha.at(i - 1); }
  std::optional<Expr>& operator[](int i) { return alpha.at(i - 1); }
};

/// Evaluated moduli at one state.
struct Moduli {
  std::array<double, 6> a{};
  double operator[](int i) const { return a[i - 1]; }
};

/// An implicit (or explicit Euler) relation f(rho, grad rho, T) = 0 written
/// in the isotropic representation
///   a1 I + a2 T + a3 g(x)g + a4 T^2 + a5 (g(x)Tg + Tg(x)g) + a6 (g(x)T^2g + T^2g(x)g).
/// Euler fluids map to a1 = p(rho), a2 = 1.
class ConstitutiveRelation {
 public:
  /// Every alpha may reference rho, i1..i6, phi.
  static ConstitutiveRelation general_implicit(CoefficientSet c);
  /// Linear in T: a4 = a6 = 0; a1, a3 over {rho, i1, i4, i5}; a2, a5 over {rho, i4}.
  static ConstitutiveRelation stress_linear(CoefficientSet c);
  /// Density-stress relation: a3 = a5 = a6 = 0, coefficients over {rho, i1, i2, i3}.
  static ConstitutiveRelation implicit_euler(CoefficientSet c);
  /// T = -p(rho) I; pressure may reference rho only.
  static ConstitutiveRelation classical_euler(Expr pressure);
  /// p = C rho with C > 0.
  static ConstitutiveRelation ideal_gas(double c);

  Family family() const { return family_; }
  const CoefficientSet& coefficients() const { return coeffs_; }
  const std::optional<Expr>& pressure() const { return pressure_; }
  double gas_constant() const { return gas_constant_; }

  /// Families whose residual depends on T only through a1, a2, a4.
  bool is_euler_type() const;
  /// p(rho) for ClassicalEuler/IdealGas; nullopt otherwise.
  std::optional<double> euler_pressure(double rho) const;

  Moduli moduli(double rho, const InvariantSet& inv) const;

  /// Adds bias * e1(x)e1 to every residual. Breaks isotropy on purpose and
  /// exists to exercise isotropy_check; zero for every physical relation.
  ConstitutiveRelation with_frame_bias(double bias) const;
  double frame_bias() const { return frame_bias_; }

 private:
  ConstitutiveRelation() = default;

  Family family_ = Family::GeneralImplicit;
  CoefficientSet coeffs_;
  std::optional<Expr> pressure_;
  double gas_constant_ = 0.0;
  double frame_bias_ = 0.0;
};

/// Constant parameters of the explicit Korteweg stress.
struct KortewegParams {
  Expr alpha0 = Expr::constant(0.0);  // over rho only
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
  double lambda = 0.0, mu = 0.0;

  /// Throws ValidationError unless mu >= 0, 3 lambda + 2 mu >= 0 and
  /// alpha0 depends on rho alone.
  void validate() const;
};

SymTensor3 residual_general(const ConstitutiveRelation& rel, double rho, const Vec3& g,
                            const SymTensor3& t);

/// Residual with grad rho = 0; requires an Euler-type relation.
SymTensor3 residual_implicit_euler(const ConstitutiveRelation& rel, double rho,
                                   const SymTensor3& t);

/// a1, a2, a4 at the spherical stress -phi I and the scalar
/// h = a1 - a2 phi + a4 phi^2 that must vanish for -phi I to satisfy the relation.
struct SphericalBalance {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha4 = 0.0;
  double h = 0.0;
  /// |a1| + |a2 phi| + |a4 phi^2|, the natural size of h.
  double scale = 0.0;
};

SphericalBalance spherical_balance(const ConstitutiveRelation& rel, double rho, double phi);

/// T = (a0(rho) + a1 tr H + a2 |g|^2) I + a3 g(x)g + a4 H + lambda (tr Dv) I + 2 mu Dv,
/// H the density Hessian.
SymTensor3 korteweg_stress(const KortewegParams& p, double rho, const Vec3& g,
                           const SymTensor3& hess, const SymTensor3& dv);

using ResidualFn = std::function<SymTensor3(double rho, const Vec3& g, const SymTensor3& t)>;

/// Max over random (rho, g, T, Q) of
///   |f(rho, Qg, QTQ^T) - Q f(rho, g, T) Q^T|_inf / (|f(rho, g, T)|_inf + 1).
double isotropy_check(const ResidualFn& f, int samples, std::uint64_t seed);
double isotropy_check(const ConstitutiveRelation& rel, int samples, std::uint64_t seed);

}  // namespace ifluid
