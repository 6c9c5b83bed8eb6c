#pragma once

// Relations and hand-computed cases shared by the unit suites and the
// acceptance binary.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "implicitfluid/constitutive.hpp"

namespace ifluid::testing {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline CoefficientSet coeffs(const std::map<int, std::string>& src) {
  CoefficientSet c;
  for (const auto& [i, s] : src) c[i] = Expr::parse(s);
  return c;
}

/// a1 = A phi rho / K, a2 = A rho / K: h vanishes on any phi = C rho profile.
inline ConstitutiveRelation first_family(double a = 1.0, double k = 1.0) {
  const std::string f = num(a / k);
  return ConstitutiveRelation::implicit_euler(coeffs({{1, f + "*phi*rho"}, {2, f + "*rho"}}));
}

/// a1 = A phi^2 rho / K, a2 = A phi rho / K: h vanishes for every phi.
inline ConstitutiveRelation second_family(double a = 1.0, double k = 1.0) {
  const std::string f = num(a / k);
  return ConstitutiveRelation::implicit_euler(coeffs({{1, f + "*phi^2*rho"}, {2, f + "*phi*rho"}}));
}

/// Euler fluid with p = rho for rho <= 3 and p = 3 rho - 6 above: agrees with
/// the ideal gas C = 1 on thin profiles and departs from it at high density.
inline ConstitutiveRelation stiffening_gas() {
  return ConstitutiveRelation::classical_euler(Expr::parse("rho + (rho - 3 + abs(rho - 3))"));
}

struct KortewegCase {
  std::string name;
  KortewegParams params;
  double rho;
  Vec3 g;
  SymTensor3 hess;
  SymTensor3 dv;
  SymTensor3 expected;  // evaluated by hand, term by term
};

inline std::vector<KortewegCase> korteweg_cases() {
  std::vector<KortewegCase> out;
  {
    KortewegCase c{"gradient terms", {}, 1.0, {1, 0, 0}, {}, {}, {3, 1, 1, 0, 0, 0}};
    c.params.a2 = 1.0;
    c.params.a3 = 2.0;
    out.push_back(c);
  }
  {
    KortewegCase c{"viscous terms", {}, 1.0, {}, {}, SymTensor3::identity(), SymTensor3::spherical(5.0)};
    c.params.lambda = 1.0;
    c.params.mu = 1.0;
    out.push_back(c);
  }
  {
    // iso = rho^2 + 2 tr H = 4 + 12
    KortewegCase c{"hessian terms", {}, 2.0, {}, {1, 2, 3, 0.5, 0, 0}, {}, {15, 14, 13, -0.5, 0, 0}};
    c.params.alpha0 = Expr::parse("rho^2");
    c.params.a1 = 2.0;
    c.params.a4 = -1.0;
    out.push_back(c);
  }
  {
    // |g|^2 = 9, iso = 4.5, g(x)g = (1, 4, 4, 2, 2, 4)
    KortewegCase c{"oblique gradient", {}, 1.0, {1, 2, 2}, {}, {}, {5.5, 8.5, 8.5, 2, 2, 4}};
    c.params.a2 = 0.5;
    c.params.a3 = 1.0;
    out.push_back(c);
  }
  {
    // iso = -3 + 1*3 + 2*1 - 0.5*0 = 2; then + 3 g(x)g + 4 H + 2 Dv
    KortewegCase c{"all terms", {}, 3.0, {0, 1, 0}, {1, 1, 1, 0, 0, 0.25}, {1, 0, -1, 0.5, 0, 0},
                   {8, 9, 4, 1, 0, 1}};
    c.params.alpha0 = Expr::parse("-rho");
    c.params.a1 = 1.0;
    c.params.a2 = 2.0;
    c.params.a3 = 3.0;
    c.params.a4 = 4.0;
    c.params.lambda = -0.5;
    c.params.mu = 1.0;
    out.push_back(c);
  }
  return out;
}

/// One representative relation per family, with every admissible generator
/// switched on.
inline std::vector<std::pair<std::string, ConstitutiveRelation>> family_representatives() {
  return {
      {"general_implicit",
       ConstitutiveRelation::general_implicit(coeffs({{1, "rho*(1 + 0.1*i1) - 0.05*i2 + 0.01*i3"},
                                                      {2, "1 + 0.2*i4 - 0.1*i5"},
                                                      {3, "0.3 + 0.01*i6"},
                                                      {4, "0.2*rho"},
                                                      {5, "0.1*exp(-0.1*i4)"},
                                                      {6, "0.05*phi"}}))},
      {"stress_linear", ConstitutiveRelation::stress_linear(coeffs({{1, "rho^2 + 0.3*i1 - 0.1*i4 + 0.2*i5"},
                                                                     {2, "1 + 0.1*i4"},
                                                                     {3, "0.5*rho + 0.1*phi"},
                                                                     {5, "0.25*rho/(1 + i4)"}}))},
      {"implicit_euler", ConstitutiveRelation::implicit_euler(coeffs(
                             {{1, "rho + 0.1*i1 + 0.01*i2"}, {2, "1 + 0.05*i3/(1 + i2)"}, {4, "0.3*rho"}}))},
      {"classical_euler", ConstitutiveRelation::classical_euler(Expr::parse("rho^1.4 + 0.5*rho"))},
      {"ideal_gas", ConstitutiveRelation::ideal_gas(2.5)},
  };
}

// h = rho (a - b phi + c phi^2)
inline ConstitutiveRelation scaled_quadratic(double a, double b, double c) {
  return ConstitutiveRelation::implicit_euler(
      coeffs({{1, num(a) + "*rho"}, {2, num(b) + "*rho"}, {4, num(c) + "*rho"}}));
}

}  // namespace ifluid::testing
