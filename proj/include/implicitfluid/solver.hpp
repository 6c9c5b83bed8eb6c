#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "implicitfluid/constitutive.hpp"
#include "implicitfluid/tensor3.hpp"

namespace ifluid {

struct NewtonSettings {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_iter = 100;
  double fd_step = 1e-7;  // relative, for central-difference Jacobians

  /// Throws std::invalid_argument on nonpositive tolerances or max_iter < 1.
  void validate() const;
};

/// Interval and resolution of the bracketing scan for spherical roots.
/// Unset bounds default to [0, 10 max(1, p_estimate)].
struct ScanSettings {
  std::optional<double> lo;
  std::optional<double> hi;
  int probes = 1024;
};

struct RootReport {
  SymTensor3 stress;  // solution tensor (-phi I for spherical roots)
  double phi = 0.0;
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
  std::string branch;
  /// Selected physical branch among several roots.
  bool physical = false;
  /// Residual norm at the start of every iteration plus the final one.
  std::vector<double> history;
  std::string diagnostic;
};

/// Damped Newton on the six stress components with a central-difference
/// Jacobian. Never throws for non-convergence; check `converged`.
RootReport solve_stress(const ConstitutiveRelation& rel, double rho, const Vec3& g,
                        const SymTensor3& initial, const NewtonSettings& s = {});

struct SphericalRoots {
  std::vector<RootReport> roots;  // ordered by |phi|
  /// h(phi) vanished at every probe: the relation does not constrain phi.
  bool degenerate = false;
  std::string diagnostic;

  const RootReport* physical() const;
};

/// Real roots of h(phi) = a1 - a2 phi + a4 phi^2, coefficients evaluated at
/// i1 = -3 phi, i2 = 3 phi^2, i3 = -3 phi^3.
SphericalRoots solve_spherical(const ConstitutiveRelation& rel, double rho, double phi0,
                               const NewtonSettings& s = {}, const ScanSettings& scan = {});

/// True when h(rho, phi) is zero at every probe phi, i.e. the relation
/// admits every spherical stress at this density.
bool spherical_degenerate(const ConstitutiveRelation& rel, double rho, const NewtonSettings& s = {});

/// Density rho > 0 with h(rho, phi) = 0, searched outward from rho_guess.
std::optional<double> solve_density(const ConstitutiveRelation& rel, double phi, double rho_guess,
                                    const NewtonSettings& s = {});

/// Non-finite density sample during quadrature.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double location)
      : std::runtime_error(what), location_(location) {}
  double location() const { return location_; }

 private:
  double location_;
};

/// phi_top + integral from y to y_top of grav * density(s) ds by composite
/// Simpson with n_panels (even, >= 2) panels.
double integrate_profile(const std::function<double(double)>& density, double y, double y_top,
                         double phi_top, int n_panels, double grav);

}  // namespace ifluid
