#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "implicitfluid/constitutive.hpp"

namespace ifluid {

/// Uniform grid on [y_min, 0] for a fluid half-space below a free surface at
/// y = 0, under gravity b = -grav j.
class HalfSpaceGrid {
 public:
  HalfSpaceGrid(double y_min, int n_points, double grav);

  double y_min() const { return y_min_; }
  int size() const { return n_points_; }
  double grav() const { return grav_; }
  double spacing() const { return -y_min_ / (n_points_ - 1); }
  /// y(size()-1) is exactly 0.
  double y(int i) const;
  std::vector<double> points() const;

 private:
  double y_min_;
  int n_points_;
  double grav_;
};

/// Density and spherical stress scalar phi (T = -phi I) on a grid.
struct HydrostaticSolution {
  HalfSpaceGrid grid;
  std::vector<double> rho;
  std::vector<double> phi;

  double phi_surface() const { return phi.back(); }
  /// Throws std::invalid_argument on size mismatch or nonpositive density.
  void validate() const;
};

/// rho = K exp(-(g/C) y), phi = C rho.
HydrostaticSolution ideal_gas_profile(double k, double c, const HalfSpaceGrid& grid);

/// Piecewise density law rho(y). Each layer covers (y_bottom, y_top of the
/// layer above]; the integration never evaluates a layer outside its span, so
/// jumps between layers are integrated exactly.
class DensityLaw {
 public:
  struct Layer {
    double y_bottom;
    std::function<double(double)> rho;
  };

  static DensityLaw uniform(double rho0);
  /// rho = k exp(-y / height).
  static DensityLaw exponential(double k, double height);
  static DensityLaw smooth(std::function<double(double)> rho);
  /// Layers from the surface downwards; the last layer extends to -infinity.
  static DensityLaw layered(std::vector<Layer> layers);

  double operator()(double y) const;
  /// grav * integral of rho over [a, b] (a <= b <= 0), Simpson per layer piece.
  double integrate(double a, double b, double grav, int n_panels) const;

 private:
  explicit DensityLaw(std::vector<Layer> layers) : layers_(std::move(layers)) {}
  std::vector<Layer> layers_;
};

/// phi(y_i) = phi0 + integral_{y_i}^0 g rho(s) ds, accumulated cell by cell
/// from the surface with `panels_per_cell` Simpson panels per cell.
HydrostaticSolution phi_from_density(const DensityLaw& density, double phi0,
                                     const HalfSpaceGrid& grid, int panels_per_cell = 2);

struct ProfileConsistency {
  std::vector<double> h;  // a1 - a2 phi + a4 phi^2 per grid point
  double max_abs_h = 0.0;
  double alpha_scale = 0.0;  // max |a1| on the profile

  double normalized() const { return max_abs_h / (1.0 + alpha_scale); }
  bool consistent(double tol = 1e-8) const { return normalized() <= tol; }
};

/// Evaluates the spherical consistency condition along a profile. DSL
/// failures are rethrown as EvaluationError naming the grid location.
ProfileConsistency consistency_on_profile(const ConstitutiveRelation& rel,
                                          const HydrostaticSolution& sol);

struct BalanceReport {
  double mass_residual = 0.0;  // identically zero for a static field
  /// max over interior points of |-dphi/dy - rho g| / (rho g)
  double momentum_residual = 0.0;
  double step = 0.0;
};

/// Central-difference check of div T + rho b = 0 with T = -phi I. The
/// difference step is the multiple of the grid spacing closest to fd_step
/// (the spacing itself when fd_step <= 0).
BalanceReport verify_balances(const HydrostaticSolution& sol, double fd_step = 0.0);

}  // namespace ifluid
