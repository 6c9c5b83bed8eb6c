#include "implicitfluid/hydrostatics.hpp"

#include <algorithm>
#include <cmath>

#include "implicitfluid/solver.hpp"

namespace ifluid {

HalfSpaceGrid::HalfSpaceGrid(double y_min, int n_points, double grav)
    : y_min_(y_min), n_points_(n_points), grav_(grav) {
  if (!(y_min < 0.0) || !std::isfinite(y_min)) throw std::invalid_argument("y_min must be negative");
  if (n_points < 3) throw std::invalid_argument("grid needs at least 3 points");
  if (!(grav > 0.0) || !std::isfinite(grav)) throw std::invalid_argument("gravity must be positive");
}

double HalfSpaceGrid::y(int i) const {
  if (i == n_points_ - 1) return 0.0;
  return y_min_ * static_cast<double>(n_points_ - 1 - i) / (n_points_ - 1);
}

std::vector<double> HalfSpaceGrid::points() const {
  std::vector<double> out(n_points_);
  for (int i = 0; i < n_points_; ++i) out[i] = y(i);
  return out;
}

void HydrostaticSolution::validate() const {
  const auto n = static_cast<std::size_t>(grid.size());
  if (rho.size() != n || phi.size() != n)
    throw std::invalid_argument("profile length does not match grid");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(rho[i] > 0.0) || !std::isfinite(rho[i]))
      throw std::invalid_argument("density must be positive at y=" + std::to_string(grid.y(i)));
    if (!std::isfinite(phi[i]))
      throw std::invalid_argument("phi must be finite at y=" + std::to_string(grid.y(i)));
  }
}

HydrostaticSolution ideal_gas_profile(double k, double c, const HalfSpaceGrid& grid) {
  if (!(k > 0.0) || !(c > 0.0)) throw std::invalid_argument("K and C must be positive");
  const double rate = grid.grav() / c;
  if (!std::isfinite(k * c * std::exp(-rate * grid.y_min())))
    throw std::overflow_error("ideal-gas profile overflows at y_min=" + std::to_string(grid.y_min()) +
                              "; truncate the grid (raise y_min)");
  HydrostaticSolution sol{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (int i = 0; i < grid.size(); ++i) {
    sol.rho[i] = k * std::exp(-rate * grid.y(i));
    sol.phi[i] = c * sol.rho[i];
  }
  return sol;
}

DensityLaw DensityLaw::uniform(double rho0) {
  if (!(rho0 > 0.0)) throw std::invalid_argument("density must be positive");
  return smooth([rho0](double) { return rho0; });
}

DensityLaw DensityLaw::exponential(double k, double height) {
  if (!(k > 0.0) || !(height > 0.0)) throw std::invalid_argument("K and height must be positive");
  return smooth([k, height](double y) { return k * std::exp(-y / height); });
}

DensityLaw DensityLaw::smooth(std::function<double(double)> rho) {
  return DensityLaw({{-std::numeric_limits<double>::infinity(), std::move(rho)}});
}

DensityLaw DensityLaw::layered(std::vector<Layer> layers) {
  if (layers.empty()) throw std::invalid_argument("layered density needs at least one layer");
  double top = 0.0;
  for (const auto& l : layers) {
    if (!(l.y_bottom < top)) throw std::invalid_argument("layers must be listed top-down");
    top = l.y_bottom;
  }
  layers.back().y_bottom = -std::numeric_limits<double>::infinity();
  return DensityLaw(std::move(layers));
}

double DensityLaw::operator()(double y) const {
  for (const auto& l : layers_)
    if (y > l.y_bottom) return l.rho(y);
  return layers_.back().rho(y);
}

double DensityLaw::integrate(double a, double b, double grav, int n_panels) const {
  double sum = 0.0;
  double top = 0.0;
  for (const auto& l : layers_) {
    const double lo = std::max(a, l.y_bottom);
    const double hi = std::min(b, top);
    if (hi > lo) sum += integrate_profile(l.rho, lo, hi, 0.0, n_panels, grav);
    top = l.y_bottom;
    if (top <= a) break;
  }
  return sum;
}

HydrostaticSolution phi_from_density(const DensityLaw& density, double phi0,
                                     const HalfSpaceGrid& grid, int panels_per_cell) {
  if (!std::isfinite(phi0)) throw std::invalid_argument("phi0 must be finite");
  const int n = grid.size();
  HydrostaticSolution sol{grid, std::vector<double>(n), std::vector<double>(n)};
  sol.phi[n - 1] = phi0;
  sol.rho[n - 1] = density(0.0);
  for (int i = n - 2; i >= 0; --i) {
    sol.rho[i] = density(grid.y(i));
    sol.phi[i] = sol.phi[i + 1] + density.integrate(grid.y(i), grid.y(i + 1), grid.grav(), panels_per_cell);
  }
  sol.validate();
  return sol;
}

ProfileConsistency consistency_on_profile(const ConstitutiveRelation& rel,
                                          const HydrostaticSolution& sol) {
  if (!rel.is_euler_type())
    throw ValidationError("profile consistency needs an implicit_euler, classical_euler or ideal_gas relation");
  sol.validate();
  ProfileConsistency out;
  out.h.resize(sol.rho.size());
  for (std::size_t i = 0; i < sol.rho.size(); ++i) {
    SphericalBalance b;
    try {
      b = spherical_balance(rel, sol.rho[i], sol.phi[i]);
    } catch (const EvaluationError& e) {
      throw EvaluationError("at y=" + std::to_string(sol.grid.y(static_cast<int>(i))) + ": " + e.what());
    }
    out.h[i] = b.h;
    out.max_abs_h = std::max(out.max_abs_h, std::abs(b.h));
    out.alpha_scale = std::max(out.alpha_scale, std::abs(b.alpha1));
  }
  return out;
}

BalanceReport verify_balances(const HydrostaticSolution& sol, double fd_step) {
  sol.validate();
  const int n = sol.grid.size();
  if (n < 5) throw std::invalid_argument("grid too coarse: need at least 5 points");
  const double dy = sol.grid.spacing();
  const int stride = fd_step > 0.0 ? std::max(1, static_cast<int>(std::lround(fd_step / dy))) : 1;
  if (2 * stride >= n - 1) throw std::invalid_argument("grid too coarse for the requested step");

  BalanceReport r;
  r.step = stride * dy;
  const double g = sol.grid.grav();
  for (int i = stride; i + stride < n; ++i) {
    const double dphi = (sol.phi[i + stride] - sol.phi[i - stride]) / (sol.grid.y(i + stride) - sol.grid.y(i - stride));
    const double weight = sol.rho[i] * g;
    r.momentum_residual = std::max(r.momentum_residual, std::abs(-dphi - weight) / weight);
  }
  return r;
}

}  // namespace ifluid
