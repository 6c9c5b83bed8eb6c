#include "implicitfluid/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace ifluid {

namespace {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

Vector6 to_vector(const SymTensor3& t) {
  const auto a = t.to_array();
  return Vector6(a.data());
}

SymTensor3 to_tensor(const Vector6& v) {
  return SymTensor3::from_array({v[0], v[1], v[2], v[3], v[4], v[5]});
}

struct ScalarRoot {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

// Safeguarded Newton inside a sign-change bracket [a, b]; falls back to
// bisection whenever the Newton step leaves the bracket.
template <class F>
ScalarRoot refine_bracket(const F& f, double a, double b, double fa, double fb,
                          const NewtonSettings& s) {
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  double x = 0.5 * (a + b);
  double fx = f(x);
  int it = 0;
  for (; it < 200; ++it) {
    if (fx == 0.0 || std::abs(fx) <= s.abs_tol) break;
    if ((fx < 0.0) == (fa < 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    const double width_floor = 4.0 * kEps * std::max(1.0, std::abs(x));
    if (std::abs(b - a) <= width_floor) break;

    const double step = s.fd_step * std::max(1.0, std::abs(x));
    const double slope = (f(x + step) - f(x - step)) / (2.0 * step);
    double next = std::isfinite(slope) && slope != 0.0 ? x - fx / slope : 0.5 * (a + b);
    if (!(next > std::min(a, b) && next < std::max(a, b))) next = 0.5 * (a + b);
    const bool tiny_step = std::abs(next - x) <= width_floor;
    x = next;
    fx = f(x);
    if (tiny_step) break;
  }
  return {x, fx, it + 1};
}

double checked_h(const ConstitutiveRelation& rel, double rho, double phi) {
  try {
    return spherical_balance(rel, rho, phi).h;
  } catch (const EvaluationError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

bool converged_scalar(const SphericalBalance& b, double phi, const NewtonSettings& s) {
  return std::abs(b.h) <= s.abs_tol + s.rel_tol * std::max(std::abs(phi), b.scale);
}

RootReport spherical_report(const ConstitutiveRelation& rel, double rho, double phi,
                            int iterations, const NewtonSettings& s) {
  const SphericalBalance b = spherical_balance(rel, rho, phi);
  RootReport r;
  r.phi = phi;
  r.stress = SymTensor3::spherical(-phi);
  r.iterations = iterations;
  r.residual_norm = std::abs(b.h);
  r.converged = converged_scalar(b, phi, s);
  r.history = {r.residual_norm};
  return r;
}

constexpr std::array<double, 8> kDegeneracyProbes{-100.0, -10.0, -1.0, -0.1, 0.1, 1.0, 10.0, 100.0};

}  // namespace

void NewtonSettings::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(fd_step > 0.0)) throw std::invalid_argument("fd_step must be positive");
}

RootReport solve_stress(const ConstitutiveRelation& rel, double rho, const Vec3& g,
                        const SymTensor3& initial, const NewtonSettings& s) {
  s.validate();
  if (!(rho > 0.0)) throw std::invalid_argument("density must be positive");
  if (!initial.is_finite() || !g.is_finite()) throw std::invalid_argument("inputs must be finite");

  auto residual = [&](const Vector6& x) { return to_vector(residual_general(rel, rho, g, to_tensor(x))); };

  RootReport report;
  Vector6 x = to_vector(initial);
  Vector6 fx;
  try {
    fx = residual(x);
  } catch (const EvaluationError& e) {
    report.stress = initial;
    report.diagnostic = e.what();
    return report;
  }

  for (int it = 0;; ++it) {
    const double norm = fx.lpNorm<Eigen::Infinity>();
    report.history.push_back(norm);
    report.iterations = it;
    report.stress = to_tensor(x);
    report.residual_norm = norm;
    report.phi = -report.stress.trace() / 3.0;
    // One extra Newton step after the tolerance is met, kept only if it
    // lowers the residual further.
    if (norm <= s.abs_tol + s.rel_tol * x.lpNorm<Eigen::Infinity>()) {
      if (report.converged) return report;
      report.converged = true;
    }
    if (it == s.max_iter) {
      if (!report.converged) report.diagnostic = "no convergence after " + std::to_string(s.max_iter) + " iterations";
      return report;
    }

    Matrix6 jac;
    try {
      for (int j = 0; j < 6; ++j) {
        const double h = s.fd_step * std::max(1.0, std::abs(x[j]));
        Vector6 xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        jac.col(j) = (residual(xp) - residual(xm)) / (2.0 * h);
      }
    } catch (const EvaluationError& e) {
      if (!report.converged) report.diagnostic = std::string("jacobian evaluation failed: ") + e.what();
      return report;
    }

    Vector6 dx;
    Eigen::FullPivLU<Matrix6> lu(jac);
    if (lu.isInvertible())
      dx = lu.solve(-fx);
    else
      dx = jac.completeOrthogonalDecomposition().solve(-fx);
    if (!dx.allFinite() || dx.isZero(0.0)) {
      if (!report.converged) report.diagnostic = "singular Jacobian";
      return report;
    }

    bool accepted = false;
    double lambda = 1.0;
    for (int halving = 0; halving <= 30 && !accepted; ++halving, lambda *= 0.5) {
      const Vector6 trial = x + lambda * dx;
      try {
        const Vector6 ft = residual(trial);
        if (ft.allFinite() && ft.lpNorm<Eigen::Infinity>() < norm) {
          x = trial;
          fx = ft;
          accepted = true;
        }
      } catch (const EvaluationError&) {
      }
    }
    if (!accepted) {
      if (!report.converged) report.diagnostic = "singular Jacobian: no descent after 30 step halvings";
      return report;
    }
  }
}

const RootReport* SphericalRoots::physical() const {
  for (const auto& r : roots)
    if (r.physical) return &r;
  return nullptr;
}

bool spherical_degenerate(const ConstitutiveRelation& rel, double rho, const NewtonSettings& s) {
  int evaluated = 0;
  for (double phi : kDegeneracyProbes) {
    SphericalBalance b;
    try {
      b = spherical_balance(rel, rho, phi);
    } catch (const EvaluationError&) {
      continue;
    }
    ++evaluated;
    if (!(std::abs(b.h) <= s.abs_tol + s.rel_tol * b.scale)) return false;
  }
  return evaluated >= 4;
}

SphericalRoots solve_spherical(const ConstitutiveRelation& rel, double rho, double phi0,
                               const NewtonSettings& s, const ScanSettings& scan) {
  s.validate();
  if (!(rho > 0.0)) throw std::invalid_argument("density must be positive");
  if (!rel.is_euler_type())
    throw ValidationError("solve_spherical needs an implicit_euler, classical_euler or ideal_gas relation");
  if (scan.probes < 2) throw std::invalid_argument("scan needs at least 2 probes");

  SphericalRoots out;
  if (spherical_degenerate(rel, rho, s)) {
    out.degenerate = true;
    out.diagnostic = "consistency condition vanishes identically: relation does not constrain phi";
    return out;
  }

  const std::optional<double> p_euler = rel.euler_pressure(rho);
  const double estimate = p_euler ? std::abs(*p_euler) : std::abs(phi0);
  const double lo = scan.lo.value_or(0.0);
  const double hi = scan.hi.value_or(10.0 * std::max(1.0, estimate));
  if (!(hi > lo)) throw std::invalid_argument("scan interval is empty");

  auto h = [&](double phi) { return checked_h(rel, rho, phi); };
  std::vector<double> found;
  std::vector<int> iterations;
  auto add_root = [&](double phi, int its) {
    for (double f : found)
      if (std::abs(f - phi) <= 1e-8 * std::max(1.0, std::abs(phi))) return;
    found.push_back(phi);
    iterations.push_back(its);
  };

  const double dphi = (hi - lo) / (scan.probes - 1);
  double prev_x = lo;
  double prev_h = h(lo);
  if (prev_h == 0.0) add_root(lo, 0);
  for (int k = 1; k < scan.probes; ++k) {
    const double x = k + 1 == scan.probes ? hi : lo + k * dphi;
    const double hx = h(x);
    if (hx == 0.0) {
      add_root(x, 0);
    } else if (std::isfinite(hx) && std::isfinite(prev_h) && prev_h != 0.0 &&
               (hx < 0.0) != (prev_h < 0.0)) {
      const ScalarRoot r = refine_bracket(h, prev_x, x, prev_h, hx, s);
      add_root(r.x, r.iterations);
    }
    prev_x = x;
    prev_h = hx;
  }

  // Newton from the caller's guess picks up double roots that show no sign
  // change. Roots it reaches outside the scan interval are dropped.
  double x = phi0;
  for (int it = 1; it <= s.max_iter; ++it) {
    const double hx = h(x);
    if (!std::isfinite(hx)) break;
    if (std::abs(hx) <= s.abs_tol) {
      if (x >= lo && x <= hi) add_root(x, it);
      break;
    }
    const double step = s.fd_step * std::max(1.0, std::abs(x));
    const double slope = (h(x + step) - h(x - step)) / (2.0 * step);
    if (!std::isfinite(slope) || slope == 0.0) break;
    const double dx = -hx / slope;
    x += dx;
    if (std::abs(dx) <= 1e-14 * std::max(1.0, std::abs(x))) {
      if (x >= lo && x <= hi && std::isfinite(h(x)) && converged_scalar(spherical_balance(rel, rho, x), x, s))
        add_root(x, it);
      break;
    }
  }

  std::vector<std::size_t> order(found.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(found[a]) < std::abs(found[b]); });
  for (std::size_t i : order) {
    RootReport r = spherical_report(rel, rho, found[i], iterations[i], s);
    r.branch = "branch " + std::to_string(out.roots.size());
    out.roots.push_back(std::move(r));
  }

  if (out.roots.empty()) {
    out.diagnostic = "no real root in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
    return out;
  }
  std::size_t pick = 0;
  if (p_euler) {
    for (std::size_t i = 1; i < out.roots.size(); ++i)
      if (std::abs(out.roots[i].phi - *p_euler) < std::abs(out.roots[pick].phi - *p_euler)) pick = i;
  }
  out.roots[pick].physical = true;
  return out;
}

std::optional<double> solve_density(const ConstitutiveRelation& rel, double phi, double rho_guess,
                                    const NewtonSettings& s) {
  if (!(rho_guess > 0.0)) throw std::invalid_argument("density guess must be positive");
  auto f = [&](double rho) {
    return rho > 0.0 ? checked_h(rel, rho, phi) : std::numeric_limits<double>::quiet_NaN();
  };

  const double f0 = f(rho_guess);
  if (f0 == 0.0) return rho_guess;

  // Plain Newton first: along a profile the guess is the neighbouring density.
  double x = rho_guess;
  for (int it = 0; it < 12 && std::isfinite(f0); ++it) {
    const double step = s.fd_step * x;
    const double slope = (f(x + step) - f(x - step)) / (2.0 * step);
    if (!std::isfinite(slope) || slope == 0.0) break;
    const double next = x - f(x) / slope;
    if (!(next > 0.5 * x && next < 2.0 * x)) break;
    x = next;
    const double fx = f(x);
    if (!std::isfinite(fx)) break;
    const SphericalBalance b = spherical_balance(rel, x, phi);
    if (std::abs(fx) <= s.abs_tol + s.rel_tol * b.scale) return x;
  }

  double up_x = rho_guess, up_f = f0;
  double dn_x = rho_guess, dn_f = f0;
  constexpr double kGrowth = 1.25;
  for (double factor = kGrowth; factor < 1e12; factor *= kGrowth) {
    const double ux = rho_guess * factor;
    const double uf = f(ux);
    if (std::isfinite(uf) && std::isfinite(up_f) && (uf < 0.0) != (up_f < 0.0))
      return refine_bracket(f, up_x, ux, up_f, uf, s).x;
    up_x = ux;
    up_f = uf;

    const double dx = rho_guess / factor;
    const double df = f(dx);
    if (std::isfinite(df) && std::isfinite(dn_f) && (df < 0.0) != (dn_f < 0.0))
      return refine_bracket(f, dx, dn_x, df, dn_f, s).x;
    dn_x = dx;
    dn_f = df;
  }
  return std::nullopt;
}

double integrate_profile(const std::function<double(double)>& density, double y, double y_top,
                         double phi_top, int n_panels, double grav) {
  if (!(y <= y_top)) throw std::invalid_argument("integrate_profile requires y <= y_top");
  if (n_panels < 2 || n_panels % 2 != 0)
    throw std::invalid_argument("n_panels must be even and >= 2");
  if (y == y_top) return phi_top;

  const double h = (y_top - y) / n_panels;
  auto sample = [&](int k) {
    const double s = k == n_panels ? y_top : y + k * h;
    const double v = density(s);
    if (!std::isfinite(v)) throw QuadratureError("non-finite density at y=" + std::to_string(s), s);
    return v;
  };
  double sum = sample(0) + sample(n_panels);
  for (int k = 1; k < n_panels; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * sample(k);
  return phi_top + grav * h / 3.0 * sum;
}

}  // namespace ifluid
