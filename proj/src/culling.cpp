#include "implicitfluid/culling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ifluid {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool degenerate_on_profile(const ConstitutiveRelation& rel, const HydrostaticSolution& sol, double tol) {
  const int n = sol.grid.size();
  const int picks = std::min(n, 8);
  for (int k = 0; k < picks; ++k) {
    const int i = picks == 1 ? 0 : static_cast<int>(std::lround(double(k) * (n - 1) / (picks - 1)));
    // a relation that fits the profile but also admits these phi values
    // does not constrain phi there
    const double p = sol.phi[i];
    for (double phi : {0.5 * p, 2.0 * p, -p, p + 1.0}) {
      try {
        const SphericalBalance b = spherical_balance(rel, sol.rho[i], phi);
        if (!(std::abs(b.h) <= tol * (1.0 + b.scale))) return false;
      } catch (const EvaluationError&) {
        return false;
      }
    }
  }
  return true;
}

CullCell judge_profile(const ConstitutiveRelation& rel, const HydrostaticSolution& sol, double tol) {
  if (!rel.is_euler_type())
    return {Verdict::EvaluationError, kNaN,
            "profile observations need an implicit_euler, classical_euler or ideal_gas relation"};
  const ProfileConsistency pc = consistency_on_profile(rel, sol);
  CullCell cell{Verdict::Inconsistent, pc.normalized(), {}};
  if (pc.consistent(tol))
    cell.verdict = degenerate_on_profile(rel, sol, tol) ? Verdict::Degenerate : Verdict::Consistent;
  return cell;
}

CullCell judge_samples(const ConstitutiveRelation& rel, const std::vector<StressSample>& samples, double tol) {
  double worst = 0.0;
  double scale = 0.0;
  for (const auto& s : samples) {
    const bool gradient_free = s.grad_rho == Vec3{};
    const SymTensor3 r = rel.is_euler_type() && gradient_free
                             ? residual_implicit_euler(rel, s.rho, s.stress)
                             : residual_general(rel, s.rho, s.grad_rho, s.stress);
    worst = std::max(worst, r.max_abs());
    scale = std::max(scale, std::abs(rel.moduli(s.rho, invariants(s.stress, s.grad_rho))[1]));
  }
  const double normalized = worst / (1.0 + scale);
  return {normalized <= tol ? Verdict::Consistent : Verdict::Inconsistent, normalized, {}};
}

}  // namespace

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Inconsistent: return "inconsistent";
    case Verdict::Degenerate: return "degenerate";
    case Verdict::EvaluationError: return "evaluation-error";
  }
  return "?";
}

void Observation::validate() const {
  if (const auto* sol = std::get_if<HydrostaticSolution>(&data)) {
    sol->validate();
    return;
  }
  const auto& samples = std::get<std::vector<StressSample>>(data);
  if (samples.empty()) throw std::invalid_argument("observation '" + name + "' has no samples");
  for (const auto& s : samples) {
    if (!(s.rho > 0.0) || !std::isfinite(s.rho))
      throw std::invalid_argument("observation '" + name + "': density must be positive");
    if (!s.stress.is_finite() || !s.grad_rho.is_finite())
      throw std::invalid_argument("observation '" + name + "': non-finite sample");
  }
  if (tol && !(*tol > 0.0)) throw std::invalid_argument("observation '" + name + "': tol must be positive");
}

CullingReport cull(const CandidateSet& candidates, const std::vector<Observation>& observations, double tol) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  if (observations.empty()) throw std::invalid_argument("no observations");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  std::set<std::string> seen;
  for (const auto& c : candidates)
    if (!seen.insert(c.name).second) throw std::invalid_argument("duplicate candidate name '" + c.name + "'");
  seen.clear();
  for (const auto& o : observations) {
    if (!seen.insert(o.name).second) throw std::invalid_argument("duplicate observation name '" + o.name + "'");
    o.validate();
  }

  CullingReport report;
  report.tol = tol;
  for (const auto& o : observations) report.observations.push_back(o.name);
  for (const auto& c : candidates) {
    report.candidates.push_back(c.name);
    auto& row = report.cells.emplace_back();
    bool survives = true;
    for (const auto& o : observations) {
      const double cell_tol = o.tol.value_or(tol);
      CullCell cell;
      try {
        if (const auto* sol = std::get_if<HydrostaticSolution>(&o.data))
          cell = judge_profile(c.relation, *sol, cell_tol);
        else
          cell = judge_samples(c.relation, std::get<std::vector<StressSample>>(o.data), cell_tol);
      } catch (const std::exception& e) {
        cell = {Verdict::EvaluationError, kNaN, e.what()};
      }
      survives = survives && (cell.verdict == Verdict::Consistent || cell.verdict == Verdict::Degenerate);
      row.push_back(std::move(cell));
    }
    if (survives) report.survivors.push_back(c.name);
  }
  return report;
}

std::string CullingReport::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["candidates"] = candidates;
  j["observations"] = observations;
  j["tolerance"] = tol;
  auto verdicts = nlohmann::ordered_json::array();
  auto residuals = nlohmann::ordered_json::array();
  auto messages = nlohmann::ordered_json::array();
  for (const auto& row : cells) {
    auto v = nlohmann::ordered_json::array();
    auto r = nlohmann::ordered_json::array();
    auto m = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      v.push_back(verdict_name(c.verdict));
      if (std::isfinite(c.residual))
        r.push_back(c.residual);
      else
        r.push_back(nullptr);
      m.push_back(c.message);
    }
    verdicts.push_back(std::move(v));
    residuals.push_back(std::move(r));
    messages.push_back(std::move(m));
  }
  j["verdicts"] = std::move(verdicts);
  j["residuals"] = std::move(residuals);
  j["messages"] = std::move(messages);
  j["survivors"] = survivors;
  return j.dump(indent);
}

std::string CullingReport::to_table() const {
  std::vector<std::vector<std::string>> text(candidates.size(), std::vector<std::string>(observations.size()));
  std::vector<std::size_t> width(observations.size());
  for (std::size_t j = 0; j < observations.size(); ++j) {
    width[j] = observations[j].size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      std::ostringstream cell;
      cell << verdict_name(cells[i][j].verdict);
      if (std::isfinite(cells[i][j].residual)) cell << " " << std::setprecision(2) << cells[i][j].residual;
      text[i][j] = cell.str();
      width[j] = std::max(width[j], text[i][j].size());
    }
  }
  std::size_t name_w = 9;
  for (const auto& c : candidates) name_w = std::max(name_w, c.size());

  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(name_w)) << "candidate";
  for (std::size_t j = 0; j < observations.size(); ++j)
    os << "  " << std::setw(static_cast<int>(width[j])) << observations[j];
  os << "  survives\n";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    os << std::setw(static_cast<int>(name_w)) << candidates[i];
    for (std::size_t j = 0; j < observations.size(); ++j) os << "  " << std::setw(static_cast<int>(width[j])) << text[i][j];
    const bool alive = std::find(survivors.begin(), survivors.end(), candidates[i]) != survivors.end();
    os << "  " << (alive ? "yes" : "no") << "\n";
  }
  os << "survivors:";
  for (const auto& s : survivors) os << " " << s;
  if (survivors.empty()) os << " (none)";
  os << "\n";
  return os.str();
}

Observation generate_observation(const ConstitutiveRelation& rel, const HalfSpaceGrid& grid, double phi0,
                                 double noise, std::uint64_t seed, std::string name,
                                 const NewtonSettings& settings) {
  if (!rel.is_euler_type())
    throw GenerationError("observation generation needs an implicit_euler, classical_euler or ideal_gas relation");
  if (!(noise >= 0.0) || noise >= 1.0) throw std::invalid_argument("noise amplitude must be in [0, 1)");
  if (!std::isfinite(phi0)) throw std::invalid_argument("phi0 must be finite");
  if (spherical_degenerate(rel, 0.1, settings) && spherical_degenerate(rel, 1.0, settings) &&
      spherical_degenerate(rel, 10.0, settings))
    throw GenerationError("relation does not determine phi from rho: consistency condition vanishes identically");

  auto density = [&](double phi, double guess) {
    const std::optional<double> rho = solve_density(rel, phi, guess, settings);
    if (!rho) throw GenerationError("no solvable density branch at phi=" + std::to_string(phi));
    return *rho;
  };

  const int n = grid.size();
  const double g = grid.grav();
  HydrostaticSolution sol{grid, std::vector<double>(n), std::vector<double>(n)};

  double guess = 1.0;
  if (rel.family() == Family::IdealGas && phi0 > 0.0) guess = phi0 / rel.gas_constant();
  double phi = phi0;
  double rho = density(phi, guess);
  sol.phi[n - 1] = phi;
  sol.rho[n - 1] = rho;

  // RK4 on dphi/dy = -g rho(phi), marching down from the surface.
  const int substeps = std::max(1, (4096 + n - 2) / (n - 1));
  for (int i = n - 2; i >= 0; --i) {
    const double dy = (grid.y(i) - grid.y(i + 1)) / substeps;
    for (int k = 0; k < substeps; ++k) {
      const double r1 = density(phi, rho);
      const double r2 = density(phi - 0.5 * dy * g * r1, r1);
      const double r3 = density(phi - 0.5 * dy * g * r2, r2);
      const double r4 = density(phi - dy * g * r3, r3);
      phi -= dy * g * (r1 + 2.0 * r2 + 2.0 * r3 + r4) / 6.0;
      rho = r4;
    }
    rho = density(phi, rho);
    sol.phi[i] = phi;
    sol.rho[i] = rho;
  }

  if (noise > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < n; ++i) {
      sol.rho[i] *= 1.0 + noise * u(rng);
      sol.phi[i] *= 1.0 + noise * u(rng);
    }
  }
  sol.validate();
  return Observation{std::move(name), std::move(sol), std::nullopt};
}

}  // namespace ifluid
