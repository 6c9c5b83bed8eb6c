#include "implicitfluid/cli.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "implicitfluid/config.hpp"
#include "json.hpp"

namespace ifluid {

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::optional<int> max_iter;
};

std::string fmt(double v, int digits = 12) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string tensor_text(const SymTensor3& t) {
  std::string s = "[";
  const auto a = t.to_array();
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? " " : "") + fmt(a[i]);
  return s + "]  (xx yy zz xy xz yz)";
}

struct Session {
  GlobalOptions opts;
  RunConfig cfg;
  fs::path out_dir;

  explicit Session(const GlobalOptions& o) : opts(o) {
    cfg = RunConfig::load(o.config);
    if (o.max_iter) cfg.solver.max_iter = *o.max_iter;
    if (o.tol) cfg.tol = *o.tol;
    try {
      cfg.solver.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
    if (!o.out_dir.empty())
      out_dir = o.out_dir;
    else if (!cfg.out_dir.empty())
      out_dir = cfg.base_dir / cfg.out_dir;
    else
      out_dir = ".";
  }
};

int cmd_hydrostatic(const Session& s, const std::string& name, std::ostream& out, std::ostream& err) {
  const ConstitutiveRelation rel = s.cfg.relation(name).build();
  if (!rel.is_euler_type()) {
    err << "error: relation '" << name << "' has no spherical hydrostatic branch (family "
        << family_name(rel.family()) << ")\n";
    return kExitFailure;
  }
  const HalfSpaceGrid grid = s.cfg.grid.build();
  std::optional<HydrostaticSolution> sol;
  if (s.cfg.density_law) {
    sol = phi_from_density(s.cfg.density_law->build(), s.cfg.surface_phi(rel), grid);
  } else if (rel.family() == Family::IdealGas) {
    const double c = rel.gas_constant();
    const double k = s.cfg.surface_k ? *s.cfg.surface_k : (s.cfg.phi0 ? *s.cfg.phi0 / c : 0.0);
    if (!(k > 0.0)) {
      err << "error: ideal-gas profile needs a positive surface density K or phi0\n";
      return kExitFailure;
    }
    sol = ideal_gas_profile(k, c, grid);
  } else {
    try {
      Observation obs = generate_observation(rel, grid, s.cfg.surface_phi(rel), 0.0, s.opts.seed, name, s.cfg.solver);
      sol = std::get<HydrostaticSolution>(std::move(obs.data));
    } catch (const GenerationError& e) {
      err << "error: relation '" << name << "': " << e.what() << "\n";
      return kExitFailure;
    }
  }

  const ProfileConsistency pc = consistency_on_profile(rel, *sol);
  const BalanceReport balance = verify_balances(*sol);
  const fs::path csv = s.out_dir / ("hydrostatic_" + name + ".csv");
  write_file_atomic(csv, profile_csv(*sol, pc.h));

  out << "relation: " << name << " (" << family_name(rel.family()) << ")\n"
      << "points: " << grid.size() << " on [" << fmt(grid.y_min()) << ", 0], g = " << fmt(grid.grav()) << "\n"
      << "phi(0): " << fmt(sol->phi_surface()) << "\n"
      << "mass balance residual: " << fmt(balance.mass_residual) << "\n"
      << "momentum balance residual: " << fmt(balance.momentum_residual) << " (step " << fmt(balance.step) << ")\n"
      << "consistency max |h|: " << fmt(pc.max_abs_h) << " normalized " << fmt(pc.normalized())
      << (pc.consistent(s.cfg.tol) ? " (consistent)" : " (inconsistent)") << "\n"
      << "wrote " << csv.string() << "\n";
  return kExitOk;
}

int cmd_cull(const Session& s, std::ostream& out, std::ostream& err) {
  std::vector<std::string> names = s.cfg.candidates;
  if (names.empty())
    for (const auto& r : s.cfg.relations) names.push_back(r.name);
  if (names.empty()) {
    err << "error: no candidates\n";
    return kExitFailure;
  }
  if (s.cfg.observations.empty()) {
    err << "error: no observations\n";
    return kExitFailure;
  }
  CandidateSet candidates;
  for (const auto& n : names) candidates.push_back({n, s.cfg.relation(n).build()});
  std::vector<Observation> observations;
  for (const auto& spec : s.cfg.observations) observations.push_back(s.cfg.build_observation(spec, s.opts.seed));

  const CullingReport report = cull(candidates, observations, s.cfg.tol);
  const fs::path path = s.out_dir / "cull_report.json";
  write_file_atomic(path, report.to_json() + "\n");
  out << report.to_table() << "wrote " << path.string() << "\n";
  return kExitOk;
}

int cmd_check_isotropy(const Session& s, const std::string& name, int samples, std::ostream& out,
                       std::ostream& err) {
  if (samples < 1) {
    err << "error: samples must be >= 1\n";
    return kExitFailure;
  }
  const ConstitutiveRelation rel = s.cfg.relation(name).build();
  const double e = isotropy_check(rel, samples, s.opts.seed);
  constexpr double kLimit = 1e-8;
  out << "relation: " << name << "\n"
      << "samples: " << samples << " seed: " << s.opts.seed << "\n"
      << "max equivariance error: " << fmt(e, 6) << "\n"
      << (e <= kLimit ? "isotropic" : "NOT isotropic") << " (limit " << fmt(kLimit) << ")\n";
  return e <= kLimit ? kExitOk : kExitViolation;
}

int cmd_solve_stress(const Session& s, const std::string& name, double rho, const std::array<double, 3>& grad,
                     const std::array<double, 6>& guess, bool as_json, std::ostream& out, std::ostream& err) {
  if (!(rho > 0.0)) {
    err << "error: density must be positive\n";
    return kExitFailure;
  }
  const ConstitutiveRelation rel = s.cfg.relation(name).build();
  const Vec3 g{grad[0], grad[1], grad[2]};
  const SymTensor3 t0 = SymTensor3::from_array(guess);
  const RootReport r = solve_stress(rel, rho, g, t0, s.cfg.solver);

  std::optional<SphericalRoots> branches;
  if (rel.is_euler_type() && g == Vec3{}) branches = solve_spherical(rel, rho, -t0.trace() / 3.0, s.cfg.solver, s.cfg.scan);

  if (as_json) {
    nlohmann::ordered_json j{{"relation", name},
                             {"rho", rho},
                             {"converged", r.converged},
                             {"stress", r.stress.to_array()},
                             {"iterations", r.iterations},
                             {"residual", r.residual_norm}};
    if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
    if (branches) {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& b : branches->roots)
        arr.push_back({{"branch", b.branch}, {"phi", b.phi}, {"residual", b.residual_norm}, {"physical", b.physical}});
      j["spherical_branches"] = std::move(arr);
      j["degenerate"] = branches->degenerate;
    }
    out << j.dump(2) << "\n";
  } else {
    out << "relation: " << name << " rho = " << fmt(rho) << "\n";
    if (r.converged)
      out << "T = " << tensor_text(r.stress) << "\n";
    out << "iterations: " << r.iterations << " residual: " << fmt(r.residual_norm, 6)
        << (r.converged ? " (converged)" : " (not converged)") << "\n";
    if (branches) {
      if (branches->degenerate) {
        out << "spherical branches: every phi (" << branches->diagnostic << ")\n";
      } else {
        out << "spherical branches:";
        if (branches->roots.empty()) out << " none (" << branches->diagnostic << ")";
        out << "\n";
        for (const auto& b : branches->roots)
          out << "  " << b.branch << ": phi = " << fmt(b.phi) << (b.physical ? "  [physical]" : "") << "\n";
      }
    }
  }
  if (!r.converged) {
    err << "error: stress solve did not converge: " << r.diagnostic << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evaluate, solve and cull implicit constitutive relations of compressible fluids", "ifluid"};
  app.require_subcommand(1);

  GlobalOptions g;
  double tol = 0.0;
  int max_iter = 0;
  app.add_option("--config", g.config, "JSON run configuration")->required();
  app.add_option("--out-dir", g.out_dir, "directory for CSV/JSON artifacts");
  app.add_option("--seed", g.seed, "seed for every random draw")->default_val(0);
  auto* tol_opt = app.add_option("--tol", tol, "consistency tolerance (overrides config)");
  auto* iter_opt = app.add_option("--max-iter", max_iter, "Newton iteration cap (overrides config)");

  std::string relation;
  auto* hydro = app.add_subcommand("hydrostatic", "half-space hydrostatic profile for one relation");
  hydro->add_option("--relation", relation, "relation name")->required();

  auto* cull_cmd = app.add_subcommand("cull", "classify candidates against observations");

  int samples = 1000;
  auto* iso = app.add_subcommand("check-isotropy", "sample the equivariance error of a relation");
  iso->add_option("--relation", relation, "relation name")->required();
  iso->add_option("--samples", samples, "number of random states")->default_val(1000);

  double rho = 0.0;
  std::array<double, 3> grad{};
  std::array<double, 6> guess{};
  bool as_json = false;
  auto* solve = app.add_subcommand("solve-stress", "solve the relation for the stress at fixed density");
  solve->add_option("--relation", relation, "relation name")->required();
  solve->add_option("--rho", rho, "density")->required();
  solve->add_option("--grad", grad, "density gradient gx gy gz");
  solve->add_option("--guess", guess, "initial stress xx yy zz xy xz yz");
  solve->add_flag("--json", as_json, "print the report as JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFailure;
  }
  if (*tol_opt) g.tol = tol;
  if (*iter_opt) g.max_iter = max_iter;

  try {
    const Session session(g);
    if (*hydro) return cmd_hydrostatic(session, relation, out, err);
    if (*cull_cmd) return cmd_cull(session, out, err);
    if (*iso) return cmd_check_isotropy(session, relation, samples, out, err);
    if (*solve) return cmd_solve_stress(session, relation, rho, grad, guess, as_json, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace ifluid
