#include "implicitfluid/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ifluid {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <class T>
std::optional<T> opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return opt<T>(j, key).value_or(fallback);
}

void require_object(const json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
}

RelationSpec parse_relation(const json& j) {
  require_object(j, "relation");
  RelationSpec r;
  r.name = j.at("name").get<std::string>();
  if (r.name.empty()) throw ConfigError("relation name must not be empty");
  r.family = family_from_name(j.at("family").get<std::string>());
  for (int i = 0; i < 6; ++i) r.alpha[i] = get_or<std::string>(j, ("alpha" + std::to_string(i + 1)).c_str(), "");
  r.pressure = get_or<std::string>(j, "pressure", "");
  r.gas_constant = get_or<double>(j, "C", 0.0);
  r.frame_bias = get_or<double>(j, "frame_bias", 0.0);
  return r;
}

ordered_json relation_json(const RelationSpec& r) {
  ordered_json j;
  j["name"] = r.name;
  j["family"] = family_name(r.family);
  for (int i = 0; i < 6; ++i)
    if (!r.alpha[i].empty()) j["alpha" + std::to_string(i + 1)] = r.alpha[i];
  if (!r.pressure.empty()) j["pressure"] = r.pressure;
  if (r.family == Family::IdealGas) j["C"] = r.gas_constant;
  if (r.frame_bias != 0.0) j["frame_bias"] = r.frame_bias;
  return j;
}

GridSpec parse_grid(const json& j) {
  require_object(j, "grid");
  GridSpec g;
  g.y_min = get_or<double>(j, "y_min", g.y_min);
  g.n_points = get_or<int>(j, "n_points", g.n_points);
  g.grav = get_or<double>(j, "g", g.grav);
  g.build();  // validates
  return g;
}

ordered_json grid_json(const GridSpec& g) {
  return ordered_json{{"y_min", g.y_min}, {"n_points", g.n_points}, {"g", g.grav}};
}

DensityLawSpec parse_law(const json& j) {
  require_object(j, "density law");
  DensityLawSpec d;
  d.type = get_or<std::string>(j, "type", d.type);
  d.rho = get_or<double>(j, "rho", d.rho);
  d.k = get_or<double>(j, "K", d.k);
  d.height = get_or<double>(j, "height", d.height);
  if (j.contains("layers")) {
    for (const auto& l : j.at("layers"))
      d.layers.emplace_back(get_or<double>(l, "y_bottom", -INFINITY), l.at("rho").get<double>());
  }
  d.build();  // validates
  return d;
}

ordered_json law_json(const DensityLawSpec& d) {
  ordered_json j{{"type", d.type}};
  if (d.type == "uniform") j["rho"] = d.rho;
  if (d.type == "exponential") {
    j["K"] = d.k;
    j["height"] = d.height;
  }
  if (d.type == "layered") {
    auto layers = ordered_json::array();
    for (const auto& [bottom, rho] : d.layers) {
      ordered_json l{{"rho", rho}};
      if (std::isfinite(bottom)) l["y_bottom"] = bottom;
      layers.push_back(std::move(l));
    }
    j["layers"] = std::move(layers);
  }
  return j;
}

StressSample parse_sample(const json& j) {
  StressSample s;
  s.rho = j.at("rho").get<double>();
  if (j.contains("grad_rho")) {
    const auto g = j.at("grad_rho").get<std::array<double, 3>>();
    s.grad_rho = {g[0], g[1], g[2]};
  }
  s.stress = SymTensor3::from_array(j.at("stress").get<std::array<double, 6>>());
  return s;
}

ordered_json sample_json(const StressSample& s) {
  return ordered_json{{"rho", s.rho},
                      {"grad_rho", {s.grad_rho.x, s.grad_rho.y, s.grad_rho.z}},
                      {"stress", s.stress.to_array()}};
}

ObservationSpec parse_observation(const json& j) {
  require_object(j, "observation");
  ObservationSpec o;
  o.name = j.at("name").get<std::string>();
  o.type = j.at("type").get<std::string>();
  o.k = get_or<double>(j, "K", o.k);
  o.c = get_or<double>(j, "C", o.c);
  o.relation = get_or<std::string>(j, "relation", "");
  o.phi0 = opt<double>(j, "phi0");
  o.noise = get_or<double>(j, "noise", 0.0);
  o.seed = opt<std::uint64_t>(j, "seed");
  if (j.contains("law")) o.law = parse_law(j.at("law"));
  o.path = get_or<std::string>(j, "path", "");
  if (j.contains("samples"))
    for (const auto& s : j.at("samples")) o.samples.push_back(parse_sample(s));
  if (j.contains("grid")) o.grid = parse_grid(j.at("grid"));
  o.tol = opt<double>(j, "tol");

  static const std::vector<std::string> kTypes{"ideal_gas", "generated", "density_law", "profile_csv", "samples"};
  if (std::find(kTypes.begin(), kTypes.end(), o.type) == kTypes.end())
    throw ConfigError("observation '" + o.name + "': unknown type '" + o.type + "'");
  if (o.type == "generated" && o.relation.empty())
    throw ConfigError("observation '" + o.name + "': generated observations need a relation");
  if (o.type == "density_law" && !o.law) throw ConfigError("observation '" + o.name + "': missing law");
  if (o.type == "profile_csv" && o.path.empty()) throw ConfigError("observation '" + o.name + "': missing path");
  if (o.type == "samples" && o.samples.empty() && o.path.empty())
    throw ConfigError("observation '" + o.name + "': samples or path required");
  return o;
}

ordered_json observation_json(const ObservationSpec& o) {
  ordered_json j{{"name", o.name}, {"type", o.type}};
  if (o.type == "ideal_gas") {
    j["K"] = o.k;
    j["C"] = o.c;
  }
  if (!o.relation.empty()) j["relation"] = o.relation;
  if (o.phi0) j["phi0"] = *o.phi0;
  if (o.type == "generated") j["noise"] = o.noise;
  if (o.seed) j["seed"] = *o.seed;
  if (o.law) j["law"] = law_json(*o.law);
  if (!o.path.empty()) j["path"] = o.path;
  if (!o.samples.empty()) {
    auto arr = ordered_json::array();
    for (const auto& s : o.samples) arr.push_back(sample_json(s));
    j["samples"] = std::move(arr);
  }
  if (o.grid) j["grid"] = grid_json(*o.grid);
  if (o.tol) j["tol"] = *o.tol;
  return j;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConstitutiveRelation RelationSpec::build() const {
  auto parse = [this](const std::string& src, const std::string& what) {
    try {
      return Expr::parse(src);
    } catch (const ParseError& e) {
      throw ConfigError("relation '" + name + "' " + what + ": " + e.what());
    }
  };
  try {
    ConstitutiveRelation rel = [&] {
      switch (family) {
        case Family::IdealGas: return ConstitutiveRelation::ideal_gas(gas_constant);
        case Family::ClassicalEuler:
          if (pressure.empty()) throw ConfigError("relation '" + name + "': classical_euler needs a pressure");
          return ConstitutiveRelation::classical_euler(parse(pressure, "pressure"));
        default: break;
      }
      CoefficientSet c;
      for (int i = 1; i <= 6; ++i)
        if (!alpha[i - 1].empty()) c[i] = parse(alpha[i - 1], "alpha" + std::to_string(i));
      if (family == Family::StressLinear) return ConstitutiveRelation::stress_linear(std::move(c));
      if (family == Family::ImplicitEuler) return ConstitutiveRelation::implicit_euler(std::move(c));
      return ConstitutiveRelation::general_implicit(std::move(c));
    }();
    return frame_bias != 0.0 ? rel.with_frame_bias(frame_bias) : rel;
  } catch (const ValidationError& e) {
    throw ConfigError("relation '" + name + "': " + e.what());
  }
}

DensityLaw DensityLawSpec::build() const {
  try {
    if (type == "uniform") return DensityLaw::uniform(rho);
    if (type == "exponential") return DensityLaw::exponential(k, height);
    if (type == "layered") {
      std::vector<DensityLaw::Layer> ls;
      for (const auto& [bottom, r] : layers) {
        if (!(r > 0.0)) throw std::invalid_argument("layer density must be positive");
        ls.push_back({bottom, [r](double) { return r; }});
      }
      return DensityLaw::layered(std::move(ls));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("density law: ") + e.what());
  }
  throw ConfigError("unknown density law type '" + type + "'");
}

RunConfig RunConfig::from_json_text(const std::string& text, std::filesystem::path base_dir) {
  RunConfig cfg;
  cfg.base_dir = std::move(base_dir);
  try {
    const json j = json::parse(text);
    require_object(j, "configuration");
    if (j.contains("relations"))
      for (const auto& r : j.at("relations")) cfg.relations.push_back(parse_relation(r));
    if (j.contains("grid")) cfg.grid = parse_grid(j.at("grid"));
    if (j.contains("surface")) {
      cfg.phi0 = opt<double>(j.at("surface"), "phi0");
      cfg.surface_k = opt<double>(j.at("surface"), "K");
    }
    if (j.contains("density_law")) cfg.density_law = parse_law(j.at("density_law"));
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      cfg.solver.abs_tol = get_or<double>(s, "abs_tol", cfg.solver.abs_tol);
      cfg.solver.rel_tol = get_or<double>(s, "rel_tol", cfg.solver.rel_tol);
      cfg.solver.max_iter = get_or<int>(s, "max_iter", cfg.solver.max_iter);
      cfg.solver.fd_step = get_or<double>(s, "fd_step", cfg.solver.fd_step);
      cfg.scan.lo = opt<double>(s, "scan_min");
      cfg.scan.hi = opt<double>(s, "scan_max");
      cfg.scan.probes = get_or<int>(s, "scan_probes", cfg.scan.probes);
    }
    if (j.contains("candidates")) cfg.candidates = j.at("candidates").get<std::vector<std::string>>();
    if (j.contains("observations"))
      for (const auto& o : j.at("observations")) cfg.observations.push_back(parse_observation(o));
    cfg.tol = get_or<double>(j, "tol", cfg.tol);
    cfg.out_dir = get_or<std::string>(j, "output_dir", "");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }

  try {
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");

  std::vector<std::string> names;
  for (const auto& r : cfg.relations) {
    if (std::find(names.begin(), names.end(), r.name) != names.end())
      throw ConfigError("duplicate relation name '" + r.name + "'");
    names.push_back(r.name);
    r.build();
  }
  for (const auto& c : cfg.candidates) cfg.relation(c);
  for (const auto& o : cfg.observations)
    if (!o.relation.empty()) cfg.relation(o.relation);
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  return from_json_text(read_text(path), path.parent_path());
}

std::string RunConfig::to_json_text(int indent) const {
  ordered_json j;
  auto rels = ordered_json::array();
  for (const auto& r : relations) rels.push_back(relation_json(r));
  j["relations"] = std::move(rels);
  j["grid"] = grid_json(grid);
  ordered_json surface = ordered_json::object();
  if (phi0) surface["phi0"] = *phi0;
  if (surface_k) surface["K"] = *surface_k;
  j["surface"] = std::move(surface);
  if (density_law) j["density_law"] = law_json(*density_law);
  ordered_json s{{"abs_tol", solver.abs_tol},
                 {"rel_tol", solver.rel_tol},
                 {"max_iter", solver.max_iter},
                 {"fd_step", solver.fd_step},
                 {"scan_probes", scan.probes}};
  if (scan.lo) s["scan_min"] = *scan.lo;
  if (scan.hi) s["scan_max"] = *scan.hi;
  j["solver"] = std::move(s);
  j["candidates"] = candidates;
  auto obs = ordered_json::array();
  for (const auto& o : observations) obs.push_back(observation_json(o));
  j["observations"] = std::move(obs);
  j["tol"] = tol;
  if (!out_dir.empty()) j["output_dir"] = out_dir;
  return j.dump(indent);
}

const RelationSpec& RunConfig::relation(const std::string& name) const {
  for (const auto& r : relations)
    if (r.name == name) return r;
  throw ConfigError("unknown relation '" + name + "'");
}

double RunConfig::surface_phi(const ConstitutiveRelation& rel) const {
  if (phi0) return *phi0;
  if (!surface_k) return 0.0;
  if (const auto p = rel.euler_pressure(*surface_k)) return *p;
  if (rel.is_euler_type()) {
    const SphericalRoots roots = solve_spherical(rel, *surface_k, 1.0, solver, scan);
    if (const RootReport* r = roots.physical()) return r->phi;
  }
  return 0.0;
}

Observation RunConfig::build_observation(const ObservationSpec& spec, std::uint64_t default_seed) const {
  const HalfSpaceGrid g = spec.grid.value_or(grid).build();
  Observation obs{spec.name, std::vector<StressSample>{}, spec.tol};
  if (spec.type == "ideal_gas") {
    obs.data = ideal_gas_profile(spec.k, spec.c, g);
  } else if (spec.type == "generated") {
    const ConstitutiveRelation rel = relation(spec.relation).build();
    const double phi_top = spec.phi0 ? *spec.phi0 : surface_phi(rel);
    try {
      Observation gen = generate_observation(rel, g, phi_top, spec.noise, spec.seed.value_or(default_seed),
                                             spec.name, solver);
      obs.data = std::move(gen.data);
    } catch (const GenerationError& e) {
      throw ConfigError("observation '" + spec.name + "': " + e.what());
    }
  } else if (spec.type == "density_law") {
    obs.data = phi_from_density(spec.law->build(), spec.phi0.value_or(phi0.value_or(0.0)), g);
  } else if (spec.type == "profile_csv") {
    obs.data = read_profile_csv(base_dir / spec.path, g.grav());
  } else {  // samples
    std::vector<StressSample> samples = spec.samples;
    if (!spec.path.empty()) {
      const std::filesystem::path p = base_dir / spec.path;
      try {
        for (const auto& s : json::parse(read_text(p))) samples.push_back(parse_sample(s));
      } catch (const json::exception& e) {
        throw ConfigError("cannot parse samples in " + p.string() + ": " + e.what());
      }
    }
    obs.data = std::move(samples);
  }
  try {
    obs.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return obs;
}

std::string profile_csv(const HydrostaticSolution& sol, const std::vector<double>& h) {
  std::string out = "y,rho,phi,h_residual\n";
  for (int i = 0; i < sol.grid.size(); ++i) {
    out += format17(sol.grid.y(i)) + "," + format17(sol.rho[i]) + "," + format17(sol.phi[i]) + "," +
           (static_cast<std::size_t>(i) < h.size() ? format17(h[i]) : std::string("nan")) + "\n";
  }
  return out;
}

HydrostaticSolution read_profile_csv(const std::filesystem::path& path, double grav) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("y,rho,phi", 0) != 0)
    throw ConfigError(path.string() + ": header must start with y,rho,phi");
  std::vector<double> ys, rho, phi;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::array<double, 3> v{};
    for (double& x : v) {
      if (!std::getline(row, cell, ',')) throw ConfigError(path.string() + ": short row '" + line + "'");
      try {
        x = std::stod(cell);
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ": bad number '" + cell + "'");
      }
    }
    ys.push_back(v[0]);
    rho.push_back(v[1]);
    phi.push_back(v[2]);
  }
  if (ys.size() < 3) throw ConfigError(path.string() + ": need at least 3 rows");
  try {
    HalfSpaceGrid grid(ys.front(), static_cast<int>(ys.size()), grav);
    for (std::size_t i = 0; i < ys.size(); ++i)
      if (std::abs(ys[i] - grid.y(static_cast<int>(i))) > 1e-9 * std::abs(grid.y_min()))
        throw ConfigError(path.string() + ": y column must be uniform on [y_min, 0]");
    HydrostaticSolution sol{grid, std::move(rho), std::move(phi)};
    sol.validate();
    return sol;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ifluid
