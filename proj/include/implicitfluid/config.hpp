#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "implicitfluid/constitutive.hpp"
#include "implicitfluid/culling.hpp"
#include "implicitfluid/hydrostatics.hpp"
#include "implicitfluid/solver.hpp"

namespace ifluid {

/// Malformed or unresolvable configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RelationSpec {
  std::string name;
  Family family = Family::ImplicitEuler;
  std::array<std::string, 6> alpha;  // empty string: coefficient absent
  std::string pressure;              // classical_euler
  double gas_constant = 0.0;         // ideal_gas "C"
  double frame_bias = 0.0;

  ConstitutiveRelation build() const;
};

struct GridSpec {
  double y_min = -10.0;
  int n_points = 1001;
  double grav = 1.0;

  HalfSpaceGrid build() const { return HalfSpaceGrid(y_min, n_points, grav); }
};

struct DensityLawSpec {
  std::string type = "uniform";  // uniform | exponential | layered
  double rho = 1.0;
  double k = 1.0;
  double height = 1.0;
  std::vector<std::pair<double, double>> layers;  // (y_bottom, rho), top-down

  DensityLaw build() const;
};

struct ObservationSpec {
  std::string name;
  std::string type;  // ideal_gas | generated | density_law | profile_csv | samples
  double k = 1.0;
  double c = 1.0;
  std::string relation;
  std::optional<double> phi0;
  double noise = 0.0;
  std::optional<std::uint64_t> seed;
  std::optional<DensityLawSpec> law;
  std::string path;
  std::vector<StressSample> samples;
  std::optional<GridSpec> grid;
  std::optional<double> tol;
};

/// Parsed run configuration. Relative paths resolve against `base_dir`.
struct RunConfig {
  std::vector<RelationSpec> relations;
  GridSpec grid;
  std::optional<double> phi0;
  std::optional<double> surface_k;
  std::optional<DensityLawSpec> density_law;
  NewtonSettings solver;
  ScanSettings scan;
  std::vector<std::string> candidates;  // empty: every relation
  std::vector<ObservationSpec> observations;
  double tol = 1e-8;
  std::string out_dir;
  std::filesystem::path base_dir;

  /// Parses and validates; every expression is parsed and every relation
  /// name resolved. Throws ConfigError.
  static RunConfig from_json_text(const std::string& text, std::filesystem::path base_dir = {});
  static RunConfig load(const std::filesystem::path& path);
  std::string to_json_text(int indent = 2) const;

  const RelationSpec& relation(const std::string& name) const;
  /// Surface phi(0) for `rel`: explicit phi0, else p(K) for an Euler fluid,
  /// else the physical spherical root at rho = K, else 0.
  double surface_phi(const ConstitutiveRelation& rel) const;
  /// Materializes one observation (reads files, generates profiles).
  Observation build_observation(const ObservationSpec& spec, std::uint64_t default_seed) const;
};

/// Profile CSV with header y,rho,phi[,h_residual]; 17 significant digits.
std::string profile_csv(const HydrostaticSolution& sol, const std::vector<double>& h);
HydrostaticSolution read_profile_csv(const std::filesystem::path& path, double grav);

/// Writes via a temporary file and rename so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace ifluid
