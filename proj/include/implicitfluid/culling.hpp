#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "implicitfluid/constitutive.hpp"
#include "implicitfluid/hydrostatics.hpp"
#include "implicitfluid/solver.hpp"

namespace ifluid {

/// One measured state: density, density gradient and stress.
struct StressSample {
  double rho = 1.0;
  Vec3 grad_rho;
  SymTensor3 stress;
};

struct Observation {
  std::string name;
  std::variant<HydrostaticSolution, std::vector<StressSample>> data;
  std::optional<double> tol;

  /// Throws std::invalid_argument on an empty sample set or rho <= 0.
  void validate() const;
};

struct Candidate {
  std::string name;
  ConstitutiveRelation relation;
};

using CandidateSet = std::vector<Candidate>;

enum class Verdict { Consistent, Inconsistent, Degenerate, EvaluationError };

std::string_view verdict_name(Verdict v);

struct CullCell {
  Verdict verdict = Verdict::EvaluationError;
  /// max |residual| / (1 + max |a1|); NaN when evaluation failed.
  double residual = 0.0;
  std::string message;
};

struct CullingReport {
  std::vector<std::string> candidates;
  std::vector<std::string> observations;
  double tol = 0.0;
  std::vector<std::vector<CullCell>> cells;  // [candidate][observation]
  /// Candidates consistent with, or unconstrained by, every observation.
  std::vector<std::string> survivors;

  /// Pretty-printed JSON document.
  std::string to_json(int indent = 2) const;
  std::string to_table() const;
};

/// Classifies every (candidate, observation) pair. Per-cell failures are
/// recorded in the cell; only malformed inputs throw.
CullingReport cull(const CandidateSet& candidates, const std::vector<Observation>& observations,
                   double tol = 1e-8);

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Synthetic hydrostatic observation for `rel`: integrates dphi/dy = -g rho(phi)
/// downwards from phi(0) = phi0, with rho(phi) obtained by inverting the
/// relation, then applies independent multiplicative uniform noise of relative
/// amplitude `noise` to rho and phi.
Observation generate_observation(const ConstitutiveRelation& rel, const HalfSpaceGrid& grid,
                                 double phi0, double noise, std::uint64_t seed,
                                 std::string name = "generated",
                                 const NewtonSettings& settings = {});

}  // namespace ifluid
