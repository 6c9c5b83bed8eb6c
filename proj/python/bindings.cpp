#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "implicitfluid/cli.hpp"
#include "implicitfluid/config.hpp"
#include "implicitfluid/culling.hpp"

namespace py = pybind11;
using namespace ifluid;

namespace {

Vec3 vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

EvalContext context(double rho, const std::array<double, 6>& inv) {
  return EvalContext(rho, {inv[0], inv[1], inv[2], inv[3], inv[4], inv[5]});
}

CoefficientSet coefficients(const std::map<int, std::string>& alphas) {
  CoefficientSet c;
  for (const auto& [i, src] : alphas) {
    if (i < 1 || i > 6) throw py::value_error("coefficient index must be 1..6");
    c[i] = Expr::parse(src);
  }
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Implicit constitutive relations for compressible fluids";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_ArithmeticError);
  py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);

  py::class_<SymTensor3>(m, "SymTensor3")
      .def(py::init<>())
      .def(py::init<double, double, double, double, double, double>(), py::arg("xx"), py::arg("yy"),
           py::arg("zz"), py::arg("xy") = 0.0, py::arg("xz") = 0.0, py::arg("yz") = 0.0)
      .def_static("identity", &SymTensor3::identity)
      .def_static("spherical", &SymTensor3::spherical)
      .def_readwrite("xx", &SymTensor3::xx)
      .def_readwrite("yy", &SymTensor3::yy)
      .def_readwrite("zz", &SymTensor3::zz)
      .def_readwrite("xy", &SymTensor3::xy)
      .def_readwrite("xz", &SymTensor3::xz)
      .def_readwrite("yz", &SymTensor3::yz)
      .def("trace", &SymTensor3::trace)
      .def("max_abs", &SymTensor3::max_abs)
      .def("to_list", &SymTensor3::to_array)
      .def("__repr__", [](const SymTensor3& t) {
        std::ostringstream os;
        os << "SymTensor3(" << t.xx << ", " << t.yy << ", " << t.zz << ", " << t.xy << ", " << t.xz << ", "
           << t.yz << ")";
        return os.str();
      });

  m.def("invariants",
        [](const SymTensor3& t, const std::array<double, 3>& g) { return invariants(t, vec3(g)).to_array(); },
        py::arg("stress"), py::arg("grad_rho") = std::array<double, 3>{});

  py::class_<Expr>(m, "Expr")
      .def_static("parse", &Expr::parse)
      .def("eval", [](const Expr& e, double rho, const std::array<double, 6>& inv) { return e.eval(context(rho, inv)); },
           py::arg("rho"), py::arg("invariants") = std::array<double, 6>{})
      .def("__str__", &Expr::to_string);

  py::enum_<Family>(m, "Family")
      .value("GeneralImplicit", Family::GeneralImplicit)
      .value("StressLinear", Family::StressLinear)
      .value("ImplicitEuler", Family::ImplicitEuler)
      .value("ClassicalEuler", Family::ClassicalEuler)
      .value("IdealGas", Family::IdealGas);

  py::class_<ConstitutiveRelation>(m, "ConstitutiveRelation")
      .def_static("general_implicit", [](const std::map<int, std::string>& a) {
        return ConstitutiveRelation::general_implicit(coefficients(a));
      })
      .def_static("stress_linear", [](const std::map<int, std::string>& a) {
        return ConstitutiveRelation::stress_linear(coefficients(a));
      })
      .def_static("implicit_euler", [](const std::map<int, std::string>& a) {
        return ConstitutiveRelation::implicit_euler(coefficients(a));
      })
      .def_static("classical_euler", [](const std::string& p) {
        return ConstitutiveRelation::classical_euler(Expr::parse(p));
      })
      .def_static("ideal_gas", &ConstitutiveRelation::ideal_gas)
      .def("with_frame_bias", &ConstitutiveRelation::with_frame_bias)
      .def_property_readonly("family", &ConstitutiveRelation::family);

  m.def("residual_general",
        [](const ConstitutiveRelation& r, double rho, const std::array<double, 3>& g, const SymTensor3& t) {
          return residual_general(r, rho, vec3(g), t);
        });
  m.def("residual_implicit_euler", &residual_implicit_euler);
  m.def("isotropy_check", py::overload_cast<const ConstitutiveRelation&, int, std::uint64_t>(&isotropy_check),
        py::arg("relation"), py::arg("samples") = 1000, py::arg("seed") = 0);
  m.def(
      "korteweg_stress",
      [](const std::string& alpha0, double a1, double a2, double a3, double a4, double lambda, double mu,
         double rho, const std::array<double, 3>& g, const SymTensor3& hess, const SymTensor3& dv) {
        KortewegParams p{Expr::parse(alpha0), a1, a2, a3, a4, lambda, mu};
        return korteweg_stress(p, rho, vec3(g), hess, dv);
      },
      py::arg("alpha0"), py::arg("a1") = 0.0, py::arg("a2") = 0.0, py::arg("a3") = 0.0, py::arg("a4") = 0.0,
      py::arg("lam") = 0.0, py::arg("mu") = 0.0, py::arg("rho") = 1.0, py::arg("grad_rho") = std::array<double, 3>{},
      py::arg("hess") = SymTensor3{}, py::arg("dv") = SymTensor3{});

  py::class_<NewtonSettings>(m, "NewtonSettings")
      .def(py::init<>())
      .def_readwrite("abs_tol", &NewtonSettings::abs_tol)
      .def_readwrite("rel_tol", &NewtonSettings::rel_tol)
      .def_readwrite("max_iter", &NewtonSettings::max_iter)
      .def_readwrite("fd_step", &NewtonSettings::fd_step);

  py::class_<RootReport>(m, "RootReport")
      .def_readonly("stress", &RootReport::stress)
      .def_readonly("phi", &RootReport::phi)
      .def_readonly("iterations", &RootReport::iterations)
      .def_readonly("residual_norm", &RootReport::residual_norm)
      .def_readonly("converged", &RootReport::converged)
      .def_readonly("branch", &RootReport::branch)
      .def_readonly("physical", &RootReport::physical)
      .def_readonly("diagnostic", &RootReport::diagnostic);

  py::class_<SphericalRoots>(m, "SphericalRoots")
      .def_readonly("roots", &SphericalRoots::roots)
      .def_readonly("degenerate", &SphericalRoots::degenerate)
      .def_readonly("diagnostic", &SphericalRoots::diagnostic);

  m.def(
      "solve_stress",
      [](const ConstitutiveRelation& r, double rho, const std::array<double, 3>& g, const SymTensor3& t0,
         const NewtonSettings& s) { return solve_stress(r, rho, vec3(g), t0, s); },
      py::arg("relation"), py::arg("rho"), py::arg("grad_rho") = std::array<double, 3>{},
      py::arg("initial") = SymTensor3{}, py::arg("settings") = NewtonSettings{});
  m.def(
      "solve_spherical",
      [](const ConstitutiveRelation& r, double rho, double phi0, const NewtonSettings& s,
         std::optional<double> lo, std::optional<double> hi) {
        return solve_spherical(r, rho, phi0, s, ScanSettings{lo, hi});
      },
      py::arg("relation"), py::arg("rho"), py::arg("phi0") = 1.0, py::arg("settings") = NewtonSettings{},
      py::arg("scan_min") = py::none(), py::arg("scan_max") = py::none());
  m.def("integrate_profile", &integrate_profile, py::arg("density"), py::arg("y"), py::arg("y_top"),
        py::arg("phi_top"), py::arg("n_panels"), py::arg("grav"));

  py::class_<HalfSpaceGrid>(m, "HalfSpaceGrid")
      .def(py::init<double, int, double>(), py::arg("y_min"), py::arg("n_points"), py::arg("grav"))
      .def("points", &HalfSpaceGrid::points)
      .def_property_readonly("spacing", &HalfSpaceGrid::spacing);

  py::class_<HydrostaticSolution>(m, "HydrostaticSolution")
      .def_readonly("rho", &HydrostaticSolution::rho)
      .def_readonly("phi", &HydrostaticSolution::phi)
      .def_property_readonly("y", [](const HydrostaticSolution& s) { return s.grid.points(); });

  py::class_<BalanceReport>(m, "BalanceReport")
      .def_readonly("mass_residual", &BalanceReport::mass_residual)
      .def_readonly("momentum_residual", &BalanceReport::momentum_residual)
      .def_readonly("step", &BalanceReport::step);

  m.def("ideal_gas_profile", &ideal_gas_profile, py::arg("K"), py::arg("C"), py::arg("grid"));
  m.def(
      "phi_from_density",
      [](const std::function<double(double)>& rho, double phi0, const HalfSpaceGrid& grid, int panels) {
        return phi_from_density(DensityLaw::smooth(rho), phi0, grid, panels);
      },
      py::arg("density"), py::arg("phi0"), py::arg("grid"), py::arg("panels_per_cell") = 2);
  m.def("consistency_on_profile", [](const ConstitutiveRelation& r, const HydrostaticSolution& s) {
    const ProfileConsistency pc = consistency_on_profile(r, s);
    return py::make_tuple(pc.h, pc.max_abs_h, pc.normalized());
  });
  m.def("verify_balances", &verify_balances, py::arg("solution"), py::arg("fd_step") = 0.0);

  py::class_<Observation>(m, "Observation").def_readonly("name", &Observation::name);
  m.def("profile_observation", [](std::string name, const HydrostaticSolution& s) {
    return Observation{std::move(name), s, std::nullopt};
  });
  m.def("generate_observation", &generate_observation, py::arg("relation"), py::arg("grid"), py::arg("phi0"),
        py::arg("noise") = 0.0, py::arg("seed") = 0, py::arg("name") = "generated",
        py::arg("settings") = NewtonSettings{});
  m.def(
      "cull",
      [](const std::vector<std::pair<std::string, ConstitutiveRelation>>& cands,
         const std::vector<Observation>& obs, double tol) {
        CandidateSet cs;
        for (const auto& [n, r] : cands) cs.push_back({n, r});
        const CullingReport rep = cull(cs, obs, tol);
        return py::module_::import("json").attr("loads")(rep.to_json());
      },
      py::arg("candidates"), py::arg("observations"), py::arg("tol") = 1e-8);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
