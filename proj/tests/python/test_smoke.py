import json
import math

import pytest

import implicitfluid as ifl


def test_expression_round_trip():
    e = ifl.Expr.parse("2 + 3*rho^2")
    assert e.eval(rho=2.0) == 14.0
    assert ifl.Expr.parse(str(e)).eval(rho=2.0) == 14.0
    with pytest.raises(ifl.ParseError):
        ifl.Expr.parse("2 +")
    with pytest.raises(ifl.DomainError):
        ifl.Expr.parse("log(rho - 1)").eval(rho=1.0)


def test_family_restrictions():
    with pytest.raises(ifl.ValidationError):
        ifl.ConstitutiveRelation.stress_linear({4: "1"})
    rel = ifl.ConstitutiveRelation.implicit_euler({1: "phi*rho", 2: "rho"})
    assert rel.family == ifl.Family.ImplicitEuler


def test_ideal_gas_stress():
    report = ifl.solve_stress(ifl.ConstitutiveRelation.ideal_gas(1.0), 2.0)
    assert report.converged
    assert report.stress.to_list() == pytest.approx([-2, -2, -2, 0, 0, 0], abs=1e-10)
    roots = ifl.solve_spherical(ifl.ConstitutiveRelation.implicit_euler({1: "2", 2: "3", 4: "1"}), 1.0)
    assert sorted(r.phi for r in roots.roots) == pytest.approx([1.0, 2.0], abs=1e-10)


def test_hydrostatic_profile_and_culling():
    grid = ifl.HalfSpaceGrid(-10.0, 2001, 1.0)
    sol = ifl.phi_from_density(lambda y: math.exp(-y), 1.0, grid)
    assert max(abs(p / math.exp(-y) - 1.0) for p, y in zip(sol.phi, sol.y)) <= 1e-8
    assert ifl.verify_balances(sol).momentum_residual <= 1e-5

    obs = ifl.profile_observation("ideal gas", ifl.ideal_gas_profile(1.0, 1.0, grid))
    report = ifl.cull(
        [
            ("IdealGas C", ifl.ConstitutiveRelation.ideal_gas(1.0)),
            ("IdealGas 2C", ifl.ConstitutiveRelation.ideal_gas(2.0)),
            ("FamilyA", ifl.ConstitutiveRelation.implicit_euler({1: "phi*rho", 2: "rho"})),
            ("FamilyB", ifl.ConstitutiveRelation.implicit_euler({1: "phi^2*rho", 2: "phi*rho"})),
        ],
        [obs],
    )
    assert report["survivors"] == ["IdealGas C", "FamilyA", "FamilyB"]


def test_isotropy_and_korteweg():
    assert ifl.isotropy_check(ifl.ConstitutiveRelation.ideal_gas(2.5), 200, 1) <= 1e-10
    biased = ifl.ConstitutiveRelation.ideal_gas(2.5).with_frame_bias(1.0)
    assert ifl.isotropy_check(biased, 200, 1) > 0.1
    t = ifl.korteweg_stress("rho^2", rho=3.0)
    assert t.to_list() == [9, 9, 9, 0, 0, 0]


def test_cli_entry_point(tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"relations": [{"name": "gas", "family": "ideal_gas", "C": 1.0}]}))
    code, out, err = ifl.run_cli(["--config", str(cfg), "solve-stress", "--relation", "gas", "--rho", "2", "--json"])
    assert code == 0, err
    assert json.loads(out)["converged"]
    code, _, err = ifl.run_cli(["--config", str(cfg), "solve-stress", "--relation", "gas", "--rho", "-1"])
    assert code == 2
    assert "density must be positive" in err
