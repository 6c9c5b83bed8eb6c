#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "implicitfluid/hydrostatics.hpp"
#include "implicitfluid/solver.hpp"
#include "test_support.hpp"

using namespace ifluid;
using namespace ifluid::testing;

TEST(Grid, EndpointsAndSpacing) {
  const HalfSpaceGrid grid(-5.0, 11, 9.81);
  const auto y = grid.points();
  ASSERT_EQ(y.size(), 11u);
  EXPECT_EQ(y.front(), -5.0);
  EXPECT_EQ(y.back(), 0.0);
  EXPECT_EQ(grid.spacing(), 0.5);
  for (std::size_t i = 1; i < y.size(); ++i) EXPECT_GT(y[i], y[i - 1]);
  EXPECT_EQ(grid.y(6), -2.0);
}

TEST(Grid, LastPointExactlyZeroForAwkwardSizes) {
  for (int n : {3, 7, 1001, 2001}) {
    const HalfSpaceGrid grid(-std::sqrt(2.0), n, 1.0);
    EXPECT_EQ(grid.y(n - 1), 0.0);
    EXPECT_LT(grid.y(n - 2), 0.0);
  }
}

TEST(Grid, RejectsBadParameters) {
  EXPECT_THROW(HalfSpaceGrid(0.0, 10, 1.0), std::invalid_argument);
  EXPECT_THROW(HalfSpaceGrid(1.0, 10, 1.0), std::invalid_argument);
  EXPECT_THROW(HalfSpaceGrid(-1.0, 2, 1.0), std::invalid_argument);
  EXPECT_THROW(HalfSpaceGrid(-1.0, 10, 0.0), std::invalid_argument);
}

TEST(IdealGasProfile, SurfaceValues) {
  const auto sol = ideal_gas_profile(2.0, 3.0, HalfSpaceGrid(-1.0, 5, 1.0));
  EXPECT_EQ(sol.rho.back(), 2.0);
  EXPECT_EQ(sol.phi.back(), 6.0);
  EXPECT_EQ(sol.phi_surface(), 6.0);
}

TEST(IdealGasProfile, UnitCaseAtDepthOne) {
  const auto sol = ideal_gas_profile(1.0, 1.0, HalfSpaceGrid(-1.0, 3, 1.0));
  EXPECT_NEAR(sol.rho[0], std::exp(1.0), 1e-15);
  EXPECT_NEAR(sol.phi[0], std::exp(1.0), 1e-15);
}

TEST(IdealGasProfile, IncompressibleLimit) {
  for (double c : {1e3, 1e5, 1e7}) {
    const double k = 1.5, g = 2.0, y_min = -10.0;
    const auto sol = ideal_gas_profile(k, c, HalfSpaceGrid(y_min, 101, g));
    double dev = 0.0;
    for (double r : sol.rho) dev = std::max(dev, std::abs(r - k));
    const double first_order = g * std::abs(y_min) * k / c;
    EXPECT_LE(dev, first_order * (1.0 + 2.0 * g * std::abs(y_min) / c)) << c;
    EXPECT_GE(dev, first_order * 0.99) << c;
  }
}

TEST(IdealGasProfile, OverflowAdvisesTruncation) {
  try {
    ideal_gas_profile(1.0, 1e-3, HalfSpaceGrid(-10.0, 11, 1.0));
    FAIL();
  } catch (const std::overflow_error& e) {
    EXPECT_NE(std::string(e.what()).find("truncate"), std::string::npos);
  }
}

TEST(PhiFromDensity, ConstantDensityIsLinear) {
  const HalfSpaceGrid grid(-3.0, 31, 9.81);
  const auto sol = phi_from_density(DensityLaw::uniform(2.0), 0.0, grid);
  for (int i = 0; i < grid.size(); ++i) EXPECT_NEAR(sol.phi[i], -9.81 * 2.0 * grid.y(i), 1e-12);
}

TEST(PhiFromDensity, MatchesIdealGasClosedForm) {
  const double k = 1.0, c = 1.0;
  const HalfSpaceGrid grid(-10.0, 1025, 1.0);  // 2048 Simpson panels
  const auto exact = ideal_gas_profile(k, c, grid);
  const auto sol = phi_from_density(DensityLaw::exponential(k, c / grid.grav()), k * c, grid);
  for (int i = 0; i < grid.size(); ++i) ASSERT_NEAR(sol.phi[i] / exact.phi[i], 1.0, 1e-8) << grid.y(i);
}

TEST(PhiFromDensity, StackedLayers) {
  // rho = 1 above y = -2, rho = 3 below; phi = -y then 2 + 3 (-2 - y).
  const auto law = DensityLaw::layered({{-2.0, [](double) { return 1.0; }}, {-100.0, [](double) { return 3.0; }}});
  for (int n : {11, 8}) {
    const HalfSpaceGrid grid(-5.0, n, 1.0);
    const auto sol = phi_from_density(law, 0.0, grid);
    for (int i = 0; i < n; ++i) {
      const double y = grid.y(i);
      const double want = y >= -2.0 ? -y : 2.0 + 3.0 * (-2.0 - y);
      EXPECT_NEAR(sol.phi[i], want, 1e-12) << "n=" << n << " y=" << y;
    }
  }
  EXPECT_EQ(law(-1.0), 1.0);
  EXPECT_EQ(law(-2.0), 3.0);
  EXPECT_EQ(law(-1e6), 3.0);
}

TEST(PhiFromDensity, LayerOrderChecked) {
  EXPECT_THROW(DensityLaw::layered({{-2.0, [](double) { return 1.0; }}, {-1.0, [](double) { return 2.0; }}}),
               std::invalid_argument);
  EXPECT_THROW(DensityLaw::layered({}), std::invalid_argument);
}

TEST(PhiFromDensity, QuadratureErrorsPropagate) {
  const auto law = DensityLaw::smooth([](double y) { return y < -1.5 ? NAN : 1.0; });
  EXPECT_THROW(phi_from_density(law, 0.0, HalfSpaceGrid(-2.0, 5, 1.0)), QuadratureError);
}

TEST(PhiFromDensity, NegativeSurfaceValueAllowed) {
  const auto sol = phi_from_density(DensityLaw::uniform(1.0), -0.5, HalfSpaceGrid(-1.0, 3, 1.0));
  EXPECT_EQ(sol.phi.back(), -0.5);
  EXPECT_NEAR(sol.phi.front(), 0.5, 1e-15);
}

TEST(Consistency, IdealGasOnOwnProfile) {
  const auto sol = ideal_gas_profile(1.3, 0.7, HalfSpaceGrid(-10.0, 1001, 1.0));
  const ProfileConsistency pc = consistency_on_profile(ConstitutiveRelation::ideal_gas(0.7), sol);
  EXPECT_LE(pc.max_abs_h, 1e-12);
  EXPECT_TRUE(pc.consistent());
  EXPECT_EQ(pc.h.size(), 1001u);
}

TEST(Consistency, FirstFamilyOnIdealGasProfile) {
  const auto sol = ideal_gas_profile(1.0, 1.0, HalfSpaceGrid(-10.0, 1001, 1.0));
  const ProfileConsistency pc = consistency_on_profile(first_family(), sol);
  EXPECT_LE(pc.max_abs_h, 1e-16 * pc.alpha_scale);
  EXPECT_TRUE(pc.consistent());
}

TEST(Consistency, DoubledGasConstantIsInconsistent) {
  const double k = 1.0, c = 1.0, y_min = -2.0;
  const auto sol = ideal_gas_profile(k, c, HalfSpaceGrid(y_min, 201, 1.0));
  const ProfileConsistency pc = consistency_on_profile(ConstitutiveRelation::ideal_gas(2.0 * c), sol);
  EXPECT_NEAR(pc.max_abs_h, c * k * std::exp(-y_min / c), 1e-12);
  EXPECT_FALSE(pc.consistent());
}

TEST(Consistency, RequiresEulerTypeRelation) {
  const auto sol = ideal_gas_profile(1.0, 1.0, HalfSpaceGrid(-1.0, 5, 1.0));
  const auto rel = ConstitutiveRelation::general_implicit(coeffs({{1, "rho"}}));
  EXPECT_THROW(consistency_on_profile(rel, sol), ValidationError);
}

TEST(Consistency, EvaluationErrorNamesLocation) {
  const auto sol = ideal_gas_profile(1.0, 1.0, HalfSpaceGrid(-2.0, 5, 1.0));
  const auto rel = ConstitutiveRelation::implicit_euler(coeffs({{1, "log(2 - rho)"}, {2, "1"}}));
  try {
    consistency_on_profile(rel, sol);
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_NE(std::string(e.what()).find("at y="), std::string::npos) << e.what();
  }
}

TEST(Balances, IdealGasProfile) {
  const BalanceReport r = verify_balances(ideal_gas_profile(1.0, 1.0, HalfSpaceGrid(-5.0, 1001, 1.0)));
  EXPECT_LE(r.momentum_residual, 1e-5);
  EXPECT_EQ(r.mass_residual, 0.0);
  EXPECT_EQ(r.step, 0.005);
}

TEST(Balances, LinearProfileIsExact) {
  const auto sol = phi_from_density(DensityLaw::uniform(1.7), 3.0, HalfSpaceGrid(-4.0, 41, 9.81));
  EXPECT_LE(verify_balances(sol).momentum_residual, 1e-12);
}

TEST(Balances, CorruptedPointDetected) {
  auto sol = ideal_gas_profile(1.0, 1.0, HalfSpaceGrid(-5.0, 1001, 1.0));
  sol.phi[500] *= 1.01;
  EXPECT_GT(verify_balances(sol).momentum_residual, 1e-3);
}

TEST(Balances, SecondOrderUnderRefinement) {
  double prev = 0.0;
  for (int n : {251, 501, 1001, 2001}) {
    const double r = verify_balances(ideal_gas_profile(1.0, 1.0, HalfSpaceGrid(-10.0, n, 1.0))).momentum_residual;
    if (prev > 0.0) {
      EXPECT_GE(prev / r, 3.5) << n;
      EXPECT_LE(prev / r, 4.5) << n;
    }
    prev = r;
  }
}

TEST(Balances, StepIsGridMultiple) {
  const auto sol = ideal_gas_profile(1.0, 1.0, HalfSpaceGrid(-5.0, 1001, 1.0));
  const BalanceReport fine = verify_balances(sol);
  const BalanceReport wide = verify_balances(sol, 0.02);
  EXPECT_DOUBLE_EQ(wide.step, 0.02);
  EXPECT_NEAR(wide.momentum_residual / fine.momentum_residual, 16.0, 0.5);
}

TEST(Balances, CoarseGridRejected) {
  const auto sol = ideal_gas_profile(1.0, 1.0, HalfSpaceGrid(-1.0, 4, 1.0));
  EXPECT_THROW(verify_balances(sol), std::invalid_argument);
  const auto ok = ideal_gas_profile(1.0, 1.0, HalfSpaceGrid(-1.0, 11, 1.0));
  EXPECT_THROW(verify_balances(ok, 0.6), std::invalid_argument);
}

TEST(HydrostaticProperties, PhiStrictlyDecreasingInY) {
  Gen gen(61);
  for (int n = 0; n < 100; ++n) {
    const double a = gen.uniform(0.1, 3), b = gen.uniform(-1, 1), w = gen.uniform(0.5, 5);
    const auto law = DensityLaw::smooth([=](double y) { return a * (1.5 + std::sin(w * y + b)); });
    const HalfSpaceGrid grid(gen.uniform(-20, -0.5), gen.integer(3, 400), gen.uniform(0.1, 20));
    const auto sol = phi_from_density(law, gen.uniform(-5, 5), grid);
    for (int i = 1; i < grid.size(); ++i) ASSERT_LT(sol.phi[i], sol.phi[i - 1]);
  }
}

TEST(HydrostaticProperties, ConsistentRelationsHaveMatchingRoots) {
  const auto sol = ideal_gas_profile(1.0, 1.0, HalfSpaceGrid(-3.0, 61, 1.0));
  const std::vector<ConstitutiveRelation> rels{ConstitutiveRelation::ideal_gas(1.0), first_family(),
                                               second_family(), stiffening_gas()};
  for (const auto& rel : rels) {
    if (!consistency_on_profile(rel, sol).consistent()) continue;
    for (int i = 0; i < sol.grid.size(); ++i) {
      const SphericalRoots r = solve_spherical(rel, sol.rho[i], sol.phi[i]);
      if (r.degenerate) continue;
      double best = INFINITY;
      for (const auto& root : r.roots) best = std::min(best, std::abs(root.phi - sol.phi[i]));
      ASSERT_LE(best, 1e-8 * (1 + sol.phi[i])) << family_name(rel.family()) << " y=" << sol.grid.y(i);
    }
  }
}

TEST(HydrostaticProperties, IdealGasClosesTheLoop) {
  const double k = 0.8, c = 2.5;
  const auto sol = ideal_gas_profile(k, c, HalfSpaceGrid(-10.0, 2001, 1.3));
  const auto rel = ConstitutiveRelation::ideal_gas(c);
  EXPECT_LE(verify_balances(sol).momentum_residual, 1e-5);
  EXPECT_TRUE(consistency_on_profile(rel, sol).consistent());
  for (int i = 0; i < sol.grid.size(); ++i)
    ASSERT_LE(residual_implicit_euler(rel, sol.rho[i], SymTensor3::spherical(-sol.phi[i])).max_abs(),
              1e-14 * sol.phi[i]);
}
