#include <gtest/gtest.h>

#include "support.hpp"

using namespace gupnoise;
using gupnoise::testing::rel_diff;

TEST(Translate, TabulatedCavityValues) {
  const auto ifo = ligo::aligo_interferometer();
  const gupnoise::Setup s = ligo::translate(ifo);
  EXPECT_NEAR(s.opt.kappa, 4.77e3, 0.01e3);
  EXPECT_LT(rel_diff(s.opt.kappa, 4.78e3), 0.01);
  EXPECT_NEAR(finesse(s.opt), pi * 31.4 / 2.0, 1e-9);
  EXPECT_NEAR(finesse(s.opt), 49.3, 0.05);
  EXPECT_DOUBLE_EQ(s.opt.eta2, 0.1875);
  EXPECT_EQ(s.osc.m, 10.0);
  EXPECT_EQ(s.osc.damping.kind, DampingKind::Structural);
  EXPECT_EQ(s.osc.damping.Q, 1.33e9);
  EXPECT_EQ(s.osc.Omega, 4.15);
  EXPECT_EQ(s.opt.L, 4000.0);
  EXPECT_LT(rel_diff(s.opt.P, 3.6e3), 1e-12);
}

TEST(Translate, MatchesSingleCavityPreset) {
  const gupnoise::Setup t = ligo::translate(ligo::aligo_interferometer());
  const gupnoise::Setup p = preset("aligo");
  EXPECT_EQ(t.osc.m, p.osc.m);
  EXPECT_LT(rel_diff(t.opt.kappa, p.opt.kappa), 0.01);
  EXPECT_LT(rel_diff(t.opt.P, p.opt.P), 1e-12);
}

TEST(Translate, ArmPowerDerivedFromGains) {
  auto ifo = ligo::aligo_interferometer();
  const double P_arm = *ifo.P_arm;
  ifo.P_arm.reset();
  EXPECT_LT(rel_diff(ifo.arm_power(), P_arm), 1e-12);
  EXPECT_LT(rel_diff(ifo.arm_power(), *ifo.P_in * *ifo.G_arm * *ifo.G_prc / 2.0), 1e-15);
  ifo.P_in.reset();
  EXPECT_THROW(ifo.validate(), InputError);
}

TEST(Translate, KappaMismatchCarriesBothValues) {
  auto ifo = ligo::aligo_interferometer();
  ifo.f_minus = 600.0;
  try {
    ligo::translate(ifo);
    FAIL() << "expected a mismatch";
  } catch (const ligo::KappaMismatchError& e) {
    EXPECT_LT(rel_diff(e.geometric(), ligo::kappa_geometric(ifo)), 1e-15);
    EXPECT_LT(rel_diff(e.pole(), 4.0 * pi * 600.0), 1e-15);
  }
}

TEST(Translate, IdempotentKappa) {
  const auto ifo = ligo::aligo_interferometer();
  const gupnoise::Setup s = ligo::translate(ifo);
  EXPECT_EQ(2.0 * K::c / (ifo.G_minus * ifo.L_arm), s.opt.kappa);
  const gupnoise::Setup again = ligo::translate(ifo);
  EXPECT_EQ(again.opt.kappa, s.opt.kappa);
  EXPECT_EQ(again.opt.P, s.opt.P);
}

TEST(Translate, ValidationRejectsBadInputs) {
  auto ifo = ligo::aligo_interferometer();
  ifo.eta = 1.5;
  EXPECT_THROW(ligo::translate(ifo), InputError);
  ifo = ligo::aligo_interferometer();
  ifo.G_src = 2.0 * *ifo.G_src;
  EXPECT_THROW(ligo::translate(ifo), InputError);
  ifo = ligo::aligo_interferometer();
  ifo.G_minus = -1.0;
  EXPECT_THROW(ligo::translate(ifo), InputError);
}

TEST(Equivalence, RadiationAndShotAgreeInBand) {
  const auto ifo = ligo::aligo_interferometer();
  const gupnoise::Setup s = ligo::translate(ifo);
  const auto grid = make_grid(two_pi * 30.0, two_pi * 300.0, 100, Spacing::Log);
  const auto r = ligo::radiation_noise_equivalence_check(ifo, s, grid);
  EXPECT_LT(r.max_radiation_deviation, 0.05);
  ASSERT_TRUE(r.shot_checked);
  EXPECT_LT(r.max_shot_deviation, 0.05);
}

TEST(Equivalence, NoArmPowerGivesZeroSpectra) {
  auto ifo = ligo::aligo_interferometer();
  ifo.P_arm = 0.0;
  const gupnoise::Setup s = ligo::translate(ifo);
  const auto grid = make_grid(two_pi * 30.0, two_pi * 300.0, 10, Spacing::Log);
  const auto r = ligo::radiation_noise_equivalence_check(ifo, s, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(r.radiation_cavity[i], 0.0);
    EXPECT_EQ(r.radiation_ifo[i], 0.0);
  }
  EXPECT_EQ(r.max_radiation_deviation, 0.0);
}

TEST(Equivalence, MassScalingLeavesRatioInvariant) {
  auto ifo = ligo::aligo_interferometer();
  const auto grid = make_grid(two_pi * 30.0, two_pi * 300.0, 10, Spacing::Log);
  const auto a = ligo::radiation_noise_equivalence_check(ifo, ligo::translate(ifo), grid);
  ifo.mirror_mass *= 2.0;
  const auto b = ligo::radiation_noise_equivalence_check(ifo, ligo::translate(ifo), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // Power spectra fall by 4, so amplitude spectra halve.
    EXPECT_LT(rel_diff(b.radiation_cavity[i], a.radiation_cavity[i] / 4.0), 1e-14);
    EXPECT_LT(rel_diff(b.radiation_ifo[i], a.radiation_ifo[i] / 4.0), 1e-14);
    EXPECT_LT(rel_diff(b.radiation_cavity[i] / b.radiation_ifo[i], a.radiation_cavity[i] / a.radiation_ifo[i]), 1e-14);
  }
}
