#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace gupnoise;
using namespace gupnoise::oracle;
using gupnoise::testing::rel_diff;

namespace {

// Desk oscillator (m = 1, Omega = 1, k_B T = 1) with a recording stride that
// keeps the sampled band well above the resonance.
SimulationSpec desk_spec(double Q, double duration, std::size_t realizations, std::uint64_t seed = 3) {
  SimulationSpec s;
  const gupnoise::Setup d = gupnoise::testing::desk(Q);
  s.osc = d.osc;
  s.opt = d.opt;
  s.dt = 0.02;
  s.duration = duration;
  s.burn_in = 20.0 * Q;
  s.seed = seed;
  s.n_realizations = realizations;
  s.record_every = 5;
  return s;
}

struct MeanAndError {
  double mean, err;
};

MeanAndError mean_and_error(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s2 = 0.0;
  for (double x : v) s2 += (x - m) * (x - m);
  return {m, std::sqrt(s2 / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
}

double sample_variance(const std::vector<double>& x) {
  double m = 0.0, s = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

// Per-realization variances of x and p.
std::pair<std::vector<double>, std::vector<double>> variances(const SimulationSpec& spec) {
  std::vector<double> vx(spec.n_realizations), vp(spec.n_realizations);
  parallel_for(spec.n_realizations, [&](std::size_t r) {
    const Trajectory tr = simulate(spec, r);
    vx[r] = sample_variance(tr.x);
    vp[r] = sample_variance(tr.p);
  });
  return {vx, vp};
}

}  // namespace

TEST(Philox, KnownAnswerVectors) {
  const Philox4x32 zero(0);
  const Philox4x32::Block a = zero({0u, 0u, 0u, 0u});
  EXPECT_EQ(a, (Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  const Philox4x32 ones(~std::uint64_t{0});
  const Philox4x32::Block b = ones({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
  EXPECT_EQ(b, (Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  const Philox4x32 pi_key(0x299f31d0a4093822ull);
  const Philox4x32::Block c = pi_key({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
  EXPECT_EQ(c, (Philox4x32::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(NormalStream, MomentsAndIndependenceOfStreams) {
  const NormalStream s(11, 0), t(11, 1);
  double sum = 0.0, sum2 = 0.0, cross = 0.0;
  const std::size_t n = 200000;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = s.pair(i), b = t.pair(i);
    sum += a[0] + a[1];
    sum2 += a[0] * a[0] + a[1] * a[1];
    cross += a[0] * b[0];
  }
  const double N = 2.0 * static_cast<double>(n);
  EXPECT_NEAR(sum / N, 0.0, 5.0 / std::sqrt(N));
  EXPECT_NEAR(sum2 / N, 1.0, 5.0 * std::sqrt(2.0 / N));
  EXPECT_NEAR(cross / static_cast<double>(n), 0.0, 5.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_EQ(s.pair(12345), NormalStream(11, 0).pair(12345));
}

TEST(Simulate, BitIdenticalForIdenticalSpec) {
  SimulationSpec s = desk_spec(10.0, 200.0, 2);
  s.opt.P = gupnoise::testing::power_for_force_variance(0.05, s.opt);
  s.A = 1e-4;
  const Trajectory a = simulate(s, 1), b = simulate(s, 1), c = simulate(s, 0);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.p, b.p);
  EXPECT_EQ(a.f_rad, b.f_rad);
  EXPECT_NE(a.x, c.x);
}

TEST(Simulate, ThermalEquipartition) {
  const SimulationSpec s = desk_spec(10.0, 2000.0, 40);
  const auto [vx, vp] = variances(s);
  const auto x = mean_and_error(vx), p = mean_and_error(vp);
  EXPECT_NEAR(x.mean, 1.0, 3.0 * x.err);
  EXPECT_NEAR(p.mean, 1.0, 3.0 * p.err);
}

TEST(Simulate, RadiationDrivenVariancesMatchClosedForms) {
  SimulationSpec s = desk_spec(50.0, 20000.0, 16);
  s.opt.P = gupnoise::testing::power_for_force_variance(0.02, s.opt);
  const auto expected = steady_variances(s.osc, s.opt);
  const auto [vx, vp] = variances(s);
  EXPECT_LT(rel_diff(mean_and_error(vx).mean, expected.x_var), 0.05);
  EXPECT_LT(rel_diff(mean_and_error(vp).mean, expected.p_var), 0.05);
}

TEST(Simulate, RadiationForceIsOrnsteinUhlenbeck) {
  SimulationSpec s = desk_spec(10.0, 4000.0, 4);
  s.record_every = 1;
  s.opt.P = gupnoise::testing::power_for_force_variance(0.05, s.opt);
  const double C = radiation_force_variance(s.opt);
  // Pool lagged products over realizations, then fit log C(tau) = log C - kappa tau / 2.
  const std::vector<std::size_t> lags{0, 10, 20, 30, 40, 50, 60, 70, 80};
  std::vector<double> acf(lags.size(), 0.0);
  double count = 0.0;
  for (std::size_t r = 0; r < s.n_realizations; ++r) {
    const Trajectory tr = simulate(s, r);
    const std::size_t n = tr.size() - lags.back();
    for (std::size_t j = 0; j < lags.size(); ++j)
      for (std::size_t i = 0; i < n; ++i) acf[j] += tr.f_rad[i] * tr.f_rad[i + lags[j]];
    count += static_cast<double>(n);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < lags.size(); ++j) {
    const double t = static_cast<double>(lags[j]) * s.dt, y = std::log(acf[j] / count);
    sx += t, sy += y, sxx += t * t, sxy += t * y;
  }
  const double n = static_cast<double>(lags.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_LT(rel_diff(-2.0 * slope, s.opt.kappa), 0.05);
  EXPECT_LT(rel_diff(acf[0] / count, C), 0.05);
}

TEST(Simulate, StepRefinementWithinMonteCarloError) {
  SimulationSpec coarse = desk_spec(10.0, 2000.0, 32);
  SimulationSpec fine = coarse;
  fine.dt = coarse.dt / 2.0;
  fine.record_every = 2 * coarse.record_every;
  const auto a = mean_and_error(variances(coarse).first);
  const auto b = mean_and_error(variances(fine).first);
  EXPECT_LT(std::abs(a.mean - b.mean), 3.0 * std::hypot(a.err, b.err));
}

TEST(Simulate, Guards) {
  SimulationSpec s = desk_spec(10.0, 200.0, 1);
  s.dt = 0.2;
  EXPECT_THROW(s.validate(), DomainError);
  s = desk_spec(10.0, 200.0, 1);
  s.burn_in = 50.0;
  EXPECT_THROW(s.validate(), DomainError);
  s = desk_spec(10.0, 200.0, 1);
  s.osc.damping.kind = DampingKind::Structural;
  EXPECT_THROW(s.validate(), DomainError);
  s = desk_spec(10.0, 200.0, 1);
  s.opt.P = 1.0;
  s.opt.kappa = 50.0;
  EXPECT_THROW(s.validate(), DomainError);  // 2/kappa sets the step limit
  s = desk_spec(10.0, 200.0, 1);
  s.A = 1e3;
  s.osc.T = 1e6 / K::k_B;
  EXPECT_THROW(simulate(s), DomainError);
}

TEST(Psd, SineParseval) {
  const double dt = 0.05, a = 1.7, w = 2.3;
  std::vector<double> x(1 << 16);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = a * std::sin(w * dt * static_cast<double>(i));
  for (Window win : {Window::Hann, Window::Rect}) {
    const PsdEstimate e = estimate_psd(x, dt, 4096 * dt, win);
    EXPECT_LT(rel_diff(integrate_psd(e), a * a / 2.0), 0.02) << to_string(win);
  }
}

TEST(Psd, WhiteNoiseIsFlat) {
  const double dt = 0.1, sigma = 2.0;
  const NormalStream ns(5, 0);
  std::vector<double> x(1 << 18);
  for (std::size_t i = 0; i < x.size(); i += 2) {
    const auto z = ns.pair(i / 2);
    x[i] = sigma * z[0];
    x[i + 1] = sigma * z[1];
  }
  const PsdEstimate e = estimate_psd(x, dt, 512 * dt, Window::Rect);
  const double level = sigma * sigma * dt;
  std::size_t within = 0, total = 0;
  double mean = 0.0;
  for (std::size_t k = 1; k + 1 < e.omegas.size(); ++k) {
    ++total;
    mean += e.mean_psd[k];
    if (std::abs(e.mean_psd[k] - level) < 3.0 * e.std_err[k]) ++within;
  }
  EXPECT_GE(static_cast<double>(within) / static_cast<double>(total), 0.98);
  EXPECT_LT(rel_diff(mean / static_cast<double>(total), level), 0.01);
  EXPECT_LT(rel_diff(integrate_psd(e), sigma * sigma), 0.02);
}

TEST(Psd, ThermalRunMatchesStandardSpectrum) {
  const SimulationSpec s = desk_spec(10.0, 4000.0, 128);
  const EnsemblePsd ens = ensemble_psd(s, 400.0, Window::Hann, 0.5, 2.0);
  const PsdEstimate e = ens.summary();
  ASSERT_GT(e.omegas.size(), 50u);
  for (std::size_t k = 0; k < e.omegas.size(); ++k) {
    const double ref = standard_spectrum(s.osc, s.opt, e.omegas[k], false);
    EXPECT_LT(std::abs(e.mean_psd[k] - ref) / ref, 0.10) << "omega " << e.omegas[k];
  }
}

TEST(Psd, TooFewSegmentsAndShortSegmentsRejected) {
  std::vector<double> x(1000, 1.0);
  EXPECT_NO_THROW(estimate_psd(x, 0.1, 20.0));             // nine segments
  EXPECT_THROW(estimate_psd(x, 0.1, 30.0), DomainError);   // five segments
  EXPECT_THROW(estimate_psd(x, 0.1, 1.0), DomainError);    // ten samples per segment
  const SimulationSpec s = desk_spec(10.0, 2000.0, 1);
  const Trajectory tr = simulate(s);
  EXPECT_THROW(estimate_psd(tr, 10.0 * two_pi), DomainError);
}

TEST(Compare, SignFlipAndLevelOnSmallEnsemble) {
  SimulationSpec A = desk_spec(100.0, 4.5 * 4096.0 + 1.0, 24, 7);
  A.dt = 0.02;
  A.record_every = 8;
  A.burn_in = 2000.0;
  A.A = 1e-4;
  SimulationSpec ref = A;
  ref.A = 0.0;
  const DeltaReport rep = compare_delta(A, ref, {4096.0, Window::Hann, 0.9, 1.1});
  EXPECT_TRUE(rep.common_random_numbers);
  EXPECT_TRUE(rep.sign_flip());
  // Classical term at Omega +/- gamma0 is +/- 4 A (k_B T)^2 / (gamma^2 Omega) = +/- 4.
  EXPECT_LT(std::abs(rep.upper.relative_deviation()), 0.5);
  EXPECT_LT(std::abs(rep.lower.relative_deviation()), 0.5);
}

TEST(Compare, PerturbativeGuardAndMismatchedSpecs) {
  SimulationSpec A = desk_spec(100.0, 4.5 * 4096.0, 2, 7);
  A.record_every = 8;
  A.burn_in = 2000.0;
  A.A = 0.05;
  SimulationSpec ref = A;
  ref.A = 0.0;
  EXPECT_THROW(compare_delta(A, ref, {4096.0, Window::Hann, 0.9, 1.1}), DomainError);
  A.A = 1e-4;
  ref.dt = 0.01;
  EXPECT_THROW(compare_delta(A, ref, {4096.0, Window::Hann, 0.9, 1.1}), DomainError);
}

TEST(Trajectory, BinaryStreamLayout) {
  const SimulationSpec s = desk_spec(10.0, 100.0, 1);
  const Trajectory tr = simulate(s);
  const auto path = std::filesystem::temp_directory_path() / "gupnoise_traj_test.bin";
  write_trajectory(tr, path.string());
  std::ifstream in(path, std::ios::binary);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "gupnoise-trajectory v1 records=" + std::to_string(tr.size()) + " fields=t,x,p,f_rad format=f64le");
  const auto body = std::filesystem::file_size(path) - header.size() - 1;
  EXPECT_EQ(body, tr.size() * 4 * sizeof(double));
  double rec[4];
  in.read(reinterpret_cast<char*>(rec), sizeof rec);
  EXPECT_EQ(rec[0], tr.time(0));
  EXPECT_EQ(rec[1], tr.x[0]);
  std::filesystem::remove(path);
}
