#pragma once

// Helpers shared by the unit tests and the acceptance binary: tolerance
// predicates, desk-scale parameter sets and randomized parameter generators.

#include <cmath>
#include <random>

#include "gupnoise/gupnoise.hpp"

namespace gupnoise::testing {

inline double rel_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

inline bool within_factor(double value, double reference, double factor) {
  return value > 0.0 && value <= reference * factor && value >= reference / factor;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

// Nondimensional oscillator: m = 1, Omega = 1, k_B T = 1.
inline Setup desk(double Q, double P = 0.0, double kappa = 2.0, double L = 1.0, double nu = 1.0e14) {
  Setup s;
  s.osc = {1.0, 1.0, {DampingKind::Viscous, Q}, 1.0 / K::k_B};
  s.opt = {nu, P, L, kappa, 1.0};
  return s;
}

// Drive power giving a radiation-force variance hbar^2 alpha^2 G^2 = C.
inline double power_for_force_variance(double C, const OpticalParams& opt) {
  return C * opt.kappa * opt.L * opt.L / (4.0 * K::hbar * two_pi * opt.nu);
}

// High-Q viscous oscillator in a fast cavity: kappa >= 1e4 Omega and
// k_B T' >= 1e3 hbar Omega (rejection sampled).
inline Setup random_adiabatic_set(std::mt19937_64& rng) {
  for (;;) {
    Setup s;
    s.osc.m = log_uniform(rng, 1e-15, 1.0);
    s.osc.Omega = log_uniform(rng, 1e2, 1e7);
    s.osc.damping = {DampingKind::Viscous, log_uniform(rng, 1e3, 1e7)};
    s.osc.T = log_uniform(rng, 1e-3, 3e2);
    s.opt.nu = log_uniform(rng, 1e9, 1e15);
    s.opt.P = log_uniform(rng, 1e-12, 1e-2);
    s.opt.L = log_uniform(rng, 1e-3, 1.0);
    s.opt.kappa = s.osc.Omega * log_uniform(rng, 1e4, 1e6);
    s.opt.eta2 = 1.0;
    const double kTp = effective_temperature(s.osc, s.opt);
    if (kTp >= 1e3 * K::hbar * s.osc.Omega) return s;
  }
}

// Magnitude scale of the white-noise perturbation: the first term with the
// detuning replaced by |omega^2 - Omega^2| + gamma omega, plus the zero-point
// term. Where |deltaS| is far below this scale the two terms cancel and
// relative comparisons lose meaning.
inline double perturbation_scale(const Setup& s, const GupModel& gup, double omega) {
  const double kTp = effective_temperature(s.osc, s.opt);
  const double gamma = gamma_at(s.osc, omega);
  const double D = susceptibility_denominator(gamma, s.osc.Omega, omega);
  const double w2 = omega * omega;
  const double detune = std::abs((omega - s.osc.Omega) * (omega + s.osc.Omega)) + gamma * omega;
  return 16.0 * gup.A() * gamma * kTp * kTp * w2 * detune / (D * D) +
         2.0 * gup.A() * gamma * w2 * K::hbar * K::hbar / (3.0 * D);
}

// Radiation-dominated, high-Q viscous set whose cavity filters the SQL
// region (omega_sql >= 2 kappa, omega_sql >= 30 Omega).
inline Setup random_filtered_sql_set(std::mt19937_64& rng) {
  for (;;) {
    Setup s;
    s.osc.m = log_uniform(rng, 1e-14, 1e-9);
    s.osc.Omega = log_uniform(rng, 1e3, 1e6);
    s.osc.damping = {DampingKind::Viscous, log_uniform(rng, 1e3, 1e6)};
    s.osc.T = log_uniform(rng, 1e-3, 1.0);
    s.opt.nu = 2.82e14;
    s.opt.L = log_uniform(rng, 1e-3, 1e-1);
    s.opt.P = log_uniform(rng, 1e-8, 1e-3);
    s.opt.kappa = s.osc.Omega * log_uniform(rng, 1.0, 1e3);
    s.opt.eta2 = 1.0;
    const double w = omega_sql(s.osc, s.opt);
    const auto t = standard_spectrum_terms(s.osc, s.opt, w);
    if (w >= 2.0 * s.opt.kappa && w >= 30.0 * s.osc.Omega && t.radiation > 10.0 * t.thermal) return s;
  }
}

}  // namespace gupnoise::testing
