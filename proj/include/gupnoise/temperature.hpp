#pragma once

#include <cmath>
#include <complex>

#include "gupnoise/model.hpp"

namespace gupnoise {

// Eigenvalues of the damped oscillator, lambda = -gamma0 +/- i omega0.
struct Eigenpair {
  double gamma0;
  double omega0;
  std::complex<double> lambda_plus;
  std::complex<double> lambda_minus;
};

inline Eigenpair make_eigenpair(double gamma, double Omega) {
  if (!(gamma > 0.0) || !(Omega > 0.0)) throw DomainError("eigenpair requires positive gamma and Omega");
  if (!(gamma < 2.0 * Omega)) throw DomainError("oscillator is not underdamped (gamma >= 2 Omega)");
  const double g0 = 0.5 * gamma;
  // (2 Omega - gamma)(2 Omega + gamma) avoids cancellation for gamma ~ 2 Omega.
  const double w0 = 0.5 * std::sqrt((2.0 * Omega - gamma) * (2.0 * Omega + gamma));
  return {g0, w0, {-g0, w0}, {-g0, -w0}};
}

enum class TemperatureForm { Adiabatic, Exact };

inline const char* to_string(TemperatureForm f) { return f == TemperatureForm::Adiabatic ? "adiabatic" : "exact"; }

// Stationary second moments of the radiation-driven part of the motion, for
// an Ornstein-Uhlenbeck force of variance hbar^2 alpha^2 G^2 and rate kappa/2.
struct RadiationMoments {
  double x_var;
  double p_var;
};

inline RadiationMoments radiation_moments(const OscillatorParams& osc, const OpticalParams& opt) {
  const double C = radiation_force_variance(opt);
  const Eigenpair e = make_eigenpair(gamma_at(osc, osc.Omega), osc.Omega);
  const double k = opt.kappa;
  const double den = e.gamma0 * ((k + 2.0 * e.gamma0) * (k + 2.0 * e.gamma0) + 4.0 * e.omega0 * e.omega0);
  const double x = C * (k + 4.0 * e.gamma0) / (osc.m * osc.m * osc.Omega * osc.Omega * den);
  const double p = C * k / den;
  return {x, p};
}

// k_B T': bath temperature raised by radiation-pressure heating. The
// adiabatic form treats the cavity as instantaneous; the exact form uses the
// stationary position variance of the coloured drive.
inline double effective_temperature(const OscillatorParams& osc, const OpticalParams& opt,
                                    TemperatureForm form = TemperatureForm::Adiabatic) {
  const double kT = K::k_B * osc.T;
  if (opt.P == 0.0) return kT;
  const double gamma = gamma_at(osc, osc.Omega);
  if (!(gamma > 0.0)) throw DomainError("effective temperature requires gamma(Omega) > 0");
  if (form == TemperatureForm::Adiabatic) {
    const double F = finesse(opt);
    return 8.0 * K::h * opt.nu * F * F * opt.P / (pi * pi * K::c * K::c * gamma * osc.m) + kT;
  }
  return kT + osc.m * osc.Omega * osc.Omega * radiation_moments(osc, opt).x_var;
}

struct SteadyVariances {
  double x_var;  // m^2
  double p_var;  // kg^2 m^2 / s^2
};

inline SteadyVariances steady_variances(const OscillatorParams& osc, const OpticalParams& opt) {
  const double kT = K::k_B * osc.T;
  const RadiationMoments r = radiation_moments(osc, opt);
  return {kT / (osc.m * osc.Omega * osc.Omega) + r.x_var, osc.m * kT + r.p_var};
}

}  // namespace gupnoise
