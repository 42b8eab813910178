#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

#include "gupnoise/model.hpp"
#include "gupnoise/temperature.hpp"

namespace gupnoise {

// ---------------------------------------------------------------------------
// Standard (unperturbed) spectrum

struct StandardTerms {
  double thermal;
  double radiation;
  double shot;
  double mechanical() const { return thermal + radiation; }
  double total() const { return thermal + radiation + shot; }
};

// Mechanical susceptibility denominator gamma^2 omega^2 + (omega^2 - Omega^2)^2.
inline double susceptibility_denominator(double gamma, double Omega, double omega) {
  // (omega - Omega)(omega + Omega) keeps precision close to resonance.
  const double d = (omega - Omega) * (omega + Omega);
  return gamma * gamma * omega * omega + d * d;
}

inline StandardTerms standard_spectrum_terms(const OscillatorParams& osc, const OpticalParams& opt, double omega) {
  const double gamma = gamma_at(osc, omega);
  const double D = susceptibility_denominator(gamma, osc.Omega, omega);
  if (!(D > 0.0)) throw DomainError("susceptibility denominator vanishes (undamped resonance)");
  const double kT = K::k_B * osc.T;
  const double cav = 1.0 + 4.0 * omega * omega / (opt.kappa * opt.kappa);
  const double aG2 = photon_number(opt) * coupling_G(opt) * coupling_G(opt);
  StandardTerms s{};
  s.thermal = 2.0 * gamma * kT / (osc.m * D);
  s.radiation = 4.0 * K::hbar * K::hbar * aG2 / (opt.kappa * cav * osc.m * osc.m * D);
  s.shot = aG2 > 0.0 ? opt.kappa * cav / (16.0 * aG2 * opt.eta2) : 0.0;
  return s;
}

inline double standard_spectrum(const OscillatorParams& osc, const OpticalParams& opt, double omega,
                                bool include_shot = true) {
  if (include_shot && !(opt.P > 0.0)) throw DomainError("shot noise requires a positive drive power");
  const StandardTerms s = standard_spectrum_terms(osc, opt, omega);
  return include_shot ? s.total() : s.mechanical();
}

// ---------------------------------------------------------------------------
// Perturbation coefficients

struct CoefficientSet {
  double W, I1, J1, I2, J2, M, N, Y, Z, R;
  Eigenpair eig;
  double kBT_prime;
  double kappa;
};

inline CoefficientSet coefficient_set(const OscillatorParams& osc, const OpticalParams& opt, double kBT_prime,
                                      double gamma) {
  if (!(kBT_prime > 0.0)) throw DomainError("coefficient set requires k_B T' > 0");
  const Eigenpair e = make_eigenpair(gamma, osc.Omega);
  const double H = radiation_force_variance(opt);
  const double m = osc.m;
  const double k = opt.kappa;
  const double g0 = e.gamma0, w0 = e.omega0;
  const double g2 = g0 * g0, w2 = w0 * w0, k2 = k * k;
  const double a4 = g2 + 4.0 * w2;  // gamma0^2 + 4 omega0^2
  const double c4 = k2 + 4.0 * w2;  // kappa^2 + 4 omega0^2
  const double c36 = k2 + 36.0 * w2;
  const double hb2 = K::hbar * K::hbar;

  CoefficientSet c{};
  c.eig = e;
  c.kBT_prime = kBT_prime;
  c.kappa = k;
  c.W = -3.0 * H * w2 / (a4 * c4);
  c.I1 = 39.0 * H * w2 * k2 * k2 / (a4 * c4 * c4 * c36);
  c.J1 = kBT_prime * m * g0 / w0 - 8.0 * H * w0 * k * (5.0 * k2 + 18.0 * w2) * (g2 + 3.0 * w2) / (a4 * c4 * c4 * c36);
  c.I2 = hb2 * w2 * m / (6.0 * kBT_prime);
  c.J2 = -hb2 * w0 * g0 * m / (6.0 * kBT_prime);
  c.M = g0 * kBT_prime * m;
  c.N = kBT_prime * m * w0;
  const double c4_3 = c4 * c4 * c4;
  c.Y = 16.0 * H * k * (g0 * k2 * k2 + 6.0 * k2 * k * w2 + 88.0 * k * w2 * w2) / (c4_3 * c36);
  c.Z = -16.0 * H * k * w0 * (k2 * k2 + 12.0 * k2 * w2 - 96.0 * w2 * w2) / (c4_3 * c36);
  c.R = -16.0 * H * k2 * (g0 * k + 2.0 * w2) / c4_3;
  return c;
}

// Coefficients with the damping rate taken at resonance.
inline CoefficientSet coefficient_set(const OscillatorParams& osc, const OpticalParams& opt, double kBT_prime) {
  return coefficient_set(osc, opt, kBT_prime, gamma_at(osc, osc.Omega));
}

// ---------------------------------------------------------------------------
// General perturbed spectrum

namespace detail {

// Each block is -1/4 of the full Fourier transform of one correlator piece,
// written in pole form so that near-resonant denominators such as
// gamma0 + i(omega0 - omega) are formed directly instead of emerging from the
// cancellation of expanded polynomials.

// Piece (a + i b) e^{(-mu + i nu)|tau|} + c.c.
template <typename Real>
Real exponential_block(Real mu, Real nu, Real a, Real b, Real w) {
  using C = std::complex<Real>;
  const C lo(mu, -nu - w), hi(mu, w - nu);
  const C r = C(a, b) * (Real(1) / lo + Real(1) / hi);
  return -r.real() / Real(2);
}

// Secular piece -|tau| (M + i N) e^{(-gamma0 - i omega0)|tau|} + c.c.
template <typename Real>
Real secular_block(Real g0, Real w0, Real M, Real N, Real w) {
  using C = std::complex<Real>;
  const C near(g0, w0 - w), far(g0, w0 + w);
  const C r = C(M, N) * (Real(1) / (near * near) + Real(1) / (far * far));
  return r.real() / Real(2);
}

template <typename Real>
std::array<Real, 5> general_blocks(const CoefficientSet& c, double omega) {
  const Real g0 = c.eig.gamma0, w0 = c.eig.omega0, k = c.kappa, w = omega;
  const Real I = Real(c.I1) + Real(c.I2);
  const Real J = Real(c.J1) + Real(c.J2);
  return {
      exponential_block<Real>(g0, -w0, I, J, w),
      secular_block<Real>(g0, w0, Real(c.M), Real(c.N), w),
      exponential_block<Real>(Real(2) * g0 + k / Real(2), Real(0), Real(c.R), Real(0), w),
      exponential_block<Real>(Real(3) * g0, Real(3) * w0, Real(c.W), Real(0), w),
      exponential_block<Real>(k / Real(2), Real(2) * w0, Real(c.Y), Real(c.Z), w),
  };
}

}  // namespace detail

// The five spectral blocks (oscillator, secular, R, W, Y/Z) in double precision,
// before the -4 A k_B T'/(m omega0^2) prefactor.
inline std::array<double, 5> general_spectrum_blocks(const CoefficientSet& c, double omega) {
  return detail::general_blocks<double>(c, omega);
}

inline double perturbed_spectrum_general(const OscillatorParams& osc, const OpticalParams& opt, const GupModel& gup,
                                         double omega, TemperatureForm tf = TemperatureForm::Adiabatic) {
  if (gup.A() == 0.0) return 0.0;
  const double kTp = effective_temperature(osc, opt, tf);
  const CoefficientSet c = coefficient_set(osc, opt, kTp, gamma_at(osc, omega));
  const double pref = -4.0 * gup.A() * kTp / (osc.m * c.eig.omega0 * c.eig.omega0);

  // Blocks can cancel strongly against each other away from resonance, so
  // they are evaluated in extended precision and combined with Neumaier
  // summation.
  const auto ext = detail::general_blocks<long double>(c, omega);
  long double s = 0.0L, comp = 0.0L;
  for (long double b : ext) {
    const long double t = s + b;
    comp += std::abs(s) >= std::abs(b) ? (s - t) + b : (b - t) + s;
    s = t;
  }
  const double sum = static_cast<double>(s + comp);
  return pref * sum;
}

// ---------------------------------------------------------------------------
// White-noise (adiabatic cavity) perturbed spectrum and its two terms

struct AdiabaticTerms {
  double thermal;     // classical (k_B T')^2 term
  double zero_point;  // hbar^2 term
  double total() const { return thermal + zero_point; }
};

inline AdiabaticTerms perturbed_spectrum_adiabatic_terms(const OscillatorParams& osc, const OpticalParams& opt,
                                                         const GupModel& gup, double omega,
                                                         TemperatureForm tf = TemperatureForm::Adiabatic) {
  const double A = gup.A();
  const double kTp = effective_temperature(osc, opt, tf);
  const double gamma = gamma_at(osc, omega);
  const double D = susceptibility_denominator(gamma, osc.Omega, omega);
  if (!(D > 0.0)) throw DomainError("susceptibility denominator vanishes (undamped resonance)");
  const double w2 = omega * omega;
  const double detune = (omega - osc.Omega) * (omega + osc.Omega);
  return {16.0 * A * gamma * kTp * kTp * w2 * detune / (D * D), 2.0 * A * gamma * w2 * K::hbar * K::hbar / (3.0 * D)};
}

inline double perturbed_spectrum_adiabatic(const OscillatorParams& osc, const OpticalParams& opt, const GupModel& gup,
                                           double omega, TemperatureForm tf = TemperatureForm::Adiabatic) {
  return perturbed_spectrum_adiabatic_terms(osc, opt, gup, omega, tf).total();
}

enum class SpectrumForm { General, Adiabatic };

inline const char* to_string(SpectrumForm f) { return f == SpectrumForm::General ? "general" : "adiabatic"; }

inline double perturbed_spectrum(const OscillatorParams& osc, const OpticalParams& opt, const GupModel& gup,
                                 double omega, SpectrumForm form, TemperatureForm tf = TemperatureForm::Adiabatic) {
  return form == SpectrumForm::General ? perturbed_spectrum_general(osc, opt, gup, omega, tf)
                                       : perturbed_spectrum_adiabatic(osc, opt, gup, omega, tf);
}

// ---------------------------------------------------------------------------
// Validity assessment shared by spectra, bounds and the CLI

inline std::uint32_t assess_validity(const OscillatorParams& osc, const OpticalParams& opt, const GupModel& gup,
                                     double omega, TemperatureForm tf = TemperatureForm::Adiabatic) {
  std::uint32_t flags = kValid;
  const double kTp = effective_temperature(osc, opt, tf);
  if (kTp < 10.0 * K::hbar * osc.Omega) flags |= kLowTemperature;
  const double gamma = gamma_at(osc, omega);
  if (opt.P > 0.0 && opt.kappa < 100.0 * std::max(osc.Omega, gamma)) flags |= kNotAdiabatic;
  if (gup.A() * osc.m * kTp > 1e-2) flags |= kNonPerturbative;
  return flags;
}

// ---------------------------------------------------------------------------
// Closed-form regime formulas (high Q, white radiation noise)

inline double thermal_ratio(const OscillatorParams& osc, double kTp) { return kTp / (K::hbar * osc.Omega); }

inline double regime_free_mass(const OscillatorParams& osc, const OpticalParams& opt, const GupModel& gup,
                               double omega, TemperatureForm tf = TemperatureForm::Adiabatic) {
  if (!(omega >= 10.0 * osc.Omega)) throw RegimeError("free-mass formula requires omega >= 10 Omega");
  const double kTp = effective_temperature(osc, opt, tf);
  const double r = thermal_ratio(osc, kTp);
  const double gamma = gamma_at(osc, omega);
  const double x = osc.Omega / omega;
  return 2.0 * gup.A() * gamma * K::hbar * K::hbar / (omega * omega) * (8.0 * r * r * x * x + 1.0 / 3.0);
}

inline double regime_resonance(const OscillatorParams& osc, const OpticalParams& opt, const GupModel& gup) {
  (void)opt;
  const double gamma = gamma_at(osc, osc.Omega);
  make_eigenpair(gamma, osc.Omega);
  return 2.0 * gup.A() * K::hbar * K::hbar / (3.0 * gamma);
}

enum class SideVariant { RatioMax, MagnitudeMax };

struct SidePoint {
  double omega;
  double deltaS;
};

// Side-of-resonance probe. The half-linewidth is taken as gamma(Omega)/2 for
// both damping models.
inline SidePoint regime_side(const OscillatorParams& osc, const OpticalParams& opt, const GupModel& gup, int sign,
                             SideVariant variant, TemperatureForm tf = TemperatureForm::Adiabatic) {
  if (sign != 1 && sign != -1) throw DomainError("side sign must be +1 or -1");
  if (osc.damping.Q < 10.0) throw RegimeError("side-of-resonance formula requires Q >= 10");
  const double gamma = gamma_at(osc, osc.Omega);
  const double g0 = 0.5 * gamma;
  const double kTp = effective_temperature(osc, opt, tf);
  const double r = thermal_ratio(osc, kTp);
  const double scale = gup.A() * K::hbar * K::hbar / gamma;
  const double s = static_cast<double>(sign);
  if (variant == SideVariant::RatioMax)
    return {osc.Omega + s * g0, s * scale * (4.0 * r * r * osc.Omega / gamma + 1.0 / 3.0)};
  return {osc.Omega + s * g0 / std::sqrt(3.0), s * scale * (3.0 * std::sqrt(3.0) * r * r * osc.Omega / gamma + 0.5)};
}

inline double regime_low_frequency(const OscillatorParams& osc, const OpticalParams& opt, const GupModel& gup,
                                   double omega, TemperatureForm tf = TemperatureForm::Adiabatic) {
  const double Q = osc.damping.Q;
  if (!(omega >= 10.0 * osc.Omega / Q && omega <= osc.Omega / 10.0))
    throw RegimeError("low-frequency formula requires 10 Omega/Q <= omega <= Omega/10");
  const double kTp = effective_temperature(osc, opt, tf);
  const double r = thermal_ratio(osc, kTp);
  const double gamma = gamma_at(osc, omega);
  const double O2 = osc.Omega * osc.Omega;
  return 2.0 * gup.A() * K::hbar * K::hbar * gamma * omega * omega / (O2 * O2) * (-8.0 * r * r + 1.0 / 3.0);
}

}  // namespace gupnoise
