#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gupnoise/constants.hpp"
#include "gupnoise/error.hpp"

namespace gupnoise {

// ---------------------------------------------------------------------------
// Damping and oscillator

enum class DampingKind { Viscous, Structural };

struct DampingModel {
  DampingKind kind{DampingKind::Viscous};
  double Q{1.0};
};

inline const char* to_string(DampingKind k) {
  return k == DampingKind::Viscous ? "viscous" : "structural";
}

struct OscillatorParams {
  double m{1.0};      // kg
  double Omega{1.0};  // rad/s
  DampingModel damping{};
  double T{0.0};      // K

  void validate() const {
    if (!(m > 0.0) || !std::isfinite(m)) throw InputError(InputErrorKind::Invalid, "oscillator mass must be positive");
    if (!(Omega > 0.0) || !std::isfinite(Omega))
      throw InputError(InputErrorKind::Invalid, "resonance frequency Omega must be positive");
    if (!(damping.Q > 0.0) || !std::isfinite(damping.Q))
      throw InputError(InputErrorKind::Invalid, "quality factor Q must be positive");
    if (!(T >= 0.0) || !std::isfinite(T)) throw InputError(InputErrorKind::Invalid, "temperature must be non-negative");
  }
};

// Damping rate at angular frequency omega. Structural damping renormalises
// the rate to Omega^2/(Q omega) so that it matches the viscous value at
// resonance.
inline double gamma_at(const OscillatorParams& osc, double omega) {
  if (osc.damping.kind == DampingKind::Viscous) return osc.Omega / osc.damping.Q;
  omega = std::abs(omega);
  if (omega == 0.0) throw DomainError("structural damping is undefined at omega = 0");
  return osc.Omega * osc.Omega / (osc.damping.Q * omega);
}

// ---------------------------------------------------------------------------
// Cavity

struct OpticalParams {
  double nu{2.82e14};  // laser frequency, Hz
  double P{0.0};       // intracavity drive power, W
  double L{1.0};       // cavity length, m
  double kappa{1.0};   // optical decay rate, rad/s
  double eta2{1.0};    // detection efficiency

  void validate() const {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw InputError(InputErrorKind::Invalid, "laser frequency nu must be positive");
    if (!(P >= 0.0) || !std::isfinite(P)) throw InputError(InputErrorKind::Invalid, "power P must be non-negative");
    if (!(L > 0.0) || !std::isfinite(L)) throw InputError(InputErrorKind::Invalid, "cavity length L must be positive");
    if (!(kappa > 0.0) || !std::isfinite(kappa))
      throw InputError(InputErrorKind::Invalid, "cavity decay rate kappa must be positive");
    if (!(eta2 > 0.0 && eta2 <= 1.0)) throw InputError(InputErrorKind::Invalid, "detection efficiency eta2 must lie in (0, 1]");
  }
};

struct DerivedOptics {
  double G;         // optomechanical coupling 2 pi nu / L, rad/(s m)
  double alpha_sq;  // mean intracavity photon number
  double finesse;
};

inline double coupling_G(const OpticalParams& opt) { return two_pi * opt.nu / opt.L; }
inline double photon_number(const OpticalParams& opt) {
  return 4.0 * opt.P / (opt.kappa * K::hbar * two_pi * opt.nu);
}
inline double finesse(const OpticalParams& opt) { return pi * K::c / (opt.kappa * opt.L); }

inline DerivedOptics derived_optics(const OpticalParams& opt) {
  return {coupling_G(opt), photon_number(opt), finesse(opt)};
}

// hbar^2 alpha^2 G^2: the stationary variance of the radiation-pressure force.
inline double radiation_force_variance(const OpticalParams& opt) {
  const double G = coupling_G(opt);
  return K::hbar * K::hbar * photon_number(opt) * G * G;
}

// ---------------------------------------------------------------------------
// Modified commutator

class GupModel {
 public:
  GupModel() = default;
  explicit GupModel(double beta0) : beta0_(beta0), A_(beta0 / K::planck_momentum_sq) {}

  double beta0() const { return beta0_; }
  // Dimensional coefficient A = beta0/(M_P c)^2, in s^2 kg^-2 m^-2.
  double A() const { return A_; }

 private:
  double beta0_{0.0};
  double A_{0.0};
};

// Composite scaling from the centre-of-mass parameter to elementary constituents.
inline double beta_e_from_beta0(double beta0, double m) {
  if (!(m > 0.0)) throw DomainError("mass must be positive for composite scaling");
  const double ratio = m / K::nucleon_mass;
  return 9.0 * beta0 * ratio * ratio;
}

// ---------------------------------------------------------------------------
// Validity flags attached to outputs where a formula is used outside the
// regime it was derived for. Computation still proceeds.

enum ValidityBit : std::uint32_t {
  kValid = 0,
  kLowTemperature = 1u << 0,   // k_B T' < 10 hbar Omega
  kNotAdiabatic = 1u << 1,     // kappa not >> Omega, gamma
  kNonPerturbative = 1u << 2,  // A m k_B T' > 1e-2
  kOutsideRegime = 1u << 3,
  kOutsideObserved = 1u << 4,
};

inline std::vector<std::string> validity_messages(std::uint32_t flags) {
  std::vector<std::string> out;
  if (flags & kLowTemperature) out.emplace_back("high-temperature approximation questionable (k_B T' < 10 hbar Omega)");
  if (flags & kNotAdiabatic) out.emplace_back("cavity not in the adiabatic regime (kappa < 100 max(Omega, gamma))");
  if (flags & kNonPerturbative) out.emplace_back("perturbation not small (A m k_B T' > 1e-2)");
  if (flags & kOutsideRegime) out.emplace_back("frequency outside the regime of the closed-form formula");
  if (flags & kOutsideObserved) out.emplace_back("frequency outside the observed spectrum range");
  return out;
}

// ---------------------------------------------------------------------------
// Spectrum curves

enum class CurveKind { Standard, Perturbation, Observed };

inline const char* to_string(CurveKind k) {
  switch (k) {
    case CurveKind::Standard: return "standard";
    case CurveKind::Perturbation: return "perturbation";
    case CurveKind::Observed: return "observed";
  }
  return "?";
}

struct SpectrumCurve {
  std::vector<double> omegas;  // rad/s, strictly increasing
  std::vector<double> values;  // m^2/Hz
  CurveKind kind{CurveKind::Standard};
  std::vector<std::uint32_t> validity;  // empty or one flag word per point

  void validate() const {
    if (omegas.size() != values.size()) throw InputError(InputErrorKind::Invalid, "curve grid and values differ in length");
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      if (!std::isfinite(omegas[i]) || !std::isfinite(values[i]))
        throw InputError(InputErrorKind::Invalid, "curve contains non-finite entries");
      if (i > 0 && !(omegas[i] > omegas[i - 1])) throw InputError(InputErrorKind::Invalid, "curve grid not strictly increasing");
      if (kind != CurveKind::Perturbation && values[i] < 0.0)
        throw InputError(InputErrorKind::NonPositive, "spectrum values must be non-negative");
    }
  }

  // Log-log interpolation; exact node values are returned unchanged so that
  // a curve reproduced from file gives bit-identical results.
  std::optional<double> interpolate(double omega) const {
    if (omegas.empty() || omega < omegas.front() || omega > omegas.back()) return std::nullopt;
    auto it = std::lower_bound(omegas.begin(), omegas.end(), omega);
    const std::size_t j = static_cast<std::size_t>(it - omegas.begin());
    if (*it == omega) return values[j];
    const std::size_t i = j - 1;
    const double t = std::log(omega / omegas[i]) / std::log(omegas[j] / omegas[i]);
    return std::exp(std::log(values[i]) + t * (std::log(values[j]) - std::log(values[i])));
  }
};

// ---------------------------------------------------------------------------
// Frequency grids

enum class Spacing { Log, Linear };

inline std::vector<double> make_grid(double lo, double hi, std::size_t points, Spacing spacing) {
  if (points < 2) throw InputError(InputErrorKind::Invalid, "grid needs at least two points");
  if (!(lo > 0.0) || !(hi > lo)) throw InputError(InputErrorKind::Invalid, "grid requires 0 < omega_min < omega_max");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    g[i] = spacing == Spacing::Log ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo);
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

// ---------------------------------------------------------------------------
// Presets

struct Setup {
  OscillatorParams osc;
  OpticalParams opt;
};

// Published values kept alongside each preset for reference. They do not
// enter any computation.
struct PresetReference {
  std::optional<double> gamma;           // tabulated damping rate, rad/s
  std::optional<double> Q;               // tabulated quality factor
  std::optional<double> finesse;         // tabulated finesse
  std::optional<double> smallest_psd;    // smallest observed S, m^2/Hz
  std::optional<double> beta0_resonance;
  std::optional<double> beta_e_resonance;
  std::optional<double> beta0_side;
  std::optional<double> beta_e_side;
  std::string note;
};

struct PresetInfo {
  std::string name;
  std::string description;
  Setup setup;
  PresetReference reference;
};

inline const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog = [] {
    std::vector<PresetInfo> c;
    {
      PresetInfo p;
      p.name = "aligo";
      p.description = "Advanced LIGO mapped onto a single effective cavity (reduced mass, structural suspension damping)";
      p.setup.osc = {10.0, 4.15, {DampingKind::Structural, 1.33e9}, 300.0};
      p.setup.opt = {2.82e14, 3.6e3, 4.0e3, 4.78e3, 0.75 / 4.0};
      p.reference.gamma = 1.0e-6;
      p.reference.Q = 1.33e9;
      p.reference.finesse = 49.2;
      p.reference.smallest_psd = 9.0e-40;
      p.reference.beta0_resonance = 1.0e21;
      p.reference.beta_e_resonance = 1.0e76;
      p.reference.note =
          "tabulated gamma = 1e-6 rad/s at omega = Omega is inconsistent with Omega/Q = 3.1e-9; "
          "the structural model with Q governs computation";
      c.push_back(p);
    }
    {
      PresetInfo p;
      p.name = "purdy2013";
      p.description = "Silicon-nitride membrane in a Fabry-Perot cavity";
      p.setup.osc = {7.0e-12, 9.75e6, {DampingKind::Viscous, 9.75e6 / 8.98e3}, 1.7e-3};
      p.setup.opt = {2.82e14, 9.4e-5, 5.1e-3, 5.59e6, 1.0};
      p.reference.gamma = 8.98e3;
      p.reference.Q = 1.08e3;
      p.reference.finesse = 3.3e4;
      p.reference.smallest_psd = 4.0e-32;
      p.reference.beta0_resonance = 1.0e41;
      p.reference.beta_e_resonance = 1.0e73;
      p.reference.beta0_side = 1.0e31;
      p.reference.beta_e_side = 1.0e64;
      c.push_back(p);
    }
    {
      PresetInfo p;
      p.name = "teufel2016";
      p.description = "Superconducting drum resonator coupled to a microwave cavity";
      p.setup.osc = {8.5e-14, 5.88e7, {DampingKind::Viscous, 5.88e7 / 153.0}, 0.04};
      p.setup.opt = {6.71e9, 7.8e-9, 4.0e-8, 6.64e7, 1.0};
      p.reference.gamma = 153.0;
      p.reference.Q = 3.83e5;
      p.reference.finesse = 3.55e8;
      p.reference.smallest_psd = 1.0e-26;
      p.reference.beta0_resonance = 1.0e42;
      p.reference.beta_e_resonance = 1.0e70;
      p.reference.beta0_side = 1.0e28;
      p.reference.beta_e_side = 1.0e57;
      c.push_back(p);
    }
    {
      PresetInfo p;
      p.name = "murch2008";
      p.description = "Ultracold atomic ensemble as the mechanical element in a high-finesse cavity";
      p.setup.osc = {1.0e-22, two_pi * 4.2e4, {DampingKind::Viscous, 42.0}, 0.8e-6};
      p.setup.opt = {3.84e14, 5.02e-13, 1.94e-4, two_pi * 6.6e5, 1.0};
      p.reference.Q = 42.0;
      c.push_back(p);
    }
    return c;
  }();
  return catalog;
}

inline std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : preset_catalog()) names.push_back(p.name);
  return names;
}

inline std::string joined_preset_names() {
  std::string s;
  for (const auto& n : preset_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

inline const PresetInfo& preset_info(std::string_view name) {
  for (const auto& p : preset_catalog())
    if (p.name == name) return p;
  throw UsageError("unknown preset '" + std::string(name) + "'; available presets: " + joined_preset_names());
}

inline Setup preset(std::string_view name) { return preset_info(name).setup; }

}  // namespace gupnoise
