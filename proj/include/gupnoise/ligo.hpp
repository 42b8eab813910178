#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "gupnoise/model.hpp"

namespace gupnoise::ligo {

// Multi-mirror interferometer description (aLIGO-style). Optional gains are
// needed only for deriving the arm power or checking the shot-noise mapping.
struct InterferometerParams {
  double mirror_mass{40.0};  // kg, each of four test masses
  double f_minus{380.0};     // Hz, differential coupled-cavity pole
  double G_minus{31.4};      // differential build-up factor
  std::optional<double> G_arm, G_src, G_prc;
  std::optional<double> P_in, P_arm;  // W
  double eta{0.75};                   // detection efficiency
  double L_arm{4000.0};               // m
  double Omega_pend{4.15};            // rad/s
  double Q_susp{1.33e9};
  double nu{2.82e14};  // laser frequency, Hz
  double T{300.0};     // K

  void validate() const {
    auto positive = [](double v, const char* what) {
      if (!(v > 0.0) || !std::isfinite(v)) throw InputError(InputErrorKind::Invalid, std::string(what) + " must be positive");
    };
    positive(mirror_mass, "mirror_mass");
    positive(f_minus, "f_minus");
    positive(G_minus, "G_minus");
    positive(L_arm, "L_arm");
    positive(Omega_pend, "Omega_pend");
    positive(Q_susp, "Q_susp");
    positive(nu, "nu");
    if (G_arm) positive(*G_arm, "G_arm");
    if (G_src) positive(*G_src, "G_src");
    if (G_prc) positive(*G_prc, "G_prc");
    if (P_in) positive(*P_in, "P_in");
    if (P_arm && !(*P_arm >= 0.0)) throw InputError(InputErrorKind::Invalid, "P_arm must be non-negative");
    if (!(T >= 0.0)) throw InputError(InputErrorKind::Invalid, "T must be non-negative");
    if (!(eta > 0.0 && eta <= 1.0)) throw InputError(InputErrorKind::Invalid, "eta must lie in (0, 1]");
    if (G_arm && G_src) {
      const double ratio = *G_arm / *G_src;
      if (std::abs(ratio - G_minus) > 0.05 * G_minus)
        throw InputError(InputErrorKind::Invalid, "G_minus inconsistent with G_arm/G_src (beyond 5%)");
    }
    if (!P_arm && !(P_in && G_arm && G_prc))
      throw InputError(InputErrorKind::Invalid, "either P_arm or all of P_in, G_arm, G_prc must be given");
  }

  double arm_power() const {
    if (P_arm) return *P_arm;
    return *P_in * *G_arm * *G_prc / 2.0;
  }
};

class KappaMismatchError : public DomainError {
 public:
  KappaMismatchError(double geometric, double pole)
      : DomainError("cavity decay rates disagree: 2c/(G_minus L_arm) = " + std::to_string(geometric) +
                    " rad/s vs 4 pi f_minus = " + std::to_string(pole) + " rad/s"),
        geometric_(geometric),
        pole_(pole) {}
  double geometric() const { return geometric_; }
  double pole() const { return pole_; }

 private:
  double geometric_, pole_;
};

inline double kappa_geometric(const InterferometerParams& ifo) { return 2.0 * K::c / (ifo.G_minus * ifo.L_arm); }
inline double kappa_pole(const InterferometerParams& ifo) { return 4.0 * pi * ifo.f_minus; }

// Single-cavity equivalent: reduced mass M/4, finesse pi G_minus/2, the
// geometric decay rate (pole-based rate as a 10% cross-check), power per
// effective cavity P_arm/G_minus and a fourfold detection penalty.
inline Setup translate(const InterferometerParams& ifo) {
  ifo.validate();
  const double kg = kappa_geometric(ifo), kp = kappa_pole(ifo);
  if (std::abs(kg - kp) > 0.1 * kg) throw KappaMismatchError(kg, kp);
  Setup s;
  s.osc = {ifo.mirror_mass / 4.0, ifo.Omega_pend, {DampingKind::Structural, ifo.Q_susp}, ifo.T};
  s.opt = {ifo.nu, ifo.arm_power() / ifo.G_minus, ifo.L_arm, kg, ifo.eta / 4.0};
  return s;
}

// Configuration reproducing the single-cavity aLIGO preset: 40 kg test
// masses, G_minus = 31.4 and an arm power chosen so that P_arm/G_minus
// equals the tabulated effective power.
inline InterferometerParams aligo_interferometer() {
  InterferometerParams ifo;
  ifo.mirror_mass = 40.0;
  ifo.f_minus = 380.0;
  ifo.G_minus = 31.4;
  ifo.G_arm = 265.0;
  ifo.G_src = 265.0 / 31.4;
  ifo.G_prc = 38.0;
  ifo.P_arm = 3.6e3 * 31.4;
  ifo.P_in = 2.0 * *ifo.P_arm / (*ifo.G_arm * *ifo.G_prc);
  ifo.eta = 0.75;
  ifo.L_arm = 4000.0;
  ifo.Omega_pend = 4.15;
  ifo.Q_susp = 1.33e9;
  ifo.nu = 2.82e14;
  ifo.T = 300.0;
  return ifo;
}

// ---------------------------------------------------------------------------
// Equivalence of the single-cavity and interferometer noise expressions

// Single-cavity radiation-pressure spectrum in the free-mass limit.
inline double cavity_radiation_psd(const Setup& s, double omega) {
  const double F = finesse(s.opt);
  const double cav = 1.0 + 4.0 * omega * omega / (s.opt.kappa * s.opt.kappa);
  const double w4 = omega * omega * omega * omega;
  return 16.0 * K::h * s.opt.nu * s.opt.P * F * F / (pi * pi * K::c * K::c * s.osc.m * s.osc.m * cav * w4);
}

// Interferometer radiation-pressure spectrum with the differential
// coupled-cavity pole response.
inline double interferometer_radiation_psd(const InterferometerParams& ifo, double omega) {
  const double wp = two_pi * ifo.f_minus;
  const double M = ifo.mirror_mass;
  const double w4 = omega * omega * omega * omega;
  return 64.0 * K::h * ifo.nu * ifo.G_minus * ifo.arm_power() /
         (K::c * K::c * M * M * w4 * (1.0 + omega * omega / (wp * wp)));
}

inline double cavity_shot_psd(const Setup& s, double omega) {
  const double aG2 = photon_number(s.opt) * coupling_G(s.opt) * coupling_G(s.opt);
  if (aG2 == 0.0) return 0.0;
  const double cav = 1.0 + 4.0 * omega * omega / (s.opt.kappa * s.opt.kappa);
  return s.opt.kappa * cav / (16.0 * aG2 * s.opt.eta2);
}

inline double interferometer_shot_psd(const InterferometerParams& ifo, double omega) {
  const double wp = two_pi * ifo.f_minus;
  const double lambda = K::c / ifo.nu;
  const double G_src = ifo.G_src ? *ifo.G_src : *ifo.G_arm / ifo.G_minus;
  const double P_in = ifo.P_in ? *ifo.P_in : 2.0 * ifo.arm_power() / (*ifo.G_arm * *ifo.G_prc);
  return 2.0 * K::h * ifo.nu * lambda * lambda * G_src * (1.0 + omega * omega / (wp * wp)) /
         (*ifo.G_prc * P_in * ifo.eta * *ifo.G_arm * *ifo.G_arm * 16.0 * pi * pi);
}

struct EquivalenceReport {
  std::vector<double> omegas;
  std::vector<double> radiation_cavity, radiation_ifo;
  std::vector<double> shot_cavity, shot_ifo;  // empty when the gains are not supplied
  double max_radiation_deviation{0.0};
  double max_shot_deviation{0.0};
  bool shot_checked{false};
};

inline double relative_deviation(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

inline EquivalenceReport radiation_noise_equivalence_check(const InterferometerParams& ifo, const Setup& translated,
                                                           const std::vector<double>& grid) {
  EquivalenceReport r;
  r.omegas = grid;
  r.shot_checked = ifo.G_arm && ifo.G_prc && ifo.arm_power() > 0.0;
  for (double w : grid) {
    const double a = cavity_radiation_psd(translated, w), b = interferometer_radiation_psd(ifo, w);
    r.radiation_cavity.push_back(a);
    r.radiation_ifo.push_back(b);
    r.max_radiation_deviation = std::max(r.max_radiation_deviation, relative_deviation(a, b));
    if (r.shot_checked) {
      const double sa = cavity_shot_psd(translated, w), sb = interferometer_shot_psd(ifo, w);
      r.shot_cavity.push_back(sa);
      r.shot_ifo.push_back(sb);
      r.max_shot_deviation = std::max(r.max_shot_deviation, relative_deviation(sa, sb));
    }
  }
  return r;
}

}  // namespace gupnoise::ligo
