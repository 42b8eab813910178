#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "gupnoise/oracle/psd.hpp"
#include "gupnoise/spectra.hpp"

namespace gupnoise::oracle {

// Classical (k_B T)^2 term of the white-noise perturbed spectrum, the part of
// the perturbation a classical simulation can reproduce.
inline SpectrumCurve classical_delta_curve(const SimulationSpec& spec, const std::vector<double>& omegas) {
  SpectrumCurve c;
  c.kind = CurveKind::Perturbation;
  c.omegas = omegas;
  c.values.reserve(omegas.size());
  const GupModel gup(spec.A * K::planck_momentum_sq);
  for (double w : omegas) c.values.push_back(perturbed_spectrum_adiabatic_terms(spec.osc, spec.opt, gup, w).thermal);
  return c;
}

struct BandAverage {
  double center{0.0};
  double empirical{0.0};
  double analytic{0.0};
  double std_err{0.0};
  std::size_t bins{0};
  double relative_deviation() const { return (empirical - analytic) / std::abs(analytic); }
};

struct DeltaReport {
  std::vector<double> omegas;
  std::vector<double> empirical;  // mean paired difference PSD(A) - PSD(ref)
  std::vector<double> std_err;
  std::vector<double> analytic;
  std::vector<double> z;           // (empirical - analytic)/std_err, NaN where excluded
  std::size_t n_realizations{0};
  bool common_random_numbers{false};
  BandAverage upper;  // around Omega + gamma0
  BandAverage lower;  // around Omega - gamma0
  double fraction_within_3sigma{0.0};

  bool sign_flip() const { return upper.empirical > 0.0 && lower.empirical < 0.0; }
};

namespace detail {

inline double interpolate_linear(const SpectrumCurve& c, double w) {
  if (c.omegas.empty() || w < c.omegas.front() || w > c.omegas.back()) return std::nan("");
  auto it = std::lower_bound(c.omegas.begin(), c.omegas.end(), w);
  const std::size_t j = static_cast<std::size_t>(it - c.omegas.begin());
  if (*it == w) return c.values[j];
  const std::size_t i = j - 1;
  const double t = (w - c.omegas[i]) / (c.omegas[j] - c.omegas[i]);
  return c.values[i] + t * (c.values[j] - c.values[i]);
}

}  // namespace detail

// Empirical perturbation from two ensembles simulated on identical grids.
// Bands of half-width gamma0/2 around Omega +/- gamma0 are averaged; bins
// within gamma0/4 of Omega, where the classical term vanishes, are excluded
// from the z statistics.
inline DeltaReport compare_delta(const EnsemblePsd& ensA, const EnsemblePsd& ensRef, const SpectrumCurve& analytic,
                                 double Omega, double gamma) {
  if (ensA.omegas != ensRef.omegas || ensA.per_realization.size() != ensRef.per_realization.size())
    throw DomainError("ensembles must share frequency bins and realization count");
  const std::size_t R = ensA.per_realization.size();
  if (R < 2) throw DomainError("at least two realizations are needed for error estimates");
  DeltaReport rep;
  rep.omegas = ensA.omegas;
  rep.n_realizations = R;
  rep.common_random_numbers = ensA.seed == ensRef.seed;
  const std::size_t B = rep.omegas.size();
  rep.empirical.assign(B, 0.0);
  rep.std_err.assign(B, 0.0);
  rep.analytic.assign(B, 0.0);
  rep.z.assign(B, std::nan(""));

  const double g0 = 0.5 * gamma;
  std::size_t counted = 0, within = 0;
  for (std::size_t k = 0; k < B; ++k) {
    double mean = 0.0, m2 = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const double d = ensA.per_realization[r][k] - ensRef.per_realization[r][k];
      const double delta = d - mean;
      mean += delta / static_cast<double>(r + 1);
      m2 += delta * (d - mean);
    }
    rep.empirical[k] = mean;
    rep.std_err[k] = std::sqrt(m2 / static_cast<double>(R - 1) / static_cast<double>(R));
    rep.analytic[k] = detail::interpolate_linear(analytic, rep.omegas[k]);
    if (std::abs(rep.omegas[k] - Omega) < 0.25 * g0 || !std::isfinite(rep.analytic[k]) || rep.std_err[k] == 0.0)
      continue;
    rep.z[k] = (rep.empirical[k] - rep.analytic[k]) / rep.std_err[k];
    ++counted;
    if (std::abs(rep.z[k]) < 3.0) ++within;
  }
  rep.fraction_within_3sigma = counted ? static_cast<double>(within) / static_cast<double>(counted) : 0.0;

  auto band = [&](double center) {
    BandAverage b;
    b.center = center;
    double var = 0.0;
    for (std::size_t k = 0; k < B; ++k) {
      if (std::abs(rep.omegas[k] - center) > 0.5 * g0 || !std::isfinite(rep.analytic[k])) continue;
      b.empirical += rep.empirical[k];
      b.analytic += rep.analytic[k];
      var += rep.std_err[k] * rep.std_err[k];
      ++b.bins;
    }
    if (b.bins) {
      const double n = static_cast<double>(b.bins);
      b.empirical /= n;
      b.analytic /= n;
      b.std_err = std::sqrt(var) / n;  // ignores bin-to-bin correlation
    }
    return b;
  };
  rep.upper = band(Omega + g0);
  rep.lower = band(Omega - g0);
  return rep;
}

struct CompareSettings {
  double segment_length;
  Window window{Window::Hann};
  double band_lo;
  double band_hi;
};

// Runs both ensembles and compares against the classical perturbation term.
// Identical seeds give common random numbers; the perturbation must be small.
inline DeltaReport compare_delta(const SimulationSpec& specA, const SimulationSpec& specRef,
                                 const CompareSettings& settings, const SpectrumCurve* analytic = nullptr) {
  if (specA.dt != specRef.dt || specA.duration != specRef.duration || specA.burn_in != specRef.burn_in ||
      specA.record_every != specRef.record_every || specA.n_realizations != specRef.n_realizations)
    throw DomainError("compared simulations must share step, duration, burn-in, stride and realization count");
  const double kTp = effective_temperature(specA.osc, specA.opt);
  if (std::abs(specA.A) * specA.osc.m * kTp > 1e-2)
    throw DomainError("perturbation outside the first-order regime (A m k_B T' > 1e-2)");
  const auto ensA = ensemble_psd(specA, settings.segment_length, settings.window, settings.band_lo, settings.band_hi);
  const auto ensR = ensemble_psd(specRef, settings.segment_length, settings.window, settings.band_lo, settings.band_hi);
  const SpectrumCurve curve = analytic ? *analytic : classical_delta_curve(specA, ensA.omegas);
  return compare_delta(ensA, ensR, curve, specA.osc.Omega, specA.gamma());
}

}  // namespace gupnoise::oracle
