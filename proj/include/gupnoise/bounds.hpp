#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gupnoise/parallel.hpp"
#include "gupnoise/spectra.hpp"

namespace gupnoise {

enum class Criterion { RelativeNoise, FixedTarget };

inline const char* to_string(Criterion c) { return c == Criterion::RelativeNoise ? "relative" : "fixed"; }

enum class BoundStatus { Bounded, Unbounded, OutsideObserved };

inline const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::Bounded: return "bounded";
    case BoundStatus::Unbounded: return "unbounded";
    case BoundStatus::OutsideObserved: return "outside_observed";
  }
  return "?";
}

struct BoundResult {
  double beta0_max{std::numeric_limits<double>::quiet_NaN()};
  double beta_e_max{std::numeric_limits<double>::quiet_NaN()};
  double omega{0.0};
  Criterion criterion{Criterion::RelativeNoise};
  double target_psd{0.0};
  BoundStatus status{BoundStatus::Bounded};
  SpectrumForm form{SpectrumForm::General};
  double delta_s_unit{0.0};  // perturbation at beta0 = 1; its sign is kept here
  std::uint32_t validity{kValid};
};

// ---------------------------------------------------------------------------
// SQL frequency

inline double omega_sql(const OscillatorParams& osc, const OpticalParams& opt) {
  if (opt.P == 0.0) return osc.Omega;
  const double k2 = opt.kappa * opt.kappa;
  const double O2 = osc.Omega * osc.Omega;
  const double drive = 1024.0 * pi * opt.nu * opt.P / (opt.L * opt.L * osc.m);
  const double inner = std::sqrt((k2 + 4.0 * O2) * (k2 + 4.0 * O2) + drive);
  return std::sqrt((-k2 + inner + 4.0 * O2) / 8.0);
}

// Numeric argmin of the shot-inclusive standard spectrum: a log-grid scan
// followed by golden-section refinement. Diagnostic counterpart of omega_sql.
inline double omega_sql_numeric(const OscillatorParams& osc, const OpticalParams& opt, double lo, double hi,
                                std::size_t points = 4000) {
  const auto grid = make_grid(lo, hi, points, Spacing::Log);
  auto f = [&](double w) { return std::log(standard_spectrum(osc, opt, w, true)); };
  std::size_t best = 0;
  double best_val = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (v < best_val) best_val = v, best = i;
  }
  double a = std::log(grid[best == 0 ? 0 : best - 1]);
  double b = std::log(grid[best + 1 < grid.size() ? best + 1 : best]);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    if (f(std::exp(c)) < f(std::exp(d))) b = d;
    else a = c;
  }
  return std::exp(0.5 * (a + b));
}

// ---------------------------------------------------------------------------
// Bounds

struct BoundOptions {
  SpectrumForm form{SpectrumForm::General};
  TemperatureForm temperature{TemperatureForm::Adiabatic};
};

// beta0 bound from |deltaS(beta0 = 1)| <= target, exploiting linearity in A.
inline BoundResult beta_bound_at(const OscillatorParams& osc, const OpticalParams& opt, double omega,
                                 double target_psd, const BoundOptions& options = {},
                                 Criterion criterion = Criterion::RelativeNoise) {
  if (!(target_psd >= 0.0) || !std::isfinite(target_psd)) throw DomainError("target PSD must be non-negative");
  const GupModel unit(1.0);
  BoundResult r;
  r.omega = omega;
  r.criterion = criterion;
  r.target_psd = target_psd;
  r.form = options.form;
  r.delta_s_unit = perturbed_spectrum(osc, opt, unit, omega, options.form, options.temperature);
  r.validity = assess_validity(osc, opt, unit, omega, options.temperature);
  if (r.delta_s_unit == 0.0 || !std::isfinite(r.delta_s_unit)) {
    r.status = BoundStatus::Unbounded;
    r.beta0_max = std::numeric_limits<double>::infinity();
    r.beta_e_max = std::numeric_limits<double>::infinity();
    return r;
  }
  r.beta0_max = target_psd / std::abs(r.delta_s_unit);
  r.beta_e_max = beta_e_from_beta0(r.beta0_max, osc.m);
  return r;
}

struct BoundCurve {
  std::vector<BoundResult> points;
  std::optional<std::size_t> best_index;  // minimum bounded beta0 over the grid

  const BoundResult& headline() const {
    if (!best_index) throw DomainError("bound curve has no bounded point");
    return points[*best_index];
  }
};

struct CurveOptions : BoundOptions {
  // FixedTarget target; defaults to the standard spectrum at omega_sql.
  std::optional<double> fixed_target;
};

inline double fixed_target_default(const OscillatorParams& osc, const OpticalParams& opt) {
  return standard_spectrum(osc, opt, omega_sql(osc, opt), opt.P > 0.0);
}

inline BoundCurve beta_bound_curve(const OscillatorParams& osc, const OpticalParams& opt,
                                   const std::vector<double>& grid, Criterion criterion,
                                   const SpectrumCurve* observed = nullptr, const CurveOptions& options = {}) {
  if (grid.empty()) throw InputError(InputErrorKind::Invalid, "bound curve needs a non-empty frequency grid");
  if (observed) observed->validate();
  double fixed = 0.0;
  if (criterion == Criterion::FixedTarget) fixed = options.fixed_target ? *options.fixed_target : fixed_target_default(osc, opt);

  BoundCurve curve;
  curve.points.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const double w = grid[i];
    double target = fixed;
    if (criterion == Criterion::RelativeNoise) {
      if (observed) {
        const auto v = observed->interpolate(w);
        if (!v) {
          BoundResult r;
          r.omega = w;
          r.criterion = criterion;
          r.form = options.form;
          r.status = BoundStatus::OutsideObserved;
          r.validity = kOutsideObserved;
          curve.points[i] = r;
          return;
        }
        target = *v;
      } else {
        target = standard_spectrum(osc, opt, w, opt.P > 0.0);
      }
    }
    curve.points[i] = beta_bound_at(osc, opt, w, target, options, criterion);
  });

  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    if (p.status != BoundStatus::Bounded) continue;
    if (!curve.best_index || p.beta0_max < curve.points[*curve.best_index].beta0_max) curve.best_index = i;
  }
  if (observed && !curve.best_index) {
    bool any_inside = false;
    for (const auto& p : curve.points) any_inside |= p.status != BoundStatus::OutsideObserved;
    if (!any_inside) throw InputError(InputErrorKind::Invalid, "requested grid lies entirely outside the observed spectrum");
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Closed-form relative noise levels deltaS/S

enum class RegimeKind { FreeMass, Resonance, Side };

inline double relative_noise(const OscillatorParams& osc, const OpticalParams& opt, const GupModel& gup, double omega,
                             RegimeKind regime, TemperatureForm tf = TemperatureForm::Adiabatic) {
  const double kTp = effective_temperature(osc, opt, tf);
  const double scale = gup.beta0() * osc.m / K::planck_momentum_sq;
  switch (regime) {
    case RegimeKind::FreeMass:
      if (!(omega >= 10.0 * osc.Omega)) throw RegimeError("free-mass relative noise requires omega >= 10 Omega");
      return scale * (8.0 * kTp + K::hbar * K::hbar * omega * omega / (3.0 * kTp));
    case RegimeKind::Resonance:
      return scale * K::hbar * K::hbar * osc.Omega * osc.Omega / (3.0 * kTp);
    case RegimeKind::Side: {
      if (osc.damping.Q < 10.0) throw RegimeError("side-of-resonance relative noise requires Q >= 10");
      const double gamma = gamma_at(osc, osc.Omega);
      const double sign = omega >= osc.Omega ? 1.0 : -1.0;
      return sign * scale * 4.0 * osc.Omega * kTp / gamma;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Driven-oscillator heuristic bounds

enum class DrivenRegime { FreeMass, Side };

inline double driven_bound(double m, double v_sq, double omega, DrivenRegime regime,
                           std::optional<double> Q = std::nullopt) {
  if (!(m > 0.0)) throw DomainError("driven bound requires positive mass");
  if (!(v_sq > 0.0)) throw DomainError("driven bound requires positive mean-square velocity");
  if (regime == DrivenRegime::FreeMass)
    return K::planck_momentum_sq / (8.0 * m * m * v_sq + K::hbar * K::hbar * omega * omega / (2.0 * v_sq));
  if (!Q || !(*Q > 0.0)) throw DomainError("side-of-resonance driven bound requires a positive Q");
  return K::planck_momentum_sq / (4.0 * *Q * m * m * v_sq);
}

// ---------------------------------------------------------------------------
// Parameter sweeps

enum class SweepVariable { Mass, Omega, Power, Kappa, Length, Q, Temperature };
enum class GridUnits { Absolute, RelativeToSql };
enum class Probe { Grid, SideOfResonance };

inline const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::Mass: return "mass";
    case SweepVariable::Omega: return "omega";
    case SweepVariable::Power: return "power";
    case SweepVariable::Kappa: return "kappa";
    case SweepVariable::Length: return "length";
    case SweepVariable::Q: return "q";
    case SweepVariable::Temperature: return "temperature";
  }
  return "?";
}

struct SweepSpec {
  SweepVariable variable{SweepVariable::Power};
  std::vector<double> scale_factors{1.0};
  std::vector<double> frequency_grid;  // rad/s, or multiples of omega_sql
  GridUnits grid_units{GridUnits::Absolute};
  Criterion criterion{Criterion::RelativeNoise};
  Probe probe{Probe::Grid};
  CurveOptions options{};

  void validate() const {
    if (scale_factors.empty()) throw InputError(InputErrorKind::Invalid, "sweep needs at least one scale factor");
    for (double s : scale_factors)
      if (!(s > 0.0) || !std::isfinite(s)) throw InputError(InputErrorKind::Invalid, "sweep scale factors must be positive");
    if (probe == Probe::Grid && frequency_grid.empty())
      throw InputError(InputErrorKind::Invalid, "grid probe needs a frequency grid");
  }
};

// Apply one sweep multiplier. Omega sweeps keep Q fixed; kappa and L are
// varied independently of each other.
inline Setup rescale(const Setup& base, SweepVariable v, double s) {
  Setup r = base;
  switch (v) {
    case SweepVariable::Mass: r.osc.m *= s; break;
    case SweepVariable::Omega: r.osc.Omega *= s; break;
    case SweepVariable::Power: r.opt.P *= s; break;
    case SweepVariable::Kappa: r.opt.kappa *= s; break;
    case SweepVariable::Length: r.opt.L *= s; break;
    case SweepVariable::Q: r.osc.damping.Q *= s; break;
    case SweepVariable::Temperature: r.osc.T *= s; break;
  }
  return r;
}

struct SweepRow {
  double scale{1.0};
  bool skipped{false};
  std::string warning;
  double omega_sql{0.0};
  BoundResult best;   // headline (minimum) bound for this scale
  BoundCurve curve;   // full curve (single point for the side probe)
};

inline std::vector<SweepRow> sweep(const OscillatorParams& osc, const OpticalParams& opt, const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepRow> rows(spec.scale_factors.size());
  const Setup base{osc, opt};
  // Rows are independent; the inner curve evaluation runs serially so the
  // parallelism lives at one level only.
  parallel_for(rows.size(), [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.scale = spec.scale_factors[i];
    const Setup s = rescale(base, spec.variable, row.scale);
    try {
      s.osc.validate();
      s.opt.validate();
      make_eigenpair(gamma_at(s.osc, s.osc.Omega), s.osc.Omega);
      row.omega_sql = omega_sql(s.osc, s.opt);
      std::vector<double> grid;
      if (spec.probe == Probe::SideOfResonance) {
        grid = {s.osc.Omega + 0.5 * gamma_at(s.osc, s.osc.Omega)};
      } else {
        grid = spec.frequency_grid;
        if (spec.grid_units == GridUnits::RelativeToSql)
          for (double& w : grid) w *= row.omega_sql;
      }
      ScopedSerial serial;
      row.curve = beta_bound_curve(s.osc, s.opt, grid, spec.criterion, nullptr, spec.options);
      if (!row.curve.best_index) {
        row.skipped = true;
        row.warning = "no bounded point on the grid";
        return;
      }
      row.best = row.curve.headline();
    } catch (const Error& e) {
      row.skipped = true;
      row.warning = e.what();
    }
  });
  return rows;
}

}  // namespace gupnoise
