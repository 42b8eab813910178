#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "gupnoise/model.hpp"
#include "gupnoise/oracle/philox.hpp"

namespace gupnoise::oracle {

// Classical Langevin run of the oscillator with the quartic kinetic
// correction,
//   dx/dt = p/m + 4 A p^3/(3m),
//   dp/dt = -m Omega^2 x - gamma m dx/dt + f_T + f_rad,
// where f_T is white with intensity 2 k_B T gamma m and f_rad is an
// Ornstein-Uhlenbeck force of variance hbar^2 alpha^2 G^2 and rate kappa/2.
struct SimulationSpec {
  OscillatorParams osc;
  OpticalParams opt;
  double A{0.0};         // s^2 kg^-2 m^-2
  double dt{0.01};       // integration step, s
  double duration{1.0};  // recorded span per realization, s
  double burn_in{0.0};   // discarded span before recording, s
  std::uint64_t seed{1};
  std::size_t n_realizations{1};
  std::size_t record_every{1};  // record one sample per this many steps

  double gamma() const { return gamma_at(osc, osc.Omega); }
  double sample_dt() const { return dt * static_cast<double>(record_every); }
  std::size_t burn_steps() const { return static_cast<std::size_t>(std::ceil(burn_in / dt - 1e-9)); }
  std::size_t samples() const { return static_cast<std::size_t>(std::floor(duration / sample_dt() + 1e-9)); }

  void validate() const {
    osc.validate();
    opt.validate();
    if (osc.damping.kind != DampingKind::Viscous) throw DomainError("the Langevin oracle supports viscous damping only");
    if (!(dt > 0.0) || !(duration > 0.0)) throw DomainError("dt and duration must be positive");
    if (n_realizations == 0 || record_every == 0) throw DomainError("realization count and record stride must be positive");
    if (!std::isfinite(A)) throw DomainError("perturbation coefficient must be finite");
    double limit = std::min(two_pi / osc.Omega, 1.0 / gamma());
    if (opt.P > 0.0) limit = std::min(limit, 2.0 / opt.kappa);
    if (dt > limit / 50.0)
      throw DomainError("step size violates dt <= min(2pi/Omega, 2/kappa, 1/gamma)/50 (limit " +
                        std::to_string(limit / 50.0) + " s)");
    if (burn_in < 10.0 / gamma() * (1.0 - 1e-12))
      throw DomainError("burn-in shorter than 10/gamma = " + std::to_string(10.0 / gamma()) + " s");
    if (samples() < 2) throw DomainError("duration too short for the record stride");
  }
};

struct Trajectory {
  double t0{0.0};
  double sample_dt{0.0};
  double Omega{0.0};  // resonance of the simulated oscillator, for PSD guards
  std::vector<double> x, p, f_rad;

  double time(std::size_t i) const { return t0 + sample_dt * static_cast<double>(i); }
  std::size_t size() const { return x.size(); }
};

// Integrates one realization, calling sink(t, x, p, f_rad) for every recorded
// sample. Stochastic Heun for (x, p); the OU force is advanced exactly and
// enters the predictor at its start-of-step value and the corrector at its
// end-of-step value.
template <typename Sink>
void integrate(const SimulationSpec& spec, std::size_t realization, Sink&& sink) {
  spec.validate();
  const double m = spec.osc.m;
  const double O2 = spec.osc.Omega * spec.osc.Omega;
  const double gamma = spec.gamma();
  const double dt = spec.dt;
  const double A43m = 4.0 * spec.A / (3.0 * m);
  const double thermal_sd = std::sqrt(2.0 * K::k_B * spec.osc.T * gamma * m * dt);
  const double C = spec.opt.P > 0.0 ? radiation_force_variance(spec.opt) : 0.0;
  const double decay = std::exp(-0.5 * spec.opt.kappa * dt);
  const double ou_sd = std::sqrt(C * -std::expm1(-spec.opt.kappa * dt));

  const NormalStream noise(spec.seed, realization);
  auto velocity = [&](double p) { return p / m + A43m * p * p * p; };
  auto force = [&](double x, double v, double f) { return -m * O2 * x - gamma * m * v + f; };

  double x = 0.0, p = 0.0;
  double f = std::sqrt(C) * noise.pair(~std::uint64_t{0})[0];  // stationary start for the OU force
  const std::size_t burn = spec.burn_steps();
  const std::size_t total = burn + spec.samples() * spec.record_every;
  const double t0 = static_cast<double>(burn) * dt;

  // Without optical drive only the thermal normal is needed, so one
  // Box-Muller pair serves two consecutive steps.
  const bool driven = C > 0.0;
  std::array<double, 2> z{};
  for (std::size_t n = 0; n < total; ++n) {
    double z_thermal, z_ou = 0.0;
    if (driven) {
      z = noise.pair(n);
      z_thermal = z[0];
      z_ou = z[1];
    } else {
      if ((n & 1u) == 0) z = noise.pair(n >> 1);
      z_thermal = z[n & 1u];
    }
    const double dW = thermal_sd * z_thermal;
    const double f_next = decay * f + ou_sd * z_ou;

    const double v = velocity(p);
    const double a = force(x, v, f);
    const double x_pred = x + v * dt;
    const double p_pred = p + a * dt + dW;
    const double v_pred = velocity(p_pred);
    const double a_pred = force(x_pred, v_pred, f_next);
    x += 0.5 * (v + v_pred) * dt;
    p += 0.5 * (a + a_pred) * dt + dW;
    f = f_next;

    if (!std::isfinite(x) || !std::isfinite(p))
      throw DomainError("non-finite oscillator state at step " + std::to_string(n) +
                        " (perturbation too large or step too coarse)");
    const std::size_t done = n + 1;
    if (done > burn && (done - burn) % spec.record_every == 0)
      sink(t0 + static_cast<double>(done - burn) * dt, x, p, f);
  }
}

inline Trajectory simulate(const SimulationSpec& spec, std::size_t realization = 0) {
  Trajectory tr;
  tr.sample_dt = spec.sample_dt();
  tr.t0 = static_cast<double>(spec.burn_steps()) * spec.dt + tr.sample_dt;
  tr.Omega = spec.osc.Omega;
  const std::size_t n = spec.samples();
  tr.x.reserve(n);
  tr.p.reserve(n);
  tr.f_rad.reserve(n);
  integrate(spec, realization, [&](double, double x, double p, double f) {
    tr.x.push_back(x);
    tr.p.push_back(p);
    tr.f_rad.push_back(f);
  });
  return tr;
}

// Binary trajectory stream: one text header line, then little-endian float64
// records (t, x, p, f_rad).
inline void write_trajectory(const Trajectory& tr, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "gupnoise-trajectory v1 records=" << tr.size() << " fields=t,x,p,f_rad format=f64le\n";
  auto put = [&](double v) {
    unsigned char bytes[8];
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof v);
    std::memcpy(&bits, &v, sizeof v);
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
  };
  for (std::size_t i = 0; i < tr.size(); ++i) {
    put(tr.time(i));
    put(tr.x[i]);
    put(tr.p[i]);
    put(tr.f_rad[i]);
  }
  if (!out) throw IoError("failed writing trajectory to '" + path + "'");
}

}  // namespace gupnoise::oracle
