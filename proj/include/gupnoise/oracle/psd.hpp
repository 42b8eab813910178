#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <vector>

#include "gupnoise/error.hpp"
#include "gupnoise/oracle/simulate.hpp"
#include "gupnoise/parallel.hpp"

namespace gupnoise::oracle {

enum class Window { Hann, Rect };

inline const char* to_string(Window w) { return w == Window::Hann ? "hann" : "rect"; }

// Two-sided spectral density estimate in the convention
// variance = integral of S over all omega / 2 pi. Only omega >= 0 is stored.
struct PsdEstimate {
  std::vector<double> omegas;
  std::vector<double> mean_psd;
  std::vector<double> std_err;  // standard error of mean_psd
  std::size_t n_segments{0};      // per realization
  std::size_t n_realizations{1};
};

// Variance recovered from a PsdEstimate (both signs of omega).
inline double integrate_psd(const PsdEstimate& e) {
  if (e.omegas.size() < 2) return 0.0;
  const double dw = e.omegas[1] - e.omegas[0];
  double s = 0.0;
  for (std::size_t k = 0; k < e.mean_psd.size(); ++k) {
    const bool edge = k == 0 || k + 1 == e.mean_psd.size();
    s += (edge ? 1.0 : 2.0) * e.mean_psd[k];
  }
  return s * dw / two_pi;
}

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// FFTW planning is not thread-safe; execution of a private plan is.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  // |X_k|^2 for k = 0..n/2 after transforming the current input.
  void power(std::vector<double>& out) {
    fftw_execute(plan_);
    out.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
  }

 private:
  std::size_t n_;
  double* in_{nullptr};
  fftw_complex* out_{nullptr};
  fftw_plan plan_{};
};

inline std::vector<double> window_weights(std::size_t n, Window w) {
  std::vector<double> v(n, 1.0);
  if (w == Window::Hann)
    for (std::size_t i = 0; i < n; ++i) v[i] = 0.5 - 0.5 * std::cos(two_pi * static_cast<double>(i) / static_cast<double>(n));
  return v;
}

struct Segmentation {
  std::size_t length;
  std::size_t hop;
  std::size_t count;
};

inline Segmentation segmentation(std::size_t samples, double sample_dt, double segment_length) {
  const auto n = static_cast<std::size_t>(std::llround(segment_length / sample_dt));
  if (n < 16) throw DomainError("segment shorter than 16 samples");
  const std::size_t hop = n / 2;
  const std::size_t count = samples >= n ? (samples - n) / hop + 1 : 0;
  if (count < 8)
    throw DomainError("too few segments for PSD estimation (" + std::to_string(count) + " < 8); lengthen the record");
  return {n, hop, count};
}

// Welch estimate for one record: per-segment periodograms and their mean.
inline void welch(const std::vector<double>& x, double sample_dt, const Segmentation& seg, Window window,
                  std::vector<double>& mean, std::vector<double>& m2) {
  RealFft fft(seg.length);
  const auto w = window_weights(seg.length, window);
  double u = 0.0;
  for (double v : w) u += v * v;
  const double norm = sample_dt / u;  // two-sided density
  const std::size_t bins = seg.length / 2 + 1;
  mean.assign(bins, 0.0);
  m2.assign(bins, 0.0);
  std::vector<double> pw;
  for (std::size_t s = 0; s < seg.count; ++s) {
    const double* src = x.data() + s * seg.hop;
    double* in = fft.input();
    for (std::size_t i = 0; i < seg.length; ++i) in[i] = w[i] * src[i];
    fft.power(pw);
    // Welford update keeps the reduction order fixed.
    const double cnt = static_cast<double>(s + 1);
    for (std::size_t k = 0; k < bins; ++k) {
      const double v = pw[k] * norm;
      const double d = v - mean[k];
      mean[k] += d / cnt;
      m2[k] += d * (v - mean[k]);
    }
  }
}

inline std::vector<double> bin_omegas(std::size_t length, double sample_dt) {
  std::vector<double> om(length / 2 + 1);
  for (std::size_t k = 0; k < om.size(); ++k)
    om[k] = two_pi * static_cast<double>(k) / (static_cast<double>(length) * sample_dt);
  return om;
}

}  // namespace detail

// Welch estimate of a uniformly sampled record; stderr is taken across
// segments (50% overlap).
inline PsdEstimate estimate_psd(const std::vector<double>& x, double sample_dt, double segment_length,
                                Window window = Window::Hann) {
  const auto seg = detail::segmentation(x.size(), sample_dt, segment_length);
  PsdEstimate e;
  e.omegas = detail::bin_omegas(seg.length, sample_dt);
  e.n_segments = seg.count;
  std::vector<double> m2;
  detail::welch(x, sample_dt, seg, window, e.mean_psd, m2);
  e.std_err.resize(m2.size());
  const double c = static_cast<double>(seg.count);
  for (std::size_t k = 0; k < m2.size(); ++k) e.std_err[k] = std::sqrt(m2[k] / (c - 1.0) / c);
  return e;
}

inline PsdEstimate estimate_psd(const Trajectory& tr, double segment_length, Window window = Window::Hann) {
  if (tr.Omega > 0.0 && segment_length < 20.0 * two_pi / tr.Omega * (1.0 - 1e-12))
    throw DomainError("segment length must cover at least 20 oscillation periods");
  return estimate_psd(tr.x, tr.sample_dt, segment_length, window);
}

// Per-realization Welch averages restricted to a frequency band, kept so that
// paired (common-random-number) differences can be formed later.
struct EnsemblePsd {
  std::vector<double> omegas;
  std::vector<std::vector<double>> per_realization;
  std::size_t n_segments{0};
  std::uint64_t seed{0};

  // Mean across realizations with the standard error of that mean.
  PsdEstimate summary() const {
    PsdEstimate e;
    e.omegas = omegas;
    e.n_segments = n_segments;
    e.n_realizations = per_realization.size();
    const std::size_t R = per_realization.size();
    e.mean_psd.assign(omegas.size(), 0.0);
    e.std_err.assign(omegas.size(), 0.0);
    for (std::size_t k = 0; k < omegas.size(); ++k) {
      double mean = 0.0, m2 = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        const double v = per_realization[r][k];
        const double d = v - mean;
        mean += d / static_cast<double>(r + 1);
        m2 += d * (v - mean);
      }
      e.mean_psd[k] = mean;
      e.std_err[k] = R > 1 ? std::sqrt(m2 / static_cast<double>(R - 1) / static_cast<double>(R)) : 0.0;
    }
    return e;
  }
};

// Simulates every realization of spec and keeps its Welch PSD on
// [band_lo, band_hi]. Realizations run concurrently; each writes only its own
// slot, so the result does not depend on the thread count.
inline EnsemblePsd ensemble_psd(const SimulationSpec& spec, double segment_length, Window window, double band_lo,
                                double band_hi) {
  spec.validate();
  if (segment_length < 20.0 * two_pi / spec.osc.Omega * (1.0 - 1e-12))
    throw DomainError("segment length must cover at least 20 oscillation periods");
  const auto seg = detail::segmentation(spec.samples(), spec.sample_dt(), segment_length);
  const auto all = detail::bin_omegas(seg.length, spec.sample_dt());
  std::size_t lo = 0, hi = all.size();
  while (lo < all.size() && all[lo] < band_lo) ++lo;
  while (hi > lo && all[hi - 1] > band_hi) --hi;
  if (lo >= hi) throw DomainError("no PSD bins inside the requested band");

  EnsemblePsd ens;
  ens.omegas.assign(all.begin() + static_cast<std::ptrdiff_t>(lo), all.begin() + static_cast<std::ptrdiff_t>(hi));
  ens.n_segments = seg.count;
  ens.seed = spec.seed;
  ens.per_realization.resize(spec.n_realizations);
  parallel_for(spec.n_realizations, [&](std::size_t r) {
    const Trajectory tr = simulate(spec, r);
    std::vector<double> mean, m2;
    detail::welch(tr.x, tr.sample_dt, seg, window, mean, m2);
    ens.per_realization[r].assign(mean.begin() + static_cast<std::ptrdiff_t>(lo),
                                  mean.begin() + static_cast<std::ptrdiff_t>(hi));
  });
  return ens;
}

}  // namespace gupnoise::oracle
