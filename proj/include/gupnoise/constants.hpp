#pragma once

#include <numbers>

namespace gupnoise {

// SI constants used throughout; the Planck momentum square is tabulated once
// here and never recomputed at call sites.
// hbar is defined from the exact value of h, so h = 2 pi hbar holds to
// representation precision (1.054571817...e-34).
struct PhysicalConstants {
  static constexpr double h = 6.62607015e-34;              // J s
  static constexpr double hbar = h / (2.0 * std::numbers::pi);  // J s
  static constexpr double k_B = 1.380649e-23;              // J/K
  static constexpr double c = 299792458.0;                 // m/s
  static constexpr double planck_momentum = 6.5249;        // kg m/s (M_P c)
  static constexpr double planck_momentum_sq = planck_momentum * planck_momentum;
  static constexpr double nucleon_mass = 1.67e-27;         // kg
};

using K = PhysicalConstants;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gupnoise
