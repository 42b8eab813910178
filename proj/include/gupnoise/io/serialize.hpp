#pragma once

#include <json.hpp>

#include <optional>
#include <string>

#include "gupnoise/bounds.hpp"
#include "gupnoise/ligo.hpp"
#include "gupnoise/model.hpp"

namespace gupnoise {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Parameter sets

inline void to_json(json& j, const DampingModel& d) { j = json{{"kind", to_string(d.kind)}, {"Q", d.Q}}; }

inline void from_json(const json& j, DampingModel& d) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "viscous") d.kind = DampingKind::Viscous;
  else if (kind == "structural") d.kind = DampingKind::Structural;
  else throw InputError(InputErrorKind::Invalid, "unknown damping kind '" + kind + "'");
  d.Q = j.at("Q").get<double>();
}

inline void to_json(json& j, const OscillatorParams& o) {
  j = json{{"m", o.m}, {"Omega", o.Omega}, {"damping", o.damping}, {"T", o.T}};
}

inline void from_json(const json& j, OscillatorParams& o) {
  o.m = j.at("m").get<double>();
  o.Omega = j.at("Omega").get<double>();
  o.damping = j.at("damping").get<DampingModel>();
  o.T = j.at("T").get<double>();
}

inline void to_json(json& j, const OpticalParams& o) {
  j = json{{"nu", o.nu}, {"P", o.P}, {"L", o.L}, {"kappa", o.kappa}, {"eta2", o.eta2}};
}

inline void from_json(const json& j, OpticalParams& o) {
  o.nu = j.at("nu").get<double>();
  o.P = j.at("P").get<double>();
  o.L = j.at("L").get<double>();
  o.kappa = j.at("kappa").get<double>();
  o.eta2 = j.at("eta2").get<double>();
}

inline void to_json(json& j, const Setup& s) { j = json{{"oscillator", s.osc}, {"optical", s.opt}}; }

inline void from_json(const json& j, Setup& s) {
  s.osc = j.at("oscillator").get<OscillatorParams>();
  s.opt = j.at("optical").get<OpticalParams>();
}

namespace detail {
inline void put_optional(json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}
}  // namespace detail

inline void to_json(json& j, const PresetReference& r) {
  j = json::object();
  detail::put_optional(j, "gamma", r.gamma);
  detail::put_optional(j, "Q", r.Q);
  detail::put_optional(j, "finesse", r.finesse);
  detail::put_optional(j, "smallest_psd", r.smallest_psd);
  detail::put_optional(j, "beta0_resonance", r.beta0_resonance);
  detail::put_optional(j, "beta_e_resonance", r.beta_e_resonance);
  detail::put_optional(j, "beta0_side", r.beta0_side);
  detail::put_optional(j, "beta_e_side", r.beta_e_side);
  if (!r.note.empty()) j["note"] = r.note;
}

inline void to_json(json& j, const PresetInfo& p) {
  j = json{{"name", p.name}, {"description", p.description}, {"oscillator", p.setup.osc},
           {"optical", p.setup.opt}, {"reference", p.reference}};
}

// Derived quantities reported next to a parameter set for convenience.
inline json derived_json(const Setup& s) {
  json j{{"G", coupling_G(s.opt)},
         {"alpha_sq", photon_number(s.opt)},
         {"finesse", finesse(s.opt)},
         {"gamma_at_Omega", gamma_at(s.osc, s.osc.Omega)},
         {"omega_sql", omega_sql(s.osc, s.opt)}};
  return j;
}

// ---------------------------------------------------------------------------
// Interferometer configuration

namespace ligo {

inline void to_json(json& j, const InterferometerParams& p) {
  j = json{{"mirror_mass", p.mirror_mass}, {"f_minus", p.f_minus}, {"G_minus", p.G_minus}, {"eta", p.eta},
           {"L_arm", p.L_arm},             {"Omega_pend", p.Omega_pend}, {"Q_susp", p.Q_susp}, {"nu", p.nu},
           {"T", p.T}};
  gupnoise::detail::put_optional(j, "G_arm", p.G_arm);
  gupnoise::detail::put_optional(j, "G_src", p.G_src);
  gupnoise::detail::put_optional(j, "G_prc", p.G_prc);
  gupnoise::detail::put_optional(j, "P_in", p.P_in);
  gupnoise::detail::put_optional(j, "P_arm", p.P_arm);
}

inline void from_json(const json& j, InterferometerParams& p) {
  static const char* known[] = {"mirror_mass", "f_minus", "G_minus", "G_arm", "G_src", "G_prc", "P_in",
                                "P_arm",       "eta",     "L_arm",   "Omega_pend", "Q_susp", "nu", "T"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok |= key == k;
    if (!ok) throw InputError(InputErrorKind::Invalid, "unknown interferometer field '" + key + "'");
    if (!value.is_number()) throw InputError(InputErrorKind::NonNumeric, "interferometer field '" + key + "' must be numeric");
  }
  auto req = [&](const char* k) {
    if (!j.contains(k)) throw InputError(InputErrorKind::Invalid, std::string("missing interferometer field '") + k + "'");
    return j.at(k).get<double>();
  };
  auto opt = [&](const char* k) -> std::optional<double> {
    if (!j.contains(k)) return std::nullopt;
    return j.at(k).get<double>();
  };
  p = InterferometerParams{};
  p.mirror_mass = req("mirror_mass");
  p.f_minus = req("f_minus");
  p.G_minus = req("G_minus");
  p.eta = req("eta");
  p.L_arm = req("L_arm");
  p.Omega_pend = req("Omega_pend");
  p.Q_susp = req("Q_susp");
  if (auto v = opt("nu")) p.nu = *v;
  if (auto v = opt("T")) p.T = *v;
  p.G_arm = opt("G_arm");
  p.G_src = opt("G_src");
  p.G_prc = opt("G_prc");
  p.P_in = opt("P_in");
  p.P_arm = opt("P_arm");
}

}  // namespace ligo

// ---------------------------------------------------------------------------
// Results

inline void to_json(json& j, const BoundResult& r) {
  j = json{{"omega", r.omega},
           {"criterion", to_string(r.criterion)},
           {"target_psd", r.target_psd},
           {"status", to_string(r.status)},
           {"spectrum_form", to_string(r.form)},
           {"delta_s_at_beta0_1", r.delta_s_unit},
           {"validity_flags", r.validity},
           {"warnings", validity_messages(r.validity)}};
  // Infinite or undefined bounds are written as null with the status saying why.
  j["beta0_max"] = std::isfinite(r.beta0_max) ? json(r.beta0_max) : json(nullptr);
  j["beta_e_max"] = std::isfinite(r.beta_e_max) ? json(r.beta_e_max) : json(nullptr);
}

inline void to_json(json& j, const SpectrumCurve& c) {
  j = json{{"kind", to_string(c.kind)}, {"omegas", c.omegas}, {"values", c.values}};
  if (!c.validity.empty()) j["validity_flags"] = c.validity;
}

}  // namespace gupnoise
