#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gupnoise/bounds.hpp"
#include "gupnoise/io/serialize.hpp"
#include "gupnoise/io/tables.hpp"
#include "gupnoise/ligo.hpp"
#include "gupnoise/oracle/compare.hpp"

namespace gupnoise::cli {

enum class Command { Spectrum, DeltaSpectrum, Bound, BoundCurve, Sweep, Sql, TranslateLigo, Oracle, Presets };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::Spectrum: return "spectrum";
    case Command::DeltaSpectrum: return "delta-spectrum";
    case Command::Bound: return "bound";
    case Command::BoundCurve: return "bound-curve";
    case Command::Sweep: return "sweep";
    case Command::Sql: return "sql";
    case Command::TranslateLigo: return "translate-ligo";
    case Command::Oracle: return "oracle";
    case Command::Presets: return "presets";
  }
  return "?";
}

// Exit statuses.
enum ExitCode : int {
  kExitOk = 0,
  kExitComputation = 1,
  kExitUsage = 2,
  kExitInput = 3,
  kExitRegime = 4,
  kExitIo = 5,
};

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Domain: return kExitComputation;
    case ErrorKind::Usage: return kExitUsage;
    case ErrorKind::Input: return kExitInput;
    case ErrorKind::Regime: return kExitRegime;
    case ErrorKind::Io: return kExitIo;
  }
  return kExitComputation;
}

struct GridSpec {
  double omega_min{0.0};
  double omega_max{0.0};
  std::size_t points{201};
  Spacing spacing{Spacing::Log};
};

enum class OracleMode { Psd, Compare, Trajectory };

struct OracleConfig {
  bool desk{false};
  std::optional<double> A;  // overrides beta0 when given
  double dt{0.02};
  double duration{0.0};     // default: 9 segments
  std::optional<double> burn_in;
  std::uint64_t seed{1};
  std::size_t realizations{8};
  std::size_t record_every{1};
  double segment_length{0.0};  // default: 200 oscillation periods
  oracle::Window window{oracle::Window::Hann};
  OracleMode mode{OracleMode::Psd};
  std::optional<double> band_lo, band_hi;
};

struct RunConfig {
  Command command{Command::Presets};
  std::optional<std::string> preset;
  std::optional<std::string> setup_path;
  std::vector<std::pair<std::string, double>> overrides;  // applied in order
  std::optional<DampingKind> damping;
  std::optional<GridSpec> grid;
  bool hz{false};
  std::string output_path;
  std::optional<io::Format> format;

  // spectra
  bool include_shot{true};
  double beta0{1.0};
  SpectrumForm form{SpectrumForm::General};
  TemperatureForm temperature{TemperatureForm::Adiabatic};

  // bounds
  std::string omega_expr;  // number, "resonance", "side" or "side-minus"
  std::optional<double> target;
  Criterion criterion{Criterion::RelativeNoise};
  std::optional<std::string> observed_path;

  // sweep
  SweepVariable variable{SweepVariable::Power};
  std::vector<double> scales{1.0};
  Probe probe{Probe::Grid};
  GridUnits grid_units{GridUnits::Absolute};

  // translate-ligo
  std::optional<std::string> config_path;

  OracleConfig oracle;
};

// Raised by parse_args when --help is requested; carries the rendered text.
struct HelpRequested {
  std::string text;
};

inline const std::vector<std::string>& override_keys() {
  static const std::vector<std::string> keys{"m", "Omega", "Q", "gamma", "T", "nu", "P", "L", "kappa", "eta2"};
  return keys;
}

// ---------------------------------------------------------------------------
// Argument parsing

namespace detail {

inline double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  if (!io::detail::parse_number(s, v)) throw UsageError("invalid number '" + s + "' for " + what);
  return v;
}

// "1e-3..1e3" gives one point per decade; otherwise a comma-separated list.
inline std::vector<double> parse_scales(const std::string& s) {
  const auto dots = s.find("..");
  std::vector<double> out;
  if (dots != std::string::npos) {
    const double a = parse_double(s.substr(0, dots), "--scales");
    const double b = parse_double(s.substr(dots + 2), "--scales");
    if (!(a > 0.0) || !(b > a)) throw UsageError("--scales range must satisfy 0 < a < b");
    const double la = std::log10(a), lb = std::log10(b);
    const auto n = static_cast<long>(std::llround(lb - la));
    if (n < 1 || std::abs((lb - la) - static_cast<double>(n)) > 1e-9)
      throw UsageError("--scales range endpoints must be a whole number of decades apart");
    for (long i = 0; i <= n; ++i) out.push_back(i == 0 ? a : i == n ? b : a * std::pow(10.0, static_cast<double>(i)));
    return out;
  }
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_double(io::detail::trim(cell), "--scales"));
  if (out.empty()) throw UsageError("--scales needs at least one value");
  for (double v : out)
    if (!(v > 0.0)) throw UsageError("--scales values must be positive");
  return out;
}

template <typename E>
E parse_choice(const std::string& s, const std::vector<std::pair<std::string, E>>& table, const std::string& what) {
  for (const auto& [name, value] : table)
    if (name == s) return value;
  std::string names;
  for (const auto& [name, value] : table) names += (names.empty() ? "" : ", ") + name;
  throw UsageError("invalid " + what + " '" + s + "'; expected one of: " + names);
}

}  // namespace detail

inline RunConfig parse_args(const std::vector<std::string>& argv_in) {
  RunConfig cfg;
  CLI::App app{"Standard and GUP-perturbed optomechanical noise spectra, beta bounds and a Langevin oracle", "gupnoise"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Expand all help");

  struct Raw {
    std::string preset, setup, damping, spacing, format, form, temperature, omega, criterion, observed, variable,
        scales, probe, grid_units, config, window, mode;
    std::vector<std::string> overrides;
    std::optional<double> omega_min, omega_max, target, A, burn_in, band_lo, band_hi;
    std::optional<std::size_t> points;
    std::optional<double> beta0, dt, duration, segment;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> realizations, stride;
    bool hz{false}, no_shot{false}, desk{false};
    std::string output;
  } raw;

  auto add_common = [&](CLI::App* sub, bool physics) {
    sub->add_option("-o,--output", raw.output, "Output path (default: stdout)");
    sub->add_option("--format", raw.format, "Output format: csv or json");
    if (!physics) return;
    sub->add_option("--preset", raw.preset, "Built-in parameter set: " + joined_preset_names());
    sub->add_option("--setup", raw.setup, "Parameter set from a JSON file (preset or translate-ligo output)");
    sub->add_option("--override", raw.overrides, "Parameter override KEY=VALUE (repeatable)");
    sub->add_option("--damping", raw.damping, "Damping model override: viscous or structural");
    sub->add_flag("--hz", raw.hz, "Interpret frequency-valued inputs in Hz (converted by 2 pi)");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--omega-min", raw.omega_min, "Grid lower edge (rad/s)");
    sub->add_option("--omega-max", raw.omega_max, "Grid upper edge (rad/s)");
    sub->add_option("--points", raw.points, "Grid points (>= 2)");
    sub->add_option("--spacing", raw.spacing, "Grid spacing: log or linear");
  };
  auto add_forms = [&](CLI::App* sub) {
    sub->add_option("--form", raw.form, "Perturbation form: general or adiabatic");
    sub->add_option("--temperature", raw.temperature, "Effective temperature: adiabatic or exact");
  };

  auto* spectrum = app.add_subcommand("spectrum", "Standard noise spectrum on a grid");
  add_common(spectrum, true);
  add_grid(spectrum);
  spectrum->add_flag("--no-shot", raw.no_shot, "Omit shot noise");

  auto* delta = app.add_subcommand("delta-spectrum", "Perturbed spectrum deltaS on a grid");
  add_common(delta, true);
  add_grid(delta);
  add_forms(delta);
  delta->add_option("--beta0", raw.beta0, "Commutator parameter beta0 (default 1)");

  auto* bound = app.add_subcommand("bound", "beta0/beta_e bound at one frequency");
  add_common(bound, true);
  add_forms(bound);
  bound->add_option("--omega", raw.omega, "Frequency (rad/s) or resonance | side | side-minus")->required();
  bound->add_option("--target", raw.target, "Target PSD (m^2/Hz); default: standard spectrum at omega");
  bound->add_option("--criterion", raw.criterion, "Criterion label: relative or fixed");

  auto* curve = app.add_subcommand("bound-curve", "beta bounds over a frequency grid");
  add_common(curve, true);
  add_grid(curve);
  add_forms(curve);
  curve->add_option("--criterion", raw.criterion, "relative (deltaS/S <= 1) or fixed (deltaS <= S(omega_sql))");
  curve->add_option("--observed", raw.observed, "Observed spectrum CSV used as the relative target");
  curve->add_option("--target", raw.target, "Fixed-criterion target PSD (default S_std at omega_sql)");

  auto* sw = app.add_subcommand("sweep", "Rescale one parameter and report the best bound per scale");
  add_common(sw, true);
  add_grid(sw);
  add_forms(sw);
  sw->add_option("--variable", raw.variable, "mass | omega | power | kappa | length | q | temperature")->required();
  sw->add_option("--scales", raw.scales, "Scale factors: a..b (one per decade) or a,b,c")->required();
  sw->add_option("--criterion", raw.criterion, "relative or fixed");
  sw->add_option("--probe", raw.probe, "grid (minimum over the grid) or side (omega = Omega + gamma/2)");
  sw->add_option("--grid-units", raw.grid_units, "absolute (rad/s) or sql (multiples of omega_sql)");

  auto* sql = app.add_subcommand("sql", "SQL frequency: closed form and numeric argmin");
  add_common(sql, true);

  auto* tl = app.add_subcommand("translate-ligo", "Map an interferometer configuration to the single-cavity model");
  add_common(tl, false);
  tl->add_option("--config", raw.config, "Interferometer JSON (default: built-in aLIGO configuration)");

  auto* orc = app.add_subcommand("oracle", "Monte-Carlo Langevin oracle");
  add_common(orc, true);
  orc->add_flag("--desk", raw.desk, "Desk-scale parameters: m=1, Omega=1, Q=100, k_B T=1, P=0");
  orc->add_option("--mode", raw.mode, "psd | compare | trajectory");
  orc->add_option("--beta0", raw.beta0, "Commutator parameter beta0");
  orc->add_option("--A", raw.A, "Perturbation coefficient A (overrides --beta0)");
  orc->add_option("--dt", raw.dt, "Integration step (s)");
  orc->add_option("--duration", raw.duration, "Recorded span per realization (s)");
  orc->add_option("--burn-in", raw.burn_in, "Discarded span (s); default 20/gamma");
  orc->add_option("--seed", raw.seed, "Random seed");
  orc->add_option("--realizations", raw.realizations, "Number of realizations");
  orc->add_option("--stride", raw.stride, "Record every n-th step");
  orc->add_option("--segment", raw.segment, "Welch segment length (s)");
  orc->add_option("--window", raw.window, "hann or rect");
  orc->add_option("--band-lo", raw.band_lo, "Lower edge of the reported band (rad/s)");
  orc->add_option("--band-hi", raw.band_hi, "Upper edge of the reported band (rad/s)");

  auto* pr = app.add_subcommand("presets", "List built-in parameter sets");
  add_common(pr, false);

  std::vector<std::string> args(argv_in.rbegin(), argv_in.rend() - (argv_in.empty() ? 0 : 1));
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream text;
    app.exit(e, text, text);
    throw HelpRequested{text.str()};
  } catch (const CLI::CallForAllHelp& e) {
    std::ostringstream text;
    app.exit(e, text, text);
    throw HelpRequested{text.str()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const std::vector<std::pair<CLI::App*, Command>> subs{
      {spectrum, Command::Spectrum}, {delta, Command::DeltaSpectrum}, {bound, Command::Bound},
      {curve, Command::BoundCurve},  {sw, Command::Sweep},            {sql, Command::Sql},
      {tl, Command::TranslateLigo},  {orc, Command::Oracle},          {pr, Command::Presets}};
  for (const auto& [sub, cmd] : subs)
    if (sub->parsed()) cfg.command = cmd;

  if (!raw.preset.empty()) {
    preset_info(raw.preset);  // unknown names raise a usage error listing the presets
    cfg.preset = raw.preset;
  }
  if (!raw.setup.empty()) cfg.setup_path = raw.setup;
  if (cfg.preset && cfg.setup_path) throw UsageError("--preset and --setup are mutually exclusive");
  cfg.hz = raw.hz;
  cfg.output_path = raw.output;
  if (!raw.format.empty())
    cfg.format = detail::parse_choice<io::Format>(raw.format, {{"csv", io::Format::Csv}, {"json", io::Format::Json}}, "format");
  if (!raw.damping.empty())
    cfg.damping = detail::parse_choice<DampingKind>(
        raw.damping, {{"viscous", DampingKind::Viscous}, {"structural", DampingKind::Structural}}, "damping");

  const double fscale = cfg.hz ? two_pi : 1.0;
  for (const auto& o : raw.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw UsageError("override '" + o + "' must have the form KEY=VALUE");
    const std::string key = o.substr(0, eq);
    bool known = false;
    for (const auto& k : override_keys()) known |= k == key;
    if (!known) {
      std::string keys;
      for (const auto& k : override_keys()) keys += (keys.empty() ? "" : ", ") + k;
      throw UsageError("unknown parameter '" + key + "'; known parameters: " + keys);
    }
    double v = detail::parse_double(o.substr(eq + 1), "override " + key);
    if (key == "Omega" || key == "kappa" || key == "gamma") v *= fscale;
    cfg.overrides.emplace_back(key, v);
  }

  if (raw.omega_min || raw.omega_max || raw.points || !raw.spacing.empty()) {
    GridSpec g;
    if (!raw.omega_min || !raw.omega_max) throw UsageError("--omega-min and --omega-max must be given together");
    g.omega_min = *raw.omega_min * fscale;
    g.omega_max = *raw.omega_max * fscale;
    if (raw.points) g.points = *raw.points;
    if (!raw.spacing.empty())
      g.spacing = detail::parse_choice<Spacing>(raw.spacing, {{"log", Spacing::Log}, {"linear", Spacing::Linear}}, "spacing");
    if (g.points < 2) throw UsageError("--points must be at least 2");
    if (!(g.omega_min > 0.0) || !(g.omega_min < g.omega_max)) throw UsageError("grid requires 0 < omega-min < omega-max");
    cfg.grid = g;
  }

  cfg.include_shot = !raw.no_shot;
  if (raw.beta0) cfg.beta0 = *raw.beta0;
  if (!raw.form.empty())
    cfg.form = detail::parse_choice<SpectrumForm>(raw.form, {{"general", SpectrumForm::General}, {"adiabatic", SpectrumForm::Adiabatic}}, "form");
  if (!raw.temperature.empty())
    cfg.temperature = detail::parse_choice<TemperatureForm>(
        raw.temperature, {{"adiabatic", TemperatureForm::Adiabatic}, {"exact", TemperatureForm::Exact}}, "temperature form");
  if (!raw.omega.empty()) {
    if (raw.omega == "resonance" || raw.omega == "side" || raw.omega == "side-minus") cfg.omega_expr = raw.omega;
    else cfg.omega_expr = io::format_double(detail::parse_double(raw.omega, "--omega") * fscale);
  }
  cfg.target = raw.target;
  if (!raw.criterion.empty())
    cfg.criterion = detail::parse_choice<Criterion>(raw.criterion, {{"relative", Criterion::RelativeNoise}, {"fixed", Criterion::FixedTarget}}, "criterion");
  if (!raw.observed.empty()) cfg.observed_path = raw.observed;
  if (!raw.variable.empty())
    cfg.variable = detail::parse_choice<SweepVariable>(
        raw.variable,
        {{"mass", SweepVariable::Mass}, {"omega", SweepVariable::Omega}, {"power", SweepVariable::Power},
         {"kappa", SweepVariable::Kappa}, {"length", SweepVariable::Length}, {"q", SweepVariable::Q},
         {"temperature", SweepVariable::Temperature}},
        "sweep variable");
  if (!raw.scales.empty()) cfg.scales = detail::parse_scales(raw.scales);
  if (!raw.probe.empty())
    cfg.probe = detail::parse_choice<Probe>(raw.probe, {{"grid", Probe::Grid}, {"side", Probe::SideOfResonance}}, "probe");
  if (!raw.grid_units.empty())
    cfg.grid_units = detail::parse_choice<GridUnits>(raw.grid_units, {{"absolute", GridUnits::Absolute}, {"sql", GridUnits::RelativeToSql}}, "grid units");
  if (cfg.grid_units == GridUnits::RelativeToSql && cfg.grid && cfg.hz)
    throw UsageError("--hz cannot be combined with --grid-units sql");
  if (!raw.config.empty()) cfg.config_path = raw.config;

  auto& oc = cfg.oracle;
  oc.desk = raw.desk;
  oc.A = raw.A;
  if (raw.dt) oc.dt = *raw.dt;
  if (raw.duration) oc.duration = *raw.duration;
  oc.burn_in = raw.burn_in;
  if (raw.seed) oc.seed = *raw.seed;
  if (raw.realizations) oc.realizations = *raw.realizations;
  if (raw.stride) oc.record_every = *raw.stride;
  if (raw.segment) oc.segment_length = *raw.segment;
  if (!raw.window.empty())
    oc.window = detail::parse_choice<oracle::Window>(raw.window, {{"hann", oracle::Window::Hann}, {"rect", oracle::Window::Rect}}, "window");
  if (!raw.mode.empty())
    oc.mode = detail::parse_choice<OracleMode>(
        raw.mode, {{"psd", OracleMode::Psd}, {"compare", OracleMode::Compare}, {"trajectory", OracleMode::Trajectory}}, "oracle mode");
  if (raw.band_lo) oc.band_lo = *raw.band_lo * fscale;
  if (raw.band_hi) oc.band_hi = *raw.band_hi * fscale;

  const bool physics = cfg.command != Command::Presets && cfg.command != Command::TranslateLigo;
  if (physics && !cfg.preset && !cfg.setup_path && !(cfg.command == Command::Oracle && oc.desk))
    throw UsageError(std::string(to_string(cfg.command)) + " needs --preset or --setup" +
                     (cfg.command == Command::Oracle ? " (or --desk)" : "") + "; available presets: " + joined_preset_names());
  if (cfg.command == Command::Oracle && oc.desk && (cfg.preset || cfg.setup_path))
    throw UsageError("--desk cannot be combined with --preset or --setup");
  return cfg;
}

inline RunConfig parse_args(int argc, const char* const* argv) {
  std::vector<std::string> v(argv, argv + argc);
  return parse_args(v);
}

// ---------------------------------------------------------------------------
// Parameter resolution

inline Setup desk_setup() {
  Setup s;
  s.osc = {1.0, 1.0, {DampingKind::Viscous, 100.0}, 1.0 / K::k_B};
  s.opt = {1.0e14, 0.0, 1.0, 2.0, 1.0};
  return s;
}

inline Setup load_setup(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(InputErrorKind::Missing, "cannot open setup file '" + path + "'");
  try {
    json j;
    in >> j;
    return j.get<Setup>();
  } catch (const json::exception& e) {
    throw InputError(InputErrorKind::Invalid, "malformed setup file '" + path + "': " + e.what());
  }
}

// Preset (or file) with overrides applied in order, validated before use.
inline Setup resolve_setup(const RunConfig& cfg) {
  Setup s;
  if (cfg.preset) s = preset(*cfg.preset);
  else if (cfg.setup_path) s = load_setup(*cfg.setup_path);
  else s = desk_setup();
  if (cfg.damping) s.osc.damping.kind = *cfg.damping;
  for (const auto& [key, v] : cfg.overrides) {
    if (key == "m") s.osc.m = v;
    else if (key == "Omega") s.osc.Omega = v;
    else if (key == "Q") s.osc.damping.Q = v;
    else if (key == "gamma") {
      if (!(v > 0.0)) throw InputError(InputErrorKind::Invalid, "gamma override must be positive");
      s.osc.damping.Q = s.osc.Omega / v;  // rate at resonance
    } else if (key == "T") s.osc.T = v;
    else if (key == "nu") s.opt.nu = v;
    else if (key == "P") s.opt.P = v;
    else if (key == "L") s.opt.L = v;
    else if (key == "kappa") s.opt.kappa = v;
    else if (key == "eta2") s.opt.eta2 = v;
  }
  s.osc.validate();
  s.opt.validate();
  return s;
}

inline std::vector<double> resolve_grid(const RunConfig& cfg, const Setup& s) {
  if (cfg.grid) return make_grid(cfg.grid->omega_min, cfg.grid->omega_max, cfg.grid->points, cfg.grid->spacing);
  return make_grid(0.1 * s.osc.Omega, 10.0 * s.osc.Omega, 401, Spacing::Log);
}

inline json provenance(const RunConfig& cfg, const Setup& s) {
  json j;
  j["command"] = to_string(cfg.command);
  j["preset"] = cfg.preset ? json(*cfg.preset) : json(nullptr);
  if (cfg.setup_path) j["setup_file"] = *cfg.setup_path;
  json ov = json::array();
  for (const auto& [k, v] : cfg.overrides) ov.push_back(json{{"key", k}, {"value", v}});
  j["overrides"] = ov;
  j["parameters"] = s;
  j["derived"] = derived_json(s);
  j["damping_model"] = to_string(s.osc.damping.kind);
  return j;
}

// ---------------------------------------------------------------------------
// Command execution

namespace detail {

inline io::Output run_spectrum(const RunConfig& cfg) {
  const Setup s = resolve_setup(cfg);
  const auto grid = resolve_grid(cfg, s);
  SpectrumCurve c;
  c.kind = CurveKind::Standard;
  c.omegas = grid;
  for (double w : grid) c.values.push_back(standard_spectrum(s.osc, s.opt, w, cfg.include_shot && s.opt.P > 0.0));
  io::Output out;
  out.metadata = provenance(cfg, s);
  out.metadata["include_shot"] = cfg.include_shot && s.opt.P > 0.0;
  out.table = io::curve_table(c);
  out.result = json{{"points", c.omegas.size()}};
  return out;
}

inline io::Output run_delta(const RunConfig& cfg) {
  const Setup s = resolve_setup(cfg);
  const auto grid = resolve_grid(cfg, s);
  const GupModel gup(cfg.beta0);
  SpectrumCurve c;
  c.kind = CurveKind::Perturbation;
  c.omegas = grid;
  c.values.resize(grid.size());
  c.validity.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    c.values[i] = perturbed_spectrum(s.osc, s.opt, gup, grid[i], cfg.form, cfg.temperature);
    c.validity[i] = assess_validity(s.osc, s.opt, gup, grid[i], cfg.temperature);
  });
  std::uint32_t any = 0;
  for (auto f : c.validity) any |= f;
  io::Output out;
  out.metadata = provenance(cfg, s);
  out.metadata["beta0"] = cfg.beta0;
  out.metadata["spectrum_form"] = to_string(cfg.form);
  out.metadata["temperature_form"] = to_string(cfg.temperature);
  out.metadata["warnings"] = validity_messages(any);
  out.table = io::curve_table(c);
  out.result = json{{"points", c.omegas.size()}, {"validity_flags", any}};
  return out;
}

inline double resolve_omega(const RunConfig& cfg, const Setup& s) {
  const double g = gamma_at(s.osc, s.osc.Omega);
  if (cfg.omega_expr == "resonance") return s.osc.Omega;
  if (cfg.omega_expr == "side") return s.osc.Omega + 0.5 * g;
  if (cfg.omega_expr == "side-minus") return s.osc.Omega - 0.5 * g;
  return parse_double(cfg.omega_expr, "--omega");
}

inline io::Output run_bound(const RunConfig& cfg) {
  const Setup s = resolve_setup(cfg);
  const double w = resolve_omega(cfg, s);
  const double target = cfg.target ? *cfg.target : standard_spectrum(s.osc, s.opt, w, s.opt.P > 0.0);
  const BoundResult r = beta_bound_at(s.osc, s.opt, w, target, {cfg.form, cfg.temperature}, cfg.criterion);
  io::Output out;
  out.metadata = provenance(cfg, s);
  out.metadata["spectrum_form"] = to_string(cfg.form);
  out.metadata["temperature_form"] = to_string(cfg.temperature);
  out.metadata["target_source"] = cfg.target ? "user" : "standard spectrum at omega (shot included)";
  out.metadata["bound_uses_magnitude"] = true;
  out.result = r;
  out.table = io::bound_table({r});
  return out;
}

inline io::Output run_bound_curve(const RunConfig& cfg) {
  const Setup s = resolve_setup(cfg);
  const auto grid = resolve_grid(cfg, s);
  std::optional<SpectrumCurve> observed;
  if (cfg.observed_path) {
    const std::string& p = *cfg.observed_path;
    const bool is_json = p.size() >= 5 && p.compare(p.size() - 5, 5, ".json") == 0;
    observed = io::ingest_observed(p, is_json ? io::Format::Json : io::Format::Csv);
  }
  CurveOptions opts;
  opts.form = cfg.form;
  opts.temperature = cfg.temperature;
  opts.fixed_target = cfg.target;
  const BoundCurve c = beta_bound_curve(s.osc, s.opt, grid, cfg.criterion, observed ? &*observed : nullptr, opts);
  io::Output out;
  out.metadata = provenance(cfg, s);
  out.metadata["spectrum_form"] = to_string(cfg.form);
  out.metadata["temperature_form"] = to_string(cfg.temperature);
  out.metadata["criterion"] = to_string(cfg.criterion);
  if (cfg.observed_path) out.metadata["observed_file"] = *cfg.observed_path;
  out.metadata["bound_uses_magnitude"] = true;
  out.table = io::bound_table(c.points);
  out.result = json{{"points", c.points.size()},
                    {"headline", c.best_index ? json(c.headline()) : json(nullptr)}};
  return out;
}

inline io::Output run_sweep(const RunConfig& cfg) {
  const Setup s = resolve_setup(cfg);
  SweepSpec spec;
  spec.variable = cfg.variable;
  spec.scale_factors = cfg.scales;
  spec.criterion = cfg.criterion;
  spec.probe = cfg.probe;
  spec.grid_units = cfg.grid_units;
  spec.options.form = cfg.form;
  spec.options.temperature = cfg.temperature;
  spec.options.fixed_target = cfg.target;
  if (cfg.probe == Probe::Grid) {
    if (cfg.grid) spec.frequency_grid = make_grid(cfg.grid->omega_min, cfg.grid->omega_max, cfg.grid->points, cfg.grid->spacing);
    else {
      spec.grid_units = GridUnits::RelativeToSql;
      spec.frequency_grid = make_grid(0.1, 10.0, 201, Spacing::Log);
    }
  }
  const auto rows = sweep(s.osc, s.opt, spec);
  io::Table t{{"scale", "omega_rad_s", "beta0_max", "beta_e_max", "criterion"}, {}};
  json jrows = json::array();
  for (const auto& r : rows) {
    if (r.skipped) {
      t.rows.push_back({io::format_double(r.scale), "nan", "nan", "nan", to_string(spec.criterion)});
      jrows.push_back(json{{"scale", r.scale}, {"skipped", true}, {"warning", r.warning}});
      continue;
    }
    t.rows.push_back({io::format_double(r.scale), io::format_double(r.best.omega), io::format_double(r.best.beta0_max),
                      io::format_double(r.best.beta_e_max), to_string(r.best.criterion)});
    jrows.push_back(json{{"scale", r.scale}, {"skipped", false}, {"omega_sql", r.omega_sql}, {"best", r.best}});
  }
  io::Output out;
  out.metadata = provenance(cfg, s);
  out.metadata["sweep_variable"] = to_string(spec.variable);
  out.metadata["probe"] = spec.probe == Probe::Grid ? "grid" : "side (omega = Omega + gamma(Omega)/2)";
  out.metadata["grid_units"] = spec.grid_units == GridUnits::Absolute ? "absolute" : "omega_sql";
  out.metadata["spectrum_form"] = to_string(cfg.form);
  out.metadata["criterion"] = to_string(spec.criterion);
  out.table = t;
  out.result = json{{"rows", jrows}};
  return out;
}

inline io::Output run_sql(const RunConfig& cfg) {
  const Setup s = resolve_setup(cfg);
  const double w = omega_sql(s.osc, s.opt);
  io::Output out;
  out.metadata = provenance(cfg, s);
  json r{{"omega_sql", w}, {"f_sql_hz", w / two_pi}};
  if (s.opt.P > 0.0) {
    const double lo = std::max(w / 10.0, s.osc.Omega * (1.0 + 10.0 / s.osc.damping.Q));
    const double argmin = omega_sql_numeric(s.osc, s.opt, lo, 10.0 * w);
    r["numeric_argmin"] = argmin;
    r["relative_difference"] = (argmin - w) / w;
    r["S_std_at_omega_sql"] = standard_spectrum(s.osc, s.opt, w, true);
  }
  out.result = r;
  return out;
}

inline io::Output run_translate(const RunConfig& cfg) {
  ligo::InterferometerParams ifo = ligo::aligo_interferometer();
  if (cfg.config_path) {
    std::ifstream in(*cfg.config_path);
    if (!in) throw InputError(InputErrorKind::Missing, "cannot open interferometer config '" + *cfg.config_path + "'");
    try {
      json j;
      in >> j;
      ifo = j.get<ligo::InterferometerParams>();
    } catch (const json::exception& e) {
      throw InputError(InputErrorKind::Invalid, "malformed interferometer config: " + std::string(e.what()));
    }
  }
  const Setup s = ligo::translate(ifo);
  std::vector<double> grid = make_grid(two_pi * 30.0, two_pi * 300.0, 64, Spacing::Log);
  const auto rep = ligo::radiation_noise_equivalence_check(ifo, s, grid);
  PresetInfo p;
  p.name = "translated";
  p.description = "single-cavity equivalent of an interferometer configuration";
  p.setup = s;
  io::Output out;
  out.metadata = json{{"command", to_string(cfg.command)}, {"interferometer", ifo},
                      {"config_file", cfg.config_path ? json(*cfg.config_path) : json(nullptr)}};
  json check{{"max_radiation_deviation", rep.max_radiation_deviation}, {"shot_checked", rep.shot_checked}};
  if (rep.shot_checked) check["max_shot_deviation"] = rep.max_shot_deviation;
  out.result = json{{"preset", p},
                    {"kappa_geometric", ligo::kappa_geometric(ifo)},
                    {"kappa_pole", ligo::kappa_pole(ifo)},
                    {"finesse", finesse(s.opt)},
                    {"equivalence_check", check}};
  return out;
}

inline oracle::SimulationSpec oracle_spec(const RunConfig& cfg, const Setup& s) {
  const auto& oc = cfg.oracle;
  oracle::SimulationSpec spec;
  spec.osc = s.osc;
  spec.opt = s.opt;
  spec.A = oc.A ? *oc.A : GupModel(cfg.beta0).A();
  spec.dt = oc.dt;
  spec.seed = oc.seed;
  spec.n_realizations = oc.realizations;
  spec.record_every = oc.record_every;
  const double gamma = gamma_at(s.osc, s.osc.Omega);
  spec.burn_in = oc.burn_in ? *oc.burn_in : 20.0 / gamma;
  const double seg = oc.segment_length > 0.0 ? oc.segment_length : 200.0 * two_pi / s.osc.Omega;
  spec.duration = oc.duration > 0.0 ? oc.duration : 4.5 * seg + spec.sample_dt();
  return spec;
}

inline io::Output run_oracle(const RunConfig& cfg) {
  const Setup s = resolve_setup(cfg);
  const auto& oc = cfg.oracle;
  const oracle::SimulationSpec spec = oracle_spec(cfg, s);
  spec.validate();
  const double seg = oc.segment_length > 0.0 ? oc.segment_length : 200.0 * two_pi / s.osc.Omega;
  const double lo = oc.band_lo ? *oc.band_lo : 0.5 * s.osc.Omega;
  const double hi = oc.band_hi ? *oc.band_hi : 2.0 * s.osc.Omega;

  io::Output out;
  out.metadata = provenance(cfg, s);
  out.metadata["simulation"] = json{{"A", spec.A},         {"dt", spec.dt},
                                    {"duration", spec.duration}, {"burn_in", spec.burn_in},
                                    {"seed", spec.seed},   {"realizations", spec.n_realizations},
                                    {"record_every", spec.record_every}, {"segment_length", seg},
                                    {"window", oracle::to_string(oc.window)}};
  if (oc.mode == OracleMode::Trajectory) {
    if (cfg.output_path.empty() || cfg.output_path == "-") throw UsageError("trajectory mode needs --output PATH");
    const auto tr = oracle::simulate(spec, 0);
    oracle::write_trajectory(tr, cfg.output_path);
    out.result = json{{"records", tr.size()}, {"path", cfg.output_path}};
    return out;
  }
  if (oc.mode == OracleMode::Psd) {
    const auto est = oracle::ensemble_psd(spec, seg, oc.window, lo, hi).summary();
    io::Table t{{"omega_rad_s", "psd_m2_per_hz", "kind", "stderr"}, {}};
    for (std::size_t k = 0; k < est.omegas.size(); ++k)
      t.rows.push_back({io::format_double(est.omegas[k]), io::format_double(est.mean_psd[k]), "observed",
                        io::format_double(est.std_err[k])});
    out.table = t;
    out.result = json{{"bins", est.omegas.size()}, {"segments_per_realization", est.n_segments}};
    return out;
  }
  oracle::SimulationSpec ref = spec;
  ref.A = 0.0;
  const auto rep = oracle::compare_delta(spec, ref, {seg, oc.window, lo, hi});
  io::Table t{{"omega_rad_s", "empirical_delta", "stderr", "analytic_delta", "z"}, {}};
  for (std::size_t k = 0; k < rep.omegas.size(); ++k)
    t.rows.push_back({io::format_double(rep.omegas[k]), io::format_double(rep.empirical[k]),
                      io::format_double(rep.std_err[k]), io::format_double(rep.analytic[k]), io::format_double(rep.z[k])});
  auto band = [](const oracle::BandAverage& b) {
    return json{{"center", b.center}, {"empirical", b.empirical}, {"analytic", b.analytic},
                {"stderr", b.std_err}, {"bins", b.bins}, {"relative_deviation", b.relative_deviation()}};
  };
  out.table = t;
  out.result = json{{"upper_band", band(rep.upper)},
                    {"lower_band", band(rep.lower)},
                    {"sign_flip", rep.sign_flip()},
                    {"fraction_within_3sigma", rep.fraction_within_3sigma},
                    {"common_random_numbers", rep.common_random_numbers}};
  return out;
}

inline io::Output run_presets(const RunConfig& cfg) {
  io::Output out;
  out.metadata = json{{"command", to_string(cfg.command)}};
  json list = json::array();
  io::Table t{{"name", "m", "Omega", "damping", "Q", "T", "nu", "P", "L", "kappa", "eta2"}, {}};
  for (const auto& p : preset_catalog()) {
    list.push_back(p);
    const auto& o = p.setup.osc;
    const auto& c = p.setup.opt;
    t.rows.push_back({p.name, io::format_double(o.m), io::format_double(o.Omega), to_string(o.damping.kind),
                      io::format_double(o.damping.Q), io::format_double(o.T), io::format_double(c.nu),
                      io::format_double(c.P), io::format_double(c.L), io::format_double(c.kappa),
                      io::format_double(c.eta2)});
  }
  out.result = json{{"presets", list}};
  out.table = t;
  return out;
}

}  // namespace detail

inline io::Format default_format(Command c) {
  switch (c) {
    case Command::Spectrum:
    case Command::DeltaSpectrum:
    case Command::BoundCurve:
    case Command::Sweep:
      return io::Format::Csv;
    default:
      return io::Format::Json;
  }
}

inline io::Output execute(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::Spectrum: return detail::run_spectrum(cfg);
    case Command::DeltaSpectrum: return detail::run_delta(cfg);
    case Command::Bound: return detail::run_bound(cfg);
    case Command::BoundCurve: return detail::run_bound_curve(cfg);
    case Command::Sweep: return detail::run_sweep(cfg);
    case Command::Sql: return detail::run_sql(cfg);
    case Command::TranslateLigo: return detail::run_translate(cfg);
    case Command::Oracle: return detail::run_oracle(cfg);
    case Command::Presets: return detail::run_presets(cfg);
  }
  throw UsageError("unknown command");
}

// Parses, runs and emits; returns the process exit status.
inline int run(const std::vector<std::string>& argv, std::ostream& err = std::cerr) {
  try {
    const RunConfig cfg = parse_args(argv);
    const io::Output out = execute(cfg);
    const io::Format fmt = cfg.format ? *cfg.format : default_format(cfg.command);
    // Trajectories are written by the command itself; the summary goes to stdout.
    const bool binary = cfg.command == Command::Oracle && cfg.oracle.mode == OracleMode::Trajectory;
    io::emit(out, fmt, binary ? std::string() : cfg.output_path);
    return kExitOk;
  } catch (const HelpRequested& h) {
    std::cout << h.text;
    return kExitOk;
  } catch (const Error& e) {
    err << "gupnoise: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "gupnoise: " << e.what() << "\n";
    return kExitComputation;
  }
}

}  // namespace gupnoise::cli
