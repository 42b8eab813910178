#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace gupnoise;
using namespace gupnoise::cli;

namespace {

RunConfig parse(std::initializer_list<const char*> args) {
  std::vector<std::string> v{"gupnoise"};
  for (const char* a : args) v.emplace_back(a);
  return parse_args(v);
}

int run_quiet(std::initializer_list<const char*> args, std::string* err_text = nullptr) {
  std::vector<std::string> v{"gupnoise"};
  for (const char* a : args) v.emplace_back(a);
  std::ostringstream err;
  std::streambuf* old = std::cout.rdbuf();
  std::ostringstream sink;
  std::cout.rdbuf(sink.rdbuf());
  const int rc = run(v, err);
  std::cout.rdbuf(old);
  if (err_text) *err_text = err.str();
  return rc;
}

}  // namespace

TEST(ParseArgs, BoundAtResonance) {
  const RunConfig c = parse({"bound", "--preset", "purdy2013", "--omega", "resonance", "--target", "4e-32"});
  EXPECT_EQ(c.command, Command::Bound);
  EXPECT_EQ(*c.preset, "purdy2013");
  EXPECT_EQ(c.omega_expr, "resonance");
  EXPECT_EQ(*c.target, 4e-32);
  const io::Output out = execute(c);
  EXPECT_EQ(out.result["omega"].get<double>(), 9.75e6);
}

TEST(ParseArgs, SweepDecades) {
  const RunConfig c = parse({"sweep", "--preset", "murch2008", "--variable", "power", "--scales", "1e-3..1e3",
                             "--criterion", "relative"});
  EXPECT_EQ(c.command, Command::Sweep);
  EXPECT_EQ(c.variable, SweepVariable::Power);
  EXPECT_EQ(c.criterion, Criterion::RelativeNoise);
  ASSERT_EQ(c.scales.size(), 7u);
  EXPECT_DOUBLE_EQ(c.scales.front(), 1e-3);
  EXPECT_DOUBLE_EQ(c.scales[3], 1.0);
  EXPECT_DOUBLE_EQ(c.scales.back(), 1e3);
  EXPECT_EQ(parse({"sweep", "--preset", "murch2008", "--variable", "q", "--scales", "0.5,2"}).scales,
            (std::vector<double>{0.5, 2.0}));
}

TEST(ParseArgs, UnknownPresetListsNames) {
  try {
    parse({"bound", "--preset", "unknown", "--omega", "resonance"});
    FAIL();
  } catch (const UsageError& e) {
    const std::string msg = e.what();
    for (const char* n : {"aligo", "purdy2013", "teufel2016", "murch2008"}) EXPECT_NE(msg.find(n), std::string::npos);
  }
}

TEST(ParseArgs, RejectsUnknownFlagsAndParameters) {
  EXPECT_THROW(parse({"spectrum", "--preset", "aligo", "--bogus"}), UsageError);
  EXPECT_THROW(parse({"spectrum", "--preset", "aligo", "--override", "mass=3"}), UsageError);
  EXPECT_THROW(parse({"spectrum", "--preset", "aligo", "--override", "m3"}), UsageError);
  EXPECT_THROW(parse({"spectrum", "--preset", "aligo", "--omega-min", "10", "--omega-max", "1", "--points", "5"}), UsageError);
  EXPECT_THROW(parse({"spectrum", "--preset", "aligo", "--omega-min", "1", "--omega-max", "10", "--points", "1"}), UsageError);
  EXPECT_THROW(parse({"spectrum"}), UsageError);
  EXPECT_THROW(parse({}), UsageError);
  EXPECT_THROW(parse({"sweep", "--preset", "murch2008", "--variable", "power", "--scales", "1e-3..2e2"}), UsageError);
}

TEST(ParseArgs, OverridesAppliedAfterPresetInOrder) {
  const RunConfig c = parse({"sql", "--preset", "purdy2013", "--override", "P=1e-4", "--override", "P=2e-4",
                             "--override", "gamma=100"});
  const gupnoise::Setup s = resolve_setup(c);
  EXPECT_EQ(s.opt.P, 2e-4);
  EXPECT_DOUBLE_EQ(s.osc.damping.Q, 9.75e6 / 100.0);
  EXPECT_EQ(s.osc.m, 7e-12);
}

TEST(ParseArgs, OverridesValidatedBeforeComputation) {
  const RunConfig c = parse({"sql", "--preset", "purdy2013", "--override", "m=-1"});
  EXPECT_THROW(resolve_setup(c), InputError);
  EXPECT_EQ(run_quiet({"sql", "--preset", "purdy2013", "--override", "eta2=2"}), kExitInput);
}

TEST(ParseArgs, HertzConvertsFrequencyInputsOnly) {
  const RunConfig c = parse({"bound-curve", "--preset", "aligo", "--hz", "--omega-min", "20", "--omega-max", "100",
                             "--override", "Omega=1", "--override", "P=10"});
  EXPECT_DOUBLE_EQ(c.grid->omega_min, two_pi * 20.0);
  EXPECT_DOUBLE_EQ(c.grid->omega_max, two_pi * 100.0);
  EXPECT_DOUBLE_EQ(c.overrides[0].second, two_pi);
  EXPECT_EQ(c.overrides[1].second, 10.0);
  const RunConfig b = parse({"bound", "--preset", "aligo", "--hz", "--omega", "50"});
  EXPECT_EQ(std::stod(b.omega_expr), two_pi * 50.0);
}

TEST(ParseArgs, DampingOverride) {
  const RunConfig c = parse({"sql", "--preset", "aligo", "--damping", "viscous"});
  EXPECT_EQ(resolve_setup(c).osc.damping.kind, DampingKind::Viscous);
  EXPECT_THROW(parse({"sql", "--preset", "aligo", "--damping", "sticky"}), UsageError);
}

TEST(ParseArgs, SetupFileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "gupnoise_cli_setup.json").string();
  {
    std::ofstream f(path);
    f << json(preset("murch2008")).dump();
  }
  const RunConfig c = parse({"sql", "--setup", path.c_str()});
  const gupnoise::Setup s = resolve_setup(c);
  EXPECT_EQ(s.osc.m, 1e-22);
  EXPECT_THROW(parse({"sql", "--setup", path.c_str(), "--preset", "aligo"}), UsageError);
  std::filesystem::remove(path);
}

TEST(ExitCodes, DistinctStatuses) {
  EXPECT_EQ(run_quiet({"presets"}), kExitOk);
  std::string err;
  EXPECT_EQ(run_quiet({"bound", "--preset", "unknown", "--omega", "resonance"}, &err), kExitUsage);
  EXPECT_NE(err.find("purdy2013"), std::string::npos);
  EXPECT_EQ(run_quiet({"bound-curve", "--preset", "murch2008", "--observed", "/nonexistent/obs.csv"}), kExitInput);
  EXPECT_EQ(run_quiet({"bound", "--preset", "murch2008", "--omega", "resonance", "--target", "-1"}), kExitComputation);
  EXPECT_EQ(run_quiet({"spectrum", "--preset", "purdy2013", "--format", "csv", "-o", "/nonexistent-dir/x.csv"}), kExitIo);
  EXPECT_EQ(run_quiet({"--help"}), kExitOk);
  std::set<int> codes{kExitOk, kExitComputation, kExitUsage, kExitInput, kExitRegime, kExitIo};
  EXPECT_EQ(codes.size(), 6u);
}

TEST(ExitCodes, RegimeFailure) {
  EXPECT_EQ(exit_code_for(ErrorKind::Regime), kExitRegime);
  const gupnoise::Setup s = preset("murch2008");
  try {
    relative_noise(s.osc, s.opt, GupModel(1.0), s.osc.Omega, RegimeKind::FreeMass);
    FAIL() << "expected a regime error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Regime);
  }
}

TEST(Commands, ProduceExpectedShapes) {
  const io::Output spec = execute(parse({"spectrum", "--preset", "teufel2016", "--points", "11", "--omega-min", "1e7",
                                         "--omega-max", "1e8"}));
  ASSERT_TRUE(spec.table.has_value());
  EXPECT_EQ(spec.table->rows.size(), 11u);
  EXPECT_EQ(spec.table->columns, (std::vector<std::string>{"omega_rad_s", "psd_m2_per_hz", "kind"}));

  const io::Output sql = execute(parse({"sql", "--preset", "aligo"}));
  EXPECT_NEAR(sql.result["omega_sql"].get<double>(), 235.2, 0.5);

  const io::Output sw = execute(parse({"sweep", "--preset", "murch2008", "--variable", "power", "--scales", "1e-1..1e1"}));
  EXPECT_EQ(sw.table->rows.size(), 3u);

  const io::Output pr = execute(parse({"presets"}));
  EXPECT_EQ(pr.table->rows.size(), preset_catalog().size());

  const io::Output tl = execute(parse({"translate-ligo"}));
  EXPECT_LT(tl.result["equivalence_check"]["max_radiation_deviation"].get<double>(), 0.05);
}

TEST(Commands, OracleDeskPsd) {
  const io::Output out = execute(parse({"oracle", "--desk", "--mode", "psd", "--realizations", "2", "--override",
                                        "Q=10", "--stride", "5", "--segment", "200"}));
  ASSERT_TRUE(out.table.has_value());
  EXPECT_GT(out.table->rows.size(), 10u);
}

TEST(Determinism, IdenticalArgvGivesIdenticalBytes) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = (dir / "gupnoise_det_a.csv").string(), b = (dir / "gupnoise_det_b.csv").string();
  for (const auto& p : {a, b})
    ASSERT_EQ(run_quiet({"delta-spectrum", "--preset", "purdy2013", "--beta0", "1e30", "--points", "50", "--omega-min",
                         "1e6", "--omega-max", "1e8", "-o", p.c_str()}),
              kExitOk);
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_GT(sa.str().size(), 1000u);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}
