#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "nfv/error.hpp"

namespace nfv::cli {
namespace {

namespace fs = std::filesystem;

std::optional<RunConfig> parse(std::vector<std::string> args) {
  args.insert(args.begin(), "nfv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  return parse_config(static_cast<int>(argv.size()), argv.data(), out);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nfv_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

TEST(ParseConfig, FlagsFillTheConfig) {
  const auto c = parse({"run", "--preset", "encdec-smooth", "--N", "64", "--flux", "lxf,upwind",
                        "--alpha", "0.5", "--cfl", "0.8", "--T", "0.1", "--out", "x"});
  ASSERT_TRUE(c);
  EXPECT_EQ(c->command, Command::run);
  EXPECT_EQ(c->model, "encdec-smooth");
  EXPECT_EQ(c->n1, 64u);
  EXPECT_EQ(c->n2, 64u);
  EXPECT_EQ(c->fluxes,
            (std::vector<FluxVariant>{FluxVariant::lax_friedrichs_acg, FluxVariant::upwind}));
  EXPECT_DOUBLE_EQ(c->alpha, 0.5);
  EXPECT_DOUBLE_EQ(c->cfl, 0.8);
  EXPECT_DOUBLE_EQ(*c->horizon, 0.1);
  EXPECT_EQ(c->out, "x");
}

TEST(ParseConfig, GridLadderAndDomain) {
  const auto c = parse({"study", "--grid", "40x20", "--ladder", "25:100", "--domain",
                        "-1,1,-1,1", "--convolution", "direct"});
  ASSERT_TRUE(c);
  EXPECT_EQ(c->command, Command::study);
  EXPECT_EQ(c->n1, 40u);
  EXPECT_EQ(c->n2, 20u);
  EXPECT_EQ(c->ladder_first, 25u);
  EXPECT_EQ(c->ladder_last, 100u);
  EXPECT_EQ(*c->domain, (std::array<double, 4>{-1.0, 1.0, -1.0, 1.0}));
  EXPECT_EQ(c->convolution, ConvolutionMethod::direct);
}

TEST(ParseConfig, HelpReturnsNothing) { EXPECT_FALSE(parse({"--help"}).has_value()); }

TEST(ParseConfig, UsageErrors) {
  EXPECT_THROW(parse({}), UsageError);
  EXPECT_THROW(parse({"run", "--bogus"}), UsageError);
  EXPECT_THROW(parse({"run", "--grid", "4x", "--out", "x"}), UsageError);
  EXPECT_THROW(parse({"run", "--grid", "8x8", "--N", "8"}), UsageError);
  EXPECT_THROW(parse({"run", "--preset", "encdec-smooth", "--model", "encdec-nonsmooth"}),
               UsageError);
  EXPECT_THROW(parse({"run", "--flux", "roe"}), UsageError);
}

TEST(ParseConfig, ContractViolationsNameTheKey) {
  try {
    parse({"run", "--cfl", "0"});
    FAIL() << "cfl=0 accepted";
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("cfl", 0), 0u) << e.what();
  }
  EXPECT_THROW(parse({"run", "--alpha", "-1"}), ConfigError);
  EXPECT_THROW(parse({"run", "--T", "-0.5"}), ConfigError);
  EXPECT_THROW(parse({"run", "--model", "/nonexistent/model.json"}), ConfigError);
  EXPECT_THROW(parse({"study", "--domain", "0,1,0,2"}), ConfigError);
}

TEST(ParseConfig, GeneralFluxModelRejectsGodunov) {
  const fs::path dir = scratch("model");
  const fs::path model = dir / "general.json";
  write_text(model, R"({"ell": 0.8, "amplitude": 5, "profile": "smooth",
                        "domain": [-1, 1, -1, 1], "T": 0.1, "multiplicative": false})");
  EXPECT_THROW(parse({"run", "--model", model.string(), "--flux", "godunov"}), ConfigError);
  EXPECT_NO_THROW(parse({"run", "--model", model.string(), "--flux", "lxf"}));
  write_text(dir / "typo.json", R"({"ell": 0.8, "domain": [-1, 1, -1, 1], "T": 0.1, "amp": 5})");
  EXPECT_THROW(parse({"run", "--model", (dir / "typo.json").string()}), ConfigError);
}

TEST(ConfigFile, FlagsOverrideFileAndUnknownKeysFail) {
  const fs::path dir = scratch("config");
  write_text(dir / "ok.json", R"({"model": "encdec-smooth", "N": 32, "cfl": 0.5})");
  const auto c = parse({"check", "--config", (dir / "ok.json").string(), "--cfl", "0.25"});
  ASSERT_TRUE(c);
  EXPECT_EQ(c->model, "encdec-smooth");
  EXPECT_EQ(c->n1, 32u);
  EXPECT_DOUBLE_EQ(c->cfl, 0.25);

  write_text(dir / "bad.json", R"({"N": 32, "cfl_factor": 0.5})");
  try {
    parse({"run", "--config", (dir / "bad.json").string()});
    FAIL() << "unknown key accepted";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("cfl_factor"), std::string::npos);
  }
  write_text(dir / "typed.json", R"({"N": "many"})");
  EXPECT_THROW(parse({"run", "--config", (dir / "typed.json").string()}), UsageError);
  EXPECT_THROW(parse({"run", "--config", (dir / "missing.json").string()}), UsageError);
}

TEST(ConfigJson, RoundTrip) {
  RunConfig c;
  c.command = Command::audit;
  c.model = "encdec-smooth";
  c.n1 = 30;
  c.n2 = 40;
  c.domain = std::array<double, 4>{-2.0, 2.0, -1.0, 1.0};
  c.fluxes = {FluxVariant::godunov, FluxVariant::lax_friedrichs_split};
  c.alpha = 0.75;
  c.cfl = 0.9;
  c.horizon = 0.2;
  c.out = "elsewhere";
  c.golden = "g.csv";
  c.seed = 99;
  c.ladder_first = 10;
  c.ladder_last = 80;
  c.samples = 1234;
  c.diagnostics = true;
  c.diagnostics_every = 5;
  c.convolution = ConvolutionMethod::fast;
  c.threads = 3;
  EXPECT_EQ(config_from_json(to_json(c)), c);
  EXPECT_EQ(config_from_json(to_json(RunConfig{})), RunConfig{});
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(NFV_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Binary, CheckPassesOnSmoothPreset) {
  const fs::path dir = scratch("check");
  EXPECT_EQ(run_binary("check --preset encdec-smooth --N 50 --flux lxf,upwind --out " +
                       dir.string()),
            exit_ok);
  for (const char* v : {"lxf", "upwind"}) {
    const fs::path sub = dir / v;
    for (const char* f : {"summary.json", "verdict.json", "steps_encrypt.jsonl",
                          "steps_decrypt.jsonl", "initial.csv", "encrypted.csv",
                          "decrypted.csv"}) {
      EXPECT_TRUE(fs::exists(sub / f)) << sub / f;
    }
  }
}

TEST(Binary, ExcessiveCflFailsCheck) {
  const fs::path dir = scratch("cfl");
  EXPECT_EQ(run_binary("check --preset encdec-nonsmooth --N 24 --cfl 4 --out " + dir.string()),
            exit_check_failed);
}

TEST(Binary, ZeroViscosityAuditFails) {
  const fs::path dir = scratch("audit");
  EXPECT_EQ(run_binary("audit --flux lxf --alpha 0 --model encdec-smooth --samples 5000 --out " +
                       dir.string()),
            exit_check_failed);
  EXPECT_TRUE(fs::exists(dir / "audit.json"));
  EXPECT_EQ(run_binary("audit --flux lxf,upwind --samples 5000 --out " + dir.string()), exit_ok);
}

TEST(Binary, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run_binary("run --cfl 0"), exit_usage);
  EXPECT_EQ(run_binary("frobnicate"), exit_usage);
}

TEST(Binary, StudyWritesCsvAndGoldenDiff) {
  const fs::path dir = scratch("study");
  const int code = run_binary("study --preset encdec-smooth --ladder 16:32 --flux upwind --golden " +
                              std::string(NFV_GOLDEN_DIR) + "/encdec_smooth.csv --out " +
                              dir.string());
  // rungs 16 and 32 are absent from the table, so the diff reports them
  EXPECT_EQ(code, exit_check_failed);
  EXPECT_TRUE(fs::exists(dir / "study.csv"));
  EXPECT_TRUE(fs::exists(dir / "golden_diff.txt"));
}

}  // namespace
}  // namespace nfv::cli
