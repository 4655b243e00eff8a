#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nfv/flux.hpp"
#include "nfv/models.hpp"
#include "nfv/nonlocal.hpp"

namespace nfv::cli {

enum class Command { run, study, audit, check };

struct RunConfig {
  Command command = Command::run;
  /// preset name or path to a JSON model file
  std::string model = "encdec-nonsmooth";
  std::size_t n1 = 50;
  std::size_t n2 = 50;
  std::optional<std::array<double, 4>> domain;
  std::vector<FluxVariant> fluxes{FluxVariant::upwind};
  double alpha = 1.0;
  double cfl = 1.0;
  std::optional<double> horizon;
  std::string out = "nfv-out";
  std::optional<std::string> golden;
  std::uint64_t seed = 20250101;
  std::size_t ladder_first = 50;
  std::size_t ladder_last = 400;
  std::size_t samples = 100000;
  bool diagnostics = false;
  std::size_t diagnostics_every = 0;
  ConvolutionMethod convolution = ConvolutionMethod::automatic;
  int threads = 0;

  bool operator==(const RunConfig&) const = default;
};

/// Thrown for malformed or conflicting configuration; names the key.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

nlohmann::json to_json(const RunConfig& config);
/// Unknown keys and ill-typed values raise UsageError.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

/// Flags, optionally layered over `--config FILE`; flags win. The result is
/// validated. Throws UsageError or ConfigError. Returns nullopt when help
/// was printed.
std::optional<RunConfig> parse_config(int argc, const char* const* argv, std::ostream& out);

/// Every field checked; the flux/model pairing is checked against the flux
/// contract.
void validate(const RunConfig& config);

struct ResolvedModel {
  std::string name;
  EncryptionModel model;
  Profile profile;
  std::array<double, 4> domain{};  // x1_min, x1_max, x2_min, x2_max
  double horizon = 0.0;
  bool multiplicative = true;
};

/// Preset or JSON model file, with domain and horizon overrides applied.
ResolvedModel resolve_model(const RunConfig& config);

/// Exit codes of execute.
inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_runtime = 3;

/// Runs the subcommand and writes its artifacts below config.out. On an
/// exception a failure.json report is written and exit_runtime returned.
int execute(const RunConfig& config, std::ostream& log);

}  // namespace nfv::cli
