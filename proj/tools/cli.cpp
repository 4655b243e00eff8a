#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "nfv/diagnostics.hpp"
#include "nfv/error.hpp"
#include "nfv/harness.hpp"
#include "nfv/parallel.hpp"
#include "nfv/scheme.hpp"

namespace nfv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view command_name(Command c) {
  switch (c) {
    case Command::run:
      return "run";
    case Command::study:
      return "study";
    case Command::audit:
      return "audit";
    case Command::check:
      return "check";
  }
  return "run";
}

Command parse_command(const std::string& s) {
  if (s == "run") return Command::run;
  if (s == "study") return Command::study;
  if (s == "audit") return Command::audit;
  if (s == "check") return Command::check;
  throw UsageError("command: unknown subcommand '" + s + "'");
}

std::string_view convolution_name(ConvolutionMethod m) {
  switch (m) {
    case ConvolutionMethod::automatic:
      return "automatic";
    case ConvolutionMethod::direct:
      return "direct";
    case ConvolutionMethod::fast:
      return "fast";
  }
  return "automatic";
}

ConvolutionMethod parse_convolution(const std::string& s) {
  if (s == "automatic") return ConvolutionMethod::automatic;
  if (s == "direct") return ConvolutionMethod::direct;
  if (s == "fast") return ConvolutionMethod::fast;
  throw UsageError("convolution: expected automatic, direct or fast, got '" + s + "'");
}

std::size_t parse_count(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) {
      throw std::invalid_argument(s);
    }
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw UsageError(key + ": expected a non-negative integer, got '" + s + "'");
  }
}

// "NxM" or "N"
std::pair<std::size_t, std::size_t> parse_grid(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) {
    const std::size_t n = parse_count("grid", s);
    return {n, n};
  }
  return {parse_count("grid", s.substr(0, x)), parse_count("grid", s.substr(x + 1))};
}

std::pair<std::size_t, std::size_t> parse_ladder(const std::string& s) {
  const auto c = s.find(':');
  if (c == std::string::npos) {
    throw UsageError("ladder: expected FIRST:LAST, got '" + s + "'");
  }
  return {parse_count("ladder", s.substr(0, c)), parse_count("ladder", s.substr(c + 1))};
}

std::vector<FluxVariant> parse_flux_list(const json& v) {
  std::vector<FluxVariant> out;
  auto add = [&](const std::string& name) {
    try {
      out.push_back(parse_flux_variant(name));
    } catch (const ConfigError& e) {
      throw UsageError(std::string("flux: ") + e.what());
    }
  };
  if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) {
      add(item);
    }
  } else {
    for (const auto& item : v) {
      add(item.get<std::string>());
    }
  }
  return out;
}

std::array<double, 4> parse_domain(const json& v) {
  std::vector<double> d;
  if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        d.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw UsageError("domain: bad number '" + item + "'");
      }
    }
  } else {
    d = v.get<std::vector<double>>();
  }
  if (d.size() != 4) {
    throw UsageError("domain: expected four values x1_min,x1_max,x2_min,x2_max");
  }
  return {d[0], d[1], d[2], d[3]};
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["command"] = std::string(command_name(c.command));
  j["model"] = c.model;
  j["grid"] = std::to_string(c.n1) + "x" + std::to_string(c.n2);
  if (c.domain) {
    j["domain"] = *c.domain;
  }
  std::vector<std::string> fluxes;
  for (FluxVariant v : c.fluxes) {
    fluxes.emplace_back(to_string(v));
  }
  j["flux"] = fluxes;
  j["alpha"] = c.alpha;
  j["cfl"] = c.cfl;
  if (c.horizon) {
    j["T"] = *c.horizon;
  }
  j["out"] = c.out;
  if (c.golden) {
    j["golden"] = *c.golden;
  }
  j["seed"] = c.seed;
  j["ladder"] = std::to_string(c.ladder_first) + ":" + std::to_string(c.ladder_last);
  j["samples"] = c.samples;
  j["diagnostics"] = c.diagnostics;
  j["diagnostics_every"] = c.diagnostics_every;
  j["convolution"] = std::string(convolution_name(c.convolution));
  j["threads"] = c.threads;
  return j;
}

RunConfig config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) {
    throw UsageError("configuration must be a JSON object");
  }
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "command") {
        c.command = parse_command(v.get<std::string>());
      } else if (key == "model" || key == "preset") {
        c.model = v.get<std::string>();
      } else if (key == "grid") {
        std::tie(c.n1, c.n2) =
            v.is_number() ? std::pair{v.get<std::size_t>(), v.get<std::size_t>()}
                          : parse_grid(v.get<std::string>());
      } else if (key == "N") {
        c.n1 = c.n2 = v.get<std::size_t>();
      } else if (key == "domain") {
        c.domain = parse_domain(v);
      } else if (key == "flux") {
        c.fluxes = parse_flux_list(v);
      } else if (key == "alpha") {
        c.alpha = v.get<double>();
      } else if (key == "cfl") {
        c.cfl = v.get<double>();
      } else if (key == "T") {
        c.horizon = v.get<double>();
      } else if (key == "out") {
        c.out = v.get<std::string>();
      } else if (key == "golden") {
        c.golden = v.get<std::string>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "ladder") {
        std::tie(c.ladder_first, c.ladder_last) = parse_ladder(v.get<std::string>());
      } else if (key == "samples") {
        c.samples = v.get<std::size_t>();
      } else if (key == "diagnostics") {
        c.diagnostics = v.get<bool>();
      } else if (key == "diagnostics_every") {
        c.diagnostics_every = v.get<std::size_t>();
      } else if (key == "convolution") {
        c.convolution = parse_convolution(v.get<std::string>());
      } else if (key == "threads") {
        c.threads = v.get<int>();
      } else {
        throw UsageError("unknown configuration key '" + key + "'");
      }
    } catch (const json::exception&) {
      throw UsageError(key + ": value has the wrong type");
    }
  }
  return c;
}

std::optional<RunConfig> parse_config(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Finite-volume solver for 2D nonlocal conservation laws", "nfv"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_subcommand("run", "encrypt and decrypt one field, writing snapshots and step logs");
  app.add_subcommand("study", "grid-refinement study with optional golden comparison");
  app.add_subcommand("audit", "randomised audit of the numerical flux contract");
  app.add_subcommand("check", "run with the discrete theorem suite attached");

  std::string config_file;
  std::string preset;
  std::string model;
  std::string grid;
  std::size_t n = 0;
  std::string domain;
  std::vector<std::string> flux;
  double alpha = 0.0;
  double cfl = 0.0;
  double horizon = 0.0;
  std::string out_dir;
  std::string golden;
  std::uint64_t seed = 0;
  std::string ladder;
  std::size_t samples = 0;
  std::size_t every = 0;
  std::string convolution;
  int threads = 0;

  auto* o_config = app.add_option("--config", config_file, "JSON configuration file");
  auto* o_preset = app.add_option("--preset", preset, "encdec-nonsmooth or encdec-smooth");
  auto* o_model = app.add_option("--model", model, "preset name or JSON model file");
  auto* o_grid = app.add_option("--grid", grid, "cells per axis, NxM");
  auto* o_n = app.add_option("--N", n, "cells per axis (square grid)");
  auto* o_domain = app.add_option("--domain", domain, "x1_min,x1_max,x2_min,x2_max");
  auto* o_flux = app.add_option("--flux", flux, "lxf, lxf-split, godunov, upwind")->delimiter(',');
  auto* o_alpha = app.add_option("--alpha", alpha, "Lax-Friedrichs viscosity");
  auto* o_cfl = app.add_option("--cfl", cfl, "fraction of the CFL bound");
  auto* o_t = app.add_option("--T", horizon, "encryption horizon");
  auto* o_out = app.add_option("--out", out_dir, "output directory");
  auto* o_golden = app.add_option("--golden", golden, "golden CSV for study");
  auto* o_seed = app.add_option("--seed", seed, "audit seed");
  auto* o_ladder = app.add_option("--ladder", ladder, "study ladder FIRST:LAST");
  auto* o_samples = app.add_option("--samples", samples, "audit samples");
  auto* f_diag = app.add_flag("--diagnostics", "attach the theorem suite to run and study");
  auto* o_every = app.add_option("--every", every, "diagnostics cadence in steps (0: auto)");
  auto* o_conv = app.add_option("--convolution", convolution, "automatic, direct or fast");
  auto* o_threads = app.add_option("--threads", threads, "worker threads (0: NFV_THREADS)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig base;
  if (o_config->count() > 0) {
    std::ifstream in(config_file);
    if (!in) {
      throw UsageError("config: cannot open '" + config_file + "'");
    }
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("config: " + std::string(e.what()));
    }
    base = config_from_json(j, base);
  }

  if (o_preset->count() > 0 && o_model->count() > 0 && preset != model) {
    throw UsageError("conflicting keys 'preset' and 'model'");
  }
  if (o_grid->count() > 0 && o_n->count() > 0) {
    throw UsageError("conflicting keys 'grid' and 'N'");
  }

  json flags;
  flags["command"] = app.get_subcommands().front()->get_name();
  if (o_preset->count() > 0) flags["model"] = preset;
  if (o_model->count() > 0) flags["model"] = model;
  if (o_grid->count() > 0) flags["grid"] = grid;
  if (o_n->count() > 0) flags["N"] = n;
  if (o_domain->count() > 0) flags["domain"] = domain;
  if (o_flux->count() > 0) flags["flux"] = flux;
  if (o_alpha->count() > 0) flags["alpha"] = alpha;
  if (o_cfl->count() > 0) flags["cfl"] = cfl;
  if (o_t->count() > 0) flags["T"] = horizon;
  if (o_out->count() > 0) flags["out"] = out_dir;
  if (o_golden->count() > 0) flags["golden"] = golden;
  if (o_seed->count() > 0) flags["seed"] = seed;
  if (o_ladder->count() > 0) flags["ladder"] = ladder;
  if (o_samples->count() > 0) flags["samples"] = samples;
  if (f_diag->count() > 0) flags["diagnostics"] = true;
  if (o_every->count() > 0) flags["diagnostics_every"] = every;
  if (o_conv->count() > 0) flags["convolution"] = convolution;
  if (o_threads->count() > 0) flags["threads"] = threads;

  RunConfig config = config_from_json(flags, base);
  validate(config);
  return config;
}

ResolvedModel resolve_model(const RunConfig& config) {
  ResolvedModel r;
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), config.model) != names.end()) {
    const Preset p = preset(config.model);
    r.name = p.name;
    r.model = p.model;
    r.profile = p.profile;
    r.domain = {p.lo, p.hi, p.lo, p.hi};
    r.horizon = p.horizon;
  } else {
    std::ifstream in(config.model);
    if (!in) {
      throw ConfigError("model: '" + config.model + "' is neither a preset nor a readable file");
    }
    json j;
    try {
      j = json::parse(in);
      r.name = j.value("name", fs::path(config.model).stem().string());
      r.model.ell = j.at("ell").get<double>();
      r.model.amplitude = j.value("amplitude", 1.0);
      const std::string profile = j.value("profile", "smooth");
      if (profile == "smooth") {
        r.profile = smooth_profile();
      } else if (profile == "nonsmooth") {
        r.profile = nonsmooth_profile();
      } else if (profile == "constant") {
        r.profile = constant_profile(j.value("value", 1.0));
      } else {
        throw ConfigError("model: unknown profile '" + profile + "'");
      }
      r.domain = parse_domain(j.at("domain"));
      r.horizon = j.at("T").get<double>();
      r.multiplicative = j.value("multiplicative", true);
      for (const auto& [key, v] : j.items()) {
        static const std::vector<std::string> known{
            "name", "ell", "amplitude", "profile", "value", "domain", "T", "multiplicative"};
        if (std::find(known.begin(), known.end(), key) == known.end()) {
          throw ConfigError("model: unknown key '" + key + "'");
        }
      }
    } catch (const json::exception& e) {
      throw ConfigError("model: " + std::string(e.what()));
    }
  }
  if (config.domain) {
    r.domain = *config.domain;
  }
  if (config.horizon) {
    r.horizon = *config.horizon;
  }
  return r;
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what);
  };
  if (c.n1 < 2 || c.n2 < 2) fail("grid", "need at least 2 cells per axis");
  if (c.domain) {
    const auto& d = *c.domain;
    for (double v : d) {
      if (!std::isfinite(v)) fail("domain", "values must be finite");
    }
    if (!(d[0] < d[1]) || !(d[2] < d[3])) fail("domain", "need x1_min < x1_max and x2_min < x2_max");
  }
  if (c.fluxes.empty()) fail("flux", "at least one flux is required");
  if (!(c.alpha >= 0.0) || !std::isfinite(c.alpha)) fail("alpha", "must be finite and >= 0");
  if (!(c.cfl > 0.0) || !std::isfinite(c.cfl)) fail("cfl", "must be finite and > 0");
  if (c.horizon && (!(*c.horizon >= 0.0) || !std::isfinite(*c.horizon))) {
    fail("T", "must be finite and >= 0");
  }
  if (c.out.empty()) fail("out", "must not be empty");
  if (c.ladder_first < 2 || c.ladder_last < c.ladder_first) {
    fail("ladder", "need 2 <= FIRST <= LAST");
  }
  if (c.samples == 0) fail("samples", "must be positive");
  if (c.threads < 0) fail("threads", "must be >= 0");

  const ResolvedModel m = resolve_model(c);
  if (!(m.model.ell > 0.0)) fail("model", "kernel scale must be positive");
  const FluxModel flux = m.model.flux_model(StatePolicy::extend, m.multiplicative);
  for (FluxVariant v : c.fluxes) {
    try {
      nfv::validate(NumericalFluxChoice{v, c.alpha}, flux);
    } catch (const ConfigError& e) {
      fail("flux", e.what());
    }
  }
  if (c.command == Command::study && (m.domain[0] != m.domain[2] || m.domain[1] != m.domain[3])) {
    fail("domain", "study needs a square domain");
  }
}

namespace {

void write_snapshot(const fs::path& dir, const std::string& stem, const Field& field) {
  std::ofstream csv(dir / (stem + ".csv"));
  write_field_csv(csv, field);
  std::ofstream txt(dir / (stem + ".txt"));
  write_field_matrix(txt, field);
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

json verdict_json(const SuiteVerdict& v) { return json::parse(v.to_json()); }

// Encrypt/decrypt one flux; returns false when an attached check fails.
bool run_one(const RunConfig& c, const ResolvedModel& m, FluxVariant variant, const fs::path& dir,
             std::ostream& log, json& failures) {
  fs::create_directories(dir);
  const auto& d = m.domain;
  const Grid2D grid(c.n1, c.n2, d[0], d[1], d[2], d[3]);
  const EncryptionProblem problem(m.model, grid, c.convolution, StatePolicy::extend,
                                  m.multiplicative);
  const Field initial = project_initial_data(m.profile, 1, grid);

  SchemeConfig scheme;
  scheme.flux = {variant, c.alpha};
  scheme.cfl_factor = c.cfl;
  scheme.convolution = c.convolution;
  scheme.t_end = m.horizon;
  const bool checking = c.command == Command::check || c.diagnostics;

  std::ofstream enc_log(dir / "steps_encrypt.jsonl");
  RunOptions options;
  options.observe_every = c.diagnostics_every;
  options.step_log = &enc_log;
  std::optional<RunMonitor> forward;
  if (checking) {
    forward.emplace(initial, scheme, problem.flux(), problem.convolver());
    options.observer = forward->observer();
  }
  const RunResult enc = problem.encrypt(initial, scheme, m.horizon, options);

  scheme.direction = TimeDirection::reversed;
  std::ofstream dec_log(dir / "steps_decrypt.jsonl");
  options.step_log = &dec_log;
  std::optional<RunMonitor> backward;
  if (checking) {
    backward.emplace(enc.final, scheme, problem.flux(), problem.convolver());
    options.observer = backward->observer();
  }
  const RunResult dec = problem.decrypt(enc.final, scheme, m.horizon, options);

  write_snapshot(dir, "initial", initial);
  write_snapshot(dir, "encrypted", enc.final);
  write_snapshot(dir, "decrypted", dec.final);

  const double error = reconstruction_error(dec.final, initial)[0];
  json summary;
  summary["model"] = m.name;
  summary["flux"] = std::string(to_string(variant));
  summary["alpha"] = c.alpha;
  summary["grid"] = {c.n1, c.n2};
  summary["domain"] = m.domain;
  summary["T"] = m.horizon;
  summary["dt"] = compute_dt(scheme, grid);
  summary["steps"] = enc.records.size() - 1;
  summary["reconstruction_error"] = error;
  log << to_string(variant) << ": reconstruction error " << error << '\n';

  bool ok = true;
  if (checking) {
    const DiagnosticsReport fr = forward->report(enc.records);
    const DiagnosticsReport br = backward->report(dec.records);
    const SuiteVerdict fv = check_theorem_suite(enc.records, fr, problem.flux());
    const SuiteVerdict bv = check_theorem_suite(dec.records, br, problem.flux());
    json verdict;
    verdict["encrypt"] = verdict_json(fv);
    verdict["decrypt"] = verdict_json(bv);
    verdict["passed"] = fv.passed() && bv.passed();
    write_json(dir / "verdict.json", verdict);
    std::ofstream fres(dir / "residuals_encrypt.csv");
    write_residual_csv(fres, fr);
    std::ofstream bres(dir / "residuals_decrypt.csv");
    write_residual_csv(bres, br);
    summary["passed"] = verdict["passed"];
    for (const auto* v : {&fv, &bv}) {
      const char* phase = v == &fv ? "encrypt" : "decrypt";
      for (const CheckResult& r : v->checks) {
        log << "  " << phase << ' ' << r.name << ": " << to_string(r.status) << " (" << r.value
            << ")\n";
        if (r.status == CheckStatus::fail) {
          failures.push_back({{"flux", to_string(variant)}, {"phase", phase}, {"check", r.name},
                              {"value", r.value}, {"detail", r.detail}});
          ok = false;
        }
      }
    }
  }
  write_json(dir / "summary.json", summary);
  return ok;
}

int do_run(const RunConfig& c, std::ostream& log, json& failures) {
  const ResolvedModel m = resolve_model(c);
  bool ok = true;
  for (FluxVariant v : c.fluxes) {
    ok = run_one(c, m, v, fs::path(c.out) / std::string(to_string(v)), log, failures) && ok;
  }
  return ok ? exit_ok : exit_check_failed;
}

int do_study(const RunConfig& c, std::ostream& log, json& failures) {
  const ResolvedModel m = resolve_model(c);
  StudySpec spec;
  spec.preset = Preset{m.name, m.model, m.profile, m.domain[0], m.domain[1], m.horizon};
  spec.ladder = doubling_ladder(c.ladder_first, c.ladder_last);
  for (FluxVariant v : c.fluxes) {
    spec.fluxes.push_back({v, c.alpha});
  }
  spec.cfl_factor = c.cfl;
  spec.convolution = c.convolution;
  spec.diagnostics = c.diagnostics;
  spec.observe_every = c.diagnostics_every;
  spec.progress = [&log](std::size_t n, FluxVariant v) {
    log << "finished N=" << n << ' ' << to_string(v) << '\n';
  };
  const std::vector<StudyRow> rows = run_study(spec);

  std::ofstream csv(fs::path(c.out) / "study.csv");
  write_study_csv(csv, rows);
  write_study_csv(log, rows);

  bool ok = true;
  for (const StudyRow& r : rows) {
    const std::string where =
        "N=" + std::to_string(r.n) + " " + std::string(to_string(r.flux.variant));
    if (!r.failure.empty()) {
      failures.push_back({{"rung", where}, {"error", r.failure}});
      ok = false;
    }
    for (const auto& v : {r.encrypt_verdict, r.decrypt_verdict}) {
      if (v && !v->passed()) {
        failures.push_back({{"rung", where}, {"verdict", verdict_json(*v)}});
        ok = false;
      }
    }
  }
  if (c.golden) {
    const auto diff = compare_golden(rows, read_golden_file(*c.golden));
    std::ofstream out(fs::path(c.out) / "golden_diff.txt");
    for (const std::string& line : diff) {
      out << line << '\n';
      log << "golden: " << line << '\n';
      failures.push_back({{"golden", line}});
    }
    ok = ok && diff.empty();
  }
  return ok ? exit_ok : exit_check_failed;
}

int do_audit(const RunConfig& c, std::ostream& log, json& failures) {
  const ResolvedModel m = resolve_model(c);
  const FluxModel flux = m.model.flux_model(StatePolicy::extend, m.multiplicative);
  AuditOptions options;
  options.samples = c.samples;
  options.seed = c.seed;
  options.x_lo = {m.domain[0], m.domain[2]};
  options.x_hi = {m.domain[1], m.domain[3]};
  options.t_max = std::max(m.horizon, 1.0);

  json out = json::array();
  bool ok = true;
  for (FluxVariant v : c.fluxes) {
    const AuditReport r = flux_contract_audit({v, c.alpha}, flux, options);
    json e;
    e["flux"] = std::string(to_string(v));
    e["alpha"] = c.alpha;
    e["samples"] = r.samples;
    e["consistency_max"] = r.consistency_max;
    e["monotonicity_violations"] = r.monotonicity_violations;
    e["lipschitz_first"] = r.lipschitz_first;
    e["lipschitz_second"] = r.lipschitz_second;
    if (r.double_difference_max) {
      e["double_difference_max"] = *r.double_difference_max;
      e["double_difference_bound"] = *r.double_difference_bound;
      e["double_difference_violations"] = r.double_difference_violations;
    }
    e["passed"] = r.passed();
    log << to_string(v) << ": consistency " << r.consistency_max << ", monotonicity violations "
        << r.monotonicity_violations << (r.passed() ? ", pass" : ", FAIL") << '\n';
    if (!r.passed()) {
      failures.push_back(e);
      ok = false;
    }
    out.push_back(std::move(e));
  }
  write_json(fs::path(c.out) / "audit.json", out);
  return ok ? exit_ok : exit_check_failed;
}

}  // namespace

int execute(const RunConfig& config, std::ostream& log) {
  json failures = json::array();
  std::string kind;
  std::string message;
  int status = exit_runtime;
  try {
    fs::create_directories(config.out);
    if (config.threads > 0) {
      set_worker_count(config.threads);
    }
    write_json(fs::path(config.out) / "config.json", to_json(config));
    switch (config.command) {
      case Command::run:
      case Command::check:
        status = do_run(config, log, failures);
        break;
      case Command::study:
        status = do_study(config, log, failures);
        break;
      case Command::audit:
        status = do_audit(config, log, failures);
        break;
    }
  } catch (const StepFailure& e) {
    kind = "step";
    message = e.what();
  } catch (const ConfigError& e) {
    kind = "config";
    message = e.what();
  } catch (const InputError& e) {
    kind = "input";
    message = e.what();
  } catch (const ModelError& e) {
    kind = "model";
    message = e.what();
  } catch (const std::exception& e) {
    kind = "internal";
    message = e.what();
  }

  if (!kind.empty() || status != exit_ok) {
    json report;
    report["command"] = std::string(command_name(config.command));
    report["exit_status"] = status;
    if (!kind.empty()) {
      report["error"] = {{"kind", kind}, {"message", message}};
      log << "error (" << kind << "): " << message << '\n';
    }
    report["failures"] = failures;
    std::error_code ec;
    fs::create_directories(config.out, ec);
    write_json(fs::path(config.out) / "failure.json", report);
  }
  return status;
}

}  // namespace nfv::cli
