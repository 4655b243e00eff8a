// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nfv/diagnostics.hpp"
#include "nfv/harness.hpp"
#include "nfv/models.hpp"

namespace {

using namespace nfv;

// Pinned tolerances.
constexpr double kErrorRelative = 0.10;
constexpr double kRateAbsolute = 0.06;
constexpr double kMinNonsmoothRate = 0.40;
constexpr double kMinSmoothUpwindRateAt400 = 0.90;
constexpr double kMassTol = 1e-12;
constexpr double kMaxPrincipleTol = 1e-12;
constexpr double kEntropyTol = 1e-10;
constexpr double kConsistencyTol = 1e-14;
constexpr std::size_t kAuditSamples = 100000;
constexpr std::size_t kIdentitySamples = 10000;
constexpr double kFastDirectTol = 1e-10;
constexpr double kDoubleDifferenceSpread = 2.0;
constexpr double kNegativeCfl = 4.0;

const std::vector<std::size_t> kLadder{50, 100, 200, 400};
const std::string kGoldenDir = NFV_GOLDEN_DIR;

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " | " << detail
            << std::endl;
  failures += pass ? 0 : 1;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

/// Golden rows at the acceptance rungs only.
std::vector<GoldenEntry> golden_rungs(const std::string& file) {
  auto g = read_golden_file(kGoldenDir + "/" + file);
  std::erase_if(g, [](const GoldenEntry& e) {
    return std::find(kLadder.begin(), kLadder.end(), e.n) == kLadder.end();
  });
  return g;
}

std::vector<StudyRow> convergence_study(const std::string& preset_name) {
  StudySpec spec;
  spec.preset = preset(preset_name);
  spec.ladder = kLadder;
  spec.fluxes = {{FluxVariant::lax_friedrichs_acg, 1.0}, {FluxVariant::upwind, 1.0}};
  spec.diagnostics = true;
  spec.progress = [&](std::size_t n, FluxVariant v) {
    std::cerr << "  " << preset_name << " N=" << n << " " << to_string(v) << " done" << std::endl;
  };
  return run_study(spec);
}

std::string table(const std::vector<StudyRow>& rows) {
  std::ostringstream s;
  for (const StudyRow& r : rows) {
    s << to_string(r.flux.variant) << "@" << r.n << "=" << (r.error ? fmt(*r.error) : "n/a");
    if (r.rate) s << "(" << fmt(*r.rate) << ")";
    s << " ";
  }
  return s.str();
}

bool golden_check(int id, const std::string& name, const std::vector<StudyRow>& rows,
                  const std::string& golden_file, std::vector<std::string>& extra) {
  const auto diff = compare_golden(rows, golden_rungs(golden_file),
                                   GoldenTolerance{kErrorRelative, kRateAbsolute});
  bool ok = diff.empty();
  std::string detail = table(rows);
  for (const auto& line : diff) detail += "; " + line;
  for (const auto& line : extra) detail += "; " + line;
  ok = ok && extra.empty();
  report(id, ok, name, detail);
  return ok;
}

// ---------------------------------------------------------------- criterion 4

struct SuiteTally {
  std::size_t runs = 0;
  std::vector<std::string> problems;
  double worst_mass = 0.0;
  double worst_entropy = 0.0;
  double worst_min_excursion = 0.0;

  void add(const std::string& where, const SuiteVerdict& v) {
    ++runs;
    for (const char* name : {"finiteness", "mass_conservation", "max_principle", "entropy",
                             "l1_bound", "clamps"}) {
      const CheckResult* c = v.find(name);
      if (c == nullptr) {
        problems.push_back(where + " missing " + name);
        continue;
      }
      if (c->status == CheckStatus::fail) problems.push_back(where + " " + name + "=" + fmt(c->value));
    }
    if (const auto* c = v.find("mass_conservation")) worst_mass = std::max(worst_mass, c->value);
    if (const auto* c = v.find("entropy")) worst_entropy = std::max(worst_entropy, c->value);
    if (const auto* c = v.find("max_principle"); c && c->status != CheckStatus::not_applicable) {
      worst_min_excursion = std::max(worst_min_excursion, c->value);
    }
  }
};

SuiteVerdict monitored_run(const EncryptionProblem& prob, const Field& initial, SchemeConfig cfg,
                           double T, Field* final_out = nullptr) {
  cfg.t_end = T;
  RunMonitor mon(initial, cfg, prob.flux(), prob.convolver());
  RunOptions opt;
  opt.observer = mon.observer();
  const RunResult r = run(initial, cfg, prob.flux(), prob.convolver(), opt);
  if (final_out != nullptr) *final_out = r.final;
  SuiteTolerances tol;
  tol.mass = kMassTol;
  tol.max_principle = kMaxPrincipleTol;
  tol.entropy = kEntropyTol;
  return check_theorem_suite(r.records, mon.report(r.records), prob.flux(), tol);
}

void criterion4(const std::vector<StudyRow>& nonsmooth, const std::vector<StudyRow>& smooth) {
  SuiteTally tally;
  for (const auto* rows : {&nonsmooth, &smooth}) {
    for (const StudyRow& r : *rows) {
      const std::string where = std::string(to_string(r.flux.variant)) + "@" + std::to_string(r.n);
      if (!r.encrypt_verdict || !r.decrypt_verdict) {
        tally.problems.push_back(where + " has no verdict");
        continue;
      }
      tally.add(where + "/enc", *r.encrypt_verdict);
      tally.add(where + "/dec", *r.decrypt_verdict);
    }
  }

  // every flux variant on both presets
  constexpr FluxVariant all[] = {FluxVariant::lax_friedrichs_acg,
                                 FluxVariant::lax_friedrichs_split, FluxVariant::godunov,
                                 FluxVariant::upwind};
  for (const char* name : {"encdec-nonsmooth", "encdec-smooth"}) {
    const Preset p = preset(name);
    const Grid2D g = Grid2D::square(50, p.lo, p.hi);
    const EncryptionProblem prob(p.model, g);
    const Field initial = project_initial_data(p.profile, 1, g);
    for (FluxVariant v : all) {
      SchemeConfig cfg;
      cfg.flux = {v, 1.0};
      Field encrypted = initial;
      const std::string where = std::string(name) + "/" + std::string(to_string(v)) + "@50";
      tally.add(where + "/enc", monitored_run(prob, initial, cfg, p.horizon, &encrypted));
      cfg.direction = TimeDirection::reversed;
      tally.add(where + "/dec", monitored_run(prob, encrypted, cfg, p.horizon));
    }
  }

  // flux contract: consistency and monotonicity on 1e5 samples per variant
  const FluxModel model = EncryptionModel{}.flux_model();
  double consistency = 0.0;
  std::size_t violations = 0;
  for (FluxVariant v : all) {
    AuditOptions opt;
    opt.samples = kAuditSamples;
    const AuditReport a = flux_contract_audit({v, 1.0}, model, opt);
    consistency = std::max(consistency, a.consistency_max);
    violations += a.monotonicity_violations;
  }
  if (!(consistency <= kConsistencyTol)) tally.problems.push_back("consistency " + fmt(consistency));
  if (violations != 0) tally.problems.push_back("monotonicity violations " + std::to_string(violations));

  // Godunov and LxF-split(α=1) against Upwind for linear g
  std::size_t mismatches = 0;
  {
    AuditOptions opt;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> state(0.0, 10.0);
    std::uniform_real_distribution<double> conv(-opt.r_scale, opt.r_scale);
    for (std::size_t n = 0; n < kIdentitySamples; ++n) {
      const std::vector<double> r{conv(rng), conv(rng)};
      Interface at;
      at.r = r;
      at.axis = n % 2 == 0 ? Axis::x1 : Axis::x2;
      at.orientation = n % 3 == 0 ? -1.0 : 1.0;
      const double a = state(rng);
      const double b = state(rng);
      const double up = numerical_flux({FluxVariant::upwind, 1.0}, model, at, a, b);
      mismatches += numerical_flux({FluxVariant::godunov, 1.0}, model, at, a, b) != up;
      mismatches += numerical_flux({FluxVariant::lax_friedrichs_split, 1.0}, model, at, a, b) != up;
    }
  }
  if (mismatches != 0) tally.problems.push_back("identity mismatches " + std::to_string(mismatches));

  // fast vs direct convolution
  double worst_fast = 0.0;
  for (std::size_t n : {16u, 32u, 64u, 128u}) {
    const Grid2D g = Grid2D::square(n, -1.0, 1.0);
    const SampledKernelTables t = sample_kernels(EncryptionModel{0.8, 5.0}.kernels(), g);
    Field f(g, 1);
    std::mt19937_64 rng(n);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (double& x : f.values()) x = u(rng);
    const InterfaceConvolutions d = convolve_direct(t, f);
    const InterfaceConvolutions q = convolve_fast(t, f);
    double dev = 0.0;
    for (std::size_t i = 0; i < d.x_values().size(); ++i) {
      dev = std::max({dev, std::abs(q.x_values()[i] - d.x_values()[i]),
                      std::abs(q.y_values()[i] - d.y_values()[i])});
    }
    const double scaled = dev / (1.0 + d.max_abs());
    worst_fast = std::max(worst_fast, scaled);
    if (!(scaled <= kFastDirectTol)) {
      tally.problems.push_back("fast/direct N=" + std::to_string(n) + " " + fmt(scaled));
    }
  }

  // double-difference quotient over two independent batches
  double spread = 1.0;
  for (FluxVariant v : {FluxVariant::lax_friedrichs_split, FluxVariant::godunov,
                        FluxVariant::upwind}) {
    AuditOptions a;
    a.samples = kAuditSamples;
    a.seed = 101;
    AuditOptions b = a;
    b.seed = 202;
    const auto qa = flux_contract_audit({v, 1.0}, model, a).double_difference_max;
    const auto qb = flux_contract_audit({v, 1.0}, model, b).double_difference_max;
    if (!qa || !qb || !std::isfinite(*qa) || !std::isfinite(*qb) || *qa <= 0.0 || *qb <= 0.0) {
      tally.problems.push_back(std::string("double difference undefined for ") +
                               std::string(to_string(v)));
      continue;
    }
    const double s = std::max(*qa, *qb) / std::min(*qa, *qb);
    spread = std::max(spread, s);
    if (!(s <= kDoubleDifferenceSpread)) {
      tally.problems.push_back("double difference spread " + fmt(s) + " for " +
                               std::string(to_string(v)));
    }
  }

  std::ostringstream d;
  d << tally.runs << " monitored runs; max mass drift " << fmt(tally.worst_mass)
    << ", max min-excursion " << fmt(tally.worst_min_excursion) << ", max entropy residual "
    << fmt(tally.worst_entropy) << ", consistency " << fmt(consistency)
    << ", monotonicity violations " << violations << ", identity mismatches " << mismatches
    << ", fast/direct " << fmt(worst_fast) << ", double-difference spread " << fmt(spread);
  for (const auto& p : tally.problems) d << "; " << p;
  report(4, tally.problems.empty(), "property suite over every run and flux variant", d.str());
}

// ---------------------------------------------------------------- criterion 5

void criterion5() {
  std::ostringstream d;
  bool ok = true;
  const Preset p = preset("encdec-nonsmooth");
  const Grid2D g = Grid2D::square(50, p.lo, p.hi);
  const EncryptionProblem prob(p.model, g);
  const Field initial = project_initial_data(p.profile, 1, g);
  for (FluxVariant v : {FluxVariant::upwind, FluxVariant::lax_friedrichs_acg}) {
    SchemeConfig cfg;
    cfg.flux = {v, 1.0};
    cfg.cfl_factor = kNegativeCfl;
    Field encrypted = initial;
    bool caught = false;
    std::string caught_by;
    try {
      const SuiteVerdict fv = monitored_run(prob, initial, cfg, p.horizon, &encrypted);
      cfg.direction = TimeDirection::reversed;
      const SuiteVerdict bv = monitored_run(prob, encrypted, cfg, p.horizon);
      for (const auto* verdict : {&fv, &bv}) {
        for (const char* name : {"max_principle", "entropy"}) {
          if (verdict->find(name)->status == CheckStatus::fail) {
            caught = true;
            caught_by += std::string(verdict == &fv ? "enc:" : "dec:") + name + " ";
          }
        }
      }
    } catch (const std::exception& e) {
      caught_by = std::string("run failed (") + e.what() + ")";
    }
    d << to_string(v) << " cfl=" << kNegativeCfl << " -> " << (caught ? caught_by : "not caught")
      << "; ";
    ok = ok && caught;
  }
  AuditOptions opt;
  opt.samples = kAuditSamples;
  const AuditReport a =
      flux_contract_audit({FluxVariant::lax_friedrichs_acg, 0.0}, EncryptionModel{}.flux_model(), opt);
  d << "lxf alpha=0 audit: " << a.monotonicity_violations << " monotonicity violations";
  ok = ok && a.monotonicity_violations > 0;
  report(5, ok, "negative controls are detected", d.str());
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();

  std::cerr << "running nonsmooth convergence study" << std::endl;
  const auto nonsmooth = convergence_study("encdec-nonsmooth");
  std::vector<std::string> none;
  golden_check(1, "nonsmooth errors within 10% and rates within 0.06 of the reference",
               nonsmooth, "encdec_nonsmooth.csv", none);

  std::cerr << "running smooth convergence study" << std::endl;
  const auto smooth = convergence_study("encdec-smooth");
  std::vector<std::string> trend;
  for (const StudyRow& r : smooth) {
    if (r.n == 400 && r.flux.variant == FluxVariant::upwind &&
        !(r.rate && *r.rate >= kMinSmoothUpwindRateAt400)) {
      trend.push_back("upwind rate at N=400 below " + fmt(kMinSmoothUpwindRateAt400));
    }
  }
  golden_check(2, "smooth errors within 10% and rates within 0.06 of the reference", smooth,
               "encdec_smooth.csv", trend);

  {
    bool ok = true;
    double lowest = INFINITY;
    std::size_t count = 0;
    for (const StudyRow& r : nonsmooth) {
      if (r.n == kLadder.front()) continue;
      ++count;
      if (!r.rate) {
        ok = false;
        continue;
      }
      lowest = std::min(lowest, *r.rate);
    }
    ok = ok && count > 0 && lowest >= kMinNonsmoothRate;
    report(3, ok, "nonsmooth rates at least " + fmt(kMinNonsmoothRate),
           "lowest of " + std::to_string(count) + " rates = " + fmt(lowest));
  }

  std::cerr << "running property suite" << std::endl;
  criterion4(nonsmooth, smooth);
  std::cerr << "running negative controls" << std::endl;
  criterion5();

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << " (" << fmt(secs)
            << " s)" << std::endl;
  return failures == 0 ? 0 : 1;
}
