#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nfv/flux.hpp"
#include "nfv/grid.hpp"
#include "nfv/nonlocal.hpp"
#include "nfv/scheme.hpp"

namespace nfv {

/// dx1 dx2 Σ |ρ^k| per species.
std::vector<double> discrete_l1(const Field& field);
/// dx1 dx2 Σ ρ^k per species.
std::vector<double> discrete_mass(const Field& field);
/// Σ |ρ_{i+1,j} - ρ_{i,j}| dx2 + |ρ_{i,j+1} - ρ_{i,j}| dx1 per species. Jumps
/// across the boundary are included on periodic grids and measured against
/// zero under zero extension.
std::vector<double> total_variation(const Field& field);
std::vector<double> sup_norm(const Field& field);
/// dx1 dx2 Σ |a - b| per species. Throws InputError on a shape mismatch.
std::vector<double> l1_distance(const Field& a, const Field& b);

struct FieldStats {
  std::vector<double> mass;
  std::vector<double> l1;
  std::vector<double> linf;
  std::vector<double> min;
  std::vector<double> max;
  std::vector<double> tv;
};

FieldStats field_stats(const Field& field);

/// `count` equispaced κ over [lo - margin·w, hi + margin·w], where [lo, hi]
/// is the range of all species and w its width (or max(1, |lo|) for a
/// constant field). Under the clamp policy the lattice is clipped to the
/// admissible intervals.
std::vector<double> kappa_lattice(const Field& field, const FluxModel& model,
                                  std::size_t count = 33, double margin = 0.1);

struct EntropyResidual {
  double max = 0.0;
  std::size_t species = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  double kappa = 0.0;
};

/// Left-hand side of the discrete entropy inequality for `after`, obtained
/// from `before` by one step of length dt. Returns the largest value over
/// cells, species and lattice κ. sgn(0) is taken as 0.
/// Throws InputError when the two fields do not describe one step.
EntropyResidual entropy_residual(const Field& before, const Field& after, double dt,
                                 const SchemeConfig& config, const FluxModel& model,
                                 const Convolver& convolver, std::span<const double> kappas);

/// Per-cell residual (row-major j, i) of species k for a single κ.
std::vector<double> entropy_residual_cells(const Field& before, const Field& after, double dt,
                                           const SchemeConfig& config, const FluxModel& model,
                                           const Convolver& convolver, std::size_t k,
                                           double kappa);

/// Interface-difference bounds of the discrete convolutions:
/// x and y first differences against dx·||∂η||·||ρ||_1 and the mixed
/// second difference against (2 dx1² ||∂11 η|| + dx1 dx2 ||∂12 η||)·||ρ||_1.
struct ConvolutionBoundCheck {
  double x_difference = 0.0;
  double x_bound = 0.0;
  double y_difference = 0.0;
  double y_bound = 0.0;
  double mixed_difference = 0.0;
  double mixed_bound = 0.0;

  /// observed <= slack · bound for all three
  bool holds(double slack = 1.05) const;
};

ConvolutionBoundCheck check_convolution_bounds(const InterfaceConvolutions& r,
                                               const KernelDerivativeBounds& bounds,
                                               double l1_total);

struct ResidualSample {
  std::size_t n = 0;
  double t = 0.0;
  double residual_max = 0.0;
  double step_l1_change = 0.0;  // Σ_k ||ρ^{n+1} - ρ^n||_1
};

struct DiagnosticsReport {
  FieldStats initial;
  FieldStats final;
  double entropy_residual_max = 0.0;
  std::size_t entropy_checks = 0;
  /// empirical constants
  double tv_growth = 0.0;       // C in TV' <= (1 + C dt) TV + C dt
  double time_continuity_c3 = 0.0;
  double time_continuity_c4 = 0.0;
  double linf_growth = 0.0;     // C5 in ||ρ||∞ <= exp(C5 t) ||ρ0||∞
  std::uint64_t clamp_count = 0;
  std::vector<ResidualSample> samples;
};

/// Step observer that evaluates the entropy residual and the step-to-step L1
/// change on the observed steps. Not thread-safe; one monitor per run.
class RunMonitor {
 public:
  RunMonitor(const Field& initial, const SchemeConfig& config, const FluxModel& model,
             const Convolver& convolver, std::size_t kappa_count = 33);

  StepObserver observer();
  void observe(const Field& before, const Field& after, const StepRecord& record);

  /// Fold the run's step records into the report.
  DiagnosticsReport report(const std::vector<StepRecord>& records) const;

  const std::vector<double>& kappas() const { return kappas_; }

 private:
  FieldStats initial_;
  const SchemeConfig* config_;
  const FluxModel* model_;
  const Convolver* convolver_;
  std::vector<double> kappas_;
  std::vector<ResidualSample> samples_;
  double entropy_max_ = 0.0;
  double c4_ = 0.0;
};

/// `n,t,residual_max,step_l1_change` rows with a header line.
void write_residual_csv(std::ostream& out, const DiagnosticsReport& report);

enum class CheckStatus { pass, fail, not_applicable };

std::string_view to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::not_applicable;
  double value = 0.0;
  std::optional<double> tolerance;
  std::string detail;
};

struct SuiteTolerances {
  double mass = 1e-12;           // relative per-step change
  double max_principle = 1e-12;  // absolute excursion below/above the interval
  double entropy = 1e-10;
  double l1 = 1e-12;             // relative per-step change
};

struct SuiteVerdict {
  std::vector<CheckResult> checks;

  bool passed() const;
  const CheckResult* find(std::string_view name) const;
  /// {"passed": bool, "checks": [{name, status, value, tolerance, detail}]}
  std::string to_json() const;
};

/// Turns a run into one verdict per proved discrete property: finiteness,
/// max_principle, mass_conservation, l1_bound, entropy, bv_estimate,
/// time_continuity, linf_bound and clamps.
SuiteVerdict check_theorem_suite(const std::vector<StepRecord>& records,
                                 const DiagnosticsReport& report, const FluxModel& model,
                                 const SuiteTolerances& tol = {});

}  // namespace nfv
