#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "nfv/flux.hpp"
#include "nfv/grid.hpp"
#include "nfv/nonlocal.hpp"

namespace nfv {

enum class TimeDirection { forward, reversed };

/// Lipschitz constants of the numerical fluxes in their two state arguments.
struct LipschitzConstants {
  double l11 = 1.0;  // F1, first argument
  double l12 = 1.0;  // F1, second argument
  double l21 = 1.0;  // F2, first argument
  double l22 = 1.0;  // F2, second argument
};

struct SchemeConfig {
  NumericalFluxChoice flux;
  /// fraction of the CFL bound, in (0, 1] for a stable run
  double cfl_factor = 1.0;
  LipschitzConstants lipschitz;
  double t_end = 0.0;
  TimeDirection direction = TimeDirection::forward;
  ConvolutionMethod convolution = ConvolutionMethod::automatic;

  /// dt/dx1 and dt/dx2 caps scaled by cfl_factor.
  double lambda1_cap() const;
  double lambda2_cap() const;
  double orientation() const { return direction == TimeDirection::reversed ? -1.0 : 1.0; }

  /// Throws ConfigError on nonpositive cfl_factor, Lipschitz constants or negative t_end.
  void validate() const;
};

/// Nominal time step: cfl_factor * min(dx1 / (2(L11+L12)), dx2 / (2(L21+L22))).
double compute_dt(const SchemeConfig& config, const Grid2D& grid);

struct StepRecord {
  std::size_t n = 0;  // index of the step that produced this state
  double t = 0.0;     // elapsed time after the step
  double dt = 0.0;
  std::vector<double> mass;  // signed dx1 dx2 Σ ρ
  std::vector<double> l1;
  std::vector<double> min;
  std::vector<double> max;
  std::vector<double> tv;
};

/// Numerical fluxes at every interface for one species, evaluated from a
/// single convolution snapshot. Indices follow InterfaceConvolutions.
struct InterfaceFluxField {
  std::size_t x_cols = 0;
  std::size_t y_rows = 0;
  std::vector<double> fx;  // row-major (j, column)
  std::vector<double> fy;  // row-major (row, i)
};

/// F1 / F2 at every interface of species k for state `field` at time t.
InterfaceFluxField interface_fluxes(const Field& field, std::size_t k,
                                    const InterfaceConvolutions& r, const SchemeConfig& config,
                                    const FluxModel& model);

/// One explicit update of every species with step dt. Throws StepFailure on
/// a non-finite cell.
Field step(const Field& field, double dt, const SchemeConfig& config, const FluxModel& model,
           const Convolver& convolver);

/// Called after every `every` accepted steps (and the last one).
using StepObserver =
    std::function<void(const Field& before, const Field& after, const StepRecord& record)>;

struct RunOptions {
  StepObserver observer;
  /// 0 selects every step for grids up to 200 cells per axis, else every 10th
  std::size_t observe_every = 0;
  /// optional JSONL step log
  std::ostream* step_log = nullptr;
};

struct RunResult {
  Field final;
  std::vector<StepRecord> records;
};

/// March from the field's time to config.t_end (relative horizon: the run
/// integrates for t_end time units). The last step is shortened to land on
/// the horizon exactly.
RunResult run(const Field& initial, const SchemeConfig& config, const FluxModel& model,
              const Convolver& convolver, const RunOptions& options = {});

/// Convenience overload that samples the kernels on the field's grid.
RunResult run(const Field& initial, const SchemeConfig& config, const FluxModel& model,
              const KernelSet& kernels, const RunOptions& options = {});

StepRecord make_record(const Field& field, std::size_t n, double dt);

}  // namespace nfv
