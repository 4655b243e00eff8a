#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nfv/grid.hpp"

namespace nfv {

using Vec2 = std::array<double, 2>;

/// The invariant state interval [rho_m, rho_M] (or [rho_m, inf)) on whose
/// endpoints the flux vanishes.
struct AdmissibleInterval {
  double rho_m = 0.0;
  std::optional<double> rho_M;

  AdmissibleInterval() = default;
  explicit AdmissibleInterval(double lower, std::optional<double> upper = std::nullopt);

  bool contains(double rho, double tol = 0.0) const;
  double clamp(double rho) const;
  /// Upper end for sampling; rho_m + span when unbounded.
  double sampling_upper(double span) const;
};

enum class Axis { x1 = 0, x2 = 1 };

/// What happens to a state outside its admissible interval when a flux is
/// evaluated. `clamp` projects and counts; `extend` evaluates the flux
/// formula as is (for fluxes that are valid on all of R, e.g. linear in ρ).
enum class StatePolicy { clamp, extend };

/// Monotonicity of g on the admissible interval, when known.
enum class GShape { unknown, increasing, decreasing };

/// f^k(t, x, ρ, R) = g^k(ρ) ν^k(t, x, R).
struct MultiplicativeFluxModel {
  std::function<double(std::size_t k, double rho)> g;
  /// sup |g'| over the admissible interval
  double g_prime_bound = 1.0;
  std::function<Vec2(std::size_t k, double t, Point2 x, std::span<const double> r)> nu;
  GShape g_shape = GShape::unknown;
};

/// A nonlocal flux f^k(t, x, ρ, R) ∈ R² for K species and M convolution channels.
class FluxModel {
 public:
  using Evaluate =
      std::function<Vec2(double t, Point2 x, std::size_t k, double rho, std::span<const double> r)>;

  FluxModel(std::size_t species, std::size_t channels, Evaluate evaluate,
            std::vector<AdmissibleInterval> admissible, Vec2 lipschitz_rho,
            StatePolicy policy = StatePolicy::clamp);

  /// The flux g(ρ)ν(t, x, R); keeps the split for Godunov/Upwind-type fluxes.
  static FluxModel multiplicative(std::size_t species, std::size_t channels,
                                  MultiplicativeFluxModel split,
                                  std::vector<AdmissibleInterval> admissible, Vec2 lipschitz_rho,
                                  StatePolicy policy = StatePolicy::clamp);

  std::size_t species() const { return species_; }
  std::size_t channels() const { return channels_; }
  const AdmissibleInterval& admissible(std::size_t k) const { return admissible_[k]; }
  Vec2 lipschitz_rho() const { return lipschitz_rho_; }
  StatePolicy policy() const { return policy_; }
  bool is_multiplicative() const { return split_.has_value(); }
  const MultiplicativeFluxModel* split() const { return split_ ? &*split_ : nullptr; }

  /// Raw flux evaluation. Throws ModelError on a non-finite result.
  Vec2 evaluate(double t, Point2 x, std::size_t k, double rho, std::span<const double> r) const;

  /// Apply the state policy; clamps are counted.
  double admit(std::size_t k, double rho) const;
  std::uint64_t clamp_count() const { return clamps_->load(); }
  void reset_clamp_count() const { clamps_->store(0); }

 private:
  std::size_t species_;
  std::size_t channels_;
  Evaluate evaluate_;
  std::vector<AdmissibleInterval> admissible_;
  Vec2 lipschitz_rho_;
  StatePolicy policy_;
  std::optional<MultiplicativeFluxModel> split_;
  std::shared_ptr<std::atomic<std::uint64_t>> clamps_;
};

/// The frozen data at one interface: time, location, convolution snapshot,
/// direction, species and orientation (-1 integrates the reversed flux).
struct Interface {
  double t = 0.0;
  Point2 x;
  std::span<const double> r;
  Axis axis = Axis::x1;
  std::size_t species = 0;
  double orientation = 1.0;
};

/// ρ ↦ f_axis(t, x, ρ, R) at a frozen interface.
double reduced_flux(const FluxModel& model, const Interface& at, double rho);

enum class FluxVariant { lax_friedrichs_acg, lax_friedrichs_split, godunov, upwind };

std::string_view to_string(FluxVariant v);
/// Accepts lxf, lxf-split, godunov, upwind. Throws ConfigError otherwise.
FluxVariant parse_flux_variant(std::string_view name);

struct NumericalFluxChoice {
  FluxVariant variant = FluxVariant::upwind;
  /// numerical viscosity of the Lax-Friedrichs variants
  double alpha = 1.0;
};

/// Throws ConfigError when a Godunov/Upwind/split variant is paired with a
/// flux lacking multiplicative structure, or alpha is negative.
void validate(const NumericalFluxChoice& choice, const FluxModel& model);

/// A numerical flux bound to one interface. Precomputes V = ν_axis for
/// multiplicative variants so that repeated (a, b) evaluations are cheap.
class InterfaceFlux {
 public:
  InterfaceFlux(const NumericalFluxChoice& choice, const FluxModel& model, const Interface& at);

  double reduced(double rho) const;
  double operator()(double a, double b) const;
  /// Oriented velocity V (multiplicative models only, else 0).
  double velocity() const { return v_; }

 private:
  double g(double rho) const;

  const NumericalFluxChoice* choice_;
  const FluxModel* model_;
  Interface at_;
  double v_ = 0.0;
};

double numerical_flux(const NumericalFluxChoice& choice, const FluxModel& model,
                      const Interface& at, double a, double b);

/// State ρ* whose flux g(ρ*)·sign is the Godunov value of the Riemann problem
/// (a, b): the minimum of g·sign over [a, b] if a <= b, else the maximum over
/// [b, a].
double godunov_riemann_state(const std::function<double(double)>& g, double sign, double a,
                             double b, GShape shape = GShape::unknown);

/// sup_ρ |∂_ρ f̃| over a 1024-point lattice of the admissible interval for
/// each sampled convolution vector, times 1.05. For the split variant the
/// bound is on g' instead.
double estimate_alpha(FluxVariant variant, const FluxModel& model,
                      std::span<const std::vector<double>> r_samples, double state_span = 10.0);

struct AuditOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 20250101;
  /// width of the state window when the interval is unbounded above
  double state_span = 10.0;
  /// convolution values are drawn from [-r_scale, r_scale]^M
  double r_scale = 5.0;
  Point2 x_lo{-1.0, -1.0};
  Point2 x_hi{1.0, 1.0};
  double t_max = 1.0;
};

struct AuditReport {
  std::size_t samples = 0;
  double consistency_max = 0.0;  // relative
  std::size_t monotonicity_violations = 0;
  double lipschitz_first = 0.0;
  double lipschitz_second = 0.0;
  std::optional<double> double_difference_max;    // multiplicative variants only
  std::optional<double> double_difference_bound;  // 10x the analytic estimate
  std::size_t double_difference_violations = 0;

  bool passed(double consistency_tol = 1e-14) const;
};

/// Randomized check of the monotone-flux contract (consistency,
/// monotonicity, Lipschitz quotients, double-difference quotient).
AuditReport flux_contract_audit(const NumericalFluxChoice& choice, const FluxModel& model,
                                const AuditOptions& options = {});

}  // namespace nfv
