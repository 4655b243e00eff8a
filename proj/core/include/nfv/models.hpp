#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nfv/flux.hpp"
#include "nfv/grid.hpp"
#include "nfv/nonlocal.hpp"
#include "nfv/scheme.hpp"

namespace nfv {

/// Smoothed bump A cos³(π|x|²/(2ℓ²)) on the open ball |x| < ℓ.
double bump_kernel(double ell, double amplitude, Point2 x);
/// Analytic gradient of bump_kernel; zero outside the ball.
Vec2 bump_kernel_gradient(double ell, double amplitude, Point2 x);

/// Transport of ρ along the 90°-rotated, normalised gradient of the smoothed
/// density: ∂t ρ + div(ρ ν(∇(η̃ * ρ))) = 0 with ν(R) = (-R2, R1)/√(1+|R|²).
struct EncryptionModel {
  double ell = 2.0;
  double amplitude = 1.0;

  double kernel(Point2 x) const { return bump_kernel(ell, amplitude, x); }
  Vec2 kernel_gradient(Point2 x) const { return bump_kernel_gradient(ell, amplitude, x); }

  /// Two channels (∂1 η̃, ∂2 η̃), one species.
  KernelSet kernels() const;

  static Vec2 velocity(std::span<const double> r);

  /// g(ρ) = ρ on [0, ∞). `multiplicative = false` hides the split so the
  /// model behaves like a general flux (only the ACG Lax-Friedrichs flux
  /// accepts it).
  FluxModel flux_model(StatePolicy policy = StatePolicy::extend,
                       bool multiplicative = true) const;
};

Profile constant_profile(double value);
/// 1 + (4 sin²x1 + 3 sin²x2) on |x| <= 3, 1 elsewhere.
Profile nonsmooth_profile();
/// sin(πx1 + π/3) sin(πx2 + π/3).
Profile smooth_profile();

struct Preset {
  std::string name;
  EncryptionModel model;
  Profile profile;
  double lo = 0.0;  // square domain [lo, hi]²
  double hi = 1.0;
  double horizon = 0.0;
};

/// `encdec-nonsmooth` or `encdec-smooth`. Throws ConfigError otherwise.
Preset preset(std::string_view name);
std::vector<std::string> preset_names();

/// Model, sampled kernels and flux for one grid; reused by the forward and
/// reversed runs.
class EncryptionProblem {
 public:
  EncryptionProblem(EncryptionModel model, const Grid2D& grid,
                    ConvolutionMethod method = ConvolutionMethod::automatic,
                    StatePolicy policy = StatePolicy::extend, bool multiplicative = true);

  const EncryptionModel& model() const { return model_; }
  const FluxModel& flux() const { return flux_; }
  const Convolver& convolver() const { return convolver_; }

  /// Forward run for time T.
  RunResult encrypt(const Field& initial, SchemeConfig config, double T,
                    const RunOptions& options = {}) const;
  /// Reversed run for time T starting from an encrypted field.
  RunResult decrypt(const Field& encrypted, SchemeConfig config, double T,
                    const RunOptions& options = {}) const;

 private:
  EncryptionModel model_;
  FluxModel flux_;
  Convolver convolver_;
};

Field encrypt(const Profile& profile, const Grid2D& grid, const EncryptionModel& model,
              SchemeConfig config, double T);
Field decrypt(const Field& encrypted, const EncryptionModel& model, SchemeConfig config,
              double T);

/// dx1 dx2 Σ |decrypted - initial| per species.
std::vector<double> reconstruction_error(const Field& decrypted, const Field& initial);

}  // namespace nfv
