#include "nfv/models.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "nfv/diagnostics.hpp"
#include "nfv/error.hpp"

namespace nfv {

namespace {

double phase(double ell, Point2 x) {
  return std::numbers::pi * (x.x1 * x.x1 + x.x2 * x.x2) / (2.0 * ell * ell);
}

bool inside(double ell, Point2 x) { return x.x1 * x.x1 + x.x2 * x.x2 < ell * ell; }

}  // namespace

double bump_kernel(double ell, double amplitude, Point2 x) {
  if (!inside(ell, x)) {
    return 0.0;
  }
  const double c = std::cos(phase(ell, x));
  return amplitude * c * c * c;
}

Vec2 bump_kernel_gradient(double ell, double amplitude, Point2 x) {
  if (!inside(ell, x)) {
    return {0.0, 0.0};
  }
  const double u = phase(ell, x);
  const double c = std::cos(u);
  const double s = amplitude * 3.0 * c * c * (-std::sin(u)) * std::numbers::pi / (ell * ell);
  return {s * x.x1, s * x.x2};
}

KernelSet EncryptionModel::kernels() const {
  if (!(ell > 0.0) || !std::isfinite(ell) || !std::isfinite(amplitude)) {
    throw ConfigError("kernel scale must be positive and amplitude finite");
  }
  KernelSet set(2, 1);
  const double l = ell;
  const double a = amplitude;
  set.set(0, 0, [l, a](Point2 x) { return bump_kernel_gradient(l, a, x)[0]; }, ell);
  set.set(1, 0, [l, a](Point2 x) { return bump_kernel_gradient(l, a, x)[1]; }, ell);
  return set;
}

Vec2 EncryptionModel::velocity(std::span<const double> r) {
  const double scale = 1.0 / std::sqrt(1.0 + r[0] * r[0] + r[1] * r[1]);
  return {-r[1] * scale, r[0] * scale};
}

FluxModel EncryptionModel::flux_model(StatePolicy policy, bool multiplicative) const {
  const std::vector<AdmissibleInterval> interval{AdmissibleInterval(0.0)};
  const Vec2 lipschitz{1.0, 1.0};
  if (!multiplicative) {
    return FluxModel(
        1, 2,
        [](double, Point2, std::size_t, double rho, std::span<const double> r) {
          const Vec2 v = velocity(r);
          return Vec2{rho * v[0], rho * v[1]};
        },
        interval, lipschitz, policy);
  }
  MultiplicativeFluxModel split;
  split.g = [](std::size_t, double rho) { return rho; };
  split.g_prime_bound = 1.0;
  split.nu = [](std::size_t, double, Point2, std::span<const double> r) { return velocity(r); };
  split.g_shape = GShape::increasing;
  return FluxModel::multiplicative(1, 2, std::move(split), interval, lipschitz, policy);
}

Profile constant_profile(double value) {
  return [value](std::size_t, Point2) { return value; };
}

Profile nonsmooth_profile() {
  return [](std::size_t, Point2 x) {
    if (x.x1 * x.x1 + x.x2 * x.x2 > 9.0) {
      return 1.0;
    }
    const double s1 = std::sin(x.x1);
    const double s2 = std::sin(x.x2);
    return 1.0 + 4.0 * s1 * s1 + 3.0 * s2 * s2;
  };
}

Profile smooth_profile() {
  return [](std::size_t, Point2 x) {
    constexpr double pi = std::numbers::pi;
    return std::sin(pi * x.x1 + pi / 3.0) * std::sin(pi * x.x2 + pi / 3.0);
  };
}

Preset preset(std::string_view name) {
  if (name == "encdec-nonsmooth") {
    return {std::string(name), EncryptionModel{2.0, 1.0}, nonsmooth_profile(), -6.0, 6.0, 0.75};
  }
  if (name == "encdec-smooth") {
    return {std::string(name), EncryptionModel{0.8, 5.0}, smooth_profile(), -1.0, 1.0, 0.3};
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"encdec-nonsmooth", "encdec-smooth"}; }

EncryptionProblem::EncryptionProblem(EncryptionModel model, const Grid2D& grid,
                                     ConvolutionMethod method, StatePolicy policy,
                                     bool multiplicative)
    : model_(model),
      flux_(model.flux_model(policy, multiplicative)),
      convolver_(sample_kernels(model.kernels(), grid), method) {}

RunResult EncryptionProblem::encrypt(const Field& initial, SchemeConfig config, double T,
                                     const RunOptions& options) const {
  config.t_end = T;
  config.direction = TimeDirection::forward;
  return run(initial, config, flux_, convolver_, options);
}

RunResult EncryptionProblem::decrypt(const Field& encrypted, SchemeConfig config, double T,
                                     const RunOptions& options) const {
  config.t_end = T;
  config.direction = TimeDirection::reversed;
  return run(encrypted, config, flux_, convolver_, options);
}

Field encrypt(const Profile& profile, const Grid2D& grid, const EncryptionModel& model,
              SchemeConfig config, double T) {
  if (!(T >= 0.0)) {
    throw ConfigError("encryption horizon must be non-negative");
  }
  const EncryptionProblem problem(model, grid, config.convolution);
  return problem.encrypt(project_initial_data(profile, 1, grid), config, T).final;
}

Field decrypt(const Field& encrypted, const EncryptionModel& model, SchemeConfig config,
              double T) {
  if (!(T >= 0.0)) {
    throw ConfigError("decryption horizon must be non-negative");
  }
  const EncryptionProblem problem(model, encrypted.grid(), config.convolution);
  return problem.decrypt(encrypted, config, T).final;
}

std::vector<double> reconstruction_error(const Field& decrypted, const Field& initial) {
  return l1_distance(decrypted, initial);
}

}  // namespace nfv
