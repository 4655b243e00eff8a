#include "nfv/flux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nfv/error.hpp"

namespace nfv {

// ------------------------------------------------------ AdmissibleInterval

AdmissibleInterval::AdmissibleInterval(double lower, std::optional<double> upper)
    : rho_m(lower), rho_M(upper) {
  if (!(lower >= 0.0) || !std::isfinite(lower)) {
    throw InputError("admissible interval lower end must be finite and >= 0");
  }
  if (upper && !(*upper > lower)) {
    throw InputError("admissible interval upper end must exceed the lower end");
  }
}

bool AdmissibleInterval::contains(double rho, double tol) const {
  if (rho < rho_m - tol) {
    return false;
  }
  return !rho_M || rho <= *rho_M + tol;
}

double AdmissibleInterval::clamp(double rho) const {
  if (rho < rho_m) {
    return rho_m;
  }
  if (rho_M && rho > *rho_M) {
    return *rho_M;
  }
  return rho;
}

double AdmissibleInterval::sampling_upper(double span) const {
  return rho_M ? *rho_M : rho_m + span;
}

// --------------------------------------------------------------- FluxModel

FluxModel::FluxModel(std::size_t species, std::size_t channels, Evaluate evaluate,
                     std::vector<AdmissibleInterval> admissible, Vec2 lipschitz_rho,
                     StatePolicy policy)
    : species_(species),
      channels_(channels),
      evaluate_(std::move(evaluate)),
      admissible_(std::move(admissible)),
      lipschitz_rho_(lipschitz_rho),
      policy_(policy),
      clamps_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (species_ == 0) {
    throw InputError("flux model needs at least one species");
  }
  if (!evaluate_) {
    throw InputError("flux model needs an evaluation rule");
  }
  if (admissible_.size() == 1 && species_ > 1) {
    admissible_.resize(species_, admissible_.front());
  }
  if (admissible_.size() != species_) {
    throw InputError("one admissible interval per species required");
  }
}

FluxModel FluxModel::multiplicative(std::size_t species, std::size_t channels,
                                    MultiplicativeFluxModel split,
                                    std::vector<AdmissibleInterval> admissible,
                                    Vec2 lipschitz_rho, StatePolicy policy) {
  if (!split.g || !split.nu) {
    throw InputError("multiplicative flux needs both g and nu");
  }
  auto g = split.g;
  auto nu = split.nu;
  FluxModel model(
      species, channels,
      [g, nu](double t, Point2 x, std::size_t k, double rho, std::span<const double> r) {
        const double gv = g(k, rho);
        const Vec2 v = nu(k, t, x, r);
        return Vec2{gv * v[0], gv * v[1]};
      },
      std::move(admissible), lipschitz_rho, policy);
  model.split_ = std::move(split);
  return model;
}

Vec2 FluxModel::evaluate(double t, Point2 x, std::size_t k, double rho,
                         std::span<const double> r) const {
  const Vec2 f = evaluate_(t, x, k, rho, r);
  if (!std::isfinite(f[0]) || !std::isfinite(f[1])) {
    std::ostringstream msg;
    msg << "flux of species " << k << " is not finite at rho = " << rho << ", x = (" << x.x1
        << ", " << x.x2 << ")";
    throw ModelError(msg.str());
  }
  return f;
}

double FluxModel::admit(std::size_t k, double rho) const {
  if (policy_ == StatePolicy::extend) {
    return rho;
  }
  const double c = admissible_[k].clamp(rho);
  if (c != rho) {
    clamps_->fetch_add(1, std::memory_order_relaxed);
  }
  return c;
}

double reduced_flux(const FluxModel& model, const Interface& at, double rho) {
  const double r = model.admit(at.species, rho);
  const Vec2 f = model.evaluate(at.t, at.x, at.species, r, at.r);
  return at.orientation * f[static_cast<std::size_t>(at.axis)];
}

// ------------------------------------------------------------ FluxVariant

std::string_view to_string(FluxVariant v) {
  switch (v) {
    case FluxVariant::lax_friedrichs_acg:
      return "lxf";
    case FluxVariant::lax_friedrichs_split:
      return "lxf-split";
    case FluxVariant::godunov:
      return "godunov";
    case FluxVariant::upwind:
      return "upwind";
  }
  return "unknown";
}

FluxVariant parse_flux_variant(std::string_view name) {
  if (name == "lxf") return FluxVariant::lax_friedrichs_acg;
  if (name == "lxf-split") return FluxVariant::lax_friedrichs_split;
  if (name == "godunov") return FluxVariant::godunov;
  if (name == "upwind") return FluxVariant::upwind;
  throw ConfigError("unknown flux variant '" + std::string(name) +
                    "' (expected lxf, lxf-split, godunov or upwind)");
}

void validate(const NumericalFluxChoice& choice, const FluxModel& model) {
  if (!(choice.alpha >= 0.0) || !std::isfinite(choice.alpha)) {
    throw ConfigError("alpha must be finite and non-negative");
  }
  if (choice.variant != FluxVariant::lax_friedrichs_acg && !model.is_multiplicative()) {
    throw ConfigError(std::string("flux '") + std::string(to_string(choice.variant)) +
                      "' needs a multiplicative flux model g(rho) nu(t, x, R)");
  }
}

// ----------------------------------------------------------- InterfaceFlux

InterfaceFlux::InterfaceFlux(const NumericalFluxChoice& choice, const FluxModel& model,
                             const Interface& at)
    : choice_(&choice), model_(&model), at_(at) {
  if (const auto* split = model.split()) {
    const Vec2 v = split->nu(at.species, at.t, at.x, at.r);
    v_ = at.orientation * v[static_cast<std::size_t>(at.axis)];
    if (!std::isfinite(v_)) {
      throw ModelError("velocity is not finite at an interface");
    }
  } else if (choice.variant != FluxVariant::lax_friedrichs_acg) {
    validate(choice, model);
  }
}

double InterfaceFlux::g(double rho) const {
  const double v = model_->split()->g(at_.species, model_->admit(at_.species, rho));
  if (!std::isfinite(v)) {
    throw ModelError("g is not finite");
  }
  return v;
}

double InterfaceFlux::reduced(double rho) const {
  if (model_->split() != nullptr) {
    return g(rho) * v_;
  }
  return reduced_flux(*model_, at_, rho);
}

double InterfaceFlux::operator()(double a, double b) const {
  switch (choice_->variant) {
    case FluxVariant::lax_friedrichs_acg: {
      const double ca = model_->policy() == StatePolicy::clamp
                            ? model_->admissible(at_.species).clamp(a)
                            : a;
      const double cb = model_->policy() == StatePolicy::clamp
                            ? model_->admissible(at_.species).clamp(b)
                            : b;
      return 0.5 * (reduced(a) + reduced(b)) - 0.5 * choice_->alpha * (cb - ca);
    }
    case FluxVariant::lax_friedrichs_split: {
      if (v_ == 0.0) {
        return 0.0;
      }
      const double s = v_ > 0.0 ? 1.0 : -1.0;
      const double ca = model_->admit(at_.species, a);
      const double cb = model_->admit(at_.species, b);
      // flux-splitting form: G⁺(a) + G⁻(b)
      const double up = 0.5 * (s * g(ca) + choice_->alpha * ca);
      const double down = 0.5 * (s * g(cb) - choice_->alpha * cb);
      return (up + down) * std::abs(v_);
    }
    case FluxVariant::godunov: {
      if (v_ == 0.0) {
        return 0.0;
      }
      const double s = v_ > 0.0 ? 1.0 : -1.0;
      const auto* split = model_->split();
      const std::size_t k = at_.species;
      const double star = godunov_riemann_state(
          [split, k](double rho) { return split->g(k, rho); }, s, model_->admit(k, a),
          model_->admit(k, b), split->g_shape);
      return g(star) * v_;
    }
    case FluxVariant::upwind:
      return v_ >= 0.0 ? g(a) * v_ : g(b) * v_;
  }
  return 0.0;
}

double numerical_flux(const NumericalFluxChoice& choice, const FluxModel& model,
                      const Interface& at, double a, double b) {
  return InterfaceFlux(choice, model, at)(a, b);
}

// ----------------------------------------------------------- Godunov state

double godunov_riemann_state(const std::function<double(double)>& g, double sign, double a,
                             double b, GShape shape) {
  if (a == b) {
    return a;
  }
  if (shape != GShape::unknown) {
    const bool h_increasing = (shape == GShape::increasing) == (sign > 0.0);
    // increasing h: min over [a,b] and max over [b,a] both sit at a
    return h_increasing ? a : b;
  }

  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  // minimise phi: h on [a, b] when a < b, -h on [b, a] otherwise
  const double dir = a < b ? 1.0 : -1.0;
  auto phi = [&](double rho) { return dir * sign * g(rho); };

  // endpoints first so that ties resolve to them
  double best_x = a < b ? a : b;
  double best_v = phi(best_x);
  {
    const double other = a < b ? b : a;
    const double v = phi(other);
    if (v < best_v) {
      best_x = other;
      best_v = v;
    }
  }

  // lattice including the endpoints, then golden-section on the bracket
  // around the best lattice point (an extremum next to an endpoint is
  // otherwise missed)
  constexpr int scan = 64;
  const double step = (hi - lo) / scan;
  auto node = [&](int i) { return i == scan ? hi : lo + step * i; };
  int best_i = 0;
  double scan_v = phi(lo);
  for (int i = 1; i <= scan; ++i) {
    const double v = phi(node(i));
    if (v < scan_v) {
      scan_v = v;
      best_i = i;
    }
  }
  double l = node(std::max(best_i - 1, 0));
  double r = node(std::min(best_i + 1, scan));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = r - inv_phi * (r - l);
  double d = l + inv_phi * (r - l);
  double fc = phi(c);
  double fd = phi(d);
  for (int it = 0; it < 100 && (r - l) > 1e-15 * (1.0 + std::abs(l)); ++it) {
    if (fc < fd) {
      r = d;
      d = c;
      fd = fc;
      c = r - inv_phi * (r - l);
      fc = phi(c);
    } else {
      l = c;
      c = d;
      fc = fd;
      d = l + inv_phi * (r - l);
      fd = phi(d);
    }
  }
  for (double x : {0.5 * (l + r), node(best_i)}) {
    const double v = phi(x);
    if (v < best_v) {
      best_x = x;
      best_v = v;
    }
  }
  return best_x;
}

// ------------------------------------------------------------------ alpha

double estimate_alpha(FluxVariant variant, const FluxModel& model,
                      std::span<const std::vector<double>> r_samples, double state_span) {
  constexpr int lattice = 1024;
  double worst = 0.0;
  for (std::size_t k = 0; k < model.species(); ++k) {
    const auto& interval = model.admissible(k);
    const double lo = interval.rho_m;
    const double hi = interval.sampling_upper(state_span);
    const double h = (hi - lo) / (lattice - 1);
    if (variant == FluxVariant::lax_friedrichs_split && model.is_multiplicative()) {
      const auto& g = model.split()->g;
      double prev = g(k, lo);
      for (int i = 1; i < lattice; ++i) {
        const double cur = g(k, lo + h * i);
        worst = std::max(worst, std::abs(cur - prev) / h);
        prev = cur;
      }
      continue;
    }
    for (const auto& r : r_samples) {
      for (std::size_t axis = 0; axis < 2; ++axis) {
        double prev = model.evaluate(0.0, {}, k, lo, r)[axis];
        for (int i = 1; i < lattice; ++i) {
          const double cur = model.evaluate(0.0, {}, k, lo + h * i, r)[axis];
          worst = std::max(worst, std::abs(cur - prev) / h);
          prev = cur;
        }
      }
    }
  }
  return 1.05 * worst;
}

// ------------------------------------------------------------------ audit

bool AuditReport::passed(double consistency_tol) const {
  return consistency_max <= consistency_tol && monotonicity_violations == 0 &&
         double_difference_violations == 0;
}

AuditReport flux_contract_audit(const NumericalFluxChoice& choice, const FluxModel& model,
                                const AuditOptions& options) {
  validate(choice, model);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const bool split_class = choice.variant != FluxVariant::lax_friedrichs_acg;
  AuditReport report;
  report.samples = options.samples;
  double lg = 0.0;
  if (split_class) {
    const double gp = model.split()->g_prime_bound;
    lg = choice.variant == FluxVariant::lax_friedrichs_split ? 0.5 * (gp + choice.alpha) : gp;
    report.double_difference_max = 0.0;
    report.double_difference_bound = 10.0 * lg;
  }

  std::vector<double> r(model.channels());
  std::vector<double> r2(model.channels());
  for (std::size_t n = 0; n < options.samples; ++n) {
    Interface at;
    at.species = static_cast<std::size_t>(unit(rng) * static_cast<double>(model.species())) %
                 model.species();
    at.axis = unit(rng) < 0.5 ? Axis::x1 : Axis::x2;
    at.t = uniform(0.0, options.t_max);
    at.x = {uniform(options.x_lo.x1, options.x_hi.x1), uniform(options.x_lo.x2, options.x_hi.x2)};
    for (auto& v : r) v = uniform(-options.r_scale, options.r_scale);
    for (auto& v : r2) v = uniform(-options.r_scale, options.r_scale);
    at.r = r;

    const auto& interval = model.admissible(at.species);
    const double lo = interval.rho_m;
    const double hi = interval.sampling_upper(options.state_span);
    const InterfaceFlux flux(choice, model, at);

    // consistency
    const double rho = uniform(lo, hi);
    const double exact = flux.reduced(rho);
    const double diff = std::abs(flux(rho, rho) - exact);
    double scale = std::abs(exact);
    if (choice.variant == FluxVariant::lax_friedrichs_split) {
      scale = std::max(scale, choice.alpha * std::abs(rho) * std::abs(flux.velocity()));
    }
    if (diff > 0.0) {
      report.consistency_max =
          std::max(report.consistency_max, diff / std::max(scale, std::numeric_limits<double>::min()));
    }

    // monotonicity on ordered pairs and by forward differences
    double a1 = uniform(lo, hi);
    double a2 = uniform(lo, hi);
    if (a1 > a2) std::swap(a1, a2);
    const double b = uniform(lo, hi);
    const double fa1 = flux(a1, b);
    const double fa2 = flux(a2, b);
    double b1 = uniform(lo, hi);
    double b2 = uniform(lo, hi);
    if (b1 > b2) std::swap(b1, b2);
    const double a = uniform(lo, hi);
    const double fb1 = flux(a, b1);
    const double fb2 = flux(a, b2);
    const double tol =
        1e-12 * (1.0 + std::max({std::abs(fa1), std::abs(fa2), std::abs(fb1), std::abs(fb2)}));
    if (fa1 > fa2 + tol) ++report.monotonicity_violations;
    if (fb1 < fb2 - tol) ++report.monotonicity_violations;

    const double h = 1e-6 * (hi - lo);
    const double base = flux(a, b);
    if (a + h <= hi && flux(a + h, b) - base < -tol) ++report.monotonicity_violations;
    if (b + h <= hi && flux(a, b + h) - base > tol) ++report.monotonicity_violations;

    if (a2 > a1) report.lipschitz_first = std::max(report.lipschitz_first, std::abs(fa2 - fa1) / (a2 - a1));
    if (b2 > b1) report.lipschitz_second = std::max(report.lipschitz_second, std::abs(fb2 - fb1) / (b2 - b1));

    // |F(a,c,V) - F(b,c,V) - F(a,c,W) + F(b,c,W)| / (|a-b| |V-W|)
    if (split_class) {
      Interface other = at;
      other.r = r2;
      const InterfaceFlux flux_w(choice, model, other);
      const double dv = std::abs(flux.velocity() - flux_w.velocity());
      const double c = uniform(lo, hi);
      const double da = std::abs(a1 - a2);
      if (dv > 1e-12 && da > 1e-12) {
        const double q1 =
            std::abs(flux(a1, c) - flux(a2, c) - flux_w(a1, c) + flux_w(a2, c)) / (da * dv);
        const double q2 =
            std::abs(flux(c, a1) - flux(c, a2) - flux_w(c, a1) + flux_w(c, a2)) / (da * dv);
        const double q = std::max(q1, q2);
        report.double_difference_max = std::max(*report.double_difference_max, q);
        if (q > *report.double_difference_bound) ++report.double_difference_violations;
      }
    }
  }
  return report;
}

}  // namespace nfv
