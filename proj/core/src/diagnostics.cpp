#include "nfv/diagnostics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "nfv/error.hpp"
#include "nfv/parallel.hpp"

namespace nfv {

namespace {

using Index = std::ptrdiff_t;

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_same_shape(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid()) || a.species() != b.species()) {
    throw InputError("fields differ in grid or species count");
  }
}

}  // namespace

std::vector<double> discrete_l1(const Field& field) {
  std::vector<double> out(field.species(), 0.0);
  for (std::size_t k = 0; k < field.species(); ++k) {
    double s = 0.0;
    for (double v : field.species_values(k)) {
      s += std::abs(v);
    }
    out[k] = field.grid().cell_area() * s;
  }
  return out;
}

std::vector<double> discrete_mass(const Field& field) {
  std::vector<double> out(field.species(), 0.0);
  for (std::size_t k = 0; k < field.species(); ++k) {
    double s = 0.0;
    for (double v : field.species_values(k)) {
      s += v;
    }
    out[k] = field.grid().cell_area() * s;
  }
  return out;
}

std::vector<double> total_variation(const Field& field) {
  const Grid2D& g = field.grid();
  const auto n1 = static_cast<Index>(g.n1());
  const auto n2 = static_cast<Index>(g.n2());
  const Index lo = g.periodic() ? 0 : -1;
  std::vector<double> out(field.species(), 0.0);
  for (std::size_t k = 0; k < field.species(); ++k) {
    double sx = 0.0;
    for (Index j = 0; j < n2; ++j) {
      for (Index i = lo; i < n1; ++i) {
        sx += std::abs(field.at(k, i + 1, j) - field.at(k, i, j));
      }
    }
    double sy = 0.0;
    for (Index j = lo; j < n2; ++j) {
      for (Index i = 0; i < n1; ++i) {
        sy += std::abs(field.at(k, i, j + 1) - field.at(k, i, j));
      }
    }
    out[k] = sx * g.dx2() + sy * g.dx1();
  }
  return out;
}

std::vector<double> sup_norm(const Field& field) {
  std::vector<double> out(field.species(), 0.0);
  for (std::size_t k = 0; k < field.species(); ++k) {
    for (double v : field.species_values(k)) {
      out[k] = std::max(out[k], std::abs(v));
    }
  }
  return out;
}

std::vector<double> l1_distance(const Field& a, const Field& b) {
  require_same_shape(a, b);
  std::vector<double> out(a.species(), 0.0);
  for (std::size_t k = 0; k < a.species(); ++k) {
    const auto va = a.species_values(k);
    const auto vb = b.species_values(k);
    double s = 0.0;
    for (std::size_t n = 0; n < va.size(); ++n) {
      s += std::abs(va[n] - vb[n]);
    }
    out[k] = a.grid().cell_area() * s;
  }
  return out;
}

FieldStats field_stats(const Field& field) {
  FieldStats s;
  s.mass = discrete_mass(field);
  s.l1 = discrete_l1(field);
  s.linf = sup_norm(field);
  s.tv = total_variation(field);
  s.min.resize(field.species());
  s.max.resize(field.species());
  for (std::size_t k = 0; k < field.species(); ++k) {
    const auto v = field.species_values(k);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    s.min[k] = *lo;
    s.max[k] = *hi;
  }
  return s;
}

std::vector<double> kappa_lattice(const Field& field, const FluxModel& model, std::size_t count,
                                  double margin) {
  if (count < 2) {
    throw InputError("kappa lattice needs at least two points");
  }
  const auto values = field.values();
  if (values.empty()) {
    throw InputError("empty field");
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double width = hi > lo ? hi - lo : std::max(1.0, std::abs(lo));
  const double a = lo - margin * width;
  const double b = hi + margin * width;

  double clip_lo = -std::numeric_limits<double>::infinity();
  double clip_hi = std::numeric_limits<double>::infinity();
  if (model.policy() == StatePolicy::clamp) {
    clip_lo = std::numeric_limits<double>::infinity();
    clip_hi = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < model.species(); ++k) {
      const AdmissibleInterval& I = model.admissible(k);
      clip_lo = std::min(clip_lo, I.rho_m);
      clip_hi = std::max(clip_hi, I.rho_M.value_or(std::numeric_limits<double>::infinity()));
    }
  }
  std::vector<double> out(count);
  for (std::size_t n = 0; n < count; ++n) {
    const double kappa = a + (b - a) * static_cast<double>(n) / static_cast<double>(count - 1);
    out[n] = std::clamp(kappa, clip_lo, clip_hi);
  }
  return out;
}

namespace {

// The frozen interface fluxes of one step, shared by all κ.
class EntropyEvaluator {
 public:
  EntropyEvaluator(const Field& before, const Field& after, double dt, const SchemeConfig& config,
                   const FluxModel& model, const Convolver& convolver)
      : before_(before),
        after_(after),
        config_(config),
        model_(model),
        r_(convolver(before)),
        lambda1_(dt / before.grid().dx1()),
        lambda2_(dt / before.grid().dx2()) {
    require_same_shape(before, after);
    if (!(convolver.grid() == before.grid())) {
      throw InputError("convolver grid does not match the fields");
    }
    if (!(dt > 0.0)) {
      throw InputError("step length must be positive");
    }
    const double expected = before.time() + config.orientation() * dt;
    const double scale = std::max({1.0, std::abs(before.time()), dt});
    if (std::abs(after.time() - expected) > 1e-9 * scale) {
      throw InputError("fields are not one step apart");
    }
  }

  std::size_t x_cols() const { return r_.x_face_columns(); }
  std::size_t y_rows() const { return r_.y_face_rows(); }

  void bind(std::size_t k) {
    const Grid2D& g = before_.grid();
    const auto n1 = static_cast<Index>(g.n1());
    const auto n2 = static_cast<Index>(g.n2());
    const Index lo = g.periodic() ? 0 : -1;
    const double t = before_.time();
    const double orientation = config_.orientation();
    k_ = k;
    xf_.clear();
    yf_.clear();
    fx_.clear();
    fy_.clear();
    xf_.reserve(x_cols() * g.n2());
    yf_.reserve(g.n1() * y_rows());
    for (Index j = 0; j < n2; ++j) {
      for (Index i = lo; i < n1; ++i) {
        const Interface at{t, g.x_interface(i, j), r_.rx(i, j), Axis::x1, k, orientation};
        xf_.emplace_back(config_.flux, model_, at);
        fx_.push_back(xf_.back()(before_.at(k, i, j), before_.at(k, i + 1, j)));
      }
    }
    for (Index j = lo; j < n2; ++j) {
      for (Index i = 0; i < n1; ++i) {
        const Interface at{t, g.y_interface(i, j), r_.ry(i, j), Axis::x2, k, orientation};
        yf_.emplace_back(config_.flux, model_, at);
        fy_.push_back(yf_.back()(before_.at(k, i, j), before_.at(k, i, j + 1)));
      }
    }
  }

  // Residual of every cell of the bound species at κ, row-major.
  void cells(double kappa, std::vector<double>& out) {
    const Grid2D& g = before_.grid();
    const auto n1 = static_cast<Index>(g.n1());
    const auto n2 = static_cast<Index>(g.n2());
    const Index lo = g.periodic() ? 0 : -1;
    const std::size_t xc = x_cols();
    gx_.resize(xf_.size());
    kx_.resize(xf_.size());
    gy_.resize(yf_.size());
    ky_.resize(yf_.size());

    parallel_for(0, n2, [&](Index j) {
      for (Index i = lo; i < n1; ++i) {
        const std::size_t c = static_cast<std::size_t>(j) * xc + static_cast<std::size_t>(i - lo);
        gx_[c] = entropy_flux(xf_[c], fx_[c], before_.at(k_, i, j), before_.at(k_, i + 1, j),
                              kappa);
        kx_[c] = xf_[c].reduced(kappa);
      }
    });
    parallel_for(lo, n2, [&](Index j) {
      for (Index i = 0; i < n1; ++i) {
        const std::size_t c =
            static_cast<std::size_t>(j - lo) * g.n1() + static_cast<std::size_t>(i);
        gy_[c] = entropy_flux(yf_[c], fy_[c], before_.at(k_, i, j), before_.at(k_, i, j + 1),
                              kappa);
        ky_[c] = yf_[c].reduced(kappa);
      }
    });

    out.assign(g.cell_count(), 0.0);
    const bool periodic = g.periodic();
    auto xcol = [&](Index i) {
      return periodic ? wrap_index(i, g.n1()) : static_cast<std::size_t>(i + 1);
    };
    auto yrow = [&](Index j) {
      return periodic ? wrap_index(j, g.n2()) : static_cast<std::size_t>(j + 1);
    };
    parallel_for(0, n2, [&](Index j) {
      const auto ju = static_cast<std::size_t>(j);
      for (Index i = 0; i < n1; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        const std::size_t e = ju * xc + xcol(i);
        const std::size_t w = ju * xc + xcol(i - 1);
        const std::size_t nn = yrow(j) * g.n1() + iu;
        const std::size_t s = yrow(j - 1) * g.n1() + iu;
        const double next = after_(k_, iu, ju);
        const double prev = before_(k_, iu, ju);
        const double source = lambda1_ * (kx_[e] - kx_[w]) + lambda2_ * (ky_[nn] - ky_[s]);
        out[ju * g.n1() + iu] = std::abs(next - kappa) - std::abs(prev - kappa) +
                                lambda1_ * (gx_[e] - gx_[w]) + lambda2_ * (gy_[nn] - gy_[s]) +
                                sgn(next - kappa) * source;
      }
    });
  }

 private:
  // F(u ∨ κ, w ∨ κ) - F(u ∧ κ, w ∧ κ) with ∨ = max, ∧ = min, reusing F(u, w).
  static double entropy_flux(const InterfaceFlux& f, double fuw, double u, double w,
                             double kappa) {
    if (u >= kappa && w >= kappa) {
      return fuw - f(kappa, kappa);
    }
    if (u <= kappa && w <= kappa) {
      return f(kappa, kappa) - fuw;
    }
    return f(std::max(u, kappa), std::max(w, kappa)) - f(std::min(u, kappa), std::min(w, kappa));
  }

  const Field& before_;
  const Field& after_;
  const SchemeConfig& config_;
  const FluxModel& model_;
  InterfaceConvolutions r_;
  double lambda1_;
  double lambda2_;
  std::size_t k_ = 0;
  std::vector<InterfaceFlux> xf_;
  std::vector<InterfaceFlux> yf_;
  std::vector<double> fx_, fy_, gx_, gy_, kx_, ky_;
};

}  // namespace

EntropyResidual entropy_residual(const Field& before, const Field& after, double dt,
                                 const SchemeConfig& config, const FluxModel& model,
                                 const Convolver& convolver, std::span<const double> kappas) {
  EntropyEvaluator eval(before, after, dt, config, model, convolver);
  EntropyResidual worst;
  worst.max = -std::numeric_limits<double>::infinity();
  std::vector<double> cells;
  const std::size_t n1 = before.grid().n1();
  for (std::size_t k = 0; k < before.species(); ++k) {
    eval.bind(k);
    for (double kappa : kappas) {
      eval.cells(kappa, cells);
      const auto it = std::max_element(cells.begin(), cells.end());
      if (it != cells.end() && *it > worst.max) {
        const auto c = static_cast<std::size_t>(it - cells.begin());
        worst = {*it, k, c % n1, c / n1, kappa};
      }
    }
  }
  return worst;
}

std::vector<double> entropy_residual_cells(const Field& before, const Field& after, double dt,
                                           const SchemeConfig& config, const FluxModel& model,
                                           const Convolver& convolver, std::size_t k,
                                           double kappa) {
  if (k >= before.species()) {
    throw InputError("species index out of range");
  }
  EntropyEvaluator eval(before, after, dt, config, model, convolver);
  eval.bind(k);
  std::vector<double> cells;
  eval.cells(kappa, cells);
  return cells;
}

bool ConvolutionBoundCheck::holds(double slack) const {
  return x_difference <= slack * x_bound && y_difference <= slack * y_bound &&
         mixed_difference <= slack * mixed_bound;
}

ConvolutionBoundCheck check_convolution_bounds(const InterfaceConvolutions& r,
                                               const KernelDerivativeBounds& bounds,
                                               double l1_total) {
  const Grid2D& g = r.grid();
  ConvolutionBoundCheck c;
  c.x_difference = max_x_interface_difference(r);
  c.y_difference = max_y_interface_difference(r);
  c.mixed_difference = max_mixed_second_difference(r);
  c.x_bound = g.dx1() * bounds.d1 * l1_total;
  c.y_bound = g.dx2() * bounds.d2 * l1_total;
  c.mixed_bound =
      (2.0 * g.dx1() * g.dx1() * bounds.d11 + g.dx1() * g.dx2() * bounds.d12) * l1_total;
  return c;
}

RunMonitor::RunMonitor(const Field& initial, const SchemeConfig& config, const FluxModel& model,
                       const Convolver& convolver, std::size_t kappa_count)
    : initial_(field_stats(initial)),
      config_(&config),
      model_(&model),
      convolver_(&convolver),
      kappas_(kappa_lattice(initial, model, kappa_count)) {}

StepObserver RunMonitor::observer() {
  return [this](const Field& before, const Field& after, const StepRecord& record) {
    observe(before, after, record);
  };
}

void RunMonitor::observe(const Field& before, const Field& after, const StepRecord& record) {
  const EntropyResidual e =
      entropy_residual(before, after, record.dt, *config_, *model_, *convolver_, kappas_);
  double change = 0.0;
  for (double d : l1_distance(before, after)) {
    change += d;
  }
  ResidualSample s{record.n, record.t, e.max, change};
  if (samples_.empty() || e.max > entropy_max_) {
    entropy_max_ = e.max;
  }
  samples_.push_back(s);

  double tv = 0.0;
  for (double v : total_variation(before)) {
    tv += v;
  }
  const auto& L = config_->lipschitz;
  const double c3 = std::max(L.l11 + L.l12, L.l21 + L.l22);
  c4_ = std::max(c4_, change / record.dt - c3 * tv);
}

DiagnosticsReport RunMonitor::report(const std::vector<StepRecord>& records) const {
  DiagnosticsReport rep;
  rep.initial = initial_;
  rep.samples = samples_;
  rep.entropy_checks = samples_.size();
  rep.entropy_residual_max = samples_.empty() ? 0.0 : entropy_max_;
  const auto& L = config_->lipschitz;
  rep.time_continuity_c3 = std::max(L.l11 + L.l12, L.l21 + L.l22);
  rep.time_continuity_c4 = std::max(0.0, c4_);
  rep.clamp_count = model_->clamp_count();

  if (!records.empty()) {
    const StepRecord& last = records.back();
    rep.final.mass = last.mass;
    rep.final.l1 = last.l1;
    rep.final.min = last.min;
    rep.final.max = last.max;
    rep.final.tv = last.tv;
    rep.final.linf.resize(last.min.size());
    for (std::size_t k = 0; k < last.min.size(); ++k) {
      rep.final.linf[k] = std::max(std::abs(last.min[k]), std::abs(last.max[k]));
    }
  }

  double sup0 = 0.0;
  for (double v : initial_.linf) {
    sup0 = std::max(sup0, v);
  }
  for (std::size_t n = 1; n < records.size(); ++n) {
    const StepRecord& a = records[n - 1];
    const StepRecord& b = records[n];
    for (std::size_t k = 0; k < b.tv.size(); ++k) {
      const double growth = std::max(0.0, b.tv[k] - a.tv[k]) / (b.dt * (a.tv[k] + 1.0));
      rep.tv_growth = std::max(rep.tv_growth, growth);
      const double sup = std::max(std::abs(b.min[k]), std::abs(b.max[k]));
      if (sup0 > 0.0 && b.t > 0.0 && sup > sup0) {
        rep.linf_growth = std::max(rep.linf_growth, std::log(sup / sup0) / b.t);
      }
    }
  }
  return rep;
}

void write_residual_csv(std::ostream& out, const DiagnosticsReport& report) {
  out << "n,t,residual_max,step_l1_change\n";
  out.precision(std::numeric_limits<double>::max_digits10);
  for (const ResidualSample& s : report.samples) {
    out << s.n << ',' << s.t << ',' << s.residual_max << ',' << s.step_l1_change << '\n';
  }
}

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::not_applicable:
      return "not_applicable";
  }
  return "unknown";
}

bool SuiteVerdict::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::fail; });
}

const CheckResult* SuiteVerdict::find(std::string_view name) const {
  for (const CheckResult& c : checks) {
    if (c.name == name) {
      return &c;
    }
  }
  return nullptr;
}

std::string SuiteVerdict::to_json() const {
  nlohmann::json j;
  j["passed"] = passed();
  j["checks"] = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    nlohmann::json e;
    e["name"] = c.name;
    e["status"] = std::string(to_string(c.status));
    e["value"] = c.value;
    e["tolerance"] = c.tolerance ? nlohmann::json(*c.tolerance) : nlohmann::json(nullptr);
    e["detail"] = c.detail;
    j["checks"].push_back(std::move(e));
  }
  return j.dump(2);
}

namespace {

bool finite_all(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

CheckResult bounded(std::string name, double value, double tol, std::string detail) {
  CheckResult c{std::move(name), CheckStatus::pass, value, tol, std::move(detail)};
  if (!(value <= tol)) {
    c.status = CheckStatus::fail;
  }
  return c;
}

CheckResult reported(std::string name, double value, std::string detail) {
  return {std::move(name), std::isfinite(value) ? CheckStatus::pass : CheckStatus::fail, value,
          std::nullopt, std::move(detail)};
}

}  // namespace

SuiteVerdict check_theorem_suite(const std::vector<StepRecord>& records,
                                 const DiagnosticsReport& report, const FluxModel& model,
                                 const SuiteTolerances& tol) {
  SuiteVerdict v;
  const FieldStats& init = report.initial;
  const std::size_t species = init.min.size();

  bool finite = true;
  for (const StepRecord& r : records) {
    finite = finite && finite_all(r.mass) && finite_all(r.l1) && finite_all(r.min) &&
             finite_all(r.max) && finite_all(r.tv);
  }
  v.checks.push_back({"finiteness", finite ? CheckStatus::pass : CheckStatus::fail,
                      finite ? 0.0 : 1.0, std::nullopt, "all recorded statistics finite"});

  // Maximum principle: only meaningful when the data starts inside I_k.
  bool inside = true;
  for (std::size_t k = 0; k < species; ++k) {
    const AdmissibleInterval& I = model.admissible(k);
    inside = inside && I.contains(init.min[k], tol.max_principle) &&
             I.contains(init.max[k], tol.max_principle);
  }
  if (inside) {
    double excursion = 0.0;
    for (const StepRecord& r : records) {
      for (std::size_t k = 0; k < r.min.size(); ++k) {
        const AdmissibleInterval& I = model.admissible(k);
        excursion = std::max(excursion, I.rho_m - r.min[k]);
        if (I.rho_M) {
          excursion = std::max(excursion, r.max[k] - *I.rho_M);
        }
      }
    }
    v.checks.push_back(bounded("max_principle", excursion, tol.max_principle,
                               "largest excursion outside the admissible interval"));
  } else {
    v.checks.push_back({"max_principle", CheckStatus::not_applicable, 0.0, tol.max_principle,
                        "initial data outside the admissible interval"});
  }

  double mass_drift = 0.0;
  double l1_drift = 0.0;
  for (std::size_t n = 1; n < records.size(); ++n) {
    const StepRecord& a = records[n - 1];
    const StepRecord& b = records[n];
    for (std::size_t k = 0; k < b.mass.size(); ++k) {
      if (a.l1[k] > 0.0) {
        mass_drift = std::max(mass_drift, std::abs(b.mass[k] - a.mass[k]) / a.l1[k]);
        l1_drift = std::max(l1_drift, std::abs(b.l1[k] - a.l1[k]) / a.l1[k]);
      }
    }
  }
  v.checks.push_back(bounded("mass_conservation", mass_drift, tol.mass,
                             "largest per-step mass change relative to the L1 norm"));

  const bool nonnegative =
      std::all_of(init.min.begin(), init.min.end(), [](double m) { return m >= 0.0; });
  if (nonnegative) {
    v.checks.push_back(
        bounded("l1_bound", l1_drift, tol.l1, "largest per-step relative L1 change"));
  } else {
    v.checks.push_back({"l1_bound", CheckStatus::not_applicable, l1_drift, tol.l1,
                        "initial data takes negative values"});
  }

  if (report.entropy_checks > 0) {
    std::ostringstream d;
    d << "max over " << report.entropy_checks << " observed steps";
    v.checks.push_back(bounded("entropy", report.entropy_residual_max, tol.entropy, d.str()));
  } else {
    v.checks.push_back({"entropy", CheckStatus::not_applicable, 0.0, tol.entropy,
                        "no steps observed"});
  }

  v.checks.push_back(reported("bv_estimate", report.tv_growth,
                              "empirical C in TV(n+1) <= (1 + C dt) TV(n) + C dt"));
  std::ostringstream tc;
  tc << "empirical C4 with C3 = " << report.time_continuity_c3;
  v.checks.push_back(reported("time_continuity", report.time_continuity_c4, tc.str()));
  v.checks.push_back(
      reported("linf_bound", report.linf_growth, "empirical C5 in sup <= exp(C5 t) sup0"));

  if (model.policy() == StatePolicy::clamp) {
    v.checks.push_back(bounded("clamps", static_cast<double>(report.clamp_count), 0.0,
                               "states clamped into the admissible interval"));
  } else {
    v.checks.push_back({"clamps", CheckStatus::not_applicable,
                        static_cast<double>(report.clamp_count), std::nullopt,
                        "flux evaluated on all of R"});
  }
  return v;
}

}  // namespace nfv
