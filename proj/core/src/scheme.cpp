#include "nfv/scheme.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "nfv/diagnostics.hpp"
#include "nfv/error.hpp"
#include "nfv/parallel.hpp"

namespace nfv {

double SchemeConfig::lambda1_cap() const {
  return cfl_factor / (2.0 * (lipschitz.l11 + lipschitz.l12));
}

double SchemeConfig::lambda2_cap() const {
  return cfl_factor / (2.0 * (lipschitz.l21 + lipschitz.l22));
}

void SchemeConfig::validate() const {
  if (!(cfl_factor > 0.0) || !std::isfinite(cfl_factor)) {
    throw ConfigError("cfl_factor must be positive");
  }
  const auto& L = lipschitz;
  for (double l : {L.l11, L.l12, L.l21, L.l22}) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw ConfigError("Lipschitz constants must be positive");
    }
  }
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw ConfigError("t_end must be finite and non-negative");
  }
}

double compute_dt(const SchemeConfig& config, const Grid2D& grid) {
  config.validate();
  const double dt = std::min(config.lambda1_cap() * grid.dx1(), config.lambda2_cap() * grid.dx2());
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("time step is not positive");
  }
  return dt;
}

InterfaceFluxField interface_fluxes(const Field& field, std::size_t k,
                                    const InterfaceConvolutions& r, const SchemeConfig& config,
                                    const FluxModel& model) {
  const Grid2D& g = field.grid();
  const auto n1 = static_cast<std::ptrdiff_t>(g.n1());
  const auto n2 = static_cast<std::ptrdiff_t>(g.n2());
  const std::ptrdiff_t lo = g.periodic() ? 0 : -1;
  const double t = field.time();
  const double orientation = config.orientation();

  InterfaceFluxField out;
  out.x_cols = r.x_face_columns();
  out.y_rows = r.y_face_rows();
  out.fx.assign(out.x_cols * g.n2(), 0.0);
  out.fy.assign(g.n1() * out.y_rows, 0.0);

  parallel_for(0, n2, [&](std::ptrdiff_t j) {
    for (std::ptrdiff_t i = lo; i < n1; ++i) {
      const Interface at{t, g.x_interface(i, j), r.rx(i, j), Axis::x1, k, orientation};
      const InterfaceFlux flux(config.flux, model, at);
      out.fx[static_cast<std::size_t>(j) * out.x_cols + static_cast<std::size_t>(i - lo)] =
          flux(field.at(k, i, j), field.at(k, i + 1, j));
    }
  });
  parallel_for(lo, n2, [&](std::ptrdiff_t j) {
    for (std::ptrdiff_t i = 0; i < n1; ++i) {
      const Interface at{t, g.y_interface(i, j), r.ry(i, j), Axis::x2, k, orientation};
      const InterfaceFlux flux(config.flux, model, at);
      out.fy[static_cast<std::size_t>(j - lo) * g.n1() + static_cast<std::size_t>(i)] =
          flux(field.at(k, i, j), field.at(k, i, j + 1));
    }
  });
  return out;
}

Field step(const Field& field, double dt, const SchemeConfig& config, const FluxModel& model,
           const Convolver& convolver) {
  if (!(convolver.grid() == field.grid())) {
    throw InputError("convolver grid does not match the field");
  }
  if (field.species() != model.species()) {
    throw InputError("flux model species count does not match the field");
  }
  const Grid2D& g = field.grid();
  const InterfaceConvolutions r = convolver(field);
  const double lambda1 = dt / g.dx1();
  const double lambda2 = dt / g.dx2();
  const auto n1 = static_cast<std::ptrdiff_t>(g.n1());
  const auto n2 = static_cast<std::ptrdiff_t>(g.n2());
  const bool periodic = g.periodic();

  Field next(g, field.species(), field.time() + config.orientation() * dt);
  for (std::size_t k = 0; k < field.species(); ++k) {
    const InterfaceFluxField f = interface_fluxes(field, k, r, config, model);
    // column of x-interface i+1/2 and row of y-interface j+1/2
    auto xcol = [&](std::ptrdiff_t i) {
      return periodic ? wrap_index(i, g.n1()) : static_cast<std::size_t>(i + 1);
    };
    auto yrow = [&](std::ptrdiff_t j) {
      return periodic ? wrap_index(j, g.n2()) : static_cast<std::size_t>(j + 1);
    };
    parallel_for(0, n2, [&](std::ptrdiff_t j) {
      const auto ju = static_cast<std::size_t>(j);
      for (std::ptrdiff_t i = 0; i < n1; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        const double east = f.fx[ju * f.x_cols + xcol(i)];
        const double west = f.fx[ju * f.x_cols + xcol(i - 1)];
        const double north = f.fy[yrow(j) * g.n1() + iu];
        const double south = f.fy[yrow(j - 1) * g.n1() + iu];
        const double v = field(k, iu, ju) - lambda1 * (east - west) - lambda2 * (north - south);
        if (!std::isfinite(v)) {
          std::ostringstream msg;
          msg << "non-finite state in species " << k << " at cell (" << i << ", " << j
              << ") at t = " << field.time();
          throw StepFailure(msg.str(), k, iu, ju);
        }
        next(k, iu, ju) = v;
      }
    });
  }
  return next;
}

StepRecord make_record(const Field& field, std::size_t n, double dt) {
  StepRecord rec;
  rec.n = n;
  rec.dt = dt;
  const FieldStats s = field_stats(field);
  rec.mass = s.mass;
  rec.l1 = s.l1;
  rec.min = s.min;
  rec.max = s.max;
  rec.tv = s.tv;
  return rec;
}

namespace {

void log_record(std::ostream& out, const StepRecord& rec) {
  nlohmann::json j;
  j["n"] = rec.n;
  j["t"] = rec.t;
  j["dt"] = rec.dt;
  j["mass"] = rec.mass;
  j["min"] = rec.min;
  j["max"] = rec.max;
  j["tv"] = rec.tv;
  out << j.dump() << '\n';
}

}  // namespace

RunResult run(const Field& initial, const SchemeConfig& config, const FluxModel& model,
              const Convolver& convolver, const RunOptions& options) {
  config.validate();
  validate(config.flux, model);
  if (!(convolver.grid() == initial.grid())) {
    throw InputError("convolver grid does not match the initial field");
  }
  const Grid2D& g = initial.grid();
  std::size_t every = options.observe_every;
  if (every == 0) {
    every = std::max(g.n1(), g.n2()) <= 200 ? 1 : 10;
  }

  RunResult result{initial, {}};
  StepRecord first = make_record(initial, 0, 0.0);
  result.records.push_back(first);
  if (options.step_log != nullptr) {
    log_record(*options.step_log, first);
  }
  if (config.t_end == 0.0) {
    return result;
  }

  const double dt0 = compute_dt(config, g);
  const auto steps = static_cast<std::size_t>(
      std::max(1.0, std::ceil(config.t_end / dt0 * (1.0 - 1e-12))));
  const double t_start = initial.time();

  Field current = initial;
  for (std::size_t n = 0; n < steps; ++n) {
    const bool last = n + 1 == steps;
    const double elapsed = static_cast<double>(n) * dt0;
    const double dt = last ? config.t_end - elapsed : dt0;
    Field next = step(current, dt, config, model, convolver);
    const double done = last ? config.t_end : static_cast<double>(n + 1) * dt0;
    next.set_time(t_start + config.orientation() * done);

    StepRecord rec = make_record(next, n + 1, dt);
    rec.t = done;
    if (options.step_log != nullptr) {
      log_record(*options.step_log, rec);
    }
    if (options.observer && ((n + 1) % every == 0 || last)) {
      options.observer(current, next, rec);
    }
    result.records.push_back(std::move(rec));
    current = std::move(next);
  }
  result.final = std::move(current);
  return result;
}

RunResult run(const Field& initial, const SchemeConfig& config, const FluxModel& model,
              const KernelSet& kernels, const RunOptions& options) {
  const Convolver convolver(sample_kernels(kernels, initial.grid()), config.convolution);
  return run(initial, config, model, convolver, options);
}

}  // namespace nfv
