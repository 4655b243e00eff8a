#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "nfv/flux.hpp"
#include "nfv/grid.hpp"
#include "nfv/nonlocal.hpp"

namespace nfv::testing {

inline Field random_field(const Grid2D& grid, std::size_t species, std::uint64_t seed,
                          double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Field f(grid, species);
  for (double& v : f.values()) {
    v = dist(rng);
  }
  return f;
}

/// R at x-interface i+1/2 of row j computed from geometry alone: sum over all
/// cells of area·η(face - center), with the displacement folded into the
/// periodic box (minimal image).
inline std::vector<double> geometric_rx(const KernelSet& kernels, const Field& field,
                                        std::ptrdiff_t i, std::ptrdiff_t j, bool y_face = false) {
  const Grid2D& g = field.grid();
  const Point2 face = y_face ? g.y_interface(i, j) : g.x_interface(i, j);
  const double lx = g.x1_max() - g.x1_min();
  const double ly = g.x2_max() - g.x2_min();
  std::vector<double> out(kernels.channels(), 0.0);
  for (std::size_t k = 0; k < field.species(); ++k) {
    for (std::size_t jj = 0; jj < g.n2(); ++jj) {
      for (std::size_t ii = 0; ii < g.n1(); ++ii) {
        const Point2 c = g.cell_center(static_cast<std::ptrdiff_t>(ii),
                                       static_cast<std::ptrdiff_t>(jj));
        double d1 = face.x1 - c.x1;
        double d2 = face.x2 - c.x2;
        if (g.periodic()) {
          d1 -= lx * std::round(d1 / lx);
          d2 -= ly * std::round(d2 / ly);
        }
        for (std::size_t m = 0; m < kernels.channels(); ++m) {
          if (kernels.has(m, k)) {
            out[m] += g.cell_area() * kernels(m, k, {d1, d2}) * field(k, ii, jj);
          }
        }
      }
    }
  }
  return out;
}

/// g(ρ) = ρ transported with a constant velocity (v1, v2); one channel that
/// the velocity ignores.
inline FluxModel constant_velocity_model(double v1, double v2,
                                         StatePolicy policy = StatePolicy::extend) {
  MultiplicativeFluxModel split;
  split.g = [](std::size_t, double rho) { return rho; };
  split.g_prime_bound = 1.0;
  split.nu = [v1, v2](std::size_t, double, Point2, std::span<const double>) {
    return Vec2{v1, v2};
  };
  split.g_shape = GShape::increasing;
  return FluxModel::multiplicative(1, 1, split, {AdmissibleInterval(0.0)},
                                   {std::abs(v1), std::abs(v2)}, policy);
}

/// g(ρ) = ρ(1-ρ) on [0, 1] with ν = (R, -R)/√(1+R²); g's shape left unknown
/// so Godunov takes the general path.
inline FluxModel logistic_model(StatePolicy policy = StatePolicy::clamp) {
  MultiplicativeFluxModel split;
  split.g = [](std::size_t, double rho) { return rho * (1.0 - rho); };
  split.g_prime_bound = 1.0;
  split.nu = [](std::size_t, double, Point2, std::span<const double> r) {
    const double s = 1.0 / std::sqrt(1.0 + r[0] * r[0]);
    return Vec2{r[0] * s, -r[0] * s};
  };
  return FluxModel::multiplicative(1, 1, split, {AdmissibleInterval(0.0, 1.0)}, {1.0, 1.0},
                                   policy);
}

}  // namespace nfv::testing
