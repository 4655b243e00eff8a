#include "nfv/grid.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "nfv/error.hpp"

namespace nfv {

std::size_t wrap_index(std::ptrdiff_t i, std::size_t n) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
  std::ptrdiff_t r = i % sn;
  if (r < 0) {
    r += sn;
  }
  return static_cast<std::size_t>(r);
}

Grid2D::Grid2D(std::size_t n1, std::size_t n2, double x1_min, double x1_max, double x2_min,
               double x2_max, Boundary boundary)
    : n1_(n1),
      n2_(n2),
      x1_min_(x1_min),
      x1_max_(x1_max),
      x2_min_(x2_min),
      x2_max_(x2_max),
      dx1_(0.0),
      dx2_(0.0),
      boundary_(boundary) {
  if (n1 == 0 || n2 == 0) {
    throw InputError("grid needs at least one cell per axis");
  }
  if (!(x1_max > x1_min) || !(x2_max > x2_min) || !std::isfinite(x1_max - x1_min) ||
      !std::isfinite(x2_max - x2_min)) {
    throw InputError("grid bounds must be finite with max > min");
  }
  dx1_ = (x1_max - x1_min) / static_cast<double>(n1);
  dx2_ = (x2_max - x2_min) / static_cast<double>(n2);
}

Grid2D Grid2D::square(std::size_t n, double lo, double hi, Boundary boundary) {
  return Grid2D(n, n, lo, hi, lo, hi, boundary);
}

Point2 Grid2D::cell_center(std::ptrdiff_t i, std::ptrdiff_t j) const {
  return {x1_min_ + (static_cast<double>(i) + 0.5) * dx1_,
          x2_min_ + (static_cast<double>(j) + 0.5) * dx2_};
}

Point2 Grid2D::x_interface(std::ptrdiff_t i, std::ptrdiff_t j) const {
  return {x1_min_ + static_cast<double>(i + 1) * dx1_,
          x2_min_ + (static_cast<double>(j) + 0.5) * dx2_};
}

Point2 Grid2D::y_interface(std::ptrdiff_t i, std::ptrdiff_t j) const {
  return {x1_min_ + (static_cast<double>(i) + 0.5) * dx1_,
          x2_min_ + static_cast<double>(j + 1) * dx2_};
}

Field::Field(Grid2D grid, std::size_t species, double time)
    : grid_(grid), species_(species), time_(time), values_(species * grid.cell_count(), 0.0) {
  if (species == 0) {
    throw InputError("field needs at least one species");
  }
}

double Field::at(std::size_t k, std::ptrdiff_t i, std::ptrdiff_t j) const {
  const auto n1 = static_cast<std::ptrdiff_t>(grid_.n1());
  const auto n2 = static_cast<std::ptrdiff_t>(grid_.n2());
  if (i >= 0 && i < n1 && j >= 0 && j < n2) {
    return (*this)(k, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  if (!grid_.periodic()) {
    return 0.0;
  }
  return (*this)(k, wrap_index(i, grid_.n1()), wrap_index(j, grid_.n2()));
}

std::span<double> Field::species_values(std::size_t k) {
  return std::span<double>(values_).subspan(k * grid_.cell_count(), grid_.cell_count());
}

std::span<const double> Field::species_values(std::size_t k) const {
  return std::span<const double>(values_).subspan(k * grid_.cell_count(), grid_.cell_count());
}

bool Field::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) {
      return false;
    }
  }
  return true;
}

namespace {

struct GlTableDeleter {
  void operator()(gsl_integration_glfixed_table* t) const { gsl_integration_glfixed_table_free(t); }
};

double checked(double v, std::size_t k, Point2 x) {
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "initial profile is not finite for species " << k << " at (" << x.x1 << ", " << x.x2
        << ")";
    throw InputError(msg.str());
  }
  return v;
}

}  // namespace

Field project_initial_data(const Profile& profile, std::size_t species, const Grid2D& grid,
                           ProjectionRule rule, int quadrature_order) {
  Field field(grid, species, 0.0);
  if (rule == ProjectionRule::midpoint) {
    for (std::size_t k = 0; k < species; ++k) {
      for (std::size_t j = 0; j < grid.n2(); ++j) {
        for (std::size_t i = 0; i < grid.n1(); ++i) {
          const Point2 c = grid.cell_center(static_cast<std::ptrdiff_t>(i),
                                            static_cast<std::ptrdiff_t>(j));
          field(k, i, j) = checked(profile(k, c), k, c);
        }
      }
    }
    return field;
  }

  if (quadrature_order < 1) {
    throw InputError("quadrature order must be positive");
  }
  std::unique_ptr<gsl_integration_glfixed_table, GlTableDeleter> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(quadrature_order)));
  std::vector<double> nodes(static_cast<std::size_t>(quadrature_order));
  std::vector<double> weights(nodes.size());
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    // reference interval [-1/2, 1/2], weights sum to 1
    gsl_integration_glfixed_point(-0.5, 0.5, q, &nodes[q], &weights[q], table.get());
  }

  for (std::size_t k = 0; k < species; ++k) {
    for (std::size_t j = 0; j < grid.n2(); ++j) {
      for (std::size_t i = 0; i < grid.n1(); ++i) {
        const Point2 c =
            grid.cell_center(static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j));
        double sum = 0.0;
        for (std::size_t a = 0; a < nodes.size(); ++a) {
          for (std::size_t b = 0; b < nodes.size(); ++b) {
            const Point2 x{c.x1 + nodes[a] * grid.dx1(), c.x2 + nodes[b] * grid.dx2()};
            sum += weights[a] * weights[b] * checked(profile(k, x), k, x);
          }
        }
        field(k, i, j) = sum;
      }
    }
  }
  return field;
}

void write_field_csv(std::ostream& out, const Field& field) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "i,j,k,value\n";
  const Grid2D& g = field.grid();
  for (std::size_t k = 0; k < field.species(); ++k) {
    for (std::size_t j = 0; j < g.n2(); ++j) {
      for (std::size_t i = 0; i < g.n1(); ++i) {
        out << i << ',' << j << ',' << k << ',' << field(k, i, j) << '\n';
      }
    }
  }
  out.precision(old_precision);
}

void write_field_matrix(std::ostream& out, const Field& field, std::size_t species) {
  if (species >= field.species()) {
    throw InputError("species index out of range");
  }
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  const Grid2D& g = field.grid();
  for (std::size_t j = 0; j < g.n2(); ++j) {
    for (std::size_t i = 0; i < g.n1(); ++i) {
      if (i > 0) {
        out << ' ';
      }
      out << field(species, i, j);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace nfv
