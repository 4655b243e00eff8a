#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace nfv {

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;

  bool operator==(const Point2&) const = default;
};

/// Treatment of cells outside the domain. `zero_extension` is meant for
/// compactly supported data that never reaches the boundary.
enum class Boundary { periodic, zero_extension };

/// i mod n in [0, n).
std::size_t wrap_index(std::ptrdiff_t i, std::size_t n);

/// Uniform rectangular mesh. Cell (i, j) covers
/// [x1_min + i dx1, x1_min + (i+1) dx1) x [x2_min + j dx2, x2_min + (j+1) dx2).
class Grid2D {
 public:
  Grid2D(std::size_t n1, std::size_t n2, double x1_min, double x1_max, double x2_min,
         double x2_max, Boundary boundary = Boundary::periodic);

  /// N x N cells on [lo, hi]^2.
  static Grid2D square(std::size_t n, double lo, double hi,
                       Boundary boundary = Boundary::periodic);

  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  std::size_t cell_count() const { return n1_ * n2_; }
  double x1_min() const { return x1_min_; }
  double x1_max() const { return x1_max_; }
  double x2_min() const { return x2_min_; }
  double x2_max() const { return x2_max_; }
  double dx1() const { return dx1_; }
  double dx2() const { return dx2_; }
  double cell_area() const { return dx1_ * dx2_; }
  /// dx1 / dx2
  double aspect() const { return dx1_ / dx2_; }
  Boundary boundary() const { return boundary_; }
  bool periodic() const { return boundary_ == Boundary::periodic; }

  Point2 cell_center(std::ptrdiff_t i, std::ptrdiff_t j) const;
  /// Midpoint of the x-interface i+1/2 in row j.
  Point2 x_interface(std::ptrdiff_t i, std::ptrdiff_t j) const;
  /// Midpoint of the y-interface j+1/2 in column i.
  Point2 y_interface(std::ptrdiff_t i, std::ptrdiff_t j) const;

  bool operator==(const Grid2D&) const = default;

 private:
  std::size_t n1_;
  std::size_t n2_;
  double x1_min_;
  double x1_max_;
  double x2_min_;
  double x2_max_;
  double dx1_;
  double dx2_;
  Boundary boundary_;
};

/// Cell averages of K species at one time level. Storage is species-major,
/// then row (j), then column (i).
class Field {
 public:
  Field(Grid2D grid, std::size_t species, double time = 0.0);

  const Grid2D& grid() const { return grid_; }
  std::size_t species() const { return species_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  double& operator()(std::size_t k, std::size_t i, std::size_t j) {
    return values_[offset(k, i, j)];
  }
  double operator()(std::size_t k, std::size_t i, std::size_t j) const {
    return values_[offset(k, i, j)];
  }

  /// Value with boundary handling: periodic wrap, or 0 outside the domain
  /// under zero extension.
  double at(std::size_t k, std::ptrdiff_t i, std::ptrdiff_t j) const;

  std::span<double> species_values(std::size_t k);
  std::span<const double> species_values(std::size_t k) const;
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;

 private:
  std::size_t offset(std::size_t k, std::size_t i, std::size_t j) const {
    return (k * grid_.n2() + j) * grid_.n1() + i;
  }

  Grid2D grid_;
  std::size_t species_;
  double time_;
  std::vector<double> values_;
};

/// Pointwise initial data: value of species k at x.
using Profile = std::function<double(std::size_t species, Point2 x)>;

enum class ProjectionRule { midpoint, cell_mean_quadrature };

/// Cell averages of `profile`. `midpoint` samples cell centers;
/// `cell_mean_quadrature` uses a tensor Gauss-Legendre rule of
/// `quadrature_order` points per axis. Throws InputError on a non-finite sample.
Field project_initial_data(const Profile& profile, std::size_t species, const Grid2D& grid,
                           ProjectionRule rule = ProjectionRule::midpoint,
                           int quadrature_order = 4);

/// `i,j,k,value` rows with a header line.
void write_field_csv(std::ostream& out, const Field& field);

/// One line per j (bottom row first), whitespace-separated values along i.
void write_field_matrix(std::ostream& out, const Field& field, std::size_t species = 0);

}  // namespace nfv
