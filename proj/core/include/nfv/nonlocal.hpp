#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nfv/grid.hpp"

namespace nfv {

/// Kernel η^{m,k} evaluated at a displacement.
using KernelFunction = std::function<double(Point2 offset)>;

/// M x K compactly supported convolution kernels. Evaluation is masked to
/// zero beyond each kernel's support radius.
class KernelSet {
 public:
  KernelSet(std::size_t channels, std::size_t species);

  /// Install η^{m,k} with support radius `radius`.
  void set(std::size_t m, std::size_t k, KernelFunction kernel, double radius);

  std::size_t channels() const { return channels_; }
  std::size_t species() const { return species_; }
  bool has(std::size_t m, std::size_t k) const;
  double support_radius(std::size_t m, std::size_t k) const;
  double max_support_radius() const;
  double operator()(std::size_t m, std::size_t k, Point2 offset) const;

 private:
  std::size_t index(std::size_t m, std::size_t k) const { return m * species_ + k; }

  std::size_t channels_;
  std::size_t species_;
  std::vector<KernelFunction> kernels_;
  std::vector<double> radii_;
};

enum class FaceAxis { x, y };

/// Weights dx1 dx2 η(offset) on a dense rectangle of stencil indices (p, q).
/// x-faces use offsets ((p+1/2)dx1, q dx2), y-faces (p dx1, (q+1/2)dx2).
struct KernelTable {
  struct Tap {
    std::ptrdiff_t p;
    std::ptrdiff_t q;
    double weight;
  };

  std::ptrdiff_t p_min = 0;
  std::ptrdiff_t p_max = -1;
  std::ptrdiff_t q_min = 0;
  std::ptrdiff_t q_max = -1;
  std::vector<double> dense;  // row-major in q, then p
  std::vector<Tap> taps;      // nonzero entries in dense order

  double at(std::ptrdiff_t p, std::ptrdiff_t q) const;
};

class SampledKernelTables {
 public:
  SampledKernelTables(Grid2D grid, std::size_t channels, std::size_t species,
                      std::vector<KernelTable> x_tables, std::vector<KernelTable> y_tables);

  const Grid2D& grid() const { return grid_; }
  std::size_t channels() const { return channels_; }
  std::size_t species() const { return species_; }
  const KernelTable& table(FaceAxis axis, std::size_t m, std::size_t k) const;

 private:
  Grid2D grid_;
  std::size_t channels_;
  std::size_t species_;
  std::vector<KernelTable> x_tables_;
  std::vector<KernelTable> y_tables_;
};

/// Midpoint-rule samples of every kernel at the staggered face offsets.
/// Throws ConfigError if a support radius exceeds half the periodic domain.
SampledKernelTables sample_kernels(const KernelSet& kernels, const Grid2D& grid);

/// The M convolution values at every x- and y-interface.
///
/// Interface indices follow the cell they sit to the right of (x) or above
/// (y): rx(i, j) is R at x-interface i+1/2. On a periodic grid i runs over
/// [0, n1) and i = -1 wraps; under zero extension there is one extra
/// boundary face and i runs over [-1, n1).
class InterfaceConvolutions {
 public:
  InterfaceConvolutions(Grid2D grid, std::size_t channels, double time = 0.0);

  const Grid2D& grid() const { return grid_; }
  std::size_t channels() const { return channels_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  std::size_t x_face_columns() const { return x_cols_; }
  std::size_t y_face_rows() const { return y_rows_; }

  std::span<const double> rx(std::ptrdiff_t i, std::ptrdiff_t j) const;
  std::span<const double> ry(std::ptrdiff_t i, std::ptrdiff_t j) const;
  std::span<double> rx(std::ptrdiff_t i, std::ptrdiff_t j);
  std::span<double> ry(std::ptrdiff_t i, std::ptrdiff_t j);

  std::span<const double> x_values() const { return r_x_; }
  std::span<const double> y_values() const { return r_y_; }
  double max_abs() const;

 private:
  std::size_t x_slot(std::ptrdiff_t i, std::ptrdiff_t j) const;
  std::size_t y_slot(std::ptrdiff_t i, std::ptrdiff_t j) const;

  Grid2D grid_;
  std::size_t channels_;
  double time_;
  std::size_t x_cols_;
  std::size_t y_rows_;
  std::vector<double> r_x_;  // interface-major, M contiguous values per face
  std::vector<double> r_y_;
};

/// Direct summation over the nonzero kernel taps.
InterfaceConvolutions convolve_direct(const SampledKernelTables& tables, const Field& field);

/// Circular convolution through FFTs; kernel spectra and plans are built
/// once. Requires a periodic grid. Safe to call concurrently.
class FftConvolver {
 public:
  explicit FftConvolver(const SampledKernelTables& tables);
  ~FftConvolver();
  FftConvolver(FftConvolver&&) noexcept;
  FftConvolver& operator=(FftConvolver&&) noexcept;
  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;

  InterfaceConvolutions operator()(const Field& field) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot fast path. Falls back to convolve_direct under zero extension.
InterfaceConvolutions convolve_fast(const SampledKernelTables& tables, const Field& field);

enum class ConvolutionMethod { automatic, direct, fast };

/// Tables plus the chosen evaluation path; what the scheme holds per grid.
class Convolver {
 public:
  Convolver(SampledKernelTables tables, ConvolutionMethod method = ConvolutionMethod::automatic);

  const SampledKernelTables& tables() const { return tables_; }
  const Grid2D& grid() const { return tables_.grid(); }
  bool uses_fft() const { return fft_ != nullptr; }

  InterfaceConvolutions operator()(const Field& field) const;

 private:
  SampledKernelTables tables_;
  std::shared_ptr<const FftConvolver> fft_;
};

/// Sup-norms of kernel derivatives, summed over the M x K components,
/// estimated by differencing on a lattice x lattice probe grid covering the support.
struct KernelDerivativeBounds {
  double d1 = 0.0;   // ||∂_{x1} η||
  double d2 = 0.0;   // ||∂_{x2} η||
  double d11 = 0.0;  // ||∂²_{x1x1} η||
  double d12 = 0.0;  // ||∂²_{x1x2} η||
  double d22 = 0.0;  // ||∂²_{x2x2} η||
};

KernelDerivativeBounds estimate_derivative_bounds(const KernelSet& kernels,
                                                  std::size_t lattice = 512);

/// max over (i, j) of ||R_{i+1/2,j} - R_{i-1/2,j}||_2 (periodic grids).
double max_x_interface_difference(const InterfaceConvolutions& r);
/// max over (i, j) of ||R_{i,j+1/2} - R_{i,j-1/2}||_2 (periodic grids).
double max_y_interface_difference(const InterfaceConvolutions& r);
/// max over (i, j) of ||R_{i+1,j-1/2} - R_{i,j-1/2} - R_{i+1,j+1/2} + R_{i,j+1/2}||_2.
double max_mixed_second_difference(const InterfaceConvolutions& r);

}  // namespace nfv
