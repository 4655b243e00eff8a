#include "nfv/nonlocal.hpp"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

#include "nfv/error.hpp"
#include "nfv/parallel.hpp"

namespace nfv {

// ---------------------------------------------------------------- KernelSet

KernelSet::KernelSet(std::size_t channels, std::size_t species)
    : channels_(channels),
      species_(species),
      kernels_(channels * species),
      radii_(channels * species, 0.0) {
  if (channels == 0 || species == 0) {
    throw InputError("kernel set needs at least one channel and one species");
  }
}

void KernelSet::set(std::size_t m, std::size_t k, KernelFunction kernel, double radius) {
  if (m >= channels_ || k >= species_) {
    throw InputError("kernel index out of range");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InputError("kernel support radius must be positive and finite");
  }
  kernels_[index(m, k)] = std::move(kernel);
  radii_[index(m, k)] = radius;
}

bool KernelSet::has(std::size_t m, std::size_t k) const {
  return static_cast<bool>(kernels_[index(m, k)]);
}

double KernelSet::support_radius(std::size_t m, std::size_t k) const { return radii_[index(m, k)]; }

double KernelSet::max_support_radius() const {
  return radii_.empty() ? 0.0 : *std::max_element(radii_.begin(), radii_.end());
}

double KernelSet::operator()(std::size_t m, std::size_t k, Point2 offset) const {
  const auto& kernel = kernels_[index(m, k)];
  if (!kernel) {
    return 0.0;
  }
  const double r = radii_[index(m, k)];
  if (offset.x1 * offset.x1 + offset.x2 * offset.x2 > r * r) {
    return 0.0;
  }
  return kernel(offset);
}

// ------------------------------------------------------------- KernelTable

double KernelTable::at(std::ptrdiff_t p, std::ptrdiff_t q) const {
  if (p < p_min || p > p_max || q < q_min || q > q_max) {
    return 0.0;
  }
  const auto width = static_cast<std::size_t>(p_max - p_min + 1);
  return dense[static_cast<std::size_t>(q - q_min) * width + static_cast<std::size_t>(p - p_min)];
}

SampledKernelTables::SampledKernelTables(Grid2D grid, std::size_t channels, std::size_t species,
                                         std::vector<KernelTable> x_tables,
                                         std::vector<KernelTable> y_tables)
    : grid_(grid),
      channels_(channels),
      species_(species),
      x_tables_(std::move(x_tables)),
      y_tables_(std::move(y_tables)) {}

const KernelTable& SampledKernelTables::table(FaceAxis axis, std::size_t m, std::size_t k) const {
  const std::size_t idx = m * species_ + k;
  return axis == FaceAxis::x ? x_tables_[idx] : y_tables_[idx];
}

namespace {

KernelTable sample_one(const KernelSet& kernels, std::size_t m, std::size_t k, const Grid2D& grid,
                       FaceAxis axis) {
  KernelTable table;
  if (!kernels.has(m, k)) {
    return table;
  }
  const double r = kernels.support_radius(m, k);
  const auto pe = static_cast<std::ptrdiff_t>(std::ceil(r / grid.dx1())) + 1;
  const auto qe = static_cast<std::ptrdiff_t>(std::ceil(r / grid.dx2())) + 1;
  table.p_min = -pe;
  table.p_max = pe;
  table.q_min = -qe;
  table.q_max = qe;
  const double area = grid.cell_area();
  const double sx = axis == FaceAxis::x ? 0.5 : 0.0;
  const double sy = axis == FaceAxis::y ? 0.5 : 0.0;
  table.dense.reserve(static_cast<std::size_t>((2 * pe + 1) * (2 * qe + 1)));
  for (std::ptrdiff_t q = -qe; q <= qe; ++q) {
    for (std::ptrdiff_t p = -pe; p <= pe; ++p) {
      const Point2 offset{(static_cast<double>(p) + sx) * grid.dx1(),
                          (static_cast<double>(q) + sy) * grid.dx2()};
      double w = 0.0;
      if (offset.x1 * offset.x1 + offset.x2 * offset.x2 <= r * r) {
        const double eta = kernels(m, k, offset);
        if (!std::isfinite(eta)) {
          std::ostringstream msg;
          msg << "kernel (" << m << ", " << k << ") is not finite at offset (" << offset.x1 << ", "
              << offset.x2 << ")";
          throw InputError(msg.str());
        }
        w = area * eta;
      }
      table.dense.push_back(w);
      if (w != 0.0) {
        table.taps.push_back({p, q, w});
      }
    }
  }
  return table;
}

}  // namespace

SampledKernelTables sample_kernels(const KernelSet& kernels, const Grid2D& grid) {
  if (grid.periodic()) {
    const double half1 = 0.5 * (grid.x1_max() - grid.x1_min());
    const double half2 = 0.5 * (grid.x2_max() - grid.x2_min());
    for (std::size_t m = 0; m < kernels.channels(); ++m) {
      for (std::size_t k = 0; k < kernels.species(); ++k) {
        if (!kernels.has(m, k)) {
          continue;
        }
        const double r = kernels.support_radius(m, k);
        if (r > half1 || r > half2) {
          std::ostringstream msg;
          msg << "kernel (" << m << ", " << k << ") support radius " << r
              << " exceeds half the periodic domain (" << std::min(half1, half2) << ")";
          throw ConfigError(msg.str());
        }
      }
    }
  }
  std::vector<KernelTable> xs;
  std::vector<KernelTable> ys;
  for (std::size_t m = 0; m < kernels.channels(); ++m) {
    for (std::size_t k = 0; k < kernels.species(); ++k) {
      xs.push_back(sample_one(kernels, m, k, grid, FaceAxis::x));
      ys.push_back(sample_one(kernels, m, k, grid, FaceAxis::y));
    }
  }
  return SampledKernelTables(grid, kernels.channels(), kernels.species(), std::move(xs),
                             std::move(ys));
}

// --------------------------------------------------- InterfaceConvolutions

InterfaceConvolutions::InterfaceConvolutions(Grid2D grid, std::size_t channels, double time)
    : grid_(grid),
      channels_(channels),
      time_(time),
      x_cols_(grid.periodic() ? grid.n1() : grid.n1() + 1),
      y_rows_(grid.periodic() ? grid.n2() : grid.n2() + 1),
      r_x_(x_cols_ * grid.n2() * channels, 0.0),
      r_y_(grid.n1() * y_rows_ * channels, 0.0) {}

std::size_t InterfaceConvolutions::x_slot(std::ptrdiff_t i, std::ptrdiff_t j) const {
  std::size_t col = 0;
  if (grid_.periodic()) {
    col = wrap_index(i, grid_.n1());
  } else {
    if (i < -1 || i >= static_cast<std::ptrdiff_t>(grid_.n1())) {
      throw InputError("x-interface index outside the domain");
    }
    col = static_cast<std::size_t>(i + 1);
  }
  const std::size_t row = wrap_index(j, grid_.n2());
  return (row * x_cols_ + col) * channels_;
}

std::size_t InterfaceConvolutions::y_slot(std::ptrdiff_t i, std::ptrdiff_t j) const {
  std::size_t row = 0;
  if (grid_.periodic()) {
    row = wrap_index(j, grid_.n2());
  } else {
    if (j < -1 || j >= static_cast<std::ptrdiff_t>(grid_.n2())) {
      throw InputError("y-interface index outside the domain");
    }
    row = static_cast<std::size_t>(j + 1);
  }
  const std::size_t col = wrap_index(i, grid_.n1());
  return (row * grid_.n1() + col) * channels_;
}

std::span<const double> InterfaceConvolutions::rx(std::ptrdiff_t i, std::ptrdiff_t j) const {
  return std::span<const double>(r_x_).subspan(x_slot(i, j), channels_);
}
std::span<const double> InterfaceConvolutions::ry(std::ptrdiff_t i, std::ptrdiff_t j) const {
  return std::span<const double>(r_y_).subspan(y_slot(i, j), channels_);
}
std::span<double> InterfaceConvolutions::rx(std::ptrdiff_t i, std::ptrdiff_t j) {
  return std::span<double>(r_x_).subspan(x_slot(i, j), channels_);
}
std::span<double> InterfaceConvolutions::ry(std::ptrdiff_t i, std::ptrdiff_t j) {
  return std::span<double>(r_y_).subspan(y_slot(i, j), channels_);
}

double InterfaceConvolutions::max_abs() const {
  double m = 0.0;
  for (double v : r_x_) m = std::max(m, std::abs(v));
  for (double v : r_y_) m = std::max(m, std::abs(v));
  return m;
}

// ----------------------------------------------------------- direct path

namespace {

void check_shapes(const SampledKernelTables& tables, const Field& field) {
  if (!(tables.grid() == field.grid())) {
    throw InputError("field grid does not match the kernel tables");
  }
  if (tables.species() != field.species()) {
    throw InputError("field species count does not match the kernel tables");
  }
}

}  // namespace

InterfaceConvolutions convolve_direct(const SampledKernelTables& tables, const Field& field) {
  check_shapes(tables, field);
  const Grid2D& g = tables.grid();
  const std::size_t M = tables.channels();
  const std::size_t K = tables.species();
  InterfaceConvolutions out(g, M, field.time());
  const auto lo = g.periodic() ? std::ptrdiff_t{0} : std::ptrdiff_t{-1};
  const auto n1 = static_cast<std::ptrdiff_t>(g.n1());
  const auto n2 = static_cast<std::ptrdiff_t>(g.n2());

  // x-faces
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (std::ptrdiff_t j = 0; j < n2; ++j) {
    for (std::ptrdiff_t i = lo; i < n1; ++i) {
      auto r = out.rx(i, j);
      for (std::size_t m = 0; m < M; ++m) {
        double sum = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          for (const auto& tap : tables.table(FaceAxis::x, m, k).taps) {
            sum += tap.weight * field.at(k, i - tap.p, j - tap.q);
          }
        }
        r[m] = sum;
      }
    }
  }
  // y-faces
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (std::ptrdiff_t j = lo; j < n2; ++j) {
    for (std::ptrdiff_t i = 0; i < n1; ++i) {
      auto r = out.ry(i, j);
      for (std::size_t m = 0; m < M; ++m) {
        double sum = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          for (const auto& tap : tables.table(FaceAxis::y, m, k).taps) {
            sum += tap.weight * field.at(k, i - tap.p, j - tap.q);
          }
        }
        r[m] = sum;
      }
    }
  }
  return out;
}

// -------------------------------------------------------------- FFT path

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double, FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex, FftwFree>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

}  // namespace

struct FftConvolver::Impl {
  Grid2D grid;
  std::size_t channels;
  std::size_t species;
  std::size_t real_size;
  std::size_t spectral_size;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  // spectra[axis][m * K + k], empty when the kernel is absent
  std::vector<std::vector<std::complex<double>>> spectra[2];

  explicit Impl(const SampledKernelTables& tables)
      : grid(tables.grid()),
        channels(tables.channels()),
        species(tables.species()),
        real_size(grid.n1() * grid.n2()),
        spectral_size(grid.n2() * (grid.n1() / 2 + 1)) {
    const int n1 = static_cast<int>(grid.n1());
    const int n2 = static_cast<int>(grid.n2());
    RealBuffer real = alloc_real(real_size);
    ComplexBuffer spec = alloc_complex(spectral_size);
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      forward = fftw_plan_dft_r2c_2d(n2, n1, real.get(), spec.get(), FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r_2d(n2, n1, spec.get(), real.get(), FFTW_ESTIMATE);
    }
    for (int a = 0; a < 2; ++a) {
      const FaceAxis axis = a == 0 ? FaceAxis::x : FaceAxis::y;
      spectra[a].resize(channels * species);
      for (std::size_t m = 0; m < channels; ++m) {
        for (std::size_t k = 0; k < species; ++k) {
          const KernelTable& t = tables.table(axis, m, k);
          if (t.taps.empty()) {
            continue;
          }
          std::fill(real.get(), real.get() + real_size, 0.0);
          for (const auto& tap : t.taps) {
            const std::size_t pp = wrap_index(tap.p, grid.n1());
            const std::size_t qq = wrap_index(tap.q, grid.n2());
            real.get()[qq * grid.n1() + pp] += tap.weight;
          }
          fftw_execute_dft_r2c(forward, real.get(), spec.get());
          auto& s = spectra[a][m * species + k];
          s.resize(spectral_size);
          for (std::size_t c = 0; c < spectral_size; ++c) {
            s[c] = {spec.get()[c][0], spec.get()[c][1]};
          }
        }
      }
    }
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (backward != nullptr) fftw_destroy_plan(backward);
  }
};

FftConvolver::FftConvolver(const SampledKernelTables& tables) {
  if (!tables.grid().periodic()) {
    throw ConfigError("FFT convolution needs a periodic grid");
  }
  impl_ = std::make_unique<Impl>(tables);
}

FftConvolver::~FftConvolver() = default;
FftConvolver::FftConvolver(FftConvolver&&) noexcept = default;
FftConvolver& FftConvolver::operator=(FftConvolver&&) noexcept = default;

InterfaceConvolutions FftConvolver::operator()(const Field& field) const {
  const Impl& d = *impl_;
  if (!(field.grid() == d.grid) || field.species() != d.species) {
    throw InputError("field does not match the FFT convolver grid");
  }
  const std::size_t n1 = d.grid.n1();
  const std::size_t n2 = d.grid.n2();
  const double scale = 1.0 / static_cast<double>(d.real_size);
  InterfaceConvolutions out(d.grid, d.channels, field.time());

  RealBuffer real = alloc_real(d.real_size);
  ComplexBuffer work = alloc_complex(d.spectral_size);
  std::vector<std::vector<std::complex<double>>> state(d.species);
  for (std::size_t k = 0; k < d.species; ++k) {
    auto values = field.species_values(k);
    std::copy(values.begin(), values.end(), real.get());
    fftw_execute_dft_r2c(d.forward, real.get(), work.get());
    state[k].resize(d.spectral_size);
    for (std::size_t c = 0; c < d.spectral_size; ++c) {
      state[k][c] = {work.get()[c][0], work.get()[c][1]};
    }
  }

  for (int a = 0; a < 2; ++a) {
    for (std::size_t m = 0; m < d.channels; ++m) {
      bool any = false;
      std::fill(reinterpret_cast<double*>(work.get()),
                reinterpret_cast<double*>(work.get()) + 2 * d.spectral_size, 0.0);
      for (std::size_t k = 0; k < d.species; ++k) {
        const auto& s = d.spectra[a][m * d.species + k];
        if (s.empty()) {
          continue;
        }
        any = true;
        for (std::size_t c = 0; c < d.spectral_size; ++c) {
          const std::complex<double> prod = s[c] * state[k][c];
          work.get()[c][0] += prod.real();
          work.get()[c][1] += prod.imag();
        }
      }
      if (any) {
        fftw_execute_dft_c2r(d.backward, work.get(), real.get());
      } else {
        std::fill(real.get(), real.get() + d.real_size, 0.0);
      }
      for (std::size_t j = 0; j < n2; ++j) {
        for (std::size_t i = 0; i < n1; ++i) {
          const double v = real.get()[j * n1 + i] * scale;
          const auto ii = static_cast<std::ptrdiff_t>(i);
          const auto jj = static_cast<std::ptrdiff_t>(j);
          if (a == 0) {
            out.rx(ii, jj)[m] = v;
          } else {
            out.ry(ii, jj)[m] = v;
          }
        }
      }
    }
  }
  return out;
}

InterfaceConvolutions convolve_fast(const SampledKernelTables& tables, const Field& field) {
  check_shapes(tables, field);
  if (!tables.grid().periodic()) {
    return convolve_direct(tables, field);
  }
  return FftConvolver(tables)(field);
}

// --------------------------------------------------------------- Convolver

Convolver::Convolver(SampledKernelTables tables, ConvolutionMethod method)
    : tables_(std::move(tables)) {
  if (method == ConvolutionMethod::direct || !tables_.grid().periodic()) {
    return;
  }
  fft_ = std::make_shared<const FftConvolver>(tables_);
}

InterfaceConvolutions Convolver::operator()(const Field& field) const {
  if (fft_) {
    check_shapes(tables_, field);
    return (*fft_)(field);
  }
  return convolve_direct(tables_, field);
}

// ------------------------------------------------------ derivative bounds

KernelDerivativeBounds estimate_derivative_bounds(const KernelSet& kernels, std::size_t lattice) {
  KernelDerivativeBounds b;
  if (lattice < 4) {
    throw InputError("probe lattice too coarse");
  }
  for (std::size_t m = 0; m < kernels.channels(); ++m) {
    for (std::size_t k = 0; k < kernels.species(); ++k) {
      if (!kernels.has(m, k)) {
        continue;
      }
      const double r = kernels.support_radius(m, k);
      const double h = 2.0 * r / static_cast<double>(lattice);
      // samples on [-r - h, r + h]^2
      const std::size_t n = lattice + 3;
      std::vector<double> v(n * n);
      for (std::size_t b2 = 0; b2 < n; ++b2) {
        for (std::size_t b1 = 0; b1 < n; ++b1) {
          const Point2 x{-r - h + static_cast<double>(b1) * h, -r - h + static_cast<double>(b2) * h};
          v[b2 * n + b1] = kernels(m, k, x);
        }
      }
      auto at = [&](std::size_t a1, std::size_t a2) { return v[a2 * n + a1]; };
      double s1 = 0.0, s2 = 0.0, s11 = 0.0, s12 = 0.0, s22 = 0.0;
      for (std::size_t a2 = 1; a2 + 1 < n; ++a2) {
        for (std::size_t a1 = 1; a1 + 1 < n; ++a1) {
          const double c = at(a1, a2);
          s1 = std::max(s1, std::abs(at(a1 + 1, a2) - c) / h);
          s2 = std::max(s2, std::abs(at(a1, a2 + 1) - c) / h);
          s11 = std::max(s11, std::abs(at(a1 + 1, a2) - 2.0 * c + at(a1 - 1, a2)) / (h * h));
          s22 = std::max(s22, std::abs(at(a1, a2 + 1) - 2.0 * c + at(a1, a2 - 1)) / (h * h));
          s12 = std::max(
              s12, std::abs(at(a1 + 1, a2 + 1) - at(a1 + 1, a2) - at(a1, a2 + 1) + c) / (h * h));
        }
      }
      b.d1 += s1;
      b.d2 += s2;
      b.d11 += s11;
      b.d12 += s12;
      b.d22 += s22;
    }
  }
  return b;
}

namespace {

double norm_of_difference(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    const double d = a[m] - b[m];
    s += d * d;
  }
  return std::sqrt(s);
}

void require_periodic(const InterfaceConvolutions& r) {
  if (!r.grid().periodic()) {
    throw InputError("interface difference checks need a periodic grid");
  }
}

}  // namespace

double max_x_interface_difference(const InterfaceConvolutions& r) {
  require_periodic(r);
  double worst = 0.0;
  const auto n1 = static_cast<std::ptrdiff_t>(r.grid().n1());
  const auto n2 = static_cast<std::ptrdiff_t>(r.grid().n2());
  for (std::ptrdiff_t j = 0; j < n2; ++j) {
    for (std::ptrdiff_t i = 0; i < n1; ++i) {
      worst = std::max(worst, norm_of_difference(r.rx(i, j), r.rx(i - 1, j)));
    }
  }
  return worst;
}

double max_y_interface_difference(const InterfaceConvolutions& r) {
  require_periodic(r);
  double worst = 0.0;
  const auto n1 = static_cast<std::ptrdiff_t>(r.grid().n1());
  const auto n2 = static_cast<std::ptrdiff_t>(r.grid().n2());
  for (std::ptrdiff_t j = 0; j < n2; ++j) {
    for (std::ptrdiff_t i = 0; i < n1; ++i) {
      worst = std::max(worst, norm_of_difference(r.ry(i, j), r.ry(i, j - 1)));
    }
  }
  return worst;
}

double max_mixed_second_difference(const InterfaceConvolutions& r) {
  require_periodic(r);
  double worst = 0.0;
  const auto n1 = static_cast<std::ptrdiff_t>(r.grid().n1());
  const auto n2 = static_cast<std::ptrdiff_t>(r.grid().n2());
  const std::size_t M = r.channels();
  for (std::ptrdiff_t j = 0; j < n2; ++j) {
    for (std::ptrdiff_t i = 0; i < n1; ++i) {
      auto a = r.ry(i + 1, j - 1);
      auto b = r.ry(i, j - 1);
      auto c = r.ry(i + 1, j);
      auto d = r.ry(i, j);
      double s = 0.0;
      for (std::size_t m = 0; m < M; ++m) {
        const double v = a[m] - b[m] - c[m] + d[m];
        s += v * v;
      }
      worst = std::max(worst, std::sqrt(s));
    }
  }
  return worst;
}

}  // namespace nfv
