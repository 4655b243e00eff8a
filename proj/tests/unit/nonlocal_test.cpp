#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nfv/diagnostics.hpp"
#include "nfv/error.hpp"
#include "nfv/models.hpp"
#include "nfv/nonlocal.hpp"
#include "test_support.hpp"

namespace nfv {
namespace {

KernelSet unit_disc(double radius) {
  KernelSet k(1, 1);
  k.set(0, 0, [](Point2) { return 1.0; }, radius);
  return k;
}

TEST(KernelSet, MasksOutsideSupport) {
  const KernelSet k = unit_disc(1.5);
  EXPECT_EQ(k(0, 0, {1.0, 1.0}), 1.0);
  EXPECT_EQ(k(0, 0, {1.2, 1.2}), 0.0);
  EXPECT_DOUBLE_EQ(k.max_support_radius(), 1.5);
}

TEST(SampleKernels, ConstantKernelTable) {
  const Grid2D g = Grid2D::square(10, 0.0, 10.0);
  const SampledKernelTables t = sample_kernels(unit_disc(2.0), g);
  const KernelTable& x = t.table(FaceAxis::x, 0, 0);
  for (std::ptrdiff_t q = x.q_min; q <= x.q_max; ++q) {
    for (std::ptrdiff_t p = x.p_min; p <= x.p_max; ++p) {
      const double r2 = (p + 0.5) * (p + 0.5) + double(q * q);
      EXPECT_EQ(x.at(p, q), r2 <= 4.0 ? 1.0 : 0.0) << p << "," << q;
    }
  }
}

TEST(SampleKernels, BumpKernelSample) {
  const Grid2D g = Grid2D::square(48, -6.0, 6.0);
  KernelSet k(1, 1);
  k.set(0, 0, [](Point2 x) { return bump_kernel(2.0, 1.0, x); }, 2.0);
  const SampledKernelTables t = sample_kernels(k, g);
  const double h = g.dx1();
  const double c = std::cos(std::numbers::pi * (0.5 * h) * (0.5 * h) / 8.0);
  EXPECT_NEAR(t.table(FaceAxis::x, 0, 0).at(0, 0), h * h * c * c * c, 1e-16);
}

TEST(SampleKernels, RejectsSupportBeyondHalfDomain) {
  EXPECT_THROW(sample_kernels(unit_disc(0.6), Grid2D::square(8, 0.0, 1.0)), ConfigError);
}

TEST(ConvolveDirect, ZeroField) {
  const Grid2D g = Grid2D::square(8, -1.0, 1.0);
  const auto t = sample_kernels(EncryptionModel{0.5, 1.0}.kernels(), g);
  const InterfaceConvolutions r = convolve_direct(t, Field(g, 1));
  EXPECT_EQ(r.max_abs(), 0.0);
}

TEST(ConvolveDirect, DeltaFieldPicksOneTap) {
  const Grid2D g = Grid2D::square(4, 0.0, 4.0);
  KernelSet k(1, 1);
  k.set(0, 0, [](Point2 x) { return 1.0 + x.x1 + 10.0 * x.x2; }, 1.9);
  const auto t = sample_kernels(k, g);
  Field f(g, 1);
  f(0, 0, 0) = 1.0;
  const InterfaceConvolutions r = convolve_direct(t, f);
  for (std::ptrdiff_t j = 0; j < 4; ++j) {
    for (std::ptrdiff_t i = 0; i < 4; ++i) {
      // R_{i+1/2,j} = Σ w(p,q) ρ_{i-p,j-q}: only p ≡ i, q ≡ j (mod 4) survive
      double expect_x = 0.0;
      double expect_y = 0.0;
      for (std::ptrdiff_t p = i - 8; p <= i + 8; p += 4) {
        for (std::ptrdiff_t q = j - 8; q <= j + 8; q += 4) {
          expect_x += k(0, 0, {p + 0.5, double(q)});
          expect_y += k(0, 0, {double(p), q + 0.5});
        }
      }
      EXPECT_DOUBLE_EQ(r.rx(i, j)[0], expect_x) << i << "," << j;
      EXPECT_DOUBLE_EQ(r.ry(i, j)[0], expect_y) << i << "," << j;
    }
  }
}

TEST(ConvolveDirect, MatchesGeometricOracle) {
  for (Boundary b : {Boundary::periodic, Boundary::zero_extension}) {
    const Grid2D g(12, 10, -1.0, 1.0, -1.0, 1.5, b);
    const EncryptionModel m{0.7, 2.0};
    const KernelSet k = m.kernels();
    const Field f = testing::random_field(g, 1, 7);
    const InterfaceConvolutions r = convolve_direct(sample_kernels(k, g), f);
    for (std::ptrdiff_t j = 0; j < 10; j += 3) {
      for (std::ptrdiff_t i = 0; i < 12; i += 5) {
        const auto ox = testing::geometric_rx(k, f, i, j);
        const auto oy = testing::geometric_rx(k, f, i, j, true);
        for (std::size_t c = 0; c < 2; ++c) {
          EXPECT_NEAR(r.rx(i, j)[c], ox[c], 1e-13);
          EXPECT_NEAR(r.ry(i, j)[c], oy[c], 1e-13);
        }
      }
    }
  }
}

TEST(ConvolveDirect, ConstantFieldGivesUniformR) {
  const Grid2D g = Grid2D::square(16, 0.0, 4.0);
  KernelSet k(1, 1);
  k.set(0, 0, [](Point2 x) { return std::exp(-x.x1 * x.x1) * (1.0 + x.x2); }, 1.3);
  const auto t = sample_kernels(k, g);
  Field f(g, 1);
  for (double& v : f.values()) v = 3.0;
  const InterfaceConvolutions r = convolve_direct(t, f);
  double sum = 0.0;
  for (const auto& tap : t.table(FaceAxis::x, 0, 0).taps) sum += tap.weight;
  for (double v : r.x_values()) {
    EXPECT_NEAR(v, 3.0 * sum, 1e-13);
  }
}

TEST(ConvolveDirect, ZeroExtensionHasBoundaryFaces) {
  const Grid2D g = Grid2D::square(6, 0.0, 6.0, Boundary::zero_extension);
  const auto t = sample_kernels(unit_disc(1.0), g);
  const Field f = testing::random_field(g, 1, 3);
  const InterfaceConvolutions r = convolve_direct(t, f);
  EXPECT_EQ(r.x_face_columns(), 7u);
  EXPECT_EQ(r.y_face_rows(), 7u);
  // face -1/2 of row 2 sees only cell (0, 2): taps p = -1 (q = 0)
  EXPECT_DOUBLE_EQ(r.rx(-1, 2)[0], f(0, 0, 2));
}

TEST(ConvolveFast, MatchesDirectOnDelta) {
  const Grid2D g = Grid2D::square(16, -1.0, 1.0);
  const auto t = sample_kernels(EncryptionModel{0.6, 5.0}.kernels(), g);
  Field f(g, 1);
  f(0, 3, 11) = 1.0;
  const InterfaceConvolutions d = convolve_direct(t, f);
  const InterfaceConvolutions q = convolve_fast(t, f);
  const double tol = 1e-10 * (1.0 + d.max_abs());
  for (std::size_t n = 0; n < d.x_values().size(); ++n) {
    EXPECT_NEAR(q.x_values()[n], d.x_values()[n], tol);
    EXPECT_NEAR(q.y_values()[n], d.y_values()[n], tol);
  }
}

TEST(ConvolveFast, ZeroFieldIsZero) {
  const Grid2D g = Grid2D::square(16, -1.0, 1.0);
  const auto t = sample_kernels(EncryptionModel{0.6, 5.0}.kernels(), g);
  EXPECT_LE(convolve_fast(t, Field(g, 1)).max_abs(), 0.0);
}

TEST(ConvolveFast, FallsBackUnderZeroExtension) {
  const Grid2D g = Grid2D::square(10, 0.0, 10.0, Boundary::zero_extension);
  const auto t = sample_kernels(unit_disc(2.0), g);
  const Field f = testing::random_field(g, 1, 5);
  const InterfaceConvolutions d = convolve_direct(t, f);
  const InterfaceConvolutions q = convolve_fast(t, f);
  ASSERT_EQ(d.x_values().size(), q.x_values().size());
  for (std::size_t n = 0; n < d.x_values().size(); ++n) {
    EXPECT_EQ(q.x_values()[n], d.x_values()[n]);
  }
  EXPECT_FALSE(Convolver(t).uses_fft());
}

TEST(Convolver, MethodSelection) {
  const Grid2D g = Grid2D::square(8, 0.0, 8.0);
  const auto t = sample_kernels(unit_disc(2.0), g);
  EXPECT_TRUE(Convolver(t).uses_fft());
  EXPECT_FALSE(Convolver(t, ConvolutionMethod::direct).uses_fft());
}

TEST(DerivativeBounds, BumpKernelFirstDerivative) {
  KernelSet k(1, 1);
  k.set(0, 0, [](Point2 x) { return bump_kernel(1.0, 1.0, x); }, 1.0);
  const KernelDerivativeBounds b = estimate_derivative_bounds(k);
  double sup = 0.0;
  for (int a = -800; a <= 800; ++a) {
    for (int c = -800; c <= 800; ++c) {
      const Vec2 g = bump_kernel_gradient(1.0, 1.0, {a / 800.0, c / 800.0});
      sup = std::max(sup, std::abs(g[0]));
    }
  }
  EXPECT_NEAR(b.d1, sup, 0.01 * sup);
  EXPECT_NEAR(b.d2, sup, 0.01 * sup);
  EXPECT_GT(b.d11, 0.0);
}

}  // namespace
}  // namespace nfv
