#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nrl/kernels.hpp"

using namespace nrl;

namespace {

constexpr double kC2 = 1.0 / (2.0 * std::numbers::pi);

Point<2> random_in(std::mt19937_64& rng, Half h) {
  std::uniform_real_distribution<double> u(-3.0, 3.0), v(1e-3, 3.0);
  return {u(rng), half_sign(h) * v(rng)};
}

// K_ell(x, y) = pi^{-1/2} int_0^inf t^{-1/2} d/dx_ell p_t(x, y) dt, with the
// t integral in log variables and a centred x-derivative.
double riesz_via_heat(int ell, Point<2> x, const Point<2>& y) {
  const double h = 1e-5;
  auto dp = [&](double t) {
    Point<2> a = x, b = x;
    a[ell - 1] += h;
    b[ell - 1] -= h;
    return (heat_kernel_neumann<2>(t, a, y) - heat_kernel_neumann<2>(t, b, y)) / (2 * h);
  };
  const double lo = -14.0, hi = 16.0;
  const int n = 6000;
  const double du = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = std::exp(lo + i * du);
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s += w * std::sqrt(t) * dp(t);
  }
  return s * du / std::sqrt(std::numbers::pi);
}

}  // namespace

TEST(HeatKernel, FullGaussianAtCoincidentPoints) {
  EXPECT_NEAR(heat_kernel_full<2>(0.25, {0.3, -0.2}, {0.3, -0.2}), 1.0 / std::numbers::pi, 1e-15);
}

TEST(HeatKernel, FullSymmetricExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2), t(0.01, 2);
  for (int i = 0; i < 100; ++i) {
    const Point<2> x{u(rng), u(rng)}, y{u(rng), u(rng)};
    const double s = t(rng);
    EXPECT_EQ(heat_kernel_full<2>(s, x, y), heat_kernel_full<2>(s, y, x));
  }
}

TEST(HeatKernel, FullMassIsOne) {
  // midpoint rule on the box of radius 8 sqrt(t) around x
  for (double t : {0.1, 0.5, 1.0}) {
    const Point<2> x{0.2, -0.4};
    const double r = 8.0 * std::sqrt(t);
    const int m = 400;
    const double h = 2 * r / m;
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        s += heat_kernel_full<2>(t, x, {x[0] - r + (i + 0.5) * h, x[1] - r + (j + 0.5) * h});
    EXPECT_NEAR(s * h * h, 1.0, 1e-6);
  }
}

TEST(HeatKernel, NeumannGateAndBoundaryValue) {
  for (double t : {0.01, 0.3, 5.0}) EXPECT_EQ(heat_kernel_neumann<2>(t, {0, 1}, {0, -1}), 0.0);
  EXPECT_NEAR(heat_kernel_neumann<2>(0.25, {0, 0}, {0, 0}), 2.0 / std::numbers::pi, 1e-15);
}

TEST(HeatKernel, NeumannMassOnHalfPlane) {
  for (double t : {0.1, 1.0})
    for (double xn : {0.05, 0.5, 2.0}) {
      const Point<2> x{0.1, xn};
      const double r = 8.0 * std::sqrt(t);
      const int m = 400;
      const double hx = 2 * r / m, hy = (xn + r) / m;
      double s = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          s += heat_kernel_neumann<2>(t, x, {x[0] - r + (i + 0.5) * hx, (j + 0.5) * hy});
      EXPECT_NEAR(s * hx * hy, 1.0, 1e-6) << t << " " << xn;
    }
}

TEST(HeatKernel, NonPositiveTime) {
  EXPECT_THROW(heat_kernel_full<2>(0.0, {0, 1}, {0, 1}), Error);
  EXPECT_THROW(heat_kernel_neumann<2>(-1.0, {0, 1}, {0, 1}), Error);
}

TEST(RieszKernel, NormalComponentHandValue) {
  const KernelParams<2> kp(2);
  EXPECT_NEAR(kp.cn, kC2, 1e-16);
  EXPECT_NEAR(riesz_kernel(kp, {0, 1}, {0, 2}), 4.0 / (9.0 * std::numbers::pi), 1e-15);
}

TEST(RieszKernel, TangentialComponentHandValue) {
  const double want = -kC2 * (1.0 + std::pow(5.0, -1.5));
  EXPECT_NEAR(riesz_kernel(KernelParams<2>(1), {1, 1}, {0, 1}), want, 1e-15);
}

TEST(RieszKernel, CrossHalfPairsAreExactlyZero) {
  std::mt19937_64 rng(42);
  const KernelParams<2> k1(1), k2(2);
  for (int i = 0; i < 10000; ++i) {
    const auto x = random_in(rng, Half::plus);
    const auto y = random_in(rng, Half::minus);
    const auto a = (i % 2) ? x : y, b = (i % 2) ? y : x;
    EXPECT_EQ(riesz_kernel(k1, a, b), 0.0);
    EXPECT_EQ(riesz_kernel(k2, a, b), 0.0);
    EXPECT_EQ(heat_kernel_neumann<2>(0.5, a, b), 0.0);
  }
  EXPECT_EQ(riesz_kernel(k1, {3, 2}, {-1, -5}), 0.0);
}

TEST(RieszKernel, Singularity) {
  try {
    riesz_kernel(KernelParams<2>(1), {0.5, 0.5}, {0.5, 0.5});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "kernel singularity");
  }
  EXPECT_THROW(KernelParams<2>(3), Error);
}

TEST(RieszKernel, MatchesHeatIntegralOnBothHalves) {
  std::mt19937_64 rng(8);
  for (int ell : {1, 2})
    for (Half h : {Half::plus, Half::minus})
      for (int i = 0; i < 6; ++i) {
        const auto x = random_in(rng, h), y = random_in(rng, h);
        const double k = riesz_kernel(KernelParams<2>(ell), x, y);
        EXPECT_NEAR(riesz_via_heat(ell, x, y), k, 1e-6 * std::max(1.0, std::abs(k)))
            << ell << " " << to_string(h);
      }
}

TEST(RieszKernel, LowerHalfIsMirrorOfUpper) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_in(rng, Half::plus), y = random_in(rng, Half::plus);
    EXPECT_NEAR(riesz_kernel(KernelParams<2>(1), reflect<2>(x), reflect<2>(y)),
                riesz_kernel(KernelParams<2>(1), x, y), 1e-14);
    EXPECT_NEAR(riesz_kernel(KernelParams<2>(2), reflect<2>(x), reflect<2>(y)),
                -riesz_kernel(KernelParams<2>(2), x, y), 1e-14);
  }
}

TEST(RieszKernel, ThreeDimensionalConstant) {
  // C_3 = Gamma(2) / pi^2
  EXPECT_NEAR(KernelParams<3>(3).cn, 1.0 / (std::numbers::pi * std::numbers::pi), 1e-16);
}

TEST(CzBounds, SizeAtHandExample) {
  const auto c = cz_bounds_check(KernelParams<2>(2), {0, 1}, {0, 1}, {0, 2});
  EXPECT_TRUE(c.size_ok);
  EXPECT_NEAR(c.size_ratio, 4.0 / 9.0, 1e-14);
  EXPECT_EQ(c.smooth_ratio, 0.0);
}

TEST(CzBounds, MonteCarloSmoothness) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  int done = 0;
  for (int ell : {1, 2})
    while (done < 500 * ell) {
      const Half h = (rng() & 1) ? Half::plus : Half::minus;
      const auto x = random_in(rng, h), y = random_in(rng, h);
      const double r = distance<2>(x, y);
      const double th = 2 * std::numbers::pi * u(rng), rho = 0.5 * r * u(rng);
      const Point<2> xp{x[0] + rho * std::cos(th), x[1] + rho * std::sin(th)};
      if (half_of<2>(xp) != h || r == 0.0) continue;
      const auto c = cz_bounds_check(KernelParams<2>(ell), x, xp, y);
      EXPECT_TRUE(c.size_ok);
      EXPECT_TRUE(std::isfinite(c.smooth_ratio));
      EXPECT_LT(c.smooth_ratio, 100.0);
      ++done;
    }
}

TEST(CzBounds, PreconditionViolation) {
  EXPECT_THROW(cz_bounds_check(KernelParams<2>(1), {0, 1}, {0, 1.9}, {0, 2}), Error);
  EXPECT_THROW(cz_bounds_check(KernelParams<2>(1), {0, 1}, {0, 1}, {0, -2}), Error);
}

TEST(SignWitness, HandExample) {
  Cube<2> q;
  q.generation = 0;
  q.index = {0, 1};
  const KernelParams<2> kp(1);
  const auto w = sign_witness(q, kp, 16.0);
  EXPECT_DOUBLE_EQ(w.y0[0], 16.5);
  EXPECT_DOUBLE_EQ(w.y0[1], 1.5);
  EXPECT_NEAR(w.bound, 0.5 * kC2 / 256.0, 1e-16);
  const auto a = audit_sign_witness(q, kp, w, 20);
  EXPECT_TRUE(a.sign_constant);
  EXPECT_EQ(a.violations, 0u);
  EXPECT_EQ(a.pairs, 400u * ball_samples<2>(w.ball, 10).size());
}

TEST(SignWitness, SmallOffsetFailsSomewhere) {
  const KernelParams<2> kp(1);
  int failing = 0;
  for (int k = 0; k <= 3; ++k) {
    Cube<2> q;
    q.generation = k;
    q.index = {0, 4};
    failing += !audit_sign_witness(q, kp, sign_witness(q, kp, 1.0), 20).ok();
  }
  EXPECT_GT(failing, 0);
}

TEST(SignWitness, MirroredCubeHasMirroredWitness) {
  for (int ell : {1, 2}) {
    Cube<2> q;
    q.generation = 1;
    q.index = {3, 2};
    Cube<2> m = q;
    m.half = Half::minus;
    m.index[1] = -q.index[1] - 1;
    const auto a = sign_witness(q, KernelParams<2>(ell), 8.0);
    const auto b = sign_witness(m, KernelParams<2>(ell), 8.0);
    EXPECT_DOUBLE_EQ(b.y0[0], a.y0[0]);
    EXPECT_DOUBLE_EQ(b.y0[1], -a.y0[1]);
    EXPECT_EQ(b.bound, a.bound);
  }
}

TEST(SignWitness, CubeOutsideItsHalf) {
  Cube<2> q;
  q.index = {0, -1};
  EXPECT_THROW(sign_witness(q, KernelParams<2>(2)), Error);
}
