#include <gtest/gtest.h>

#include <cmath>

#include "nrl/besov.hpp"
#include "nrl/harness/families.hpp"

using namespace nrl;

namespace {

const BesovParams kParams(0.5, 4.0, 4.0);

double heat(const Symbol<2>& b, int N, int per_decade) {
  const auto g = make_grid(Box<2>::cube(-2, 2), N);
  return besov_heat_norm(b, kParams, g, log_grid(1e-3, 10.0, per_decade));
}

double diff(const Symbol<2>& f, double r, int N, int radii, int dirs) {
  const auto g = make_grid(Box<2>::cube(-r, r), N);
  return besov_diff_norm(f, kParams, g, default_shifts(g, radii, dirs));
}

}  // namespace

TEST(EvenExtension, Examples) {
  const auto f = symbols::from_function<2>("x2", [](const Point<2>& x) { return x[1]; });
  const auto e = even_extension(f, Half::plus);
  for (double y : {-2.0, -0.3, 0.4, 1.7}) EXPECT_EQ(e(Point<2>{0.5, y}), std::abs(y));
  const auto c = even_extension(symbols::constant<2>(2.5), Half::minus);
  EXPECT_EQ(c(Point<2>{0.1, 0.9}), 2.5);
  EXPECT_EQ(c(Point<2>{0.1, -0.9}), 2.5);
}

TEST(EvenExtension, MirrorSymmetricExactly) {
  const auto b = symbols::odd_gaussian<2>({0.3, 0.6}, 0.4);
  for (Half h : {Half::plus, Half::minus}) {
    const auto e = even_extension(b, h);
    for (double x : {-1.0, 0.2})
      for (double y : {0.05, 0.5, 1.5}) EXPECT_EQ(e(Point<2>{x, y}), e(Point<2>{x, -y}));
  }
}

TEST(BesovParamsTest, RangeChecked) {
  EXPECT_THROW(BesovParams(1.0, 4, 4), Error);
  EXPECT_THROW(BesovParams(0.5, 0.5, 4), Error);
}

TEST(HeatNorm, PerHalfConstantIsZero) {
  EXPECT_NEAR(heat(symbols::per_half<2>(1.0, -2.0), 64, 8), 0.0, 1e-6);
  EXPECT_NEAR(heat(symbols::constant<2>(4.0), 64, 8), 0.0, 1e-6);
}

TEST(HeatNorm, HomogeneousOfDegreeOne) {
  const auto b = symbols::gaussian<2>({0, 0.8}, 0.3);
  const double a = heat(b, 64, 8), c = heat(scaled(b, 2.0), 64, 8);
  EXPECT_NEAR(c, 2.0 * a, 1e-10 * a);
}

TEST(HeatNorm, SelfRefinement) {
  const auto b = symbols::gaussian<2>({0, 0.8}, 0.3);
  const double coarse = heat(b, 64, 8), fine = heat(b, 128, 16);
  EXPECT_GT(fine, 0.0);
  EXPECT_TRUE(std::isfinite(fine));
  EXPECT_LT(std::abs(coarse / fine - 1.0), 0.05);
}

TEST(HeatNorm, EmptyTimeGrid) {
  const auto g = make_grid(Box<2>::cube(-1, 1), 8);
  EXPECT_THROW(besov_heat_norm(symbols::constant<2>(1.0), kParams, g, {}), Error);
}

TEST(DiffNorm, ConstantIsZero) { EXPECT_EQ(diff(symbols::constant<2>(3.0), 2, 32, 16, 16), 0.0); }

TEST(DiffNorm, GaussianSelfRefinement) {
  const auto f = symbols::gaussian<2>({0, 0}, std::sqrt(0.5));  // e^{-|x|^2}
  const double coarse = diff(f, 4, 64, 24, 16), fine = diff(f, 4, 128, 48, 32);
  EXPECT_TRUE(std::isfinite(fine));
  EXPECT_LT(std::abs(coarse / fine - 1.0), 0.05);
}

TEST(DiffNorm, TranslationInvariance) {
  const auto f = symbols::gaussian<2>({0, 0}, std::sqrt(0.5));
  // Shifts reaching past the bump's distance to the box edge would slide it
  // across the truncation boundary.
  const auto g = make_grid(Box<2>::cube(-5, 5), 64);
  const auto sg = polar_shifts<2>(2.0 * g.spacing[0], 1.0, 24, 16);
  const Point<2> v{2 * g.spacing[0], -3 * g.spacing[1]};
  const double a = besov_diff_norm(f, kParams, g, sg);
  const double b = besov_diff_norm(translated(f, v), kParams, g, sg);
  EXPECT_NEAR(a, b, 1e-8 * a);
}

TEST(DiffNorm, EmptyShiftGrid) {
  const auto g = make_grid(Box<2>::cube(-1, 1), 8);
  EXPECT_THROW(besov_diff_norm(symbols::constant<2>(1.0), kParams, g, ShiftGrid<2>{}), Error);
}

TEST(NeumannNorm, PerHalfConstantIsZero) {
  const auto g = make_grid(Box<2>::cube(-2, 2), 32);
  EXPECT_EQ(besov_neumann_norm(symbols::per_half<2>(1.0, 5.0), kParams, g, default_shifts(g, 16, 16)), 0.0);
}

TEST(NeumannNorm, SingleTermReduction) {
  const auto b = symbols::from_function<2>("x2+", [](const Point<2>& x) { return x[1] > 0 ? x[1] : 0.0; });
  const auto a = symbols::from_function<2>("|x2|", [](const Point<2>& x) { return std::abs(x[1]); });
  const auto g = make_grid(Box<2>::cube(-2, 2), 32);
  const auto sg = default_shifts(g, 16, 16);
  const double n = besov_neumann_norm(b, kParams, g, sg);
  EXPECT_TRUE(std::isfinite(n));
  EXPECT_GT(n, 0.0);
  EXPECT_NEAR(n, besov_diff_norm(a, kParams, g, sg), 1e-12 * n);
}

TEST(NeumannNorm, EquivalentToHeatRoute) {
  const auto g = make_grid(Box<2>::cube(-2, 2), 64);
  const auto sg = default_shifts(g, 24, 16);
  const auto ts = log_grid(1e-3, 10.0, 8);
  for (const auto& m : ratio_family<2>()) {
    if (m.control()) continue;
    const double h = besov_heat_norm(m.symbol, kParams, g, ts);
    const double d = besov_neumann_norm(m.symbol, kParams, g, sg);
    EXPECT_GE(h / d, 0.1) << m.id;
    EXPECT_LE(h / d, 10.0) << m.id;
  }
}

TEST(LogGrid, EndpointsAndSpacing) {
  const auto t = log_grid(1e-3, 10.0, 4);
  EXPECT_DOUBLE_EQ(t.front(), 1e-3);
  EXPECT_NEAR(t.back(), 10.0, 1e-12);
  EXPECT_EQ(t.size(), 17u);
  for (std::size_t i = 2; i < t.size(); ++i) EXPECT_NEAR(t[i] / t[i - 1], t[1] / t[0], 1e-12);
}
