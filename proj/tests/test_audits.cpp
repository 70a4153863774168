#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nrl/audits.hpp"
#include "nrl/harness/families.hpp"

using namespace nrl;

namespace {

Box<2> box2(double x0, double x1, double y0, double y1) {
  Box<2> b;
  b.lo = {x0, y0};
  b.hi = {x1, y1};
  return b;
}

}  // namespace

TEST(ExactEnergy, IndicatorHandValue) {
  const auto f = symbols::from_function<2>("chi", [](const Point<2>& x) {
    return (x[0] >= 0 && x[0] < 1 && x[1] >= 0 && x[1] < 1) ? 1.0 : 0.0;
  });
  const auto sys = build_system<2>(Half::plus, {0, 0}, box2(0, 2, 0, 2), {-1, 0});
  EXPECT_NEAR(exact_energy_sum(f, sys, 2.0), 3.0 / 16.0, 1e-14);
}

TEST(ExactEnergy, LinearSymbolClosedForm) {
  // child means of x_1 sit s/4 away from the parent mean
  const auto b = symbols::linear<2>({1.0, 0.0});
  const double p = 4.0;
  const auto sys = build_system<2>(Half::plus, {1.0 / 3, 0}, Box<2>::cube(-2, 2), {-1, 3}, ShiftMode::adjacent);
  double want = 0.0;
  for (int k = -1; k < 3; ++k)
    want += static_cast<double>(sys.admissible(k).size()) * std::pow(dyadic_side(k) / 4.0, p);
  EXPECT_NEAR(exact_energy_sum(b, sys, p), want, 1e-12 * want);
}

TEST(ExactEnergy, AgreesWithGridRoute) {
  const auto b = symbols::gaussian<2>({0.2, 0.7}, 0.4);
  const auto sys = build_system<2>(Half::plus, {0, 0}, Box<2>::cube(-2, 2), {-1, 3});
  const auto g = make_grid(Box<2>::cube(-2, 2), 256);
  const double exact = exact_energy_sum(b, sys, 4.0);
  const double grid = dyadic_energy_sum(sample(b, g), sys, 4.0);
  EXPECT_LT(std::abs(grid / exact - 1.0), 0.02);
}

TEST(ExactEnergy, ControlsVanish) {
  for (Half h : {Half::plus, Half::minus}) {
    const auto sys = build_system<2>(h, {2.0 / 3, 1.0 / 3}, Box<2>::cube(-2, 2), {-1, 3}, ShiftMode::adjacent);
    EXPECT_LT(exact_energy_sum(symbols::per_half<2>(1, -0.5), sys, 4.0), 1e-40);
  }
}

TEST(HaarBound, RandomCubes) {
  std::mt19937_64 rng(13);
  const auto fam = non_degenerate(ratio_family<2>());
  for (int t = 0; t < 100; ++t) {
    Cube<2> q;
    q.generation = static_cast<int>(rng() % 5) - 1;
    q.half = (rng() & 1) ? Half::plus : Half::minus;
    q.index = {static_cast<std::int64_t>(rng() % 5) - 2,
               q.half == Half::plus ? static_cast<std::int64_t>(rng() % 3) : -1 - static_cast<std::int64_t>(rng() % 3)};
    const auto r = haar_bound_check(fam[rng() % fam.size()].symbol, q, 4.0);
    EXPECT_TRUE(r.ok()) << r.oscillation << " " << r.max_coefficient;
  }
}

TEST(HaarBound, ChildConstantFieldOnUnitSquare) {
  // child means (1, 0, 0, 0)
  const auto b = symbols::from_function<2>("corner", [](const Point<2>& x) {
    return (x[0] < 0.5 && x[1] < 0.5) ? 1.0 : 0.0;
  });
  Cube<2> q;
  const auto r = haar_bound_check(b, q, 2.0);
  // mean 1/4, oscillation sqrt((9/16 + 3/16)/4) = sqrt(3)/4
  EXPECT_NEAR(r.oscillation, std::sqrt(3.0) / 4.0, 1e-14);
  EXPECT_TRUE(r.ok());
  EXPECT_NEAR(r.constant, 6.0, 1e-15);
}

TEST(OscillationSum, LinearClosedForm) {
  const auto b = symbols::linear<2>({1.0, 0.0});
  const double p = 4.0;
  const auto sys = build_system<2>(Half::minus, {0, 0}, Box<2>::cube(-2, 2), {0, 2});
  double want = 0.0;
  for (int k = 0; k <= 2; ++k) {
    const double s = dyadic_side(k);
    const double per_cube = s * 2.0 * std::pow(s / 2.0, p + 1) / (p + 1);  // int_Q |x_1 - m|^p
    want += static_cast<double>(sys.admissible(k).size()) * std::pow(2.0, 2 * k) * per_cube;
  }
  EXPECT_NEAR(oscillation_sum(b, sys, p), want, 1e-12 * want);
}

TEST(DoubleIntegral, ControlsAndHomogeneity) {
  const auto g = make_grid(Box<2>::cube(-2, 2), 16);
  EXPECT_EQ(besov_double_integral(symbols::per_half<2>(2, -1), g, 4.0), 0.0);
  const auto b = symbols::gaussian<2>({0, 0.5}, 0.4);
  const double a = besov_double_integral(b, g, 4.0);
  EXPECT_NEAR(besov_double_integral(scaled(b, 2.0), g, 4.0), 16.0 * a, 1e-12 * a);
}

TEST(Nwo, ControlIsExactlyZeroAndCubesAreAccounted) {
  const auto sys = build_system<2>(Half::plus, {0, 0}, Box<2>::cube(-2, 2), {0, 2});
  std::size_t total = 0;
  for (int k = 0; k <= 2; ++k) total += sys.admissible(k).size();
  const auto r = nwo_sum(symbols::per_half<2>(1, -0.5), sys, KernelParams<2>(2), 2.0, 3, 4.0);
  EXPECT_EQ(r.total, 0.0);
  EXPECT_EQ(r.cubes + r.skipped, total);
  EXPECT_GT(r.cubes, 0u);
}

TEST(Nwo, HomogeneousOfDegreeP) {
  const auto sys = build_system<2>(Half::plus, {0, 0}, Box<2>::cube(-2, 2), {0, 2});
  const auto b = symbols::gaussian<2>({0, 0.8}, 0.3);
  const KernelParams<2> kp(1);
  const double a = nwo_sum(b, sys, kp, 2.0, 3, 4.0).total;
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(nwo_sum(scaled(b, 2.0), sys, kp, 2.0, 3, 4.0).total, 16.0 * a, 1e-10 * a);
}

TEST(GrandchildOscillation, LinearClosedForm) {
  // grandchild means of x_1 take 4 values spaced s/4, each 4 times
  const auto b = symbols::linear<2>({1.0, 0.0});
  for (int k : {0, 2}) {
    Cube<2> q;
    q.generation = k;
    q.index = {1, 0};
    EXPECT_NEAR(grandchild_oscillation(b, q), 5.0 * dyadic_side(k) / 16.0, 1e-14);
  }
}

TEST(GrandchildOscillation, StatisticGrowsForBump) {
  const auto b = symbols::gaussian<2>({0, 0.8}, 0.15);
  const auto sys = build_system<2>(Half::plus, {0, 0}, Box<2>::cube(-2, 2), {-1, 3});
  const auto g = oscillation_statistic_by_generation(b, sys, 2.0);
  ASSERT_EQ(g.size(), 5u);
  double cum = g[0];
  for (std::size_t i = 1; i < g.size(); ++i) {
    EXPECT_GT(g[i], 0.0);
    EXPECT_GT(cum + g[i], cum);
    cum += g[i];
  }
}
