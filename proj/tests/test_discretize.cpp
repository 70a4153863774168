#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nrl/besov.hpp"
#include "nrl/discretize.hpp"

using namespace nrl;

namespace {

// K_2 on the upper half-plane from the closed form, written out independently.
double k2_upper(const Point<2>& x, const Point<2>& y) {
  const double c = 1.0 / (2.0 * std::numbers::pi);
  const double d1 = x[0] - y[0], d2 = x[1] - y[1], s2 = x[1] + y[1];
  return -c * (d2 / std::pow(d1 * d1 + d2 * d2, 1.5) + s2 / std::pow(d1 * d1 + s2 * s2, 1.5));
}

double operator_norm(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m.cols()).normalized();
  double lam = 0.0;
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd w = m.transpose() * (m * v);
    lam = w.norm();
    v = w / lam;
  }
  return std::sqrt(lam);
}

QuadratureGrid<2> two_nodes() {
  QuadratureGrid<2> g;
  g.box.lo = {0, 0};
  g.box.hi = {0.5, 1};
  g.per_axis = 2;
  g.spacing = {0.5, 0.5};
  g.weight = 1.0;
  g.nodes = {Point<2>{0.25, 0.25}, Point<2>{0.25, 0.75}};
  g.halves = {Half::plus, Half::plus};
  return g;
}

}  // namespace

TEST(AssembleCommutator, PerHalfConstantGivesZeroMatrix) {
  for (int N : {16, 32}) {
    const auto g = make_grid(Box<2>::cube(-2, 2), N);
    for (int ell : {1, 2})
      for (const auto& b : {symbols::per_half<2>(1.0, -0.5), symbols::constant<2>(3.0)}) {
        const auto m = assemble_commutator(b, ell, g);
        EXPECT_TRUE((m.matrix.array() == 0.0).all());
      }
  }
}

TEST(AssembleCommutator, TwoNodeHandExample) {
  const auto g = two_nodes();
  const auto b = symbols::from_function<2>("x2", [](const Point<2>& x) { return x[1]; });
  const auto m = assemble_commutator(b, 2, g);
  const auto& x1 = g.nodes[0];
  const auto& x2 = g.nodes[1];
  EXPECT_EQ(m.matrix(0, 0), 0.0);
  EXPECT_EQ(m.matrix(1, 1), 0.0);
  EXPECT_NEAR(m.matrix(0, 1), -0.5 * k2_upper(x1, x2), 1e-15);
  EXPECT_NEAR(m.matrix(1, 0), 0.5 * k2_upper(x2, x1), 1e-15);
}

TEST(AssembleCommutator, OddInSymbol) {
  const auto g = make_grid(Box<2>::cube(-1, 1), 8);
  const auto b = symbols::gaussian<2>({0.1, 0.3}, 0.4);
  const auto m = assemble_commutator(b, 1, g);
  const auto n = assemble_commutator(scaled(b, -1.0), 1, g);
  EXPECT_TRUE((m.matrix + n.matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST(AssembleCommutator, EntriesAreSymbolDifferenceTimesRiesz) {
  const auto g = make_grid(Box<2>::cube(-1, 1), 8);
  const auto b = symbols::odd_gaussian<2>({0.2, 0.5}, 0.3);
  const auto r = assemble_riesz(2, g);
  const auto m = assemble_commutator(b, 2, g);
  for (Eigen::Index j = 0; j < m.size(); ++j)
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double want = (b(g.nodes[i]) - b(g.nodes[j])) * r.matrix(i, j);
      EXPECT_NEAR(m.matrix(i, j), want, 1e-15 * (1.0 + std::abs(want)));
    }
}

TEST(AssembleRiesz, CrossHalfBlocksVanish) {
  const auto g = make_grid(Box<2>::cube(-2, 2), 16);
  for (int ell : {1, 2}) {
    const auto m = assemble_riesz(ell, g);
    for (Eigen::Index j = 0; j < m.size(); ++j)
      for (Eigen::Index i = 0; i < m.size(); ++i)
        if (g.halves[i] != g.halves[j]) {
          EXPECT_EQ(m.matrix(i, j), 0.0);
        }
  }
}

TEST(AssembleRiesz, OperatorNormStableUnderRefinement) {
  for (int ell : {1, 2}) {
    std::vector<double> norms;
    for (int N : {16, 32, 64}) norms.push_back(operator_norm(assemble_riesz(ell, make_grid(Box<2>::cube(-2, 2), N)).matrix));
    const auto [lo, hi] = std::minmax_element(norms.begin(), norms.end());
    EXPECT_LE(*hi / *lo, 3.0) << ell;
  }
}

TEST(AssembleRiesz, SymmetricPartIsReflectedTerm) {
  const auto g = make_grid(Box<2>::cube(-1, 1), 8);
  for (int ell : {1, 2}) {
    const KernelParams<2> kp(ell);
    const auto m = assemble_riesz(kp, g);
    for (Eigen::Index j = 0; j < m.size(); ++j)
      for (Eigen::Index i = 0; i < j; ++i) {
        if (g.halves[i] != g.halves[j]) continue;
        const double rij = riesz_terms(kp, g.nodes[i], g.nodes[j]).reflected * g.weight;
        const double rji = riesz_terms(kp, g.nodes[j], g.nodes[i]).reflected * g.weight;
        const double sym = m.matrix(i, j) + m.matrix(j, i);
        EXPECT_NEAR(sym, rij + rji, 1e-13);
        // normal component: the reflected term is symmetric; tangential: odd
        if (ell == 2) {
          EXPECT_NEAR(sym, 2.0 * rij, 1e-13);
        } else {
          EXPECT_NEAR(sym, 0.0, 1e-13);
        }
      }
  }
}

TEST(Semigroup, ConservesOnesInInterior) {
  const auto g = make_grid(Box<2>::cube(-2, 2), 64);
  const auto f = sample_fn<2>([](const Point<2>& x) { return x[1] > 0 ? 1.0 : 0.0; }, g);
  const auto u = apply_semigroup(f, 0.01);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& x = g.nodes[i];
    if (x[1] > 0 && std::abs(x[0]) < 1.0 && x[1] < 1.0) {
      EXPECT_NEAR(u.values[i], 1.0, 1e-6);
    }
    if (x[1] < 0) {
      EXPECT_EQ(u.values[i], 0.0);
    }
  }
}

TEST(Semigroup, AgreesWithEvenExtensionRoute) {
  const auto g = make_grid(Box<2>::cube(-4, 4), 64);
  const auto b = symbols::gaussian<2>({0.3, 0.4}, 0.5);
  const auto f = sample_fn<2>([&](const Point<2>& x) { return x[1] > 0 ? b(x) : 0.0; }, g);
  const auto fe = sample(even_extension(b, Half::plus), g);
  for (double t : {0.1, 0.4, 1.0}) {
    const auto u = apply_semigroup(f, t);
    const auto v = apply_semigroup(fe, t, HeatKind::full);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto& x = g.nodes[i];
      if (x[1] > 0 && norm<2>(x) < 4.0 - 8.0 * std::sqrt(t)) {
        EXPECT_NEAR(u.values[i], v.values[i], 1e-6);
      }
    }
  }
}

TEST(Semigroup, SeparableMatchesDense) {
  const auto g = make_grid(Box<2>::cube(-2, 2), 16);
  const auto f = sample(symbols::odd_gaussian<2>({0.0, 0.5}, 0.4), g);
  for (auto kind : {HeatKind::neumann, HeatKind::full, HeatKind::neumann_flipped}) {
    const auto a = apply_semigroup(f, 0.2, kind);
    const auto b = apply_semigroup_dense(f, 0.2, kind);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-13);
  }
}

TEST(Semigroup, FlippedMirrorBreaksConservation) {
  const auto g = make_grid(Box<2>::cube(-2, 2), 64);
  const auto f = sample_fn<2>([](const Point<2>& x) { return x[1] > 0 ? 1.0 : 0.0; }, g);
  const auto u = apply_semigroup(f, 0.1, HeatKind::neumann_flipped);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.nodes[i][1] > 0 && g.nodes[i][1] < 0.5 && std::abs(g.nodes[i][0]) < 0.5)
      worst = std::max(worst, std::abs(u.values[i] - 1.0));
  EXPECT_GT(worst, 1e-2);
}

TEST(Semigroup, NonPositiveTime) {
  const auto g = make_grid(Box<2>::cube(-1, 1), 4);
  const auto f = sample(symbols::constant<2>(1.0), g);
  EXPECT_THROW(apply_semigroup(f, 0.0), Error);
  EXPECT_THROW(apply_semigroup_dense(f, -1.0), Error);
}
