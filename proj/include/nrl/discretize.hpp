#pragma once

// Dense matrix discretizations of the Riesz transforms and their commutators
// on a QuadratureGrid, and the heat semigroup applied to sampled fields.

#include <string>
#include <utility>

#include <Eigen/Dense>

#include "nrl/grid.hpp"
#include "nrl/kernels.hpp"
#include "nrl/symbol.hpp"

namespace nrl {

struct OperatorMatrix {
  Eigen::MatrixXd matrix;
  std::string symbol;
  int ell = 0;
  int dim = 0;
  int per_axis = 0;
  double weight = 0.0;

  Eigen::Index size() const { return matrix.rows(); }
};

/// Entry (i, j) = (b(x_i) - b(x_j)) K_ell(x_i, x_j) w, zero diagonal.
template <int D>
OperatorMatrix assemble_commutator(const Symbol<D>& b, const KernelParams<D>& kp,
                                   const QuadratureGrid<D>& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<double> bv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) bv[i] = b(grid.nodes[i]);
  OperatorMatrix m{Eigen::MatrixXd::Zero(n, n), b.label, kp.ell, D, grid.per_axis, grid.weight};
  const double w = grid.weight;
  parallel_for(grid.size(), [&](std::size_t j) {
    const auto& y = grid.nodes[j];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (i == j) continue;
      const double db = bv[i] - bv[j];
      if (db == 0.0) continue;
      m.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          db * riesz_kernel(kp, grid.nodes[i], y) * w;
    }
  });
  return m;
}

template <int D>
OperatorMatrix assemble_commutator(const Symbol<D>& b, int ell, const QuadratureGrid<D>& grid) {
  return assemble_commutator(b, KernelParams<D>(ell), grid);
}

/// Entry (i, j) = K_ell(x_i, x_j) w, zero diagonal.
template <int D>
OperatorMatrix assemble_riesz(const KernelParams<D>& kp, const QuadratureGrid<D>& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  OperatorMatrix m{Eigen::MatrixXd::Zero(n, n), "riesz", kp.ell, D, grid.per_axis, grid.weight};
  const double w = grid.weight;
  parallel_for(grid.size(), [&](std::size_t j) {
    const auto& y = grid.nodes[j];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (i == j) continue;
      m.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          riesz_kernel(kp, grid.nodes[i], y) * w;
    }
  });
  return m;
}

template <int D>
OperatorMatrix assemble_riesz(int ell, const QuadratureGrid<D>& grid) {
  return assemble_riesz(KernelParams<D>(ell), grid);
}

/// `neumann_flipped` negates the mirror term; it exists so audits can show
/// they detect a corrupted kernel.
enum class HeatKind { neumann, full, neumann_flipped };

/// 1-D factor matrix of the semigroup along one axis, quadrature weight folded in.
template <int D>
Eigen::MatrixXd heat_axis_matrix(const QuadratureGrid<D>& grid, int axis, double t, HeatKind kind) {
  const int n = grid.per_axis;
  Eigen::MatrixXd g(n, n);
  const double h = grid.spacing[axis];
  const bool neumann = kind != HeatKind::full && axis == D - 1;
  const double refl = kind == HeatKind::neumann_flipped ? -1.0 : 1.0;
  for (int j = 0; j < n; ++j) {
    const double y = grid.coord(axis, j);
    for (int i = 0; i < n; ++i) {
      const double x = grid.coord(axis, i);
      g(i, j) = h * (neumann ? heat_factor_neumann(t, x, y, refl) : heat_factor(t, x - y));
    }
  }
  return g;
}

/// Applies a 1-D matrix along one axis of a field stored axis-0-fastest.
template <int D>
void apply_along_axis(std::vector<double>& data, const QuadratureGrid<D>& grid, int axis,
                      const Eigen::MatrixXd& g) {
  const Eigen::Index n = grid.per_axis;
  Eigen::Index inner = 1, outer = 1;
  for (int a = 0; a < axis; ++a) inner *= n;
  for (int a = axis + 1; a < D; ++a) outer *= n;
  std::vector<double> out(data.size());
  for (Eigen::Index o = 0; o < outer; ++o) {
    Eigen::Map<const Eigen::MatrixXd> x(data.data() + o * inner * n, inner, n);
    Eigen::Map<Eigen::MatrixXd> y(out.data() + o * inner * n, inner, n);
    y.noalias() = x * g.transpose();
  }
  data.swap(out);
}

/// e^{-t Delta_N} f on the grid: sum_j p_{t,N}(x_i, x_j) f(x_j) w, computed as a
/// product of 1-D factors.
template <int D>
SampledField<D> apply_semigroup(const SampledField<D>& f, double t, HeatKind kind = HeatKind::neumann) {
  require(t > 0.0, "semigroup needs t > 0");
  const auto& grid = *f.grid;
  SampledField<D> out = f;
  for (int a = 0; a < D; ++a) apply_along_axis(out.values, grid, a, heat_axis_matrix(grid, a, t, kind));
  return out;
}

/// Same sum evaluated directly from the D-dimensional kernel (reference route).
template <int D>
SampledField<D> apply_semigroup_dense(const SampledField<D>& f, double t,
                                      HeatKind kind = HeatKind::neumann) {
  require(t > 0.0, "semigroup needs t > 0");
  const auto& grid = *f.grid;
  SampledField<D> out{f.grid, std::vector<double>(grid.size())};
  parallel_for(grid.size(), [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double p = kind == HeatKind::full
                           ? heat_kernel_full<D>(t, grid.nodes[i], grid.nodes[j])
                           : heat_kernel_neumann<D>(t, grid.nodes[i], grid.nodes[j],
                                                    kind == HeatKind::neumann_flipped ? -1.0 : 1.0);
      s += p * f.values[j];
    }
    out.values[i] = s * grid.weight;
  });
  return out;
}

}  // namespace nrl
