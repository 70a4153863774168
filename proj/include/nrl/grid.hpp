#pragma once

#include <cstdint>
#include <vector>

#include "nrl/core.hpp"
#include "nrl/symbol.hpp"

namespace nrl {

/// Cell-centred tensor grid with N nodes per axis over a box. Node index is
/// i_0 + N i_1 + N^2 i_2 + ..., axis 0 fastest. Uniform weight per node.
template <int D>
struct QuadratureGrid {
  Box<D> box;
  int per_axis = 0;
  Point<D> spacing{};
  double weight = 0.0;
  std::vector<Point<D>> nodes;
  std::vector<Half> halves;

  std::size_t size() const { return nodes.size(); }

  /// Coordinate of node i along one axis.
  double coord(int axis, int i) const { return box.lo[axis] + (i + 0.5) * spacing[axis]; }

  std::size_t flat(const std::array<int, D>& idx) const {
    std::size_t f = 0, stride = 1;
    for (int a = 0; a < D; ++a) {
      f += stride * static_cast<std::size_t>(idx[a]);
      stride *= per_axis;
    }
    return f;
  }

  std::array<int, D> multi(std::size_t f) const {
    std::array<int, D> idx;
    for (int a = 0; a < D; ++a) {
      idx[a] = static_cast<int>(f % per_axis);
      f /= per_axis;
    }
    return idx;
  }

  /// True when x_n -> -x_n maps the node set onto itself.
  bool mirror_symmetric() const {
    return std::abs(box.lo[D - 1] + box.hi[D - 1]) <= 1e-12 * box.side(D - 1);
  }

  /// Index of the mirror image of node f (mirror_symmetric() grids only).
  std::size_t mirror(std::size_t f) const {
    auto idx = multi(f);
    idx[D - 1] = per_axis - 1 - idx[D - 1];
    return flat(idx);
  }
};

template <int D>
QuadratureGrid<D> make_grid(const Box<D>& box, int per_axis) {
  require(per_axis >= 4, "grid needs at least 4 nodes per axis");
  require(per_axis % 2 == 0, "grid needs an even node count per axis");
  require(!box.empty(), "degenerate domain");
  QuadratureGrid<D> g;
  g.box = box;
  g.per_axis = per_axis;
  g.weight = 1.0;
  for (int a = 0; a < D; ++a) {
    g.spacing[a] = box.side(a) / per_axis;
    g.weight *= g.spacing[a];
  }
  std::size_t total = 1;
  for (int a = 0; a < D; ++a) total *= per_axis;
  g.nodes.resize(total);
  g.halves.resize(total);
  for (std::size_t f = 0; f < total; ++f) {
    const auto idx = g.multi(f);
    Point<D> x;
    for (int a = 0; a < D; ++a) x[a] = g.coord(a, idx[a]);
    require(x[D - 1] != 0.0, "grid node on the interface");
    g.nodes[f] = x;
    g.halves[f] = half_of<D>(x);
  }
  return g;
}

/// Values of a function at every node of a grid.
template <int D>
struct SampledField {
  const QuadratureGrid<D>* grid = nullptr;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

template <int D>
SampledField<D> sample(const Symbol<D>& b, const QuadratureGrid<D>& grid) {
  SampledField<D> f{&grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = b(grid.nodes[i]);
    require(std::isfinite(v), "symbol is not finite at a grid node");
    f.values[i] = v;
  }
  return f;
}

template <int D, class F>
SampledField<D> sample_fn(const F& fn, const QuadratureGrid<D>& grid) {
  SampledField<D> f{&grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) f.values[i] = fn(grid.nodes[i]);
  return f;
}

}  // namespace nrl
