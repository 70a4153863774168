#pragma once

// Besov norms through the Neumann heat semigroup and through difference
// quotients of even extensions.

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "nrl/discretize.hpp"
#include "nrl/grid.hpp"
#include "nrl/symbol.hpp"

namespace nrl {

struct BesovParams {
  double alpha = 0.5;
  double p = 4.0;
  double q = 4.0;

  BesovParams() = default;
  BesovParams(double a, double pe, double qe) : alpha(a), p(pe), q(qe) {
    require(alpha > 0.0 && alpha < 1.0, "Besov smoothness must lie in (0, 1)");
    require(p >= 1.0 && q >= 1.0, "Besov exponents must be at least 1");
  }
};

/// f on the chosen half-space, f(x~) on the mirror one.
template <int D>
Symbol<D> even_extension(const Symbol<D>& f, Half half) {
  Symbol<D> e = f;
  e.label = f.label + "_e" + (half == Half::plus ? "+" : "-");
  auto fn = f.eval;
  e.eval = [fn, half](const Point<D>& x) { return fn(half_of<D>(x) == half ? x : reflect<D>(x)); };
  if (f.grad) {
    auto g = f.grad;
    e.grad = [g, half](const Point<D>& x) {
      if (half_of<D>(x) == half) return g(x);
      auto v = g(reflect<D>(x));
      v[D - 1] = -v[D - 1];
      return v;
    };
  } else {
    e.grad = nullptr;
  }
  const double far = half == Half::plus ? f.far_plus : f.far_minus;
  e.far_plus = e.far_minus = far;
  e.per_half_constant = f.per_half_constant;
  return e;
}

/// Log-spaced nodes from lo to hi inclusive with `per_decade` nodes per decade.
inline std::vector<double> log_grid(double lo, double hi, int per_decade) {
  require(lo > 0.0 && hi > lo && per_decade >= 1, "bad log grid");
  const double decades = std::log10(hi / lo);
  const int n = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return out;
}

/// Integrand samples behind a Besov norm (for diagnostics).
struct BesovProfile {
  std::vector<double> nodes;      ///< t values, or shift radii
  std::vector<double> integrand;  ///< per-node contribution before the outer power
  double norm = 0.0;
};

template <int D>
double grid_lp_norm(const std::vector<double>& v, const QuadratureGrid<D>& grid, double p,
                    std::optional<Half> only = std::nullopt) {
  double top = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!only || grid.halves[i] == *only) top = std::max(top, std::abs(v[i]));
  if (top == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!only || grid.halves[i] == *only) s += std::pow(std::abs(v[i]) / top, p);
  return top * std::pow(s * grid.weight, 1.0 / p);
}

struct HeatOptions {
  double log_step = 0.05;
  /// Restrict the L^p norm to one half-space.
  std::optional<Half> only;
};

/// (int (t^-alpha ||t Delta_N e^{-t Delta_N} b||_p)^q dt/t)^{1/q}, with
/// t Delta_N e^{-t Delta_N} b = -d/d(log t) e^{-t Delta_N} b by centred
/// differences and the trapezoid rule in log t. The per-half background of b
/// is removed first, since the Neumann Laplacian annihilates it.
template <int D>
BesovProfile besov_heat_profile(const Symbol<D>& b, const BesovParams& bp,
                                const QuadratureGrid<D>& grid, const std::vector<double>& t_grid,
                                const HeatOptions& opt = {}) {
  require(!t_grid.empty(), "empty t grid");
  auto u0 = sample_fn<D>([&b](const Point<D>& x) { return b(x) - b.background(x); }, grid);
  BesovProfile prof;
  prof.nodes = t_grid;
  prof.integrand.assign(t_grid.size(), 0.0);
  const double h = opt.log_step;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const auto up = apply_semigroup(u0, t * std::exp(h));
    const auto dn = apply_semigroup(u0, t * std::exp(-h));
    std::vector<double> g(grid.size());
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = -(up.values[j] - dn.values[j]) / (2.0 * h);
    const double val = std::pow(t, -bp.alpha) * grid_lp_norm(g, grid, bp.p, opt.only);
    prof.integrand[i] = std::pow(val, bp.q);
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
    total += 0.5 * (prof.integrand[i] + prof.integrand[i + 1]) * std::log(t_grid[i + 1] / t_grid[i]);
  prof.norm = std::pow(total, 1.0 / bp.q);
  return prof;
}

template <int D>
double besov_heat_norm(const Symbol<D>& b, const BesovParams& bp, const QuadratureGrid<D>& grid,
                       const std::vector<double>& t_grid, const HeatOptions& opt = {}) {
  return besov_heat_profile(b, bp, grid, t_grid, opt).norm;
}

/// Shift vectors with quadrature weights for integrals over R^D.
template <int D>
struct ShiftGrid {
  std::vector<Point<D>> shifts;
  std::vector<double> weights;
  std::vector<double> radii;
};

/// Log-uniform radii on [r_min, r_max] times uniform directions. The measure
/// r^{D-1} dr dsigma becomes r^D d(log r) dsigma. In D = 2 the directions are
/// equally spaced angles; otherwise the cube-surface lattice projected to the
/// sphere, with equal weights.
template <int D>
ShiftGrid<D> polar_shifts(double r_min, double r_max, int n_radii, int n_dirs) {
  require(r_min > 0.0 && r_max > r_min && n_radii >= 1 && n_dirs >= 1, "bad shift grid");
  std::vector<Point<D>> dirs;
  if constexpr (D == 1) {
    dirs = {Point<D>{1.0}, Point<D>{-1.0}};
  } else if constexpr (D == 2) {
    for (int a = 0; a < n_dirs; ++a) {
      const double th = 2.0 * std::numbers::pi * (a + 0.5) / n_dirs;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
  } else {
    const int m = std::max(2, n_dirs);
    std::size_t total = 1;
    for (int a = 0; a < D; ++a) total *= m;
    for (std::size_t f = 0; f < total; ++f) {
      std::size_t rest = f;
      Point<D> v;
      for (int a = 0; a < D; ++a) {
        const int i = static_cast<int>(rest % m);
        rest /= m;
        v[a] = -1.0 + (2.0 * i + 1.0) / m;
      }
      // keep points whose largest coordinate sits on the outer shell
      double mx = 0.0;
      for (double c : v) mx = std::max(mx, std::abs(c));
      if (std::abs(mx - (1.0 - 1.0 / m)) > 1e-12) continue;
      const double nv = norm<D>(v);
      for (double& c : v) c /= nv;
      dirs.push_back(v);
    }
  }
  const double sphere =
      2.0 * std::pow(std::numbers::pi, 0.5 * D) / std::tgamma(0.5 * D);  // surface area
  const double dw = sphere / static_cast<double>(dirs.size());
  const double dlog = std::log(r_max / r_min) / n_radii;
  ShiftGrid<D> sg;
  for (int i = 0; i < n_radii; ++i) {
    const double r = r_min * std::exp((i + 0.5) * dlog);
    for (const auto& d : dirs) {
      Point<D> s;
      for (int a = 0; a < D; ++a) s[a] = r * d[a];
      sg.shifts.push_back(s);
      sg.weights.push_back(std::pow(r, D) * dlog * dw);
      sg.radii.push_back(r);
    }
  }
  return sg;
}

/// Default truncation: |shift| from two grid spacings to the box diagonal.
template <int D>
ShiftGrid<D> default_shifts(const QuadratureGrid<D>& grid, int n_radii = 48, int n_dirs = 32) {
  double h = 0.0;
  for (int a = 0; a < D; ++a) h = std::max(h, grid.spacing[a]);
  return polar_shifts<D>(2.0 * h, grid.box.diagonal(), n_radii, n_dirs);
}

/// (int ||f(. + s) - f||_p^q / |s|^{D + q alpha} ds)^{1/q}, the L^p norm taken
/// over the grid box with f evaluated in closed form at the shifted points.
template <int D>
BesovProfile besov_diff_profile(const Symbol<D>& f, const BesovParams& bp,
                                const QuadratureGrid<D>& grid, const ShiftGrid<D>& sg) {
  require(!sg.shifts.empty(), "empty shift grid");
  for (const auto& s : sg.shifts) require(norm<D>(s) > 0.0, "shift grid contains 0");
  std::vector<double> base(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) base[i] = f(grid.nodes[i]);
  BesovProfile prof;
  prof.nodes = sg.radii;
  prof.integrand.assign(sg.shifts.size(), 0.0);
  parallel_for(sg.shifts.size(), [&](std::size_t k) {
    const auto& s = sg.shifts[k];
    std::vector<double> d(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) d[i] = f(grid.nodes[i] + s) - base[i];
    const double lp = grid_lp_norm(d, grid, bp.p);
    prof.integrand[k] = sg.weights[k] * std::pow(lp, bp.q) / std::pow(norm<D>(s), D + bp.q * bp.alpha);
  });
  prof.norm = std::pow(ordered_sum(prof.integrand), 1.0 / bp.q);
  return prof;
}

template <int D>
double besov_diff_norm(const Symbol<D>& f, const BesovParams& bp, const QuadratureGrid<D>& grid,
                       const ShiftGrid<D>& sg) {
  return besov_diff_profile(f, bp, grid, sg).norm;
}

/// Sum of the difference norms of the two even extensions b_{+,e}, b_{-,e}.
template <int D>
double besov_neumann_norm(const Symbol<D>& b, const BesovParams& bp, const QuadratureGrid<D>& grid,
                          const ShiftGrid<D>& sg) {
  return besov_diff_norm(even_extension(b, Half::plus), bp, grid, sg) +
         besov_diff_norm(even_extension(b, Half::minus), bp, grid, sg);
}

}  // namespace nrl
