#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "nrl/core.hpp"

namespace nrl {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton on P_n from the
/// Chebyshev initial guess).
inline Rule1D gauss_legendre(int n) {
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
inline Rule1D composite_gauss(double a, double b, int panels, int order) {
  const Rule1D base = gauss_legendre(order);
  Rule1D r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int i = 0; i < order; ++i) {
      r.nodes.push_back(lo + 0.5 * h * (base.nodes[i] + 1.0));
      r.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return r;
}

/// Composite rule on [a, b] whose panel edges include every breakpoint that
/// falls inside (so kinks at those points cost no accuracy).
inline Rule1D composite_gauss_with_breaks(double a, double b, double max_panel, int order,
                                          const std::vector<double>& breaks) {
  std::vector<double> cuts{a};
  for (double c : breaks)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  Rule1D r;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double len = cuts[s + 1] - cuts[s];
    const int panels = std::max(1, static_cast<int>(std::ceil(len / max_panel)));
    auto piece = composite_gauss(cuts[s], cuts[s + 1], panels, order);
    r.nodes.insert(r.nodes.end(), piece.nodes.begin(), piece.nodes.end());
    r.weights.insert(r.weights.end(), piece.weights.begin(), piece.weights.end());
  }
  return r;
}

/// Tensor-product Gauss-Legendre average of f over a box.
template <int D, class F>
double box_average(const Box<D>& box, const F& f, int order = 8, int panels = 2) {
  std::array<Rule1D, D> rules;
  for (int a = 0; a < D; ++a) rules[a] = composite_gauss(box.lo[a], box.hi[a], panels, order);
  const int m = order * panels;
  std::size_t total = 1;
  for (int a = 0; a < D; ++a) total *= m;
  double sum = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    Point<D> x;
    double w = 1.0;
    for (int a = 0; a < D; ++a) {
      const std::size_t i = rest % m;
      rest /= m;
      x[a] = rules[a].nodes[i];
      w *= rules[a].weights[i];
    }
    sum += w * f(x);
  }
  return sum / box.volume();
}

}  // namespace nrl
