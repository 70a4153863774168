#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "nrl/core.hpp"

namespace nrl {

/// The multiplier b of the commutator [b, R]: a closed-form evaluator
/// plus the metadata the discretizations need.
template <int D>
struct Symbol {
  std::string label;
  std::function<double(const Point<D>&)> eval;
  /// Optional closed-form gradient; central differences are used otherwise.
  std::function<Point<D>(const Point<D>&)> grad;
  /// Smallest length on which b varies (used to pick quadrature resolution).
  double length_scale = 1.0;
  /// Value b takes far from its support, per half-space. Besov routes work
  /// with b minus this background, which the Neumann Laplacian annihilates.
  double far_plus = 0.0;
  double far_minus = 0.0;
  /// True when b is constant on each half-space (the degenerate controls).
  bool per_half_constant = false;

  double operator()(const Point<D>& x) const { return eval(x); }

  double background(const Point<D>& x) const {
    return half_of<D>(x) == Half::plus ? far_plus : far_minus;
  }

  Point<D> gradient(const Point<D>& x, double step = 1e-5) const {
    if (grad) return grad(x);
    Point<D> g{};
    for (int i = 0; i < D; ++i) {
      Point<D> a = x, b = x;
      a[i] += step;
      b[i] -= step;
      g[i] = (eval(a) - eval(b)) / (2.0 * step);
    }
    return g;
  }
};

template <int D>
Symbol<D> scaled(const Symbol<D>& b, double c) {
  Symbol<D> r = b;
  r.label = b.label + "*" + std::to_string(c);
  auto f = b.eval;
  r.eval = [f, c](const Point<D>& x) { return c * f(x); };
  if (b.grad) {
    auto g = b.grad;
    r.grad = [g, c](const Point<D>& x) {
      auto v = g(x);
      for (double& e : v) e *= c;
      return v;
    };
  }
  r.far_plus = c * b.far_plus;
  r.far_minus = c * b.far_minus;
  return r;
}

template <int D>
Symbol<D> translated(const Symbol<D>& b, const Point<D>& v) {
  Symbol<D> r = b;
  r.label = b.label + "+shift";
  auto f = b.eval;
  r.eval = [f, v](const Point<D>& x) { return f(x - v); };
  if (b.grad) {
    auto g = b.grad;
    r.grad = [g, v](const Point<D>& x) { return g(x - v); };
  }
  return r;
}

namespace symbols {

template <int D>
Symbol<D> constant(double c) {
  Symbol<D> s;
  s.label = "const";
  s.eval = [c](const Point<D>&) { return c; };
  s.grad = [](const Point<D>&) { return Point<D>{}; };
  s.far_plus = s.far_minus = c;
  s.per_half_constant = true;
  return s;
}

/// c_plus on the upper half-space, c_minus on the lower one.
template <int D>
Symbol<D> per_half(double c_plus, double c_minus) {
  Symbol<D> s;
  s.label = "halfconst";
  s.eval = [c_plus, c_minus](const Point<D>& x) {
    return half_of<D>(x) == Half::plus ? c_plus : c_minus;
  };
  s.grad = [](const Point<D>&) { return Point<D>{}; };
  s.far_plus = c_plus;
  s.far_minus = c_minus;
  s.per_half_constant = true;
  return s;
}

/// amp * exp(-|x - c|^2 / (2 sigma^2)).
template <int D>
Symbol<D> gaussian(const Point<D>& c, double sigma, double amp = 1.0) {
  Symbol<D> s;
  s.label = "gauss";
  const double inv = 1.0 / (2.0 * sigma * sigma);
  s.eval = [c, inv, amp](const Point<D>& x) { return amp * std::exp(-norm2<D>(x - c) * inv); };
  s.grad = [c, inv, amp](const Point<D>& x) {
    const auto d = x - c;
    const double v = amp * std::exp(-norm2<D>(d) * inv);
    Point<D> g;
    for (int i = 0; i < D; ++i) g[i] = -2.0 * inv * d[i] * v;
    return g;
  };
  s.length_scale = sigma;
  return s;
}

/// Gaussian at c minus its mirror image: odd under x_n -> -x_n.
template <int D>
Symbol<D> odd_gaussian(const Point<D>& c, double sigma, double amp = 1.0) {
  auto up = gaussian<D>(c, sigma, amp);
  auto dn = gaussian<D>(reflect<D>(c), sigma, amp);
  Symbol<D> s;
  s.label = "oddgauss";
  s.eval = [up, dn](const Point<D>& x) { return up.eval(x) - dn.eval(x); };
  s.grad = [up, dn](const Point<D>& x) { return up.grad(x) - dn.grad(x); };
  s.length_scale = sigma;
  return s;
}

/// Linear function g . x (no compact support; used in local tests only).
template <int D>
Symbol<D> linear(const Point<D>& g) {
  Symbol<D> s;
  s.label = "linear";
  s.eval = [g](const Point<D>& x) {
    double v = 0.0;
    for (int i = 0; i < D; ++i) v += g[i] * x[i];
    return v;
  };
  s.grad = [g](const Point<D>&) { return g; };
  return s;
}

template <int D>
Symbol<D> from_function(std::string label, std::function<double(const Point<D>&)> f,
                        double length_scale = 1.0) {
  Symbol<D> s;
  s.label = std::move(label);
  s.eval = std::move(f);
  s.length_scale = length_scale;
  return s;
}

}  // namespace symbols
}  // namespace nrl
