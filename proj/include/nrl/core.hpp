#pragma once

// Shared vocabulary for the nrl headers: points, boxes, half-space tags,
// the error type, and a deterministic parallel-for.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace nrl {

/// Every precondition failure in the library is reported as an nrl::Error
/// whose what() carries the short diagnostic ("degenerate domain", ...).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw Error(msg);
}

/// A point of R^D. A distinct type (rather than an alias) so that D deduces
/// as int and operators are found by argument-dependent lookup.
template <int D>
struct Point : std::array<double, D> {};

/// Upper (x_n > 0) or lower (x_n < 0) half-space.
enum class Half { plus, minus };

inline const char* to_string(Half h) { return h == Half::plus ? "plus" : "minus"; }

inline double half_sign(Half h) { return h == Half::plus ? 1.0 : -1.0; }

/// Half-space containing the point, deciding x_n == 0 as plus.
template <int D>
Half half_of(const Point<D>& x) {
  return x[D - 1] >= 0.0 ? Half::plus : Half::minus;
}

/// Reflection across the interface: (x', x_n) -> (x', -x_n).
template <int D>
Point<D> reflect(Point<D> x) {
  x[D - 1] = -x[D - 1];
  return x;
}

template <int D>
double norm2(const Point<D>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

template <int D>
double norm(const Point<D>& x) {
  return std::sqrt(norm2<D>(x));
}

template <int D>
Point<D> operator-(const Point<D>& a, const Point<D>& b) {
  Point<D> r;
  for (int i = 0; i < D; ++i) r[i] = a[i] - b[i];
  return r;
}

template <int D>
Point<D> operator+(const Point<D>& a, const Point<D>& b) {
  Point<D> r;
  for (int i = 0; i < D; ++i) r[i] = a[i] + b[i];
  return r;
}

template <int D>
Point<D> operator*(double c, Point<D> a) {
  for (double& v : a) v *= c;
  return a;
}

template <int D>
double distance(const Point<D>& a, const Point<D>& b) {
  return norm<D>(a - b);
}

/// Axis-aligned box [lo, hi) in R^D.
template <int D>
struct Box {
  Point<D> lo{};
  Point<D> hi{};

  double side(int axis) const { return hi[axis] - lo[axis]; }

  double volume() const {
    double v = 1.0;
    for (int i = 0; i < D; ++i) v *= side(i);
    return v;
  }

  double diagonal() const {
    double s = 0.0;
    for (int i = 0; i < D; ++i) s += side(i) * side(i);
    return std::sqrt(s);
  }

  bool contains(const Point<D>& x) const {
    for (int i = 0; i < D; ++i)
      if (x[i] < lo[i] || x[i] >= hi[i]) return false;
    return true;
  }

  /// `tol` absorbs rounding in vertex arithmetic (edges within tol count as equal).
  bool contains_box(const Box& b, double tol = 0.0) const {
    for (int i = 0; i < D; ++i)
      if (b.lo[i] < lo[i] - tol || b.hi[i] > hi[i] + tol) return false;
    return true;
  }

  /// Open overlap of more than tol in every axis.
  bool intersects(const Box& b, double tol = 0.0) const {
    for (int i = 0; i < D; ++i)
      if (b.hi[i] <= lo[i] + tol || b.lo[i] >= hi[i] - tol) return false;
    return true;
  }

  /// Intersection with the closed half-space; empty() tells if nothing is left.
  Box clip(Half h) const {
    Box r = *this;
    if (h == Half::plus)
      r.lo[D - 1] = std::max(r.lo[D - 1], 0.0);
    else
      r.hi[D - 1] = std::min(r.hi[D - 1], 0.0);
    return r;
  }

  bool empty() const {
    for (int i = 0; i < D; ++i)
      if (!(hi[i] > lo[i])) return true;
    return false;
  }

  /// Box lies inside the closed half-space h.
  bool inside(Half h) const {
    return h == Half::plus ? lo[D - 1] >= 0.0 : hi[D - 1] <= 0.0;
  }

  static Box cube(double lo_all, double hi_all) {
    Box b;
    b.lo.fill(lo_all);
    b.hi.fill(hi_all);
    return b;
  }
};

template <int D>
Point<D> unit_vector(int axis) {
  Point<D> e{};
  e[axis] = 1.0;
  return e;
}

/// Runs body(i) for i in [0, count) over a fixed contiguous partition of the
/// index range. Each index is visited by exactly one thread, so any body that
/// writes only its own slots yields schedule-independent results.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                         unsigned max_threads = 0) {
  unsigned hw = max_threads ? max_threads : std::max(1u, std::thread::hardware_concurrency());
  unsigned nt = static_cast<unsigned>(std::min<std::size_t>(hw, count));
  if (nt <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  const std::size_t chunk = (count + nt - 1) / nt;
  for (unsigned t = 0; t < nt; ++t) {
    const std::size_t b = t * chunk;
    const std::size_t e = std::min(count, b + chunk);
    if (b >= e) break;
    pool.emplace_back([b, e, &body] {
      for (std::size_t i = b; i < e; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// Sum in index order; reductions always go through this so that CSV output is
/// bit-reproducible regardless of how the terms were produced.
inline double ordered_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace nrl
