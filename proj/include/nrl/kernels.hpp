#pragma once

// Heat kernels of the full-space and Neumann Laplacians, the Riesz kernels of
// the Neumann Laplacian on the two half-spaces, and local kernel audits.

#include <cmath>
#include <limits>
#include <numbers>

#include "nrl/core.hpp"
#include "nrl/dyadic.hpp"

namespace nrl {

/// One-dimensional Gaussian factor (4 pi t)^{-1/2} exp(-d^2 / 4t).
inline double heat_factor(double t, double d) {
  return std::exp(-d * d / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
}

/// Neumann factor on the half-line: Gaussian plus its mirror, zero across 0.
/// `reflected` multiplies the mirror term (-1 only in mutation tests).
inline double heat_factor_neumann(double t, double a, double b, double reflected = 1.0) {
  if (a * b < 0.0) return 0.0;
  return heat_factor(t, a - b) + reflected * heat_factor(t, a + b);
}

template <int D>
double heat_kernel_full(double t, const Point<D>& x, const Point<D>& y) {
  require(t > 0.0, "heat kernel needs t > 0");
  return std::exp(-norm2<D>(x - y) / (4.0 * t)) / std::pow(4.0 * std::numbers::pi * t, 0.5 * D);
}

template <int D>
double heat_kernel_neumann(double t, const Point<D>& x, const Point<D>& y, double reflected = 1.0) {
  require(t > 0.0, "heat kernel needs t > 0");
  const double xn = x[D - 1], yn = y[D - 1];
  if (xn * yn < 0.0) return 0.0;
  double tangential = 0.0;
  for (int a = 0; a + 1 < D; ++a) tangential += (x[a] - y[a]) * (x[a] - y[a]);
  const double q = 4.0 * t;
  return std::exp(-tangential / q) *
         (std::exp(-(xn - yn) * (xn - yn) / q) + reflected * std::exp(-(xn + yn) * (xn + yn) / q)) /
         std::pow(std::numbers::pi * q, 0.5 * D);
}

/// Riesz component ell (1-based, ell = D is the normal direction).
template <int D>
struct KernelParams {
  int ell = 1;
  double cn = 0.0;
  /// Multiplies the reflected term; -1 gives the corrupted kernel used in
  /// mutation tests.
  double reflected_sign = 1.0;

  explicit KernelParams(int component = 1) : ell(component) {
    static_assert(D >= 2, "Riesz kernels need dimension >= 2");
    require(ell >= 1 && ell <= D, "Riesz component out of range");
    cn = std::tgamma(0.5 * (D + 1)) / std::pow(std::numbers::pi, 0.5 * (D + 1));
  }

  bool normal() const { return ell == D; }
};

/// The two pieces of K_ell on the upper half-space: the classical term
/// -C_n (x_l - y_l)/|x-y|^{n+1} and the reflected term built on (x', -x_n).
struct KernelTerms {
  double classical = 0.0;
  double reflected = 0.0;
  double total() const { return classical + reflected; }
};

template <int D>
KernelTerms riesz_terms_plus(const KernelParams<D>& kp, const Point<D>& x, const Point<D>& y) {
  const int l = kp.ell - 1;
  double tang = 0.0;
  for (int a = 0; a + 1 < D; ++a) tang += (x[a] - y[a]) * (x[a] - y[a]);
  const double dn = x[D - 1] - y[D - 1];
  const double sn = x[D - 1] + y[D - 1];
  const double r = std::sqrt(tang + dn * dn);
  const double rr = std::sqrt(tang + sn * sn);
  const double num_refl = kp.normal() ? sn : x[l] - y[l];
  KernelTerms t;
  t.classical = -kp.cn * (x[l] - y[l]) / std::pow(r, D + 1);
  t.reflected = -kp.cn * kp.reflected_sign * num_refl / std::pow(rr, D + 1);
  return t;
}

/// Terms of K_ell for a same-half pair. On the lower half-space the kernel is
/// the upper one at the mirrored points, negated for ell = n; this collapses to
/// the upper-half formula.
template <int D>
KernelTerms riesz_terms(const KernelParams<D>& kp, const Point<D>& x, const Point<D>& y) {
  if (half_of<D>(x) == Half::plus || half_of<D>(y) == Half::plus)
    return riesz_terms_plus(kp, x, y);
  KernelTerms t = riesz_terms_plus(kp, reflect<D>(x), reflect<D>(y));
  if (kp.normal()) {
    t.classical = -t.classical;
    t.reflected = -t.reflected;
  }
  return t;
}

template <int D>
double riesz_kernel(const KernelParams<D>& kp, const Point<D>& x, const Point<D>& y) {
  if (x[D - 1] * y[D - 1] < 0.0) return 0.0;
  if (x == y) throw Error("kernel singularity");
  return riesz_terms(kp, x, y).total();
}

struct CzCheck {
  bool size_ok = false;
  double size_ratio = 0.0;    ///< |K(x,y)| |x-y|^n / C_size
  double smooth_ratio = 0.0;
};

template <int D>
CzCheck cz_bounds_check(const KernelParams<D>& kp, const Point<D>& x, const Point<D>& xp,
                        const Point<D>& y) {
  const Half h = half_of<D>(x);
  require(half_of<D>(xp) == h && half_of<D>(y) == h, "points must share a half-space");
  const double r = distance<D>(x, y);
  const double dx = distance<D>(x, xp);
  require(r > 0.0 && dx <= 0.5 * r, "need |x - x'| <= |x - y| / 2");
  CzCheck c;
  const double c_size = 2.0 * kp.cn;
  const double k = riesz_kernel(kp, x, y);
  c.size_ratio = std::abs(k) * std::pow(r, D) / c_size;
  c.size_ok = c.size_ratio <= 1.0 + 1e-12;
  if (dx == 0.0) return c;
  const double diff = std::abs(k - riesz_kernel(kp, xp, y)) +
                      std::abs(riesz_kernel(kp, y, x) - riesz_kernel(kp, y, xp));
  c.smooth_ratio = diff * std::pow(r, D + 1) / dx;
  return c;
}

template <int D>
struct Ball {
  Point<D> center{};
  double radius = 0.0;
  bool contains(const Point<D>& x) const { return distance<D>(x, center) < radius; }
};

template <int D>
struct SignWitness {
  Point<D> y0{};
  Ball<D> ball;
  double bound = 0.0;
};

/// Companion ball at distance A * side from the centre of Q along e_ell
/// (downwards for ell = n on the lower half-space) and the lower bound
/// (C_n / 2) A^{-n} side^{-n}.
template <int D>
SignWitness<D> sign_witness(const Cube<D>& q, const KernelParams<D>& kp, double A = 16.0) {
  require(A > 0.0, "A must be positive");
  require(q.box().inside(q.half), "cube must lie in its half-space");
  const double s = q.side();
  const double dir = (kp.normal() && q.half == Half::minus) ? -1.0 : 1.0;
  SignWitness<D> w;
  w.y0 = q.center();
  w.y0[kp.ell - 1] += dir * A * s;
  w.ball.center = w.y0;
  w.ball.radius = s / 12.0;
  const double edge = w.y0[D - 1] - half_sign(q.half) * w.ball.radius;
  if (half_sign(q.half) * edge < 0.0) throw Error("A too small for boundary-adjacent cube");
  w.bound = 0.5 * kp.cn * std::pow(A, -D) * std::pow(s, -D);
  return w;
}

/// Lattice samples inside a ball: points of a (2m+1)^D centred lattice within
/// the radius.
template <int D>
std::vector<Point<D>> ball_samples(const Ball<D>& b, int m) {
  std::vector<Point<D>> out;
  const int w = 2 * m + 1;
  std::size_t total = 1;
  for (int a = 0; a < D; ++a) total *= w;
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t rest = f;
    Point<D> x;
    for (int a = 0; a < D; ++a) {
      const int i = static_cast<int>(rest % w) - m;
      rest /= w;
      x[a] = b.center[a] + b.radius * (static_cast<double>(i) / (m + 1));
    }
    if (b.contains(x)) out.push_back(x);
  }
  return out;
}

/// Cell-centre samples of a box, m per axis.
template <int D>
std::vector<Point<D>> box_samples(const Box<D>& b, int m) {
  std::vector<Point<D>> out;
  std::size_t total = 1;
  for (int a = 0; a < D; ++a) total *= m;
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t rest = f;
    Point<D> x;
    for (int a = 0; a < D; ++a) {
      x[a] = b.lo[a] + (static_cast<double>(rest % m) + 0.5) * b.side(a) / m;
      rest /= m;
    }
    out.push_back(x);
  }
  return out;
}

struct SignAudit {
  bool sign_constant = true;
  double min_ratio = 0.0;       ///< min |K| / bound over the sampled pairs
  std::size_t pairs = 0;
  std::size_t violations = 0;   ///< pairs with |K| < bound
  bool ok() const { return sign_constant && violations == 0; }
};

template <int D>
SignAudit audit_sign_witness(const Cube<D>& q, const KernelParams<D>& kp, const SignWitness<D>& w,
                             int per_axis = 20) {
  const auto xs = box_samples<D>(q.box(), per_axis);
  auto ys = ball_samples<D>(w.ball, per_axis / 2);
  SignAudit a;
  a.min_ratio = std::numeric_limits<double>::infinity();
  int sign = 0;
  for (const auto& x : xs) {
    for (const auto& y : ys) {
      const double k = riesz_kernel(kp, x, y);
      const int s = (k > 0.0) - (k < 0.0);
      if (sign == 0) sign = s;
      if (s == 0 || s != sign) a.sign_constant = false;
      const double ratio = std::abs(k) / w.bound;
      a.min_ratio = std::min(a.min_ratio, ratio);
      if (ratio < 1.0) ++a.violations;
      ++a.pairs;
    }
  }
  return a;
}

}  // namespace nrl
