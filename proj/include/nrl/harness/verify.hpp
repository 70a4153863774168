#pragma once

// Invariant checks grouped by subject. Each group returns a Report; a thrown
// exception inside a group becomes a failed entry instead of aborting the run.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nrl/audits.hpp"
#include "nrl/besov.hpp"
#include "nrl/harness/config.hpp"
#include "nrl/harness/families.hpp"
#include "nrl/harness/report.hpp"
#include "nrl/harness/studies.hpp"
#include "nrl/spectra.hpp"

namespace nrl {

namespace detail {

template <int D>
Point<D> random_point(std::mt19937_64& rng, Half half, double extent = 3.0) {
  std::uniform_real_distribution<double> u(-extent, extent);
  std::uniform_real_distribution<double> up(1e-3, extent);
  Point<D> x;
  for (int a = 0; a + 1 < D; ++a) x[a] = u(rng);
  x[D - 1] = half_sign(half) * up(rng);
  return x;
}

/// Tensor midpoint rule over a box, m cells per axis, f given pointwise.
template <int D, class F>
double midpoint_integral(const Box<D>& box, int m, const F& f) {
  std::size_t total = 1;
  for (int a = 0; a < D; ++a) total *= static_cast<std::size_t>(m);
  double cell = 1.0;
  for (int a = 0; a < D; ++a) cell *= box.side(a) / m;
  std::vector<double> part(static_cast<std::size_t>(m), 0.0);
  // Slices along axis 0 summed in order.
  const std::size_t per_slice = total / static_cast<std::size_t>(m);
  for (int i0 = 0; i0 < m; ++i0) {
    double s = 0.0;
    for (std::size_t r = 0; r < per_slice; ++r) {
      Point<D> x;
      x[0] = box.lo[0] + (i0 + 0.5) * box.side(0) / m;
      std::size_t rest = r;
      for (int a = 1; a < D; ++a) {
        x[a] = box.lo[a] + (static_cast<double>(rest % m) + 0.5) * box.side(a) / m;
        rest /= m;
      }
      s += f(x);
    }
    part[static_cast<std::size_t>(i0)] = s;
  }
  return ordered_sum(part) * cell;
}

inline Report guarded(const std::string& group, const std::function<void(Report&)>& body) {
  Report r;
  try {
    body(r);
  } catch (const std::exception& e) {
    r.add(group, "exception", false, 0.0, 0.0, e.what());
  }
  return r;
}

/// Records whether `call` throws an Error; the message goes in the detail.
inline void expect_error(Report& r, const std::string& group, const std::string& name,
                         const std::function<void()>& call) {
  try {
    call();
    r.add(group, "error:" + name, false, 0.0, 0.0, "no error raised");
  } catch (const Error& e) {
    r.add(group, "error:" + name, true, 0.0, 0.0, e.what());
  }
}

}  // namespace detail

// --------------------------------------------------------------------------

template <int D>
Report check_gating(const ExperimentConfig& cfg, int pairs = 10000) {
  return detail::guarded("gating", [&](Report& r) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> ut(1e-3, 4.0);
    std::size_t nonzero = 0;
    for (int i = 0; i < pairs; ++i) {
      const Half hx = (i % 2 == 0) ? Half::plus : Half::minus;
      const Half hy = hx == Half::plus ? Half::minus : Half::plus;
      const auto x = detail::random_point<D>(rng, hx);
      const auto y = detail::random_point<D>(rng, hy);
      for (int ell = 1; ell <= D; ++ell)
        if (riesz_kernel(KernelParams<D>(ell), x, y) != 0.0) ++nonzero;
      if (heat_kernel_neumann<D>(ut(rng), x, y) != 0.0) ++nonzero;
    }
    r.add("gating", "cross_half_zero", nonzero == 0, static_cast<double>(nonzero), 0.0,
          std::to_string(pairs) + " random cross-half pairs");
  });
}

/// Integral of p_{t,N}(x, .) over x's half-space on a box of radius r_cut sqrt(t).
template <int D>
double neumann_mass(double t, const Point<D>& x, int m, double refl = 1.0, double r_cut = 8.0) {
  const double r = r_cut * std::sqrt(t);
  Box<D> b;
  for (int a = 0; a + 1 < D; ++a) {
    b.lo[a] = x[a] - r;
    b.hi[a] = x[a] + r;
  }
  if (x[D - 1] >= 0.0) {
    b.lo[D - 1] = 0.0;
    b.hi[D - 1] = x[D - 1] + r;
  } else {
    b.lo[D - 1] = x[D - 1] - r;
    b.hi[D - 1] = 0.0;
  }
  return detail::midpoint_integral<D>(b, m, [&](const Point<D>& y) { return heat_kernel_neumann<D>(t, x, y, refl); });
}

/// |int p_t(x, z) p_s(z, y) dz - p_{t+s}(x, y)| over the half-space of x.
template <int D>
double composition_error(double t, double s, const Point<D>& x, const Point<D>& y, int m, double refl = 1.0) {
  const double r = 8.0 * std::sqrt(t + s);
  Box<D> b;
  for (int a = 0; a + 1 < D; ++a) {
    b.lo[a] = std::min(x[a], y[a]) - r;
    b.hi[a] = std::max(x[a], y[a]) + r;
  }
  const double far = std::max(std::abs(x[D - 1]), std::abs(y[D - 1])) + r;
  if (x[D - 1] >= 0.0) {
    b.lo[D - 1] = 0.0;
    b.hi[D - 1] = far;
  } else {
    b.lo[D - 1] = -far;
    b.hi[D - 1] = 0.0;
  }
  const double lhs = detail::midpoint_integral<D>(b, m, [&](const Point<D>& z) {
    return heat_kernel_neumann<D>(t, x, z, refl) * heat_kernel_neumann<D>(s, z, y, refl);
  });
  return std::abs(lhs - heat_kernel_neumann<D>(t + s, x, y, refl));
}

struct HeatIdentityErrors {
  double conservation = 0.0;
  double composition = 0.0;
  double even_extension = 0.0;
  double restriction = 0.0;  ///< max |output| on the other half
  double constants = 0.0;
};

/// The heat identities measured with either the true or the corrupted kernel.
template <int D>
HeatIdentityErrors heat_identity_errors(bool corrupted, int m) {
  const double refl = corrupted ? -1.0 : 1.0;
  HeatIdentityErrors e;
  const std::vector<double> ts{0.1, 0.3, 1.0};
  std::vector<Point<D>> xs;
  {
    Point<D> a{}, b{}, c{};
    a[D - 1] = 0.05;
    b[0] = -1.0;
    b[D - 1] = 0.5;
    c[D - 1] = -0.8;
    xs = {a, b, c};
  }
  for (double t : ts)
    for (const auto& x : xs) e.conservation = std::max(e.conservation, std::abs(neumann_mass<D>(t, x, m, refl) - 1.0));
  for (double t : {0.1, 0.5})
    for (double s : {0.2, 1.0}) {
      Point<D> x{}, y{};
      x[0] = 0.2;
      x[D - 1] = 0.3;
      y[0] = -0.4;
      y[D - 1] = 0.9;
      e.composition = std::max(e.composition, composition_error<D>(t, s, x, y, m, refl));
      e.composition = std::max(e.composition, composition_error<D>(t, s, reflect<D>(x), reflect<D>(y), m, refl));
    }

  // Grid routes: f supported in the upper half.
  const auto grid = make_grid(Box<D>::cube(-10.0, 10.0), D == 2 ? 100 : 40);
  const auto bump = symbols::gaussian<D>(detail::at<D>(0.3, 0.6), 0.4);
  const auto f = sample_fn<D>([&](const Point<D>& x) { return x[D - 1] > 0.0 ? bump(x) : 0.0; }, grid);
  const auto fe = sample_fn<D>([&](const Point<D>& x) { return bump(x[D - 1] > 0.0 ? x : reflect<D>(x)); }, grid);
  const auto ones = sample_fn<D>([](const Point<D>& x) { return x[D - 1] > 0.0 ? 1.0 : 0.0; }, grid);
  const HeatKind kind = corrupted ? HeatKind::neumann_flipped : HeatKind::neumann;
  for (double t : ts) {
    const auto a = apply_semigroup(f, t, kind);
    const auto b = apply_semigroup(fe, t, HeatKind::full);
    const auto c = apply_semigroup(ones, t, kind);
    const double reach = 8.0 * std::sqrt(t);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& x = grid.nodes[i];
      if (grid.halves[i] == Half::minus) {
        e.restriction = std::max(e.restriction, std::abs(a.values[i]));
        continue;
      }
      bool interior = true;
      for (int ax = 0; ax < D; ++ax) interior = interior && std::abs(x[ax]) + reach <= 10.0;
      if (!interior) continue;
      e.even_extension = std::max(e.even_extension, std::abs(a.values[i] - b.values[i]));
      e.constants = std::max(e.constants, std::abs(c.values[i] - 1.0));
    }
  }
  return e;
}

template <int D>
Report check_heat_identities(const ExperimentConfig&) {
  return detail::guarded("heat", [&](Report& r) {
    const int m = D == 2 ? 400 : 80;
    const double tol = 1e-6;
    const auto e = heat_identity_errors<D>(false, m);
    r.add("heat", "conservation", e.conservation <= tol, e.conservation, tol, "t in {0.1; 0.3; 1}");
    r.add("heat", "composition", e.composition <= tol, e.composition, tol, "t; s in [0.1; 1]");
    r.add("heat", "even_extension", e.even_extension <= tol, e.even_extension, tol, "interior upper nodes");
    r.add("heat", "restriction", e.restriction == 0.0, e.restriction, 0.0, "output on the lower half");
    r.add("heat", "constants", e.constants <= tol, e.constants, tol, "interior upper nodes");
    const auto bad = heat_identity_errors<D>(true, m);
    const double worst = std::max({bad.conservation, bad.composition, bad.even_extension});
    r.add("heat", "mutation_detected", worst > 1e-3, worst, 1e-3, "mirror term negated");
    Point<D> x{}, y{};
    x[D - 1] = y[D - 1] = 1.0;
    detail::expect_error(r, "heat", "full_t_zero", [&] { heat_kernel_full<D>(0.0, x, y); });
    detail::expect_error(r, "heat", "neumann_t_negative", [&] { heat_kernel_neumann<D>(-1.0, x, y); });
    const auto g = make_grid(Box<D>::cube(-1.0, 1.0), 4);
    const auto f = sample_fn<D>([](const Point<D>&) { return 1.0; }, g);
    detail::expect_error(r, "heat", "semigroup_t_zero", [&] { apply_semigroup(f, 0.0); });
  });
}

/// (1/sqrt(pi)) int_0^inf t^{-1/2} d/dx_ell p_{t,N}(x, y) dt, trapezoid rule in log t.
template <int D>
double riesz_from_heat(int ell, const Point<D>& x, const Point<D>& y, double refl = 1.0) {
  if (x[D - 1] * y[D - 1] < 0.0) return 0.0;
  double tang = 0.0;
  for (int a = 0; a + 1 < D; ++a) tang += (x[a] - y[a]) * (x[a] - y[a]);
  const double dm = x[D - 1] - y[D - 1], dp = x[D - 1] + y[D - 1];
  const double du = 0.01;
  double s = 0.0;
  for (double u = -40.0; u <= 40.0; u += du) {
    const double t = std::exp(u);
    const double q = 4.0 * t;
    const double pre = std::exp(-tang / q) / std::pow(std::numbers::pi * q, 0.5 * D);
    const double gm = std::exp(-dm * dm / q), gp = refl * std::exp(-dp * dp / q);
    double deriv;
    if (ell < D)
      deriv = -(x[ell - 1] - y[ell - 1]) / (2.0 * t) * pre * (gm + gp);
    else
      deriv = pre * (-dm / (2.0 * t) * gm - dp / (2.0 * t) * gp);
    s += std::pow(t, -0.5) * deriv * t * du;  // dt = t du
  }
  return s / std::sqrt(std::numbers::pi);
}

template <int D>
Report check_kernels(const ExperimentConfig& cfg) {
  return detail::guarded("kernels", [&](Report& r) {
    std::mt19937_64 rng(cfg.seed + 1);
    // Closed forms against the heat-integral oracle, both halves.
    double worst = 0.0, worst_mut = 0.0;
    for (int i = 0; i < 12; ++i) {
      const Half h = i % 2 ? Half::minus : Half::plus;
      const auto x = detail::random_point<D>(rng, h, 1.5);
      const auto y = detail::random_point<D>(rng, h, 1.5);
      for (int ell = 1; ell <= D; ++ell) {
        KernelParams<D> kp(ell);
        const double k = riesz_kernel(kp, x, y);
        const double o = riesz_from_heat<D>(ell, x, y);
        worst = std::max(worst, std::abs(k - o) / std::max(std::abs(o), 1e-3));
        kp.reflected_sign = -1.0;
        const double km = riesz_kernel(kp, x, y);
        worst_mut = std::max(worst_mut, std::abs(km - o) / std::max(std::abs(o), 1e-3));
      }
    }
    r.add("kernels", "riesz_vs_heat_integral", worst <= 1e-6, worst, 1e-6, "relative error; both halves");
    r.add("kernels", "riesz_mutation_detected", worst_mut > 1e-3, worst_mut, 1e-3, "reflected term negated");

    // Calderon-Zygmund size and smoothness.
    std::size_t size_fail = 0;
    double smooth = 0.0;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int done = 0;
    while (done < 1000) {
      const Half h = done % 2 ? Half::minus : Half::plus;
      const auto x = detail::random_point<D>(rng, h, 2.0);
      const auto y = detail::random_point<D>(rng, h, 2.0);
      const double rxy = distance<D>(x, y);
      if (rxy == 0.0) continue;
      Point<D> dir;
      for (int a = 0; a < D; ++a) dir[a] = u01(rng) - 0.5;
      const double nd = norm<D>(dir);
      if (nd == 0.0) continue;
      const double len = 0.5 * rxy * u01(rng);
      Point<D> xp = x;
      for (int a = 0; a < D; ++a) xp[a] += len * dir[a] / nd;
      if (half_of<D>(xp) != h) continue;
      for (int ell = 1; ell <= D; ++ell) {
        const auto c = cz_bounds_check(KernelParams<D>(ell), x, xp, y);
        if (!c.size_ok) ++size_fail;
        smooth = std::max(smooth, c.smooth_ratio);
      }
      ++done;
    }
    r.add("kernels", "cz_size", size_fail == 0, static_cast<double>(size_fail), 0.0, "|K| |x-y|^n <= 2 C_n");
    r.add("kernels", "cz_smooth", smooth < 100.0, smooth, 100.0, "1000 random triples");

    // Witness construction commutes with the reflection.
    Cube<D> q;
    q.generation = 0;
    q.index[D - 1] = 1;
    q.half = Half::plus;
    Cube<D> qm = q;
    qm.index[D - 1] = -2;
    qm.half = Half::minus;
    double mirror = 0.0;
    for (int ell = 1; ell <= D; ++ell) {
      const auto a = sign_witness(q, KernelParams<D>(ell), 16.0);
      const auto b = sign_witness(qm, KernelParams<D>(ell), 16.0);
      mirror = std::max(mirror, distance<D>(reflect<D>(a.y0), b.y0));
    }
    r.add("kernels", "witness_reflection", mirror < 1e-12, mirror, 1e-12, "");
    Point<D> z{};
    z[D - 1] = 1.0;
    detail::expect_error(r, "kernels", "singularity", [&] { riesz_kernel(KernelParams<D>(1), z, z); });
  });
}

// --------------------------------------------------------------------------

struct SignCalibration {
  double A = 0.0;  ///< 0 when no ladder value passes
  std::size_t cubes = 0;
  std::size_t violations_at_A = 0;
  double min_ratio = 0.0;
};

/// Random admissible cubes, half per half-space, with normal index offset >=
/// `gap` cube sides from the interface.
template <int D>
std::vector<Cube<D>> sign_cubes(std::mt19937_64& rng, int per_half, int gap) {
  std::vector<Cube<D>> out;
  for (Half h : {Half::plus, Half::minus}) {
    for (int i = 0; i < per_half; ++i) {
      Cube<D> q;
      q.generation = static_cast<int>(rng() % 4);
      q.half = h;
      const std::int64_t w = std::int64_t{2} << q.generation;
      for (int a = 0; a + 1 < D; ++a) q.index[a] = static_cast<std::int64_t>(rng() % (2 * w)) - w;
      const std::int64_t j = gap + static_cast<std::int64_t>(rng() % 8);
      q.index[D - 1] = h == Half::plus ? j : -1 - j;
      out.push_back(q);
    }
  }
  return out;
}

template <int D>
SignAudit sign_audit_all(const std::vector<Cube<D>>& cubes, const KernelParams<D>& kp, double A, int samples,
                         std::size_t& failed_cubes) {
  SignAudit total;
  total.min_ratio = std::numeric_limits<double>::infinity();
  failed_cubes = 0;
  for (const auto& q : cubes) {
    SignAudit a;
    try {
      a = audit_sign_witness(q, kp, sign_witness(q, kp, A), samples);
    } catch (const Error&) {
      ++failed_cubes;
      total.sign_constant = false;
      continue;
    }
    if (!a.ok()) ++failed_cubes;
    total.sign_constant = total.sign_constant && a.sign_constant;
    total.violations += a.violations;
    total.pairs += a.pairs;
    total.min_ratio = std::min(total.min_ratio, a.min_ratio);
  }
  return total;
}

template <int D>
SignCalibration calibrate_sign(const std::vector<Cube<D>>& cubes, const KernelParams<D>& kp,
                               const std::vector<double>& ladder, int samples) {
  SignCalibration c;
  c.cubes = cubes.size();
  for (double A : ladder) {
    std::size_t failed = 0;
    const auto a = sign_audit_all(cubes, kp, A, samples, failed);
    if (failed == 0 && a.ok()) {
      c.A = A;
      c.violations_at_A = 0;
      c.min_ratio = a.min_ratio;
      return c;
    }
  }
  return c;
}

template <int D>
Report check_sign_lemma(const ExperimentConfig& cfg) {
  return detail::guarded("sign", [&](Report& r) {
    std::mt19937_64 rng(cfg.seed + 2);
    for (int ell = 1; ell <= D; ++ell) {
      const KernelParams<D> kp(ell);
      const int gap = kp.normal() ? static_cast<int>(std::ceil(cfg.sign_interior_sides)) : 0;
      const auto cubes = sign_cubes<D>(rng, cfg.sign_cubes, gap);
      const auto cal = calibrate_sign(cubes, kp, cfg.sign_A_ladder, cfg.sign_samples);
      const std::string l = ":l" + std::to_string(ell);
      r.add("sign", "calibrated" + l, cal.A > 0.0, cal.A, 0.0,
            std::to_string(cal.cubes) + " cubes; min |K|/bound=" + fmt(cal.min_ratio) +
                (gap ? "; distance >= " + std::to_string(gap) + " sides" : ""));
      // What the calibration rules out.
      std::size_t failed = 0;
      sign_audit_all(cubes, kp, 1.0, cfg.sign_samples, failed);
      r.info("sign", "violations_A1" + l, static_cast<double>(failed), "cubes failing at A=1");
      if (kp.normal() && cal.A > 0.0) {
        const auto edge = sign_cubes<D>(rng, 10, 0);
        std::vector<Cube<D>> touching;
        for (auto q : edge) {
          q.index[D - 1] = q.half == Half::plus ? 0 : -1;
          touching.push_back(q);
        }
        sign_audit_all(touching, kp, cal.A, cfg.sign_samples, failed);
        r.info("sign", "interface_cubes_failing" + l, static_cast<double>(failed),
               "cubes touching the interface at the calibrated A");
      }
    }
  });
}

// --------------------------------------------------------------------------

template <int D>
Report check_spectra(const ExperimentConfig& cfg) {
  return detail::guarded("spectra", [&](Report& r) {
    std::mt19937_64 rng(cfg.seed + 3);
    std::normal_distribution<double> g(0.0, 1.0);
    double frob = 0.0, gram4 = 0.0, perm = 0.0;
    bool weak_ok = true, inclusion_ok = true;
    for (int t = 0; t < 100; ++t) {
      const int rows = 2 + static_cast<int>(rng() % 63);
      Eigen::MatrixXd m(rows, rows);
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = g(rng);
      if (t % 3 == 0) m = (m + m.transpose()).eval();
      const auto sp = singular_values(m);
      frob = std::max(frob, std::abs(schatten_norm(sp, 2.0) - m.norm()) / m.norm());
      gram4 = std::max(gram4, std::abs(schatten_norm(sp, 4.0) - schatten_norm_gram(m, 4)) / schatten_norm(sp, 4.0));
      for (double p : {1.0, 2.0, 3.0, 4.0}) weak_ok = weak_ok && weak_schatten_norm(sp, p) <= schatten_norm(sp, p) * (1 + 1e-12);
      inclusion_ok = inclusion_ok && schatten_norm(sp, 4.0) <= schatten_norm(sp, 2.0) * (1 + 1e-12);
      // Permuting rows leaves singular values unchanged.
      Eigen::MatrixXd pm = m.colwise().reverse();
      const auto sp2 = singular_values(pm);
      for (std::size_t k = 0; k < sp.size(); ++k) perm = std::max(perm, std::abs(sp.s[k] - sp2.s[k]) / sp.largest());
    }
    for (int t = 0; t < 100; ++t) {
      SingularSpectrum s;
      const int len = 1 + static_cast<int>(rng() % 40);
      for (int k = 0; k < len; ++k) s.s.push_back(std::abs(g(rng)));
      std::sort(s.s.begin(), s.s.end(), std::greater<>());
      for (double p : {0.5, 1.0, 2.0, 4.0}) weak_ok = weak_ok && weak_schatten_norm(s, p) <= schatten_norm(s, p) * (1 + 1e-12);
    }
    r.add("spectra", "s2_frobenius", frob <= 1e-10, frob, 1e-10, "100 random matrices up to 64x64");
    r.add("spectra", "s4_gram", gram4 <= 1e-10, gram4, 1e-10, "");
    r.add("spectra", "permutation_invariance", perm <= 1e-10, perm, 1e-10, "");
    r.add("spectra", "weak_le_strong", weak_ok, 0.0, 0.0, "all spectra");
    r.add("spectra", "inclusion_s2_s4", inclusion_ok, 0.0, 0.0, "");
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 4.0;
    const auto sd = singular_values(d);
    const bool diag_ok = sd.s == std::vector<double>{4.0, 3.0} && schatten_norm(sd, 1.0) == 7.0 &&
                         schatten_norm(sd, 2.0) == 5.0;
    r.add("spectra", "diag_exact", diag_ok, schatten_norm(sd, 1.0), 7.0, "diag(3;4)");
    const auto z = singular_values(Eigen::MatrixXd::Zero(5, 5));
    r.add("spectra", "zero_matrix", z.largest() == 0.0 && z.size() == 5, z.largest(), 0.0, "");
    detail::expect_error(r, "spectra", "nonpositive_p", [&] { schatten_norm(sd, 0.0); });
  });
}

template <int D>
Report check_zero_commutator(const ExperimentConfig& cfg, const std::vector<int>& sizes) {
  return detail::guarded("zero", [&](Report& r) {
    const std::vector<Symbol<D>> controls{symbols::per_half<D>(1.0, -0.5), symbols::per_half<D>(-2.0, 3.0),
                                          symbols::constant<D>(2.0)};
    for (int N : sizes) {
      const auto grid = make_grid(config_box<D>(cfg), N);
      std::size_t nonzero = 0;
      double sp = 0.0;
      for (const auto& b : controls)
        for (int ell = 1; ell <= D; ++ell) {
          const auto m = assemble_commutator(b, KernelParams<D>(ell), grid);
          nonzero += static_cast<std::size_t>((m.matrix.array() != 0.0).count());
          sp = std::max(sp, schatten_norm_gram(m.matrix, 2));
        }
      r.add("zero", "exact_zero:N" + std::to_string(N), nonzero == 0 && sp == 0.0, static_cast<double>(nonzero),
            0.0, "nonzero entries over the controls");
    }
  });
}

// --------------------------------------------------------------------------

template <int D>
Report check_dyadic(const ExperimentConfig& cfg) {
  return detail::guarded("dyadic", [&](Report& r) {
    std::mt19937_64 rng(cfg.seed + 4);
    const auto box = config_box<D>(cfg);
    std::uniform_real_distribution<double> ux(box.lo[0], box.hi[0]);
    std::vector<Point<D>> samples(2000);
    for (auto& x : samples)
      for (int a = 0; a < D; ++a) x[a] = ux(rng);
    const int kmin = -1, kmax = kmin + 5;  // six generations
    std::size_t systems = 0, bad = 0;
    const auto shifts = one_third_shifts<D>(cfg.shift_count);
    for (Half h : {Half::plus, Half::minus})
      for (const auto& s : shifts)
        for (ShiftMode mode : {ShiftMode::adjacent, ShiftMode::translate}) {
          const auto sys = build_system<D>(h, s, box, {kmin, kmax}, mode);
          ++systems;
          if (!audit_system(sys, samples).ok()) ++bad;
        }
    r.add("dyadic", "properties_I_IV", bad == 0, static_cast<double>(bad), 0.0,
          std::to_string(systems) + " systems; six generations");

    // Haar Gram matrix incl. the normalized indicator.
    double gram = 0.0;
    double l1linf_lo = 1e300, l1linf_hi = 0.0;
    for (Half h : {Half::plus, Half::minus})
      for (const auto& s : shifts) {
        const auto sys = build_system<D>(h, s, box, {0, 2}, ShiftMode::adjacent);
        for (int k = 0; k <= 2; ++k)
          for (const auto& q : sys.admissible(k)) {
            auto basis = haar_basis(q);
            const auto& kids = basis.front().children;
            std::vector<std::vector<double>> fn;
            fn.emplace_back(kids.size(), 1.0 / std::sqrt(q.volume()));
            for (const auto& hf : basis) {
              fn.push_back(hf.values);
              const double v = hf.l1() * hf.linf();
              l1linf_lo = std::min(l1linf_lo, v);
              l1linf_hi = std::max(l1linf_hi, v);
            }
            for (std::size_t a = 0; a < fn.size(); ++a)
              for (std::size_t b = 0; b < fn.size(); ++b) {
                double g = 0.0;
                for (std::size_t c = 0; c < kids.size(); ++c) g += fn[a][c] * fn[b][c] * kids[c].volume();
                gram = std::max(gram, std::abs(g - (a == b ? 1.0 : 0.0)));
              }
          }
      }
    r.add("dyadic", "haar_gram", gram <= 1e-12, gram, 1e-12, "");
    r.add("dyadic", "haar_l1_linf", l1linf_lo >= 0.25 && l1linf_hi <= 4.0, l1linf_hi, 4.0,
          "range [" + fmt(l1linf_lo) + "; " + fmt(l1linf_hi) + "]");

    // Reconstruction of a field constant on generation-2 cubes of the standard grid.
    const auto grid = make_grid(box, 64);
    const Point<D> zero{};
    double recon = 0.0;
    for (Half h : {Half::plus, Half::minus}) {
      const auto sys = build_system<D>(h, zero, box, {0, 2});
      std::uniform_real_distribution<double> uv(-1.0, 1.0);
      std::vector<double> vals;
      for (std::size_t i = 0; i < 4096; ++i) vals.push_back(uv(rng));
      const auto f = sample_fn<D>(
          [&](const Point<D>& x) {
            std::size_t key = 0;
            for (int a = 0; a < D; ++a) key = key * 31 + static_cast<std::size_t>(std::floor(x[a] * 4.0) + 64);
            return vals[key % vals.size()];
          },
          grid);
      const auto g = haar_reconstruct(f, sys);
      for (const auto& q : sys.admissible(0))
        for (auto i : nodes_in(grid, q)) recon = std::max(recon, std::abs(g.values[i] - f.values[i]));
    }
    r.add("dyadic", "haar_reconstruction", recon <= 1e-12, recon, 1e-12, "generation-2 resolved field");

    // Tower property E_k E_{k+1} = E_k.
    const auto rf = sample_fn<D>(
        [&](const Point<D>& x) { return std::sin(3.0 * x[0]) + std::cos(5.0 * x[D - 1]) * x[0]; }, grid);
    double tower = 0.0;
    for (const auto& s : shifts) {
      const auto sys = build_system<D>(Half::plus, s, box, {-1, 2}, ShiftMode::adjacent);
      for (int k = -1; k < 2; ++k) {
        const auto a = conditional_expectation(conditional_expectation(rf, k + 1, sys), k, sys);
        const auto b = conditional_expectation(rf, k, sys);
        for (std::size_t i = 0; i < grid.size(); ++i) tower = std::max(tower, std::abs(a.values[i] - b.values[i]));
      }
    }
    r.add("dyadic", "tower", tower <= 1e-10, tower, 1e-10, "");

    // Separated sub-cubes: gap at least 2^{-k-2} in every coordinate.
    double gap = 1e300;
    Cube<D> q;
    q.generation = 0;
    for (int sgn = 0; sgn < (1 << D); ++sgn) {
      std::array<int, D> a;
      for (int j = 0; j < D; ++j) a[j] = (sgn >> j) & 1 ? 1 : -1;
      const auto [q1, q2] = separated_subcubes(q, a);
      for (int j = 0; j < D; ++j) {
        const double lo = a[j] > 0 ? q1.box().lo[j] - q2.box().hi[j] : q2.box().lo[j] - q1.box().hi[j];
        gap = std::min(gap, lo);
      }
    }
    r.add("dyadic", "separated_gap", gap >= 0.25 - 1e-15, gap, 0.25, "unit cube; all sign vectors");
    detail::expect_error(r, "dyadic", "degenerate_domain", [&] {
      Box<D> b = box;
      b.lo[D - 1] = 0.5;
      build_system<D>(Half::minus, zero, b, {0, 1});
    });
  });
}

template <int D>
Report check_gradient_oscillation(const ExperimentConfig&) {
  return detail::guarded("oscillation", [&](Report& r) {
    struct Case {
      Symbol<D> b;
      Point<D> x0;
    };
    std::vector<Case> cases;
    {
      Point<D> x0{};
      x0[0] = std::numbers::pi / 4.0;
      cases.push_back({symbols::from_function<D>("sincos", [](const Point<D>& x) { return std::sin(x[0]) + std::cos(x[D - 1]); }), x0});
      Point<D> x1{};
      x1[0] = 0.3;
      x1[D - 1] = 1.0;
      cases.push_back({symbols::gaussian<D>(detail::at<D>(0.0, 0.8), 0.5), x1});
      Point<D> g{};
      g[0] = 3.0;
      g[D - 1] = 4.0;
      Point<D> x2{};
      x2[0] = -0.7;
      x2[D - 1] = -0.4;
      cases.push_back({symbols::linear<D>(g), x2});
    }
    double lo = 1e300, hi = 0.0, gmin = 1e300;
    for (const auto& c : cases) {
      gmin = std::min(gmin, norm<D>(c.b.gradient(c.x0)));
      for (int k = 4; k <= 8; ++k) {
        const auto chk = gradient_oscillation_check(c.b, c.x0, k);
        lo = std::min(lo, chk.ratio());
        hi = std::max(hi, chk.ratio());
      }
    }
    r.add("oscillation", "gradient_floor", gmin >= 0.5, gmin, 0.5, "smallest |grad b(x0)|");
    r.add("oscillation", "ratio_band", lo > 0.0 && hi / lo <= 4.0, hi / lo, 4.0,
          "ratios in [" + fmt(lo) + "; " + fmt(hi) + "] for k=4..8");
    detail::expect_error(r, "oscillation", "degenerate_gradient",
                         [&] { gradient_oscillation_check(symbols::constant<D>(1.0), Point<D>{}, 4); });
  });
}

template <int D>
Report check_besov(const ExperimentConfig& cfg) {
  return detail::guarded("besov", [&](Report& r) {
    const auto box = config_box<D>(cfg);
    const auto grid = make_grid(box, D == 2 ? 64 : 24);
    const BesovParams bp(0.5, 4.0, 4.0);
    const auto tg = log_grid(cfg.t_min, cfg.t_max, cfg.t_per_decade);
    const auto sg = default_shifts(grid, cfg.shift_radii / 2, cfg.shift_dirs / 2);
    double zero = 0.0;
    for (const auto& b : {symbols::per_half<D>(1.0, -0.5), symbols::constant<D>(2.0)}) {
      zero = std::max(zero, besov_heat_norm(b, bp, grid, tg));
      zero = std::max(zero, besov_neumann_norm(b, bp, grid, sg));
    }
    r.add("besov", "controls_vanish", zero <= 1e-6, zero, 1e-6, "heat and extension routes");
    const auto bump = symbols::gaussian<D>(detail::at<D>(0.0, 0.8), 0.3);
    const double h1 = besov_heat_norm(bump, bp, grid, tg);
    const double h2 = besov_heat_norm(scaled(bump, 2.0), bp, grid, tg);
    r.add("besov", "homogeneity", std::abs(h2 - 2.0 * h1) <= 1e-10 * h1, std::abs(h2 - 2.0 * h1) / h1, 1e-10, "");
  });
}

/// All invariant groups.
template <int D>
Report verify_suite(const ExperimentConfig& cfg) {
  Report r;
  r.merge(check_gating<D>(cfg));
  r.merge(check_heat_identities<D>(cfg));
  r.merge(check_kernels<D>(cfg));
  r.merge(check_sign_lemma<D>(cfg));
  r.merge(check_spectra<D>(cfg));
  r.merge(check_zero_commutator<D>(cfg, {16, 32}));
  r.merge(check_dyadic<D>(cfg));
  r.merge(check_gradient_oscillation<D>(cfg));
  r.merge(check_besov<D>(cfg));
  return r;
}

}  // namespace nrl
