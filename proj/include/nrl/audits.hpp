#pragma once

// Dyadic statistics of a closed-form symbol, with cube averages taken by Gauss
// quadrature rather than from a sampled grid. These feed the lower-bound and
// endpoint audits.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nrl/dyadic.hpp"
#include "nrl/grid.hpp"
#include "nrl/kernels.hpp"
#include "nrl/quadrature.hpp"
#include "nrl/symbol.hpp"

namespace nrl {

/// Panels per axis so that each panel is at most half the symbol's length scale.
template <int D>
int panels_for(const Symbol<D>& b, const Box<D>& box) {
  double side = 0.0;
  for (int a = 0; a < D; ++a) side = std::max(side, box.side(a));
  const double ls = b.length_scale > 0.0 ? b.length_scale : 1.0;
  return std::max(1, static_cast<int>(std::ceil(2.0 * side / ls)));
}

template <int D>
double cube_mean(const Symbol<D>& b, const Box<D>& box, int order = 6) {
  return box_average<D>(box, [&b](const Point<D>& x) { return b(x); }, order, panels_for(b, box));
}

/// Sum over generations k_min..k_max-1 and admissible cubes Q of
/// 2^-D sum_children |<b>_child - <b>_Q|^p, that is the mean over Q of
/// |E_{k+1} b - E_k b|^p with exact averages.
template <int D>
double exact_energy_sum(const Symbol<D>& b, const DyadicSystem<D>& sys, double p) {
  require(p >= 1.0, "energy exponent must be at least 1");
  std::vector<double> terms;
  for (int k = sys.k_min; k < sys.k_max; ++k) {
    const auto cubes = sys.admissible(k);
    std::vector<double> t(cubes.size());
    parallel_for(cubes.size(), [&](std::size_t i) {
      const double m = cube_mean(b, cubes[i].box());
      double s = 0.0;
      for (const auto& c : cubes[i].children()) s += std::pow(std::abs(cube_mean(b, c.box()) - m), p);
      t[i] = s / static_cast<double>(1 << D);
    });
    terms.insert(terms.end(), t.begin(), t.end());
  }
  return ordered_sum(terms);
}

/// Per-cube oscillation (mean over Q of |E_{k+1} b - <b>_Q|^p)^{1/p} against
/// the largest normalized Haar coefficient |Q|^{-1/2} |<b, h>|.
struct HaarBoundCheck {
  double oscillation = 0.0;
  double max_coefficient = 0.0;
  /// Norm-equivalence constant on the child-constant space:
  /// (M - 1) max_h ||h||_inf |Q|^{1/2} with ||h||_inf <= (M / |Q|)^{1/2}.
  double constant = 0.0;
  bool ok() const { return oscillation <= constant * max_coefficient * (1.0 + 1e-12) + 1e-300; }
};

template <int D>
HaarBoundCheck haar_bound_check(const Symbol<D>& b, const Cube<D>& q, double p) {
  const auto basis = haar_basis(q);
  const auto& kids = basis.front().children;
  std::vector<double> means(kids.size());
  double total = 0.0, vol = 0.0;
  for (std::size_t c = 0; c < kids.size(); ++c) {
    means[c] = cube_mean(b, kids[c].box());
    total += means[c] * kids[c].volume();
    vol += kids[c].volume();
  }
  const double mq = total / vol;
  HaarBoundCheck r;
  double s = 0.0;
  for (std::size_t c = 0; c < kids.size(); ++c) s += std::pow(std::abs(means[c] - mq), p) * kids[c].volume();
  r.oscillation = std::pow(s / vol, 1.0 / p);
  for (const auto& h : basis) {
    double coef = 0.0;
    for (std::size_t c = 0; c < kids.size(); ++c) coef += h.values[c] * means[c] * kids[c].volume();
    r.max_coefficient = std::max(r.max_coefficient, std::abs(coef) / std::sqrt(vol));
  }
  const double m = static_cast<double>(kids.size());
  r.constant = (m - 1.0) * std::sqrt(m);
  return r;
}

/// Sum over k and admissible Q of 2^{Dk} int_Q |b - <b>_Q|^p.
template <int D>
double oscillation_sum(const Symbol<D>& b, const DyadicSystem<D>& sys, double p) {
  std::vector<double> terms;
  for (int k = sys.k_min; k <= sys.k_max; ++k) {
    const auto cubes = sys.admissible(k);
    std::vector<double> t(cubes.size());
    const double scale = std::pow(2.0, D * k);
    parallel_for(cubes.size(), [&](std::size_t i) {
      const Box<D> bx = cubes[i].box();
      const double m = cube_mean(b, bx);
      const double avg = box_average<D>(
          bx, [&](const Point<D>& x) { return std::pow(std::abs(b(x) - m), p); }, 6, panels_for(b, bx));
      t[i] = scale * avg * bx.volume();
    });
    terms.insert(terms.end(), t.begin(), t.end());
  }
  return ordered_sum(terms);
}

/// Grid quadrature of the same-half double integral
/// int int |b(x) - b(y)|^p / |x - y|^{2D} dx dy, diagonal cells dropped.
template <int D>
double besov_double_integral(const Symbol<D>& b, const QuadratureGrid<D>& grid, double p) {
  std::vector<double> bv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) bv[i] = b(grid.nodes[i]);
  std::vector<double> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (j == i || grid.halves[i] != grid.halves[j]) continue;
      s += std::pow(std::abs(bv[i] - bv[j]), p) / std::pow(norm2<D>(grid.nodes[i] - grid.nodes[j]), D);
    }
    rows[i] = s;
  });
  return ordered_sum(rows) * grid.weight * grid.weight;
}

struct NwoResult {
  double total = 0.0;
  std::size_t cubes = 0;    ///< cubes that contributed
  std::size_t skipped = 0;  ///< witness ball outside the half-space or the box
};

/// Sum over admissible Q of sum_s (sum_children |<b-commutator kernel on
/// (child ∩ E_s) x F_s>| / |Q|)^p, with E_s, F_s the median level sets of b
/// relative to the witness ball. Inner integrals by cell-centre samples, m per
/// axis in each child and a (2m+1)-lattice in the ball.
template <int D>
NwoResult nwo_sum(const Symbol<D>& b, const DyadicSystem<D>& sys, const KernelParams<D>& kp, double A,
                  int m, double p) {
  NwoResult res;
  std::vector<Cube<D>> cubes;
  for (int k = sys.k_min; k <= sys.k_max; ++k)
    for (const auto& q : sys.admissible(k)) cubes.push_back(q);
  std::vector<double> terms(cubes.size(), 0.0);
  std::vector<char> used(cubes.size(), 0);
  std::vector<SignWitness<D>> wit(cubes.size());
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    try {
      wit[i] = sign_witness(cubes[i], kp, A);
    } catch (const Error&) {
      continue;
    }
    Box<D> bb;
    for (int a = 0; a < D; ++a) {
      bb.lo[a] = wit[i].y0[a] - wit[i].ball.radius;
      bb.hi[a] = wit[i].y0[a] + wit[i].ball.radius;
    }
    if (sys.box.contains_box(bb)) used[i] = 1;
  }
  parallel_for(cubes.size(), [&](std::size_t i) {
    if (!used[i]) return;
    const auto& q = cubes[i];
    const auto ys = ball_samples<D>(wit[i].ball, m);
    std::vector<double> by(ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) by[j] = b(ys[j]);
    std::vector<double> sorted = by;
    std::sort(sorted.begin(), sorted.end());
    const double half = 0.5 * static_cast<double>(sorted.size());
    double alpha = sorted.front();
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      if (j > 0 && sorted[j] == sorted[j - 1]) continue;
      const auto above = static_cast<double>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), sorted[j]));
      if (static_cast<double>(j) <= half && above <= half) {
        alpha = sorted[j];
        break;
      }
    }
    double ball_vol = std::pow(std::numbers::pi, 0.5 * D) / std::tgamma(0.5 * D + 1.0) *
                      std::pow(wit[i].ball.radius, D);
    const double wy = ball_vol / static_cast<double>(ys.size());
    double total = 0.0;
    for (int s = 0; s < 2; ++s) {
      double inner = 0.0;
      for (const auto& c : q.children()) {
        const auto xs = box_samples<D>(c.box(), m);
        const double wx = c.volume() / static_cast<double>(xs.size());
        double acc = 0.0;
        for (const auto& x : xs) {
          const double bx = b(x);
          if (s == 0 ? bx > alpha : bx <= alpha) continue;
          for (std::size_t j = 0; j < ys.size(); ++j) {
            if (s == 0 ? by[j] < alpha : by[j] > alpha) continue;
            acc += (bx - by[j]) * riesz_kernel(kp, x, ys[j]);
          }
        }
        inner += std::abs(acc * wx * wy / q.volume());
      }
      total += std::pow(inner, p);
    }
    terms[i] = total;
  });
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    if (used[i])
      ++res.cubes;
    else
      ++res.skipped;
  }
  res.total = ordered_sum(terms);
  return res;
}

/// Mean absolute pairwise gap of the 4^D grandchild averages of Q.
template <int D>
double grandchild_oscillation(const Symbol<D>& b, const Cube<D>& q) {
  std::vector<double> means;
  for (const auto& c : q.children())
    for (const auto& g : c.children()) means.push_back(cube_mean(b, g.box(), 4));
  double s = 0.0;
  for (double u : means)
    for (double v : means) s += std::abs(u - v);
  return s / static_cast<double>(means.size() * means.size());
}

/// Per-generation sums over admissible Q of grandchild_oscillation(Q)^p,
/// index 0 = k_min.
template <int D>
std::vector<double> oscillation_statistic_by_generation(const Symbol<D>& b, const DyadicSystem<D>& sys,
                                                        double p) {
  std::vector<double> out;
  for (int k = sys.k_min; k <= sys.k_max; ++k) {
    const auto cubes = sys.admissible(k);
    std::vector<double> t(cubes.size());
    parallel_for(cubes.size(),
                 [&](std::size_t i) { t[i] = std::pow(grandchild_oscillation(b, cubes[i]), p); });
    out.push_back(ordered_sum(t));
  }
  return out;
}

}  // namespace nrl
