#pragma once

// Shifted dyadic lattices restricted to a half-space and a bounding box, with
// the Haar and martingale machinery built on top of them. Side length of a
// generation-k cube is 2^-k.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <utility>
#include <type_traits>
#include <vector>

#include "nrl/core.hpp"
#include "nrl/grid.hpp"
#include "nrl/quadrature.hpp"
#include "nrl/symbol.hpp"

namespace nrl {

inline double dyadic_side(int k) { return std::ldexp(1.0, -k); }

enum class CubeStatus {
  admissible,  ///< inside the bounding box and the closed half-space
  straddling,  ///< crosses the interface x_n = 0
  partial,     ///< in the half-space but sticks out of the bounding box
};

template <int D>
struct Cube {
  int generation = 0;
  std::array<std::int64_t, D> index{};
  /// Origin of the generation's lattice (any lattice point will do).
  Point<D> shift{};
  Half half = Half::plus;
  CubeStatus status = CubeStatus::admissible;

  double side() const { return dyadic_side(generation); }

  Point<D> vertex() const {
    Point<D> v;
    for (int a = 0; a < D; ++a) v[a] = shift[a] + side() * static_cast<double>(index[a]);
    return v;
  }

  Point<D> center() const {
    Point<D> c = vertex();
    for (double& v : c) v += 0.5 * side();
    return c;
  }

  Box<D> box() const {
    Box<D> b;
    b.lo = vertex();
    for (int a = 0; a < D; ++a) b.hi[a] = b.lo[a] + side();
    return b;
  }

  double volume() const { return std::pow(side(), D); }

  bool admissible() const { return status == CubeStatus::admissible; }

  /// The 2^D children, lexicographic in (axis 0 fastest) offset order.
  std::vector<Cube> children() const {
    std::vector<Cube> out;
    for (int c = 0; c < (1 << D); ++c) {
      Cube q = *this;
      q.generation = generation + 1;
      for (int a = 0; a < D; ++a) q.index[a] = 2 * index[a] + ((c >> a) & 1);
      out.push_back(q);
    }
    return out;
  }
};

enum class ShiftMode {
  /// One lattice origin for every generation: the translate h + standard grid.
  translate,
  /// Generation-k origin 2^-k (-1)^k t. Nested whenever 3t is integral, which
  /// gives the one-third family of adjacent systems.
  adjacent,
};

template <int D>
struct DyadicSystem {
  Half half = Half::plus;
  Point<D> shift{};
  ShiftMode mode = ShiftMode::translate;
  Box<D> box;
  int k_min = 0;
  int k_max = 0;
  /// cubes[k - k_min]: every lattice cube meeting box ∩ half, flagged.
  std::vector<std::vector<Cube<D>>> cubes;

  Point<D> origin(int k) const {
    if (mode == ShiftMode::translate) return shift;
    Point<D> o;
    const double s = dyadic_side(k) * ((k % 2 == 0) ? 1.0 : -1.0);
    for (int a = 0; a < D; ++a) o[a] = s * shift[a];
    return o;
  }

  const std::vector<Cube<D>>& generation(int k) const {
    require(k >= k_min && k <= k_max, "generation outside the system range");
    return cubes[k - k_min];
  }

  std::vector<Cube<D>> admissible(int k) const {
    std::vector<Cube<D>> out;
    for (const auto& q : generation(k))
      if (q.admissible()) out.push_back(q);
    return out;
  }

  /// Lattice cube of generation k containing x (flagged relative to this system).
  Cube<D> locate(const Point<D>& x, int k) const {
    Cube<D> q;
    q.generation = k;
    q.shift = origin(k);
    q.half = half;
    const double s = dyadic_side(k);
    for (int a = 0; a < D; ++a)
      q.index[a] = static_cast<std::int64_t>(std::floor((x[a] - q.shift[a]) / s));
    q.status = classify(q);
    return q;
  }

  CubeStatus classify(const Cube<D>& q) const {
    const Box<D> b = q.box();
    if (b.lo[D - 1] < 0.0 && b.hi[D - 1] > 0.0) return CubeStatus::straddling;
    if (!box.contains_box(b)) return CubeStatus::partial;
    return CubeStatus::admissible;
  }
};

template <int D>
DyadicSystem<D> build_system(Half half, const Point<D>& shift, const Box<D>& box,
                             std::pair<int, int> k_range, ShiftMode mode = ShiftMode::translate) {
  require(norm<D>(shift) < 1.0, "shift must have norm below 1");
  require(k_range.first <= k_range.second, "empty generation range");
  const Box<D> region = box.clip(half);
  require(!region.empty(), "degenerate domain");
  if (mode == ShiftMode::adjacent) {
    for (int a = 0; a < D; ++a) {
      const double t3 = 3.0 * shift[a];
      require(std::abs(t3 - std::round(t3)) < 1e-12, "adjacent shifts must be multiples of 1/3");
    }
  }
  DyadicSystem<D> sys;
  sys.half = half;
  sys.shift = shift;
  sys.mode = mode;
  sys.box = box;
  sys.k_min = k_range.first;
  sys.k_max = k_range.second;
  for (int k = sys.k_min; k <= sys.k_max; ++k) {
    const double s = dyadic_side(k);
    const Point<D> o = sys.origin(k);
    std::array<std::int64_t, D> lo_idx, count;
    std::int64_t total = 1;
    for (int a = 0; a < D; ++a) {
      lo_idx[a] = static_cast<std::int64_t>(std::floor((region.lo[a] - o[a]) / s));
      const auto hi_idx = static_cast<std::int64_t>(std::ceil((region.hi[a] - o[a]) / s));
      count[a] = std::max<std::int64_t>(hi_idx - lo_idx[a], 0);
      total *= count[a];
    }
    std::vector<Cube<D>> gen;
    for (std::int64_t f = 0; f < total; ++f) {
      Cube<D> q;
      q.generation = k;
      q.shift = o;
      q.half = half;
      std::int64_t rest = f;
      for (int a = 0; a < D; ++a) {
        q.index[a] = lo_idx[a] + rest % count[a];
        rest /= count[a];
      }
      const Box<D> b = q.box();
      Box<D> inter;
      for (int a = 0; a < D; ++a) {
        inter.lo[a] = std::max(b.lo[a], region.lo[a]);
        inter.hi[a] = std::min(b.hi[a], region.hi[a]);
      }
      if (inter.empty()) continue;
      q.status = sys.classify(q);
      gen.push_back(q);
    }
    sys.cubes.push_back(std::move(gen));
  }
  return sys;
}

/// Brute-force audit of partition, nesting, unique ancestry and child count.
struct DyadicAudit {
  bool partition = true;
  bool nesting = true;
  bool unique_parent = true;
  bool child_count = true;
  bool ok() const { return partition && nesting && unique_parent && child_count; }
};

template <int D>
DyadicAudit audit_system(const DyadicSystem<D>& sys, const std::vector<Point<D>>& samples) {
  DyadicAudit r;
  const Box<D> region = sys.box.clip(sys.half);
  // (I) each sample in box ∩ half lies in exactly one listed cube per generation.
  for (int k = sys.k_min; k <= sys.k_max; ++k) {
    const auto& gen = sys.generation(k);
    for (const auto& x : samples) {
      if (!region.contains(x)) continue;
      int hits = 0;
      for (const auto& q : gen) hits += q.box().contains(x) ? 1 : 0;
      if (hits != 1) r.partition = false;
    }
  }
  // (II)/(III) every cube lies in exactly one cube of each coarser generation
  // and meets no other cube of that generation.
  // Vertices are computed in floating point; edges closer than eps coincide.
  auto eps = [](const Box<D>& b) { return 1e-12 * b.side(0); };
  for (int k2 = sys.k_min + 1; k2 <= sys.k_max; ++k2) {
    for (const auto& q : sys.generation(k2)) {
      const Box<D> qb = q.box();
      const double e = eps(qb);
      for (int k = sys.k_min; k < k2; ++k) {
        int meets = 0, holds = 0;
        for (const auto& p : sys.generation(k)) {
          const Box<D> pb = p.box();
          if (!pb.intersects(qb, e)) continue;
          ++meets;
          if (pb.contains_box(qb, e)) ++holds;
          else r.nesting = false;
        }
        if (holds != 1 || meets != 1) r.unique_parent = false;
      }
    }
  }
  // (IV) 2^D children tile each cube.
  for (int k = sys.k_min; k < sys.k_max; ++k) {
    for (const auto& p : sys.generation(k)) {
      const Box<D> pb = p.box();
      int kids = 0;
      double vol = 0.0;
      for (const auto& q : sys.generation(k + 1)) {
        const Box<D> qb = q.box();
        if (pb.contains_box(qb, eps(qb))) {
          ++kids;
          vol += qb.volume();
        }
      }
      // Children outside box ∩ half are not listed; only check full cubes.
      if (p.admissible() && (kids != (1 << D) || std::abs(vol - pb.volume()) > 1e-12 * pb.volume()))
        r.child_count = false;
      if (kids > (1 << D)) r.child_count = false;
    }
  }
  return r;
}

/// Flat node indices of the grid falling in a box.
template <int D>
std::vector<std::size_t> nodes_in(const QuadratureGrid<D>& grid, const Box<D>& b) {
  std::array<int, D> lo, hi;
  for (int a = 0; a < D; ++a) {
    const double h = grid.spacing[a];
    int i0 = static_cast<int>(std::ceil((b.lo[a] - grid.box.lo[a]) / h - 0.5));
    while (i0 > 0 && grid.coord(a, i0 - 1) >= b.lo[a]) --i0;
    while (i0 < grid.per_axis && grid.coord(a, i0) < b.lo[a]) ++i0;
    int i1 = i0;
    while (i1 < grid.per_axis && grid.coord(a, i1) < b.hi[a]) ++i1;
    lo[a] = std::max(i0, 0);
    hi[a] = i1;
    if (hi[a] <= lo[a]) return {};
  }
  std::vector<std::size_t> out;
  std::array<int, D> idx = lo;
  while (true) {
    out.push_back(grid.flat(idx));
    int a = 0;
    for (; a < D; ++a) {
      if (++idx[a] < hi[a]) break;
      idx[a] = lo[a];
    }
    if (a == D) break;
  }
  return out;
}

template <int D>
std::vector<std::size_t> nodes_in(const QuadratureGrid<D>& grid, const Cube<D>& q) {
  return nodes_in(grid, q.box());
}

template <int D>
void require_resolved(const QuadratureGrid<D>& grid, int k) {
  for (int a = 0; a < D; ++a)
    require(dyadic_side(k) / grid.spacing[a] >= 4.0 - 1e-9, "grid too coarse");
}

/// E_k f: node average of f over each generation-k lattice cube (clipped to the
/// grid box). The lattice covers both half-spaces; the system's half tag only
/// matters for admissibility.
template <int D>
SampledField<D> conditional_expectation(const SampledField<D>& f, int k, const DyadicSystem<D>& sys) {
  const auto& grid = *f.grid;
  require_resolved(grid, k);
  const double s = dyadic_side(k);
  const Point<D> o = sys.origin(k);
  // Per-axis cell labels, then a dense key over the touched index range.
  std::array<std::vector<std::int64_t>, D> cell;
  std::array<std::int64_t, D> base, span;
  for (int a = 0; a < D; ++a) {
    cell[a].resize(grid.per_axis);
    for (int i = 0; i < grid.per_axis; ++i)
      cell[a][i] = static_cast<std::int64_t>(std::floor((grid.coord(a, i) - o[a]) / s));
    base[a] = cell[a].front();
    span[a] = cell[a].back() - base[a] + 1;
  }
  std::size_t keys = 1;
  for (int a = 0; a < D; ++a) keys *= static_cast<std::size_t>(span[a]);
  std::vector<double> sum(keys, 0.0);
  std::vector<std::size_t> cnt(keys, 0);
  std::vector<std::size_t> key(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const auto idx = grid.multi(n);
    std::size_t kf = 0, stride = 1;
    for (int a = 0; a < D; ++a) {
      kf += stride * static_cast<std::size_t>(cell[a][idx[a]] - base[a]);
      stride *= static_cast<std::size_t>(span[a]);
    }
    key[n] = kf;
    sum[kf] += f.values[n];
    ++cnt[kf];
  }
  SampledField<D> out{f.grid, std::vector<double>(grid.size())};
  for (std::size_t n = 0; n < grid.size(); ++n) out.values[n] = sum[key[n]] / cnt[key[n]];
  return out;
}

template <int D>
SampledField<D> martingale_difference(const SampledField<D>& f, int k, const DyadicSystem<D>& sys) {
  auto fine = conditional_expectation(f, k + 1, sys);
  const auto coarse = conditional_expectation(f, k, sys);
  for (std::size_t i = 0; i < fine.size(); ++i) fine.values[i] -= coarse.values[i];
  return fine;
}

/// Smallest sample value alpha with #{f > alpha} <= |S|/2 and #{f < alpha} <= |S|/2.
template <int D>
double median(const SampledField<D>& f, const std::vector<std::size_t>& subset) {
  require(!subset.empty(), "median of an empty set");
  std::vector<double> v;
  v.reserve(subset.size());
  for (auto i : subset) v.push_back(f.values[i]);
  std::sort(v.begin(), v.end());
  const double half = 0.5 * static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && v[i] == v[i - 1]) continue;
    const auto below = static_cast<double>(i);
    const auto above =
        static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), v[i]));
    if (below <= half && above <= half) return v[i];
  }
  throw Error("median not found");
}

struct LevelSplit {
  std::vector<std::size_t> low;   ///< b <= alpha (E1) or b >= alpha (F1)
  std::vector<std::size_t> high;  ///< b > alpha  (E2) or b <= alpha (F2)
};

/// E1 = {b <= alpha}, E2 = {b > alpha} over Q's nodes.
template <int D>
LevelSplit median_split(const Cube<D>& q, const SampledField<D>& b, double alpha) {
  LevelSplit s;
  for (auto i : nodes_in(*b.grid, q)) (b.values[i] <= alpha ? s.low : s.high).push_back(i);
  return s;
}

/// F1 = {b >= alpha}, F2 = {b <= alpha} over a companion node set. Ties land in both.
template <int D>
LevelSplit companion_split(const std::vector<std::size_t>& nodes, const SampledField<D>& b,
                           double alpha) {
  LevelSplit s;
  for (auto i : nodes) {
    if (b.values[i] >= alpha) s.low.push_back(i);
    if (b.values[i] <= alpha) s.high.push_back(i);
  }
  return s;
}

/// Sum over generations k_min..k_max-1 and admissible generation-k cubes Q of
/// the node mean over Q of |E_{k+1} b - E_k b|^p.
template <int D>
double dyadic_energy_sum(const SampledField<D>& b, const DyadicSystem<D>& sys, double p) {
  require(p >= 1.0, "energy exponent must be at least 1");
  std::vector<double> terms;
  for (int k = sys.k_min; k < sys.k_max; ++k) {
    const auto diff = martingale_difference(b, k, sys);
    for (const auto& q : sys.admissible(k)) {
      const auto idx = nodes_in(*b.grid, q);
      if (idx.empty()) continue;
      double s = 0.0;
      for (auto i : idx) s += std::pow(std::abs(diff.values[i]), p);
      terms.push_back(s / static_cast<double>(idx.size()));
    }
  }
  return ordered_sum(terms);
}

/// Per-generation split of the energy sum (index 0 is k_min).
template <int D>
std::vector<double> dyadic_energy_by_generation(const SampledField<D>& b, const DyadicSystem<D>& sys,
                                                double p) {
  require(p >= 1.0, "energy exponent must be at least 1");
  std::vector<double> out;
  for (int k = sys.k_min; k < sys.k_max; ++k) {
    const auto diff = martingale_difference(b, k, sys);
    double total = 0.0;
    for (const auto& q : sys.admissible(k)) {
      const auto idx = nodes_in(*b.grid, q);
      if (idx.empty()) continue;
      double s = 0.0;
      for (auto i : idx) s += std::pow(std::abs(diff.values[i]), p);
      total += s / static_cast<double>(idx.size());
    }
    out.push_back(total);
  }
  return out;
}

template <int D>
struct HaarFunction {
  Cube<D> parent;
  int epsilon = 1;
  std::vector<Cube<D>> children;
  std::vector<double> values;  ///< constant value on each child

  double at(const Point<D>& x) const {
    for (std::size_t c = 0; c < children.size(); ++c)
      if (children[c].box().contains(x)) return values[c];
    return 0.0;
  }

  double l1() const {
    double s = 0.0;
    for (std::size_t c = 0; c < children.size(); ++c) s += std::abs(values[c]) * children[c].volume();
    return s;
  }

  double l2() const {
    double s = 0.0;
    for (std::size_t c = 0; c < children.size(); ++c) s += values[c] * values[c] * children[c].volume();
    return std::sqrt(s);
  }

  double linf() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }

  double mean() const {
    double s = 0.0;
    for (std::size_t c = 0; c < children.size(); ++c) s += values[c] * children[c].volume();
    return s / parent.volume();
  }
};

/// Haar system on Q: h^eps equals alpha on the first eps children and -beta on
/// child eps+1 (zero elsewhere), normalized and mean zero. Children are the
/// ones lying in Q's closed half-space.
template <int D>
std::vector<HaarFunction<D>> haar_basis(const Cube<D>& q) {
  std::vector<Cube<D>> kids;
  for (auto c : q.children())
    if (c.box().inside(q.half)) {
      c.status = CubeStatus::admissible;
      kids.push_back(c);
    }
  require(kids.size() >= 2, "no Haar functions");
  std::vector<HaarFunction<D>> out;
  double before = kids[0].volume();
  for (std::size_t e = 1; e < kids.size(); ++e) {
    const double a_meas = before;
    const double b_meas = kids[e].volume();
    const double alpha = std::sqrt(b_meas / (a_meas * (a_meas + b_meas)));
    const double beta = std::sqrt(a_meas / (b_meas * (a_meas + b_meas)));
    HaarFunction<D> h;
    h.parent = q;
    h.epsilon = static_cast<int>(e);
    h.children = kids;
    h.values.assign(kids.size(), 0.0);
    for (std::size_t c = 0; c < e; ++c) h.values[c] = alpha;
    h.values[e] = -beta;
    out.push_back(std::move(h));
    before += b_meas;
  }
  return out;
}

/// <f, h> by grid quadrature.
template <int D>
double haar_coefficient(const SampledField<D>& f, const HaarFunction<D>& h) {
  const auto& grid = *f.grid;
  double s = 0.0;
  for (std::size_t c = 0; c < h.children.size(); ++c) {
    double part = 0.0;
    for (auto i : nodes_in(grid, h.children[c])) part += f.values[i];
    s += h.values[c] * part * grid.weight;
  }
  return s;
}

/// Top-generation averages plus Haar terms for generations k_min..k_max-1,
/// evaluated at the nodes of admissible top cubes (zero elsewhere).
template <int D>
SampledField<D> haar_reconstruct(const SampledField<D>& f, const DyadicSystem<D>& sys) {
  const auto& grid = *f.grid;
  SampledField<D> out{f.grid, std::vector<double>(grid.size(), 0.0)};
  for (const auto& q : sys.admissible(sys.k_min)) {
    const auto idx = nodes_in(grid, q);
    double s = 0.0;
    for (auto i : idx) s += f.values[i] * grid.weight;
    for (auto i : idx) out.values[i] += s / q.volume();
  }
  for (int k = sys.k_min; k < sys.k_max; ++k) {
    for (const auto& q : sys.admissible(k)) {
      for (const auto& h : haar_basis(q)) {
        const double c = haar_coefficient(f, h);
        for (std::size_t j = 0; j < h.children.size(); ++j)
          for (auto i : nodes_in(grid, h.children[j])) out.values[i] += c * h.values[j];
      }
    }
  }
  return out;
}

/// Sub-cubes of generation k+2 inside Q whose coordinates are separated by
/// 2^{-k-2} in the direction of a: a_j (x_j - y_j) >= 2^{-k-2} on Q' x Q''.
template <int D>
std::pair<Cube<D>, Cube<D>> separated_subcubes(const Cube<D>& q,
                                            const std::type_identity_t<std::array<int, D>>& a) {
  Cube<D> first = q, second = q;
  first.generation = second.generation = q.generation + 2;
  for (int j = 0; j < D; ++j) {
    require(a[j] == 1 || a[j] == -1, "sign vector entries must be +1 or -1");
    first.index[j] = 4 * q.index[j] + (a[j] > 0 ? 2 : 0);
    second.index[j] = 4 * q.index[j] + (a[j] > 0 ? 0 : 2);
  }
  return {first, second};
}

struct OscillationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio() const { return lhs / rhs; }
};

/// Mean gap of b between the separated sub-cubes of the standard generation-k
/// cube containing x0, against 2^-k |grad b(x0)|.
template <int D>
OscillationCheck gradient_oscillation_check(const Symbol<D>& b, const Point<D>& x0, int k) {
  const Point<D> g = b.gradient(x0);
  const double gn = norm<D>(g);
  require(gn > 0.0, "degenerate gradient");
  std::array<int, D> a;
  for (int j = 0; j < D; ++j) a[j] = g[j] >= 0.0 ? 1 : -1;
  Cube<D> q;
  q.generation = k;
  q.half = half_of<D>(x0);
  for (int j = 0; j < D; ++j)
    q.index[j] = static_cast<std::int64_t>(std::floor(x0[j] / dyadic_side(k)));
  const auto [q1, q2] = separated_subcubes(q, a);
  auto f = [&b](const Point<D>& x) { return b(x); };
  OscillationCheck r;
  r.lhs = std::abs(box_average<D>(q1.box(), f) - box_average<D>(q2.box(), f));
  r.rhs = dyadic_side(k) * gn;
  return r;
}

}  // namespace nrl
