#pragma once

// The four studies: commutator/Besov ratios for p > n, endpoint divergence for
// p = n, and the lower and upper bound audits.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "nrl/audits.hpp"
#include "nrl/besov.hpp"
#include "nrl/discretize.hpp"
#include "nrl/harness/config.hpp"
#include "nrl/harness/families.hpp"
#include "nrl/harness/report.hpp"
#include "nrl/spectra.hpp"

namespace nrl {

/// S^p norm: Gram traces for p = 2, 4, the full spectrum otherwise.
inline double schatten_of(const Eigen::MatrixXd& m, double p) {
  if (p == 2.0 || p == 4.0) return schatten_norm_gram(m, static_cast<int>(p));
  return schatten_norm(singular_values(m), p);
}

/// First `count` shifts of {0, 1/3, 2/3}^D (axis 0 fastest).
template <int D>
std::vector<Point<D>> one_third_shifts(int count) {
  std::vector<Point<D>> out;
  int total = 1;
  for (int a = 0; a < D; ++a) total *= 3;
  for (int f = 0; f < total && static_cast<int>(out.size()) < count; ++f) {
    Point<D> h;
    int rest = f;
    for (int a = 0; a < D; ++a) {
      h[a] = (rest % 3) / 3.0;
      rest /= 3;
    }
    if (norm<D>(h) < 1.0) out.push_back(h);
  }
  return out;
}

template <int D>
Box<D> config_box(const ExperimentConfig& cfg) {
  return Box<D>::cube(cfg.box_lo, cfg.box_hi);
}

/// max over shifts h of (stat(h, plus) + stat(h, minus)).
template <int D, class F>
double sup_over_shifts(const ExperimentConfig& cfg, std::pair<int, int> k_range, const F& stat) {
  double best = 0.0;
  for (const auto& h : one_third_shifts<D>(cfg.shift_count)) {
    double s = 0.0;
    for (Half half : {Half::plus, Half::minus})
      s += stat(build_system<D>(half, h, config_box<D>(cfg), k_range, ShiftMode::adjacent));
    best = std::max(best, s);
  }
  return best;
}

inline std::string family_for(const ExperimentConfig& cfg, const char* fallback) {
  return cfg.family == "auto" ? fallback : cfg.family;
}

/// Spread statistics over a set of positive ratios.
struct Spread {
  double min = 0.0;
  double max = 0.0;
  double center() const { return 0.5 * (min + max); }
  double ratio() const { return min > 0.0 ? max / min : std::numeric_limits<double>::infinity(); }
  /// Every value within [1 - band, 1 + band] * center().
  bool within(double band) const { return max <= (1.0 + band) * center() && min >= (1.0 - band) * center(); }
};

inline Spread spread_of(const std::vector<double>& v) {
  Spread s;
  if (v.empty()) return s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

// --------------------------------------------------------------------------
// ratio study

struct RatioRow {
  std::string symbol;
  int ell = 0;
  int N = 0;
  double schatten = 0.0;
  double besov_heat = 0.0;
  double besov_ext = 0.0;
  bool degenerate = false;
  double ratio() const { return degenerate ? 0.0 : schatten / besov_heat; }
};

template <int D>
std::vector<RatioRow> ratio_study(const ExperimentConfig& cfg, Report& rep) {
  if (!(cfg.p > cfg.n)) throw Error("ratio study invalid in this range");
  require(cfg.n == D, "dimension mismatch");
  const auto family = family_by_name<D>(family_for(cfg, "ratio"));
  const auto box = config_box<D>(cfg);
  const BesovParams bp(static_cast<double>(D) / cfg.p, cfg.p, cfg.p);

  // Besov side, independent of the operator grid.
  const auto bgrid = make_grid(box, cfg.besov_grid);
  const auto tg = log_grid(cfg.t_min, cfg.t_max, cfg.t_per_decade);
  const auto sg = default_shifts(bgrid, cfg.shift_radii, cfg.shift_dirs);
  HeatOptions ho;
  ho.log_step = cfg.log_step;
  std::vector<double> heat(family.size()), ext(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    heat[i] = besov_heat_norm(family[i].symbol, bp, bgrid, tg, ho);
    ext[i] = besov_neumann_norm(family[i].symbol, bp, bgrid, sg);
  }

  std::vector<RatioRow> rows;
  for (int ell : cfg.ells) {
    const KernelParams<D> kp(ell);
    for (int N : cfg.grids) {
      const auto grid = make_grid(box, N);
      for (std::size_t i = 0; i < family.size(); ++i) {
        const auto& m = family[i];
        const auto op = assemble_commutator(m.symbol, kp, grid);
        RatioRow r{m.id, ell, N, schatten_of(op.matrix, cfg.p), heat[i], ext[i], m.control()};
        rows.push_back(r);
        if (grid.size() <= static_cast<std::size_t>(cfg.spectrum_max_nodes)) {
          const auto sp = singular_values(op);
          CsvWriter w(cfg.out_dir + "/spectrum_" + m.id + "_l" + std::to_string(ell) + "_N" +
                          std::to_string(N) + ".csv",
                      {"k", "s_k"});
          for (std::size_t k = 0; k < sp.size(); ++k) w.row({std::to_string(k + 1), fmt(sp.s[k])});
        }
      }
    }
  }

  CsvWriter w(cfg.out_dir + "/ratios.csv",
              {"experiment", "symbol", "ell", "N", "schatten", "besov_heat", "besov_ext", "ratio",
               "ratio_ext", "degenerate"});
  for (const auto& r : rows)
    w.row({"ratio", r.symbol, std::to_string(r.ell), std::to_string(r.N), fmt(r.schatten),
           fmt(r.besov_heat), fmt(r.besov_ext), fmt(r.ratio()),
           fmt(r.degenerate ? 0.0 : r.schatten / r.besov_ext), r.degenerate ? "1" : "0"});

  // Checks.
  const int n_top = cfg.grids.back();
  for (const auto& r : rows) {
    if (!r.degenerate) continue;
    rep.add("ratio", "control_zero:" + r.symbol + ":l" + std::to_string(r.ell) + ":N" + std::to_string(r.N),
            r.schatten == 0.0 && r.besov_heat <= 1e-6 && r.besov_ext <= 1e-6,
            std::max({r.schatten, r.besov_heat, r.besov_ext}), 1e-6, "per-half-constant control");
  }
  for (int ell : cfg.ells) {
    std::vector<double> top;
    for (const auto& r : rows)
      if (!r.degenerate && r.ell == ell && r.N == n_top) top.push_back(r.ratio());
    const auto s = spread_of(top);
    rep.add("ratio", "spread:l" + std::to_string(ell), s.ratio() <= cfg.ratio_spread_max, s.ratio(),
            cfg.ratio_spread_max, "max/min ratio at N=" + std::to_string(n_top));
    if (cfg.grids.size() >= 2) {
      const int n_prev = cfg.grids[cfg.grids.size() - 2];
      for (const auto& a : rows) {
        if (a.degenerate || a.ell != ell || a.N != n_top) continue;
        for (const auto& b : rows) {
          if (b.symbol != a.symbol || b.ell != ell || b.N != n_prev) continue;
          const double change = std::abs(a.ratio() / b.ratio() - 1.0);
          rep.add("ratio", "refine:" + a.symbol + ":l" + std::to_string(ell), change < cfg.refine_tol,
                  change, cfg.refine_tol,
                  "N=" + std::to_string(n_prev) + " to " + std::to_string(n_top));
        }
      }
    }
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (family[i].control()) continue;
    const double q = heat[i] / ext[i];
    rep.add("ratio", "besov_routes:" + family[i].id, q >= 1.0 / cfg.besov_equiv && q <= cfg.besov_equiv, q,
            cfg.besov_equiv, "heat/extension route ratio");
  }
  return rows;
}

// --------------------------------------------------------------------------
// divergence study

struct DivergenceRow {
  std::string symbol;
  int ell = 0;
  int N = 0;
  double schatten = 0.0;
  bool degenerate = false;
};

template <int D>
std::vector<DivergenceRow> divergence_study(const ExperimentConfig& cfg, Report& rep) {
  if (cfg.p != cfg.n) throw Error("divergence study requires p = n");
  require(cfg.n == D, "dimension mismatch");
  const auto family = family_by_name<D>(family_for(cfg, "divergence"));
  const auto box = config_box<D>(cfg);
  std::vector<DivergenceRow> rows;
  for (int ell : cfg.ells) {
    const KernelParams<D> kp(ell);
    for (int N : cfg.grids) {
      const auto grid = make_grid(box, N);
      for (const auto& m : family) {
        const auto op = assemble_commutator(m.symbol, kp, grid);
        rows.push_back({m.id, ell, N, schatten_of(op.matrix, cfg.p), m.control()});
      }
    }
  }
  CsvWriter w(cfg.out_dir + "/divergence.csv", {"experiment", "symbol", "ell", "N", "schatten", "degenerate"});
  for (const auto& r : rows)
    w.row({"divergence", r.symbol, std::to_string(r.ell), std::to_string(r.N), fmt(r.schatten),
           r.degenerate ? "1" : "0"});

  rep.info("divergence", "besov_not_computed", static_cast<double>(D) / cfg.p,
           "smoothness n/p = 1 lies outside (0; 1)");
  for (int ell : cfg.ells) {
    for (const auto& m : family) {
      std::vector<double> v;
      for (const auto& r : rows)
        if (r.ell == ell && r.symbol == m.id) v.push_back(r.schatten);
      const std::string tag = m.id + ":l" + std::to_string(ell);
      if (m.control()) {
        const double mx = *std::max_element(v.begin(), v.end());
        rep.add("divergence", "control_zero:" + tag, mx == 0.0, mx, 0.0, "exact zero at every N");
        continue;
      }
      bool increasing = true;
      for (std::size_t i = 1; i < v.size(); ++i) increasing = increasing && v[i] > v[i - 1];
      rep.add("divergence", "increasing:" + tag, increasing, v.back(), v.front(), "S^n strictly increasing in N");
      const double g = v.back() / v.front();
      rep.add("divergence", "growth:" + tag, g >= cfg.growth_min, g, cfg.growth_min, "final/initial");
    }
  }

  // Dyadic oscillation statistic, cumulative over generations.
  CsvWriter ws(cfg.out_dir + "/dyadic_statistic.csv", {"symbol", "k_max", "generation_term", "cumulative"});
  for (const auto& m : family) {
    std::vector<double> best;
    double best_total = -1.0;
    for (const auto& h : one_third_shifts<D>(cfg.shift_count)) {
      std::vector<double> tot(static_cast<std::size_t>(cfg.div_k_max - cfg.div_k_min + 1), 0.0);
      for (Half half : {Half::plus, Half::minus}) {
        const auto sys = build_system<D>(half, h, box, {cfg.div_k_min, cfg.div_k_max}, ShiftMode::adjacent);
        const auto g = oscillation_statistic_by_generation(m.symbol, sys, static_cast<double>(D));
        for (std::size_t i = 0; i < g.size(); ++i) tot[i] += g[i];
      }
      const double s = ordered_sum(tot);
      if (s > best_total) {
        best_total = s;
        best = tot;
      }
    }
    double cum = 0.0;
    std::vector<double> cums;
    for (std::size_t i = 0; i < best.size(); ++i) {
      cum += best[i];
      cums.push_back(cum);
      ws.row({m.id, std::to_string(cfg.div_k_min + static_cast<int>(i)), fmt(best[i]), fmt(cum)});
    }
    if (m.control()) {
      // Cube means of a constant carry quadrature rounding, so "zero" means roundoff-sized.
      constexpr double roundoff = 1e-20;
      rep.add("divergence", "statistic_zero:" + m.id, cum <= roundoff, cum, roundoff, "rounding only");
      continue;
    }
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < cums.size(); ++i) {
      if (cums[i - 1] <= 0.0) continue;
      worst = std::min(worst, cums[i] / cums[i - 1]);
    }
    rep.add("divergence", "statistic_growth:" + m.id, worst >= cfg.stat_growth_min, worst, cfg.stat_growth_min,
            "smallest per-generation growth of the cumulative statistic");
  }
  return rows;
}

// --------------------------------------------------------------------------
// lower bound audit

struct LowerRow {
  std::string symbol;
  int ell = 0;
  double schatten_pp = 0.0;  ///< ||[b, R]||_{S^p}^p
  double energy = 0.0;
  double nwo = 0.0;
  double oscillation = 0.0;
  double double_integral = 0.0;
  std::size_t nwo_cubes = 0;
  bool degenerate = false;
};

template <int D>
std::vector<LowerRow> lower_bound_audit(const ExperimentConfig& cfg, Report& rep) {
  if (!(cfg.p > cfg.n)) throw Error("lower bound audit needs p > n");
  require(cfg.n == D, "dimension mismatch");
  const auto family = family_by_name<D>(family_for(cfg, "ratio"));
  const auto box = config_box<D>(cfg);
  const auto grid = make_grid(box, cfg.audit_grid);
  const auto dgrid = make_grid(box, 2 * cfg.audit_grid);
  const double p = cfg.p;
  if (p < 1.0) throw Error("energy exponent must be at least 1");

  // Symbol-only statistics are computed once.
  std::vector<double> energy(family.size()), osc(family.size()), dint(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& b = family[i].symbol;
    energy[i] = sup_over_shifts<D>(cfg, {cfg.energy_k_min, cfg.energy_k_max},
                                   [&](const DyadicSystem<D>& s) { return exact_energy_sum(b, s, p); });
    osc[i] = sup_over_shifts<D>(cfg, {cfg.lemma_k_min, cfg.lemma_k_max},
                                [&](const DyadicSystem<D>& s) { return oscillation_sum(b, s, p); });
    dint[i] = besov_double_integral(b, dgrid, p);
  }

  std::vector<LowerRow> rows;
  for (int ell : cfg.ells) {
    const KernelParams<D> kp(ell);
    for (std::size_t i = 0; i < family.size(); ++i) {
      const auto& m = family[i];
      LowerRow r;
      r.symbol = m.id;
      r.ell = ell;
      r.degenerate = m.control();
      r.schatten_pp = std::pow(schatten_of(assemble_commutator(m.symbol, kp, grid).matrix, p), p);
      r.energy = energy[i];
      r.oscillation = osc[i];
      r.double_integral = dint[i];
      std::size_t used = 0;
      r.nwo = sup_over_shifts<D>(cfg, {cfg.nwo_k_min, cfg.nwo_k_max}, [&](const DyadicSystem<D>& s) {
        const auto res = nwo_sum(m.symbol, s, kp, cfg.nwo_A, cfg.nwo_samples, p);
        used += res.cubes;
        return res.total;
      });
      r.nwo_cubes = used;
      rows.push_back(r);
    }
  }

  CsvWriter w(cfg.out_dir + "/lower.csv",
              {"symbol", "ell", "schatten_pp", "energy", "nwo", "oscillation_sum", "double_integral",
               "energy_ratio", "nwo_ratio", "oscillation_ratio", "double_integral_ratio", "degenerate"});
  auto ratio = [](double a, double b) { return b > 0.0 ? a / b : 0.0; };
  for (const auto& r : rows)
    w.row({r.symbol, std::to_string(r.ell), fmt(r.schatten_pp), fmt(r.energy), fmt(r.nwo), fmt(r.oscillation),
           fmt(r.double_integral), fmt(ratio(r.energy, r.schatten_pp)), fmt(ratio(r.nwo, r.schatten_pp)),
           fmt(ratio(r.oscillation, r.schatten_pp)), fmt(ratio(r.double_integral, r.schatten_pp)),
           r.degenerate ? "1" : "0"});

  for (const auto& r : rows) {
    if (!r.degenerate) continue;
    const std::string tag = r.symbol + ":l" + std::to_string(r.ell);
    const double op = std::max(r.schatten_pp, r.nwo);
    rep.add("lower", "control_zero:" + tag, op == 0.0, op, 0.0, "operator and NWO sums, exact");
    // Symbol-only sums go through quadrature means, which round.
    constexpr double roundoff = 1e-40;
    const double sym = std::max({r.energy, r.oscillation, r.double_integral});
    rep.add("lower", "control_statistics:" + tag, sym <= roundoff, sym, roundoff, "rounding only");
  }
  for (int ell : cfg.ells) {
    const std::string l = ":l" + std::to_string(ell);
    // The constant-stability requirement is asserted for the normal component;
    // tangential components are reported (see README).
    const bool gate = ell == D;
    std::vector<double> e, nw, os, di;
    for (const auto& r : rows) {
      if (r.degenerate || r.ell != ell) continue;
      e.push_back(r.energy / r.schatten_pp);
      nw.push_back(r.nwo / r.schatten_pp);
      os.push_back(r.oscillation / r.schatten_pp);
      di.push_back(r.double_integral / r.schatten_pp);
    }
    auto stable = [&](const char* what, const std::vector<double>& v) {
      const auto s = spread_of(v);
      const std::string detail = "C=" + fmt(s.center()) + " max/min=" + fmt(s.ratio());
      if (gate)
        rep.add("lower", std::string(what) + "_stable" + l, s.within(cfg.lower_band), s.ratio(),
                (1.0 + cfg.lower_band) / (1.0 - cfg.lower_band), detail);
      else
        rep.info("lower", std::string(what) + "_stable" + l, s.ratio(), detail);
    };
    stable("energy", e);
    stable("nwo", nw);
    const auto so = spread_of(os), sd = spread_of(di);
    rep.add("lower", "oscillation_bound" + l, so.max <= cfg.lemma_C, so.max, cfg.lemma_C, "max ratio over family");
    rep.add("lower", "double_integral_bound" + l, sd.max <= cfg.double_integral_C, sd.max, cfg.double_integral_C,
            "max ratio over family");
    std::size_t cubes = 0;
    for (const auto& r : rows)
      if (r.ell == ell) cubes += r.nwo_cubes;
    rep.info("lower", "nwo_cubes" + l, static_cast<double>(cubes), "cubes with an in-box witness ball");
  }

  // Haar coefficient bound on random admissible cubes.
  std::mt19937_64 rng(cfg.seed);
  const auto non_deg = non_degenerate(family);
  std::size_t bad = 0, total = 0;
  double worst = 0.0;
  for (int t = 0; t < 100 && !non_deg.empty(); ++t) {
    const auto& b = non_deg[static_cast<std::size_t>(t) % non_deg.size()].symbol;
    const Half half = (rng() & 1) ? Half::plus : Half::minus;
    const int k = static_cast<int>(rng() % 5) - 1;  // generations -1..3
    const auto shifts = one_third_shifts<D>(cfg.shift_count);
    const auto sys = build_system<D>(half, shifts[rng() % shifts.size()], box, {k, k}, ShiftMode::adjacent);
    const auto cubes = sys.admissible(k);
    if (cubes.empty()) continue;
    const auto chk = haar_bound_check(b, cubes[rng() % cubes.size()], p);
    ++total;
    if (!chk.ok()) ++bad;
    if (chk.max_coefficient > 0.0) worst = std::max(worst, chk.oscillation / (chk.constant * chk.max_coefficient));
  }
  rep.add("lower", "haar_coefficient_bound", bad == 0 && total > 0, worst, 1.0,
          std::to_string(total) + " random cubes");
  return rows;
}

// --------------------------------------------------------------------------
// upper bound audit

struct UpperRow {
  std::string symbol;
  int ell = 0;
  int N = 0;
  double schatten = 0.0;
  double weak = 0.0;
  double russo = 0.0;
  double mixed_full = 0.0;
  double mixed_plus = 0.0;
  double mixed_minus = 0.0;
  double cross_max = 0.0;
};

/// Rows and columns of m restricted to nodes of the given halves.
template <int D>
GridKernel block_kernel(const GridKernel& k, const QuadratureGrid<D>& grid, Half rows, Half cols) {
  std::vector<Eigen::Index> ri, ci;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.halves[i] == rows) ri.push_back(static_cast<Eigen::Index>(i));
    if (grid.halves[i] == cols) ci.push_back(static_cast<Eigen::Index>(i));
  }
  GridKernel b{Eigen::MatrixXd(static_cast<Eigen::Index>(ri.size()), static_cast<Eigen::Index>(ci.size())), k.wx,
               k.wy};
  for (std::size_t j = 0; j < ci.size(); ++j)
    for (std::size_t i = 0; i < ri.size(); ++i)
      b.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k.values(ri[i], ci[j]);
  return b;
}

template <int D>
std::vector<UpperRow> upper_bound_audit(const ExperimentConfig& cfg, Report& rep) {
  if (!(cfg.p > 2.0)) throw Error("Russo bound needs p > 2");
  if (!(cfg.p > cfg.n)) throw Error("upper bound audit needs p > n");
  require(cfg.n == D, "dimension mismatch");
  auto family = family_by_name<D>(family_for(cfg, "ratio"));
  family.push_back({"zero", symbols::constant<D>(0.0)});
  family.back().symbol.label = "zero";
  const auto grid = make_grid(config_box<D>(cfg), cfg.audit_grid);
  std::vector<UpperRow> rows;
  for (int ell : cfg.ells) {
    const KernelParams<D> kp(ell);
    for (const auto& m : family) {
      const auto op = assemble_commutator(m.symbol, kp, grid);
      const auto sp = singular_values(op);
      const auto kern = commutator_kernel(op);
      UpperRow r;
      r.symbol = m.id;
      r.ell = ell;
      r.N = cfg.audit_grid;
      r.schatten = schatten_norm(sp, cfg.p);
      r.weak = weak_schatten_norm(sp, cfg.p);
      r.russo = russo_bound(kern, cfg.p);
      r.mixed_full = mixed_norm(kern, cfg.p, MixedMode::weak);
      r.mixed_plus = mixed_norm(block_kernel(kern, grid, Half::plus, Half::plus), cfg.p, MixedMode::weak);
      r.mixed_minus = mixed_norm(block_kernel(kern, grid, Half::minus, Half::minus), cfg.p, MixedMode::weak);
      const auto c1 = block_kernel(kern, grid, Half::plus, Half::minus);
      const auto c2 = block_kernel(kern, grid, Half::minus, Half::plus);
      r.cross_max = std::max(c1.values.cwiseAbs().maxCoeff(), c2.values.cwiseAbs().maxCoeff());
      rows.push_back(r);
    }
  }
  CsvWriter w(cfg.out_dir + "/upper.csv",
              {"symbol", "ell", "N", "p", "schatten", "weak_schatten", "russo_bound", "mixed_weak_full",
               "mixed_weak_plus", "mixed_weak_minus", "cross_block_max"});
  for (const auto& r : rows)
    w.row({r.symbol, std::to_string(r.ell), std::to_string(r.N), fmt(cfg.p), fmt(r.schatten), fmt(r.weak),
           fmt(r.russo), fmt(r.mixed_full), fmt(r.mixed_plus), fmt(r.mixed_minus), fmt(r.cross_max)});
  for (const auto& r : rows) {
    const std::string tag = r.symbol + ":l" + std::to_string(r.ell);
    rep.add("upper", "russo:" + tag, r.weak <= cfg.russo_slack * r.russo, r.russo > 0 ? r.weak / r.russo : 0.0,
            cfg.russo_slack, "weak Schatten / Russo bound");
    rep.add("upper", "split:" + tag, r.mixed_full <= (r.mixed_plus + r.mixed_minus) * (1.0 + 1e-12),
            r.mixed_full, r.mixed_plus + r.mixed_minus, "full mixed norm vs half-space blocks");
    rep.add("upper", "cross_zero:" + tag, r.cross_max == 0.0, r.cross_max, 0.0, "");
    rep.add("upper", "weak_le_strong:" + tag, r.weak <= r.schatten * (1.0 + 1e-12), r.weak, r.schatten, "");
  }
  return rows;
}

}  // namespace nrl
