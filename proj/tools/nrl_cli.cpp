// Command-line front end for the studies and audits.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nrl/harness/config.hpp"
#include "nrl/harness/io.hpp"
#include "nrl/harness/studies.hpp"
#include "nrl/harness/verify.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> n;
  std::optional<double> p;
  std::optional<int> ell;
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "key = value configuration file");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--n", o.n, "dimension");
  sub->add_option("--p", o.p, "Schatten / Besov exponent");
  sub->add_option("--ell", o.ell, "Riesz component (1..n)");
  sub->add_option("--grid", o.grid, "single grid size N (replaces the ladder)");
  sub->add_option("--seed", o.seed, "random seed");
}

nrl::ExperimentConfig resolve(const Overrides& o) {
  nrl::ExperimentConfig c = o.config.empty() ? nrl::ExperimentConfig{} : nrl::load_config(o.config);
  if (o.out) c.out_dir = *o.out;
  if (o.n) c.n = *o.n;
  if (o.p) {
    c.p = *o.p;
    c.p_set = true;
  }
  if (o.ell) c.ells = {*o.ell};
  if (o.grid) c.grids = {*o.grid};
  if (o.seed) c.seed = *o.seed;
  nrl::validate(c);
  return c;
}

int finish(const nrl::Report& rep, const nrl::ExperimentConfig& cfg) {
  rep.write(cfg.out_dir + "/invariants.csv");
  for (const auto& c : rep.checks) {
    const char* status = !c.asserted ? "info" : (c.pass ? "pass" : "FAIL");
    std::printf("%-5s %-11s %-36s %-17s %-17s %s\n", status, c.group.c_str(), c.name.c_str(),
                nrl::fmt(c.measured).c_str(), c.asserted ? nrl::fmt(c.threshold).c_str() : "", c.detail.c_str());
  }
  std::printf("%zu checks, %zu failed; report in %s/invariants.csv\n", rep.checks.size(), rep.failures(),
              cfg.out_dir.c_str());
  return rep.ok() ? 0 : 1;
}

template <int D>
int run(const std::string& cmd, nrl::ExperimentConfig cfg) {
  nrl::Report rep;
  if (cmd == "verify") {
    rep = nrl::verify_suite<D>(cfg);
  } else if (cmd == "ratio-study") {
    nrl::ratio_study<D>(cfg, rep);
  } else if (cmd == "divergence-study") {
    if (!cfg.p_set) cfg.p = cfg.n;
    nrl::divergence_study<D>(cfg, rep);
  } else if (cmd == "lower-audit") {
    nrl::lower_bound_audit<D>(cfg, rep);
  } else if (cmd == "upper-audit") {
    nrl::upper_bound_audit<D>(cfg, rep);
  }
  return finish(rep, cfg);
}

template <int D>
nrl::Point<D> parse_point(const std::string& s) {
  const auto parts = nrl::split_list(s);
  if (parts.size() != static_cast<std::size_t>(D)) throw nrl::Error("point needs " + std::to_string(D) + " coordinates");
  nrl::Point<D> x;
  for (int a = 0; a < D; ++a) x[a] = std::stod(parts[a]);
  return x;
}

template <int D>
int kernel_eval(const nrl::ExperimentConfig& cfg, const std::string& xs, const std::string& ys, double t) {
  const auto x = parse_point<D>(xs), y = parse_point<D>(ys);
  std::printf("heat_full(t=%g)    = %.15e\n", t, nrl::heat_kernel_full<D>(t, x, y));
  std::printf("heat_neumann(t=%g) = %.15e\n", t, nrl::heat_kernel_neumann<D>(t, x, y));
  for (int ell : cfg.ells) {
    const nrl::KernelParams<D> kp(ell);
    if (x == y && x[D - 1] * y[D - 1] >= 0.0) {
      std::printf("riesz_%d = singular\n", ell);
      continue;
    }
    const auto terms = nrl::riesz_terms(kp, x, y);
    std::printf("riesz_%d = %.15e (classical %.15e, reflected %.15e)\n", ell, nrl::riesz_kernel(kp, x, y),
                terms.classical, terms.reflected);
  }
  return 0;
}

template <int D>
int export_matrix(const nrl::ExperimentConfig& cfg, const std::string& symbol) {
  auto family = nrl::family_by_name<D>(cfg.family == "auto" ? "ratio" : cfg.family);
  const auto grid = nrl::make_grid(nrl::config_box<D>(cfg), cfg.grids.front());
  for (const auto& m : family) {
    if (!symbol.empty() && m.id != symbol) continue;
    for (int ell : cfg.ells) {
      const auto op = nrl::assemble_commutator(m.symbol, nrl::KernelParams<D>(ell), grid);
      std::filesystem::create_directories(cfg.out_dir);
      const std::string path = cfg.out_dir + "/commutator_" + m.id + "_l" + std::to_string(ell) + "_N" +
                               std::to_string(grid.per_axis) + ".nrlmat";
      nrl::write_matrix(path, op);
      std::printf("%s\n", path.c_str());
    }
    if (!symbol.empty()) return 0;
  }
  if (!symbol.empty()) throw nrl::Error("unknown symbol: " + symbol);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neumann-Laplacian Riesz commutators: studies and audits"};
  app.require_subcommand(1);
  Overrides o;
  std::string xs, ys, symbol;
  double t = 1.0;
  std::vector<CLI::App*> subs;
  for (const char* name : {"verify", "ratio-study", "divergence-study", "lower-audit", "upper-audit"}) {
    auto* s = app.add_subcommand(name);
    add_common(s, o);
    subs.push_back(s);
  }
  auto* ke = app.add_subcommand("kernel-eval", "evaluate kernels at one pair of points");
  add_common(ke, o);
  ke->add_option("--x", xs, "comma-separated coordinates")->required();
  ke->add_option("--y", ys, "comma-separated coordinates")->required();
  ke->add_option("--t", t, "heat time");
  auto* ex = app.add_subcommand("export-matrix", "write commutator matrices in NRLMAT1 format");
  add_common(ex, o);
  ex->add_option("--symbol", symbol, "family member id (default: all)");
  subs.push_back(ke);
  subs.push_back(ex);
  subs[0]->description("run every invariant check");
  subs[1]->description("commutator Schatten norm against Besov norm, p > n");
  subs[2]->description("Schatten norm growth under refinement at p = n");
  subs[3]->description("dyadic energy, NWO and Besov-type sums against ||[b,R]||^p");
  subs[4]->description("weak Schatten norm against the Russo bound");

  CLI11_PARSE(app, argc, argv);
  try {
    const auto cfg = resolve(o);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "kernel-eval") return cfg.n == 2 ? kernel_eval<2>(cfg, xs, ys, t) : kernel_eval<3>(cfg, xs, ys, t);
    if (cmd == "export-matrix") return cfg.n == 2 ? export_matrix<2>(cfg, symbol) : export_matrix<3>(cfg, symbol);
    return cfg.n == 2 ? run<2>(cmd, cfg) : run<3>(cmd, cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
