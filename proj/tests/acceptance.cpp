// Acceptance run: one pass/fail line per criterion, with the key measurements
// and runtimes underneath. Exit status 0 iff every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nrl/harness/config.hpp"
#include "nrl/harness/report.hpp"
#include "nrl/harness/studies.hpp"
#include "nrl/harness/verify.hpp"

namespace fs = std::filesystem;
using namespace nrl;

namespace {

struct Criterion {
  int id;
  std::string title;
  double budget_s;  ///< runtime limit, infinity when none
  std::vector<std::string> highlights;  ///< check-name prefixes echoed under the verdict
  std::function<Report()> run;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Relative paths of every regular file under root, sorted.
std::vector<std::string> listing(const fs::path& root) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root).string());
  std::sort(out.begin(), out.end());
  return out;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

ExperimentConfig load(const std::string& dir, const std::string& name, const fs::path& out) {
  auto c = load_config(dir + "/" + name + ".cfg");
  c.out_dir = out.string();
  validate(c);
  return c;
}

/// Everything the determinism check writes, in one directory.
void deterministic_batch(const std::string& cfg_dir, const fs::path& root) {
  Report r;
  auto v = load(cfg_dir, "verify", root / "verify");
  verify_suite<2>(v).write(v.out_dir + "/invariants.csv");
  auto d = load(cfg_dir, "divergence", root / "divergence");
  divergence_study<2>(d, r);
  auto u = load(cfg_dir, "upper", root / "upper");
  upper_bound_audit<2>(u, r);
  // reduced ratio study: same code path, smaller grids
  auto q = load(cfg_dir, "ratio", root / "ratio");
  q.grids = {16, 32};
  q.besov_grid = 64;
  ratio_study<2>(q, r);
  r.write((root / "invariants.csv").string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string out = "acceptance";
  std::string cfg_dir = NRL_CONFIG_DIR;
  std::vector<int> only;
  app.add_option("--out", out, "output directory");
  app.add_option("--configs", cfg_dir, "directory holding the shipped .cfg files");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const fs::path root(out);
  fs::create_directories(root);
  const double none = std::numeric_limits<double>::infinity();
  auto sub = [&](const std::string& name) { return root / name; };

  std::vector<Criterion> criteria{
      {1, "kernel gating on 10^4 cross-half pairs", 1.0, {"cross_half_zero"},
       [&] { return check_gating<2>(load(cfg_dir, "verify", sub("c01")), 10000); }},
      {2, "heat-kernel identities", 30.0, {"conservation", "composition", "even_extension", "mutation"},
       [&] { return check_heat_identities<2>(load(cfg_dir, "verify", sub("c02"))); }},
      {3, "spectral oracles", 10.0, {"s2_frobenius", "diag_exact", "weak_le_strong"},
       [&] { return check_spectra<2>(load(cfg_dir, "verify", sub("c03"))); }},
      {4, "zero commutator for per-half constants, N = 16, 32, 64", 10.0, {"exact_zero"},
       [&] { return check_zero_commutator<2>(load(cfg_dir, "verify", sub("c04")), {16, 32, 64}); }},
      {5, "ratio study n=2 p=4 N=64", 15 * 60.0, {"spread", "refine"},
       [&] {
         Report r;
         auto c = load(cfg_dir, "ratio", sub("c05"));
         ratio_study<2>(c, r);
         r.write(c.out_dir + "/invariants.csv");
         return r;
       }},
      {6, "divergence study n=p=2", 10 * 60.0, {"growth", "control_zero", "besov_not_computed"},
       [&] {
         Report r;
         auto c = load(cfg_dir, "divergence", sub("c06"));
         divergence_study<2>(c, r);
         r.write(c.out_dir + "/invariants.csv");
         return r;
       }},
      {7, "lower-bound audit n=2 p=4 N=32, 9 shifts", 10 * 60.0, {"energy_stable", "nwo_stable"},
       [&] {
         Report r;
         auto c = load(cfg_dir, "lower", sub("c07"));
         lower_bound_audit<2>(c, r);
         r.write(c.out_dir + "/invariants.csv");
         return r;
       }},
      {8, "upper-bound audit n=2 p=4 N=32", 5 * 60.0, {"russo"},
       [&] {
         Report r;
         auto c = load(cfg_dir, "upper", sub("c08"));
         upper_bound_audit<2>(c, r);
         r.write(c.out_dir + "/invariants.csv");
         return r;
       }},
      {9, "dyadic and Haar suite", 30.0, {"properties", "haar_gram", "reconstruction", "tower"},
       [&] { return check_dyadic<2>(load(cfg_dir, "verify", sub("c09"))); }},
      {10, "sign lemma with calibrated A", 30.0, {"calibrated", "violations", "interface"},
       [&] { return check_sign_lemma<2>(load(cfg_dir, "verify", sub("c10"))); }},
      {11, "gradient oscillation, k = 4..8", 30.0, {"band"},
       [&] { return check_gradient_oscillation<2>(load(cfg_dir, "verify", sub("c11"))); }},
      {12, "determinism of CSV output", none, {},
       [&] {
         Report r;
         const auto a = sub("c12") / "run_a", b = sub("c12") / "run_b";
         fs::remove_all(a);
         fs::remove_all(b);
         deterministic_batch(cfg_dir, a);
         deterministic_batch(cfg_dir, b);
         const auto la = listing(a), lb = listing(b);
         r.add("determinism", "same_file_set", la == lb, static_cast<double>(la.size()),
               static_cast<double>(lb.size()), "files in each run");
         std::size_t differing = 0, csvs = 0;
         for (const auto& f : la) {
           if (fs::path(f).extension() != ".csv") continue;
           ++csvs;
           if (!fs::exists(b / f) || read_file(a / f) != read_file(b / f)) {
             ++differing;
             r.add("determinism", "differs:" + f, false, 1.0, 0.0, "");
           }
         }
         r.add("determinism", "byte_identical", differing == 0 && csvs > 0, static_cast<double>(differing), 0.0,
               std::to_string(csvs) + " CSV files compared");
         return r;
       }},
  };

  CsvWriter summary((root / "summary.csv").string(), {"criterion", "title", "status", "seconds", "budget", "checks",
                                                        "failed"});
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    bool crashed = false;
    try {
      rep = c.run();
    } catch (const std::exception& e) {
      rep.add("criterion", "exception", false, 0.0, 0.0, e.what());
      crashed = true;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = rep.ok() && in_time && !crashed;
    failed += !pass;
    std::printf("%s  criterion %2d: %s  (%zu checks, %zu failed, %.1f s", pass ? "PASS" : "FAIL", c.id,
                c.title.c_str(), rep.checks.size(), rep.failures(), secs);
    if (std::isfinite(c.budget_s)) std::printf(" of %.0f s", c.budget_s);
    std::printf(")\n");
    if (!in_time) std::printf("        over the runtime budget\n");
    for (const auto& k : rep.checks) {
      // short reports are echoed in full, long ones only by highlight
      bool show = rep.checks.size() <= 12 || !k.asserted || !k.pass;
      for (const auto& h : c.highlights) show = show || starts_with(k.name, h);
      if (!show) continue;
      const char* tag = !k.asserted ? "info" : (k.pass ? "ok  " : "FAIL");
      std::printf("        %s %-34s %s", tag, k.name.c_str(), fmt(k.measured).c_str());
      if (k.asserted) std::printf("  limit %s", fmt(k.threshold).c_str());
      if (!k.detail.empty()) std::printf("  %s", k.detail.c_str());
      std::printf("\n");
    }
    std::fflush(stdout);
    summary.row({std::to_string(c.id), c.title, pass ? "pass" : "fail", fmt(secs), fmt(c.budget_s),
                 std::to_string(rep.checks.size()), std::to_string(rep.failures())});
  }
  std::printf("%s: %d criteria failed\n", failed ? "FAIL" : "PASS", failed);
  return failed ? 1 : 0;
}
