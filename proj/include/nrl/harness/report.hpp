#pragma once

// CSV output with fixed formatting (byte-identical across runs) and the
// pass/fail records every study produces.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nrl/core.hpp"

namespace nrl {

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : path_(path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error("cannot write " + path);
    columns_ = header.size();
    write_cells(header);
  }

  /// Cells are written as given; use fmt() for reals.
  void row(const std::vector<std::string>& cells) {
    require(cells.size() == columns_, "CSV row width does not match header");
    write_cells(cells);
  }

  const std::string& path() const { return path_; }

 private:
  void write_cells(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      const auto& c = cells[i];
      if (c.find_first_of(",\"\n") == std::string::npos) {
        out_ << c;
        continue;
      }
      out_ << '"';
      for (char ch : c) {
        if (ch == '"') out_ << '"';
        out_ << ch;
      }
      out_ << '"';
    }
    out_ << '\n';
  }

  std::string path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
};

/// One asserted (or informational) check.
struct Check {
  std::string group;
  std::string name;
  bool pass = true;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
  bool asserted = true;  ///< false: reported only, never fails the run
};

struct Report {
  std::vector<Check> checks;

  void add(Check c) { checks.push_back(std::move(c)); }

  void add(std::string group, std::string name, bool pass, double measured, double threshold,
           std::string detail = "") {
    checks.push_back({std::move(group), std::move(name), pass, measured, threshold, std::move(detail), true});
  }

  void info(std::string group, std::string name, double measured, std::string detail = "") {
    checks.push_back({std::move(group), std::move(name), true, measured, 0.0, std::move(detail), false});
  }

  void merge(const Report& other) { checks.insert(checks.end(), other.checks.begin(), other.checks.end()); }

  bool ok() const {
    for (const auto& c : checks)
      if (c.asserted && !c.pass) return false;
    return true;
  }

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : checks)
      if (c.asserted && !c.pass) ++n;
    return n;
  }

  void write(const std::string& path) const {
    CsvWriter w(path, {"group", "check", "status", "measured", "threshold", "detail"});
    for (const auto& c : checks)
      w.row({c.group, c.name, c.asserted ? (c.pass ? "pass" : "fail") : "info", fmt(c.measured),
             fmt(c.threshold), c.detail});
  }
};

}  // namespace nrl
