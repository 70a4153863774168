#pragma once

// Singular values, Schatten norms, and the mixed kernel norms behind the
// weak-Schatten upper bound.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "nrl/core.hpp"
#include "nrl/discretize.hpp"

namespace nrl {

struct SingularSpectrum {
  std::vector<double> s;  ///< descending, non-negative
  std::size_t size() const { return s.size(); }
  double largest() const { return s.empty() ? 0.0 : s.front(); }
};

inline bool is_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = j + 1; i < m.rows(); ++i)
      if (m(i, j) != m(j, i)) return false;
  return true;
}

/// Exactly symmetric input goes through the symmetric eigensolver (|lambda| are
/// the singular values); everything else through divide-and-conquer SVD.
inline SingularSpectrum singular_values(const Eigen::MatrixXd& m) {
  require(m.allFinite(), "matrix has non-finite entries");
  SingularSpectrum out;
  const auto n = std::min(m.rows(), m.cols());
  if (n == 0) return out;
  if ((m.array() == 0.0).all()) {
    out.s.assign(static_cast<std::size_t>(n), 0.0);
    return out;
  }
  if (is_symmetric(m)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    require(es.info() == Eigen::Success, "eigensolver failed");
    const auto& ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) out.s.push_back(std::abs(ev(i)));
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) out.s.push_back(sv(i));
  }
  std::sort(out.s.begin(), out.s.end(), std::greater<>());
  return out;
}

inline SingularSpectrum singular_values(const OperatorMatrix& m) { return singular_values(m.matrix); }

inline double schatten_norm(const SingularSpectrum& sp, double p) {
  require(p > 0.0, "Schatten exponent must be positive");
  if (sp.s.empty() || sp.largest() == 0.0) return 0.0;
  // Scale by s_1 to keep s^p in range.
  const double top = sp.largest();
  double sum = 0.0;
  for (double v : sp.s) sum += std::pow(v / top, p);
  return top * std::pow(sum, 1.0 / p);
}

inline double weak_schatten_norm(const SingularSpectrum& sp, double p) {
  require(p > 0.0, "Schatten exponent must be positive");
  double best = 0.0;
  for (std::size_t k = 0; k < sp.s.size(); ++k)
    best = std::max(best, std::pow(static_cast<double>(k + 1), 1.0 / p) * sp.s[k]);
  return best;
}

/// Schatten norm for even integer p = 2, 4 through Gram traces:
/// ||M||_2 = ||M||_F and ||M||_4^4 = ||M^T M||_F^2. No SVD needed.
inline double schatten_norm_gram(const Eigen::MatrixXd& m, int p) {
  require(m.allFinite(), "matrix has non-finite entries");
  if (p == 2) return m.norm();
  require(p == 4, "Gram route supports p = 2 and p = 4");
  Eigen::MatrixXd g(m.cols(), m.cols());
  g.setZero();
  g.selfadjointView<Eigen::Lower>().rankUpdate(m.transpose());
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return std::sqrt(g.norm());
}

/// Kernel values K(x_i, y_j) at (i, j) over two node sets with uniform
/// weights wx (rows) and wy (columns).
struct GridKernel {
  Eigen::MatrixXd values;
  double wx = 1.0;
  double wy = 1.0;

  GridKernel adjoint() const { return {values.transpose(), wy, wx}; }
};

/// Commutator kernel (b(x) - b(y)) K_ell(x, y) on grid x grid, zero diagonal.
inline GridKernel commutator_kernel(const OperatorMatrix& m) {
  return {m.matrix / m.weight, m.weight, m.weight};
}

enum class MixedMode { strong, weak };

/// || ||K(., y)||_{L^p(dx)} ||_{L^{p'}(dy)} (strong) or the L^{p',infinity}
/// quasinorm of the inner profile (weak), computed exactly by sorting.
inline double mixed_norm(const GridKernel& k, double p, MixedMode mode) {
  require(p > 2.0, "mixed norm needs p > 2");
  const double pp = p / (p - 1.0);
  const auto cols = k.values.cols();
  std::vector<double> inner(static_cast<std::size_t>(cols));
  parallel_for(inner.size(), [&](std::size_t j) {
    const auto col = k.values.col(static_cast<Eigen::Index>(j));
    const double top = col.cwiseAbs().maxCoeff();
    if (top == 0.0) {
      inner[j] = 0.0;
      return;
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) s += std::pow(std::abs(col(i)) / top, p);
    inner[j] = top * std::pow(s * k.wx, 1.0 / p);
  });
  if (mode == MixedMode::strong) {
    double s = 0.0;
    for (double v : inner) s += std::pow(v, pp);
    return std::pow(s * k.wy, 1.0 / pp);
  }
  std::sort(inner.begin(), inner.end(), std::greater<>());
  double best = 0.0;
  for (std::size_t r = 0; r < inner.size(); ++r)
    best = std::max(best, inner[r] * std::pow(static_cast<double>(r + 1) * k.wy, 1.0 / pp));
  return best;
}

/// sqrt(||K||_{L^p, L^{p',inf}} ||K*||_{L^p, L^{p',inf}}).
inline double russo_bound(const GridKernel& k, double p) {
  require(p > 2.0, "Russo bound needs p > 2");
  return std::sqrt(mixed_norm(k, p, MixedMode::weak) * mixed_norm(k.adjoint(), p, MixedMode::weak));
}

}  // namespace nrl
