#pragma once

// Named symbol families used by the studies.

#include <string>
#include <vector>

#include "nrl/symbol.hpp"

namespace nrl {

template <int D>
struct FamilyMember {
  std::string id;
  Symbol<D> symbol;
  bool control() const { return symbol.per_half_constant; }
};

namespace detail {

/// Point with first coordinate a, last coordinate c, zeros between.
template <int D>
Point<D> at(double a, double c) {
  Point<D> p{};
  p[0] = a;
  p[D - 1] = c;
  return p;
}

template <int D>
FamilyMember<D> member(std::string id, Symbol<D> s) {
  s.label = id;
  return {std::move(id), std::move(s)};
}

}  // namespace detail

/// Smooth bumps for p > n: two scales at one centre and a second centre in the
/// upper half, an odd bump, a lower-half bump; then two per-half-constant
/// controls.
template <int D>
std::vector<FamilyMember<D>> ratio_family() {
  using detail::at;
  using detail::member;
  return {
      member<D>("bump_s30", symbols::gaussian<D>(at<D>(0.0, 0.8), 0.30)),
      member<D>("bump_s40", symbols::gaussian<D>(at<D>(0.0, 0.8), 0.40)),
      member<D>("bump_off", symbols::gaussian<D>(at<D>(0.4, 0.4), 0.30)),
      member<D>("odd", symbols::odd_gaussian<D>(at<D>(0.0, 0.7), 0.30)),
      member<D>("bump_minus", symbols::gaussian<D>(at<D>(-0.3, -0.7), 0.35)),
      member<D>("ctl_halves", symbols::per_half<D>(1.0, -0.5)),
      member<D>("ctl_const", symbols::constant<D>(2.0)),
  };
}

/// Narrow bumps for the endpoint study: well resolved at the coarsest grid only
/// in the sense of sampling, so the S^n norm keeps growing under refinement.
template <int D>
std::vector<FamilyMember<D>> divergence_family() {
  using detail::at;
  using detail::member;
  return {
      member<D>("narrow_a", symbols::gaussian<D>(at<D>(0.0, 0.8), 0.15)),
      member<D>("narrow_b", symbols::gaussian<D>(at<D>(0.4, 0.5), 0.125)),
      member<D>("narrow_odd", symbols::odd_gaussian<D>(at<D>(0.0, 0.7), 0.15)),
      member<D>("narrow_minus", symbols::gaussian<D>(at<D>(-0.3, -0.7), 0.15)),
      member<D>("ctl_halves", symbols::per_half<D>(1.0, -0.5)),
      member<D>("ctl_const", symbols::constant<D>(2.0)),
  };
}

template <int D>
std::vector<FamilyMember<D>> family_by_name(const std::string& name) {
  if (name == "ratio") return ratio_family<D>();
  if (name == "divergence") return divergence_family<D>();
  throw Error("unknown symbol family: " + name);
}

template <int D>
std::vector<FamilyMember<D>> non_degenerate(const std::vector<FamilyMember<D>>& f) {
  std::vector<FamilyMember<D>> out;
  for (const auto& m : f)
    if (!m.control()) out.push_back(m);
  return out;
}

}  // namespace nrl
