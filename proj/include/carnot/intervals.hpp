#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace carnot {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double t) const { return lo <= t && t <= hi; }
};

inline double total_length(const std::vector<Interval>& set) {
  double s = 0.0;
  for (const auto& i : set) s += i.length();
  return s;
}

/// Sorts and merges overlapping or touching intervals.
inline std::vector<Interval> merge_intervals(std::vector<Interval> set) {
  std::sort(set.begin(), set.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& i : set) {
    if (!out.empty() && i.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, i.hi);
    } else {
      out.push_back(i);
    }
  }
  return out;
}

inline std::vector<Interval> intersect(const std::vector<Interval>& set, Interval window) {
  std::vector<Interval> out;
  for (const auto& i : set) {
    const double lo = std::max(i.lo, window.lo), hi = std::min(i.hi, window.hi);
    if (lo <= hi) out.push_back({lo, hi});
  }
  return out;
}

/// Boundary of a membership predicate between an inside and an outside
/// parameter, by bisection until the bracket is narrower than `xtol`.
template <class Inside>
double bisect_boundary(Inside&& inside, double t_in, double t_out, double xtol) {
  for (int it = 0; it < 200 && std::abs(t_out - t_in) > xtol; ++it) {
    const double mid = 0.5 * (t_in + t_out);
    if (mid == t_in || mid == t_out) break;
    if (inside(mid)) {
      t_in = mid;
    } else {
      t_out = mid;
    }
  }
  return 0.5 * (t_in + t_out);
}

/// {t in [a, b] : inside(t)} resolved on a uniform grid of `cells` cells, with
/// bisection refinement at every detected crossing. Components narrower than a
/// grid cell that contain no grid point are not seen.
template <class Inside>
std::vector<Interval> membership_intervals(Inside&& inside, double a, double b, int cells, double xtol) {
  std::vector<Interval> out;
  if (!(b > a) || cells < 1) return out;
  const double h = (b - a) / cells;
  auto grid = [&](int i) { return i == cells ? b : a + h * i; };
  bool prev_in = inside(a);
  double start = a;
  for (int i = 1; i <= cells; ++i) {
    const double t = grid(i);
    const bool in = inside(t);
    if (in && !prev_in) start = bisect_boundary(inside, t, grid(i - 1), xtol);
    if (!in && prev_in) out.push_back({start, bisect_boundary(inside, grid(i - 1), t, xtol)});
    prev_in = in;
  }
  if (prev_in) out.push_back({start, b});
  return out;
}

}  // namespace carnot
