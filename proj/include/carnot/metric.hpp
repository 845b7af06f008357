#pragma once

#include "carnot/errors.hpp"
#include "carnot/group.hpp"
#include "carnot/intervals.hpp"
#include "carnot/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace carnot {

/// Layer-max homogeneous distance d(x, y) = N(x^{-1} y) with gauge
/// N(z) = max_k eps_k |z^(k)|^{1/k}, where z^(k) is the layer-k block.
class HomogeneousDistance {
 public:
  HomogeneousDistance(GroupPtr group, std::vector<double> eps) : group_(std::move(group)), eps_(std::move(eps)) {
    if (!group_) throw PreconditionError("distance needs a group");
    if (static_cast<int>(eps_.size()) != group_->step())
      throw ConfigError("expected " + std::to_string(group_->step()) + " layer constants, got " +
                        std::to_string(eps_.size()));
    for (double e : eps_)
      if (!(e > 0) || !std::isfinite(e)) throw ConfigError("layer constants must be positive and finite");
  }

  /// All layer constants equal to one.
  explicit HomogeneousDistance(GroupPtr group)
      : HomogeneousDistance(group, std::vector<double>(static_cast<std::size_t>(group ? group->step() : 0), 1.0)) {}

  const Group& group() const { return *group_; }
  const GroupPtr& group_ptr() const { return group_; }
  const std::vector<double>& eps() const { return eps_; }
  int dimension() const { return group_->dimension(); }

  double norm(const double* z) const {
    const auto& alg = group_->algebra();
    double best = 0.0;
    for (int k = 1; k <= alg.step(); ++k) {
      double sq = 0.0;
      for (int j = alg.layer_begin(k); j < alg.layer_end(k); ++j) sq += z[j] * z[j];
      if (sq == 0.0) continue;
      const double layer = std::sqrt(sq);
      const double v = eps_[static_cast<std::size_t>(k - 1)] * (k == 1 ? layer : std::pow(layer, 1.0 / k));
      best = std::max(best, v);
    }
    return best;
  }
  double norm(const Vector& z) const {
    check(z);
    return norm(z.data());
  }

  double distance(const double* x, const double* y) const {
    if (std::equal(x, x + dimension(), y)) return 0.0;
    std::array<double, kMaxDimension> diff{};
    group_->law().left_difference(x, y, diff.data());
    return norm(diff.data());
  }
  double distance(const Vector& x, const Vector& y) const {
    check(x);
    check(y);
    return distance(x.data(), y.data());
  }

 private:
  void check(const Vector& v) const {
    if (v.size() != dimension()) throw PreconditionError("point dimension does not match the distance's group");
  }

  GroupPtr group_;
  std::vector<double> eps_;
};

inline double distance(const HomogeneousDistance& D, const Vector& x, const Vector& y) { return D.distance(x, y); }

// ---------------------------------------------------------------------------
// Triangle inequality audit

/// d(x,z) / (d(x,y) + d(y,z)); 0 for the fully degenerate triple.
inline double triangle_ratio(const HomogeneousDistance& D, const Vector& x, const Vector& y, const Vector& z) {
  const double denom = D.distance(x, y) + D.distance(y, z);
  const double num = D.distance(x, z);
  if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / denom;
}

struct TriangleAudit {
  double max_ratio = 0.0;
  std::array<Vector, 3> witness;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  /// Ratios up to 1 + tol are rounding, not violations.
  bool violated(double tol = 1e-12) const { return max_ratio > 1.0 + tol; }
};

namespace detail {

/// Random group element whose layers carry independent log-uniform scales,
/// so that samples reach configurations dominated by any single layer.
inline Vector random_element(const ValidatedAlgebra& alg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(-1.0, 1.0), expo(-3.0, 0.0);
  Vector z(alg.dimension());
  for (int k = 1; k <= alg.step(); ++k) {
    const double scale = std::pow(10.0, expo(rng));
    for (int j = alg.layer_begin(k); j < alg.layer_end(k); ++j) z[j] = scale * coord(rng);
  }
  return z;
}

inline constexpr std::size_t kAuditBlock = 4096;

}  // namespace detail

/// Samples triples x, y = x.u, z = y.w and reports the worst triangle ratio.
/// Each block of samples draws from its own seeded stream, so the result is
/// independent of the thread count.
inline TriangleAudit triangle_audit(const HomogeneousDistance& D, std::size_t sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw PreconditionError("triangle_audit needs at least one sample");
  const auto& alg = D.group().algebra();
  const auto& law = D.group().law();
  const std::size_t blocks = (sample_count + detail::kAuditBlock - 1) / detail::kAuditBlock;
  std::vector<TriangleAudit> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b)};
    std::mt19937_64 rng(seq);
    TriangleAudit& out = partial[b];
    out.max_ratio = -1.0;
    const std::size_t begin = b * detail::kAuditBlock;
    const std::size_t end = std::min(sample_count, begin + detail::kAuditBlock);
    for (std::size_t s = begin; s < end; ++s) {
      Vector x = 10.0 * detail::random_element(alg, rng);
      Vector y = law.multiply(x, detail::random_element(alg, rng));
      Vector z = law.multiply(y, detail::random_element(alg, rng));
      const double r = triangle_ratio(D, x, y, z);
      if (r > out.max_ratio) out = {r, {x, y, z}, 0, seed};
    }
  });
  TriangleAudit best = partial.front();
  for (const auto& p : partial)
    if (p.max_ratio > best.max_ratio) best = p;
  best.samples = sample_count;
  best.seed = seed;
  return best;
}

// ---------------------------------------------------------------------------
// Metric factor

/// Euclidean length of {t : N(t v) < 1} by uniform sampling with bisection at
/// every crossing. The search window doubles until N >= 1 at both ends twice
/// in a row.
inline double unit_ball_line_length(const HomogeneousDistance& D, const Vector& v, int samples = 4096) {
  if (v.norm() == 0.0) throw PreconditionError("direction must be nonzero");
  auto inside = [&](double t) {
    const Vector p = t * v;
    return D.norm(p.data()) < 1.0;
  };
  double R = 1.0;
  int outside_streak = 0;
  for (int it = 0; it < 2000 && outside_streak < 2; ++it) {
    if (!inside(R) && !inside(-R)) {
      ++outside_streak;
    } else {
      outside_streak = 0;
    }
    R *= 2.0;
  }
  if (outside_streak < 2) throw NumericalResolutionError("unit ball unbounded along direction");
  const double xtol = 1e-15 * R;
  return total_length(membership_intervals(inside, -R, R, samples, xtol));
}

enum class MetricFactorMethod { Automatic, Measured };

/// theta(tau) = H^1(span{tau_0} n B_1) with tau_0 = dl_{x^{-1}} tau, i.e. the
/// frame coordinates read at the identity.
///
/// Single-layer directions use the closed form 2|tau_0| / d(0,tau_0)^q; other
/// directions, or MetricFactorMethod::Measured, measure the line section.
inline double metric_factor(const HomogeneousDistance& D, const Vector& tau0,
                            MetricFactorMethod method = MetricFactorMethod::Automatic) {
  const double len = tau0.norm();
  if (len == 0.0) throw PreconditionError("metric factor of the zero vector");
  const auto& alg = D.group().algebra();
  int layer = 0;
  bool single = true;
  for (int j = 0; j < tau0.size(); ++j) {
    if (tau0[j] == 0.0) continue;
    if (layer == 0) {
      layer = alg.degree(j);
    } else if (alg.degree(j) != layer) {
      single = false;
    }
  }
  if (single && method == MetricFactorMethod::Automatic) {
    const double d0 = D.norm(tau0.data());
    return 2.0 * len / std::pow(d0, layer);
  }
  return len * unit_ball_line_length(D, tau0);
}

inline double metric_factor(const HomogeneousDistance& D, const FrameCoordinates& tau,
                            MetricFactorMethod method = MetricFactorMethod::Automatic) {
  return metric_factor(D, tau.lambda, method);
}

/// c_q = theta of a unit direction in layer q (constant over H_q for the
/// layer-max gauge).
inline double layer_metric_constant(const HomogeneousDistance& D, int q) {
  Vector e = Vector::Zero(D.dimension());
  e[D.group().algebra().layer_begin(q)] = 1.0;
  return metric_factor(D, e);
}

// ---------------------------------------------------------------------------
// Ball-box comparison

/// Box_r = {x : |x_j| <= r^{d_j}}.
inline bool in_box(const Group& g, const Vector& x, double r) {
  for (int j = 0; j < x.size(); ++j)
    if (std::abs(x[j]) > std::pow(r, g.degree(j))) return false;
  return true;
}

/// Box gauge B(x) = max_j |x_j|^{1/d_j}; Box_r = {B <= r}.
inline double box_gauge(const Group& g, const Vector& x) {
  double b = 0.0;
  for (int j = 0; j < x.size(); ++j) b = std::max(b, std::pow(std::abs(x[j]), 1.0 / g.degree(j)));
  return b;
}

struct BallBoxConstants {
  /// Box_{r lambda} in D_r in Box_{r / lambda} for all r > 0.
  double lambda = 0.0;
  /// Point of Box_1 with the largest gauge value.
  Vector inner_witness;
  double inner_max_norm = 0.0;
  /// Point of the unit sphere N = 1 with the largest box gauge.
  Vector outer_witness;
  double outer_max_box = 0.0;
  std::size_t samples = 0;
};

/// Estimates the ball-box constant by maximising N over Box_1 (all corners
/// plus `resolution` random points) and the box gauge over the unit sphere
/// (coordinate axes plus `resolution` random directions normalised by dilation).
inline BallBoxConstants ball_box_constants(const HomogeneousDistance& D, std::size_t resolution = 20000,
                                           std::uint64_t seed = 1) {
  const Group& g = D.group();
  const int n = g.dimension();
  BallBoxConstants out;
  out.samples = resolution;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  auto consider_inner = [&](const Vector& p) {
    const double v = D.norm(p);
    if (v > out.inner_max_norm) {
      out.inner_max_norm = v;
      out.inner_witness = p;
    }
  };
  if (n <= 20) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      Vector p(n);
      for (int j = 0; j < n; ++j) p[j] = (mask >> j) & 1 ? 1.0 : -1.0;
      consider_inner(p);
    }
  }
  for (std::size_t s = 0; s < resolution; ++s) {
    Vector p(n);
    for (int j = 0; j < n; ++j) p[j] = unif(rng);
    consider_inner(p);
  }

  auto consider_outer = [&](const Vector& dir) {
    const double N = D.norm(dir);
    if (N == 0.0) return;
    const Vector p = g.law().dilate(1.0 / N, dir);
    const double b = box_gauge(g, p);
    if (b > out.outer_max_box) {
      out.outer_max_box = b;
      out.outer_witness = p;
    }
  };
  for (int j = 0; j < n; ++j) consider_outer(Vector::Unit(n, j));
  for (std::size_t s = 0; s < resolution; ++s) {
    Vector p(n);
    for (int j = 0; j < n; ++j) p[j] = unif(rng);
    consider_outer(p);
  }
  out.lambda = std::min(1.0, 1.0 / std::max(out.inner_max_norm, out.outer_max_box));
  return out;
}

}  // namespace carnot
