#pragma once

#include "carnot/errors.hpp"
#include "carnot/group.hpp"
#include "carnot/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace carnot {

/// C^1 parametric curve t -> gamma(t) on the closed parameter interval [a, b].
class Curve {
 public:
  using Map = std::function<Vector(double)>;

  Curve(std::string name, double a, double b, Map position, Map velocity)
      : name_(std::move(name)), a_(a), b_(b), position_(std::move(position)), velocity_(std::move(velocity)) {
    if (!(b > a)) throw PreconditionError("curve domain must be a nonempty interval");
  }

  const std::string& name() const { return name_; }
  double a() const { return a_; }
  double b() const { return b_; }
  Interval domain() const { return {a_, b_}; }
  Vector position(double t) const { return position_(t); }
  Vector velocity(double t) const { return velocity_(t); }

 private:
  std::string name_;
  double a_, b_;
  Map position_, velocity_;
};

struct CurveSample {
  double t = 0.0;
  Vector position;
  Vector velocity;
};

/// Cubic Hermite interpolation of (t, position, velocity) samples. The
/// interpolant matches positions and velocities at every knot, so its
/// derivative is continuous.
inline Curve curve_from_samples(std::string name, std::vector<CurveSample> samples) {
  if (samples.size() < 2) throw ConfigError("sampled curve needs at least two samples");
  std::sort(samples.begin(), samples.end(), [](const CurveSample& x, const CurveSample& y) { return x.t < y.t; });
  const auto dim = samples.front().position.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].position.size() != dim || samples[i].velocity.size() != dim)
      throw ConfigError("curve samples have inconsistent dimensions");
    if (i > 0 && !(samples[i].t > samples[i - 1].t)) throw ConfigError("curve sample parameters must be distinct");
  }
  auto data = std::make_shared<const std::vector<CurveSample>>(std::move(samples));
  auto segment = [data](double t) {
    const auto& s = *data;
    auto it = std::upper_bound(s.begin(), s.end(), t, [](double v, const CurveSample& c) { return v < c.t; });
    std::size_t i = it == s.begin() ? 0 : static_cast<std::size_t>(it - s.begin()) - 1;
    return std::min(i, s.size() - 2);
  };
  auto position = [data, segment](double t) -> Vector {
    const auto& s = *data;
    const std::size_t i = segment(t);
    const double h = s[i + 1].t - s[i].t, u = (t - s[i].t) / h;
    const double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
    const double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
    return h00 * s[i].position + h10 * h * s[i].velocity + h01 * s[i + 1].position + h11 * h * s[i + 1].velocity;
  };
  auto velocity = [data, segment](double t) -> Vector {
    const auto& s = *data;
    const std::size_t i = segment(t);
    const double h = s[i + 1].t - s[i].t, u = (t - s[i].t) / h;
    const double d00 = 6 * u * u - 6 * u, d10 = 3 * u * u - 4 * u + 1;
    const double d01 = -6 * u * u + 6 * u, d11 = 3 * u * u - 2 * u;
    return (d00 * s[i].position + d01 * s[i + 1].position) / h + d10 * s[i].velocity + d11 * s[i + 1].velocity;
  };
  const double a = data->front().t, b = data->back().t;
  return Curve(std::move(name), a, b, position, velocity);
}

/// Left translate z . gamma(t); velocities are pushed forward by dl_z.
inline Curve translate(const Curve& c, GroupPtr group, const Vector& z) {
  auto pos = [c, group, z](double t) -> Vector { return group->law().multiply(z, c.position(t)); };
  auto vel = [c, group, z](double t) -> Vector {
    return group->frame().translation_jacobian(z, c.position(t)) * c.velocity(t);
  };
  return Curve(c.name() + "@translated", c.a(), c.b(), pos, vel);
}

/// delta_s . gamma(t).
inline Curve dilate(const Curve& c, GroupPtr group, double s) {
  if (!(s > 0)) throw PreconditionError("dilation factor must be positive");
  auto pos = [c, group, s](double t) -> Vector { return group->law().dilate(s, c.position(t)); };
  auto vel = [c, group, s](double t) -> Vector { return group->law().dilate(s, c.velocity(t)); };
  return Curve(c.name() + "@dilated", c.a(), c.b(), pos, vel);
}

/// L . gamma(t) for a linear map L (a Lie algebra automorphism when the
/// result is meant to live in the same group).
inline Curve apply_linear(const Curve& c, const Matrix& L) {
  auto pos = [c, L](double t) -> Vector { return L * c.position(t); };
  auto vel = [c, L](double t) -> Vector { return L * c.velocity(t); };
  return Curve(c.name() + "@mapped", c.a(), c.b(), pos, vel);
}

/// s -> gamma(t0)^{-1} . gamma(t0 + s), so the new curve passes through 0 at s = 0.
inline Curve recenter(const Curve& c, GroupPtr group, double t0) {
  const Vector base_inv = -c.position(t0);
  Curve shifted("shifted", c.a() - t0, c.b() - t0, [c, t0](double s) { return c.position(t0 + s); },
                [c, t0](double s) { return c.velocity(t0 + s); });
  auto out = translate(shifted, std::move(group), base_inv);
  return Curve(c.name() + "@recentered", out.a(), out.b(), [out](double s) { return out.position(s); },
               [out](double s) { return out.velocity(s); });
}

/// Riemannian metric g~ used to normalise tangents and measure length.
class AmbientMetric {
 public:
  enum class Kind { LeftInvariant, Euclidean };

  static AmbientMetric left_invariant() { return AmbientMetric(Kind::LeftInvariant); }
  static AmbientMetric euclidean() { return AmbientMetric(Kind::Euclidean); }

  Kind kind() const { return kind_; }
  std::string name() const { return kind_ == Kind::LeftInvariant ? "left_invariant" : "euclidean"; }

  /// |v|_{g~} for the ambient vector v at x.
  double norm(const Frame& frame, const Vector& x, const Vector& v) const {
    if (kind_ == Kind::Euclidean) return v.norm();
    return frame.solve(x, v).norm();
  }

 private:
  explicit AmbientMetric(Kind k) : kind_(k) {}
  Kind kind_;
};

inline AmbientMetric parse_metric(const std::string& name) {
  if (name == "left_invariant" || name == "g") return AmbientMetric::left_invariant();
  if (name == "euclidean") return AmbientMetric::euclidean();
  throw ConfigError("unknown metric '" + name + "' (expected left_invariant or euclidean)");
}

inline constexpr double kDefaultDegreeTolerance = 1e-8;

/// Frame coordinates of gamma'(t) at gamma(t).
inline FrameCoordinates curve_frame_coordinates(const Curve& c, const Frame& frame, double t) {
  const Vector x = c.position(t);
  return {frame.solve(x, c.velocity(t)), x};
}

/// max{d_j : |lambda_j| > tol_rel |lambda|} at parameter t.
inline int pointwise_degree(const Curve& c, double t, const Frame& frame, double tol_rel = kDefaultDegreeTolerance) {
  if (!(tol_rel > 0)) throw PreconditionError("degree tolerance must be positive");
  const Vector lambda = curve_frame_coordinates(c, frame, t).lambda;
  const double len = lambda.norm();
  if (len == 0.0 || !std::isfinite(len))
    throw PreconditionError("zero velocity at t = " + std::to_string(t) + " on curve " + c.name());
  int deg = 0;
  for (int j = 0; j < lambda.size(); ++j)
    if (std::abs(lambda[j]) > tol_rel * len) deg = std::max(deg, frame.degrees()[static_cast<std::size_t>(j)]);
  return deg;
}

struct DegreeProfile {
  std::vector<double> t;
  std::vector<Vector> lambda;
  std::vector<int> degree;
  int curve_degree = 0;
  /// p_j = d_j / d(Sigma).
  std::vector<double> exponents;
  /// Parameter intervals (possibly single points) where d_Sigma < d(Sigma).
  std::vector<Interval> low_degree_set;
  double tol_rel = kDefaultDegreeTolerance;
};

/// Degree profile on a uniform grid of `grid_points` parameters including
/// both endpoints. Boundaries of low-degree runs are refined by bisection, and
/// sign changes of one-dimensional top-layer frame coordinates between
/// max-degree neighbours are isolated as candidate low-degree points.
inline DegreeProfile curve_degree(const Curve& c, const Frame& frame, int grid_points = 2001,
                                  double tol_rel = kDefaultDegreeTolerance) {
  if (grid_points < 2) throw PreconditionError("degree grid needs at least two points");
  DegreeProfile prof;
  prof.tol_rel = tol_rel;
  const double h = (c.b() - c.a()) / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i) {
    const double t = i + 1 == grid_points ? c.b() : c.a() + h * i;
    prof.t.push_back(t);
    prof.lambda.push_back(curve_frame_coordinates(c, frame, t).lambda);
    prof.degree.push_back(pointwise_degree(c, t, frame, tol_rel));
  }
  const int q = *std::max_element(prof.degree.begin(), prof.degree.end());
  prof.curve_degree = q;
  for (int d : frame.degrees()) prof.exponents.push_back(static_cast<double>(d) / q);

  auto low = [&](double t) { return pointwise_degree(c, t, frame, tol_rel) < q; };
  const double xtol = 1e-14 * std::max(1.0, std::abs(c.b() - c.a()));
  std::vector<Interval> set;
  const auto n = prof.t.size();
  for (std::size_t i = 0; i < n;) {
    if (prof.degree[i] == q) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && prof.degree[j + 1] < q) ++j;
    const double lo = i == 0 ? prof.t[0] : bisect_boundary(low, prof.t[i], prof.t[i - 1], xtol);
    const double hi = j + 1 == n ? prof.t[n - 1] : bisect_boundary(low, prof.t[j], prof.t[j + 1], xtol);
    set.push_back({lo, hi});
    i = j + 1;
  }

  // A one-dimensional top layer vanishes exactly where its coordinate changes sign.
  const auto& degs = frame.degrees();
  const int top_begin = static_cast<int>(std::find(degs.begin(), degs.end(), q) - degs.begin());
  const int top_dim = static_cast<int>(std::count(degs.begin(), degs.end(), q));
  if (top_dim == 1) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (prof.degree[i] != q || prof.degree[i + 1] != q) continue;
      const double l0 = prof.lambda[i][top_begin], l1 = prof.lambda[i + 1][top_begin];
      if (!(l0 * l1 < 0)) continue;
      auto same_sign = [&](double t) { return curve_frame_coordinates(c, frame, t).lambda[top_begin] * l0 > 0; };
      const double root = bisect_boundary(same_sign, prof.t[i], prof.t[i + 1], xtol);
      if (low(root)) set.push_back({root, root});
    }
  }
  prof.low_degree_set = merge_intervals(std::move(set));
  return prof;
}

/// tau^j: the layer-j part of the unit tangent, in frame coordinates.
struct TangentProjection {
  FrameCoordinates tau;
  double norm = 0.0;
};

inline TangentProjection tangent_projection(const Curve& c, double t, int layer, const Frame& frame,
                                            const AmbientMetric& metric) {
  const Vector x = c.position(t);
  const Vector v = c.velocity(t);
  const double speed = metric.norm(frame, x, v);
  if (speed == 0.0) throw PreconditionError("zero velocity at t = " + std::to_string(t));
  Vector lambda = frame.solve(x, v) / speed;
  for (int j = 0; j < lambda.size(); ++j)
    if (frame.degrees()[static_cast<std::size_t>(j)] != layer) lambda[j] = 0.0;
  const double norm = lambda.norm();
  return {{std::move(lambda), x}, norm};
}

// ---------------------------------------------------------------------------
// Adapted graded basis

/// Degree-preserving orthogonal change of graded basis. Column i of
/// `rotation` is the new basis vector e'_i in the original coordinates.
struct AdaptedBasis {
  Matrix rotation;
  int distinguished = 0;  ///< i0 = m_{q-1} (0-based), e'_{i0} along p_q(gamma'(t0))
  int degree = 0;
  double t0 = 0.0;
  Vector base_point;

  Vector to_basis(const Vector& x) const { return rotation.transpose() * x; }
  Vector from_basis(const Vector& y) const { return rotation * y; }
};

/// Orthonormal basis of the layer `layer`'s block whose first vector is `u`
/// (Gram-Schmidt over u followed by the standard vectors of the block).
inline Matrix complete_layer_basis(const Vector& u, int dim) {
  Matrix B(dim, dim);
  int filled = 0;
  auto push = [&](Vector v) {
    for (int k = 0; k < filled; ++k) v -= B.col(k).dot(v) * B.col(k);
    for (int k = 0; k < filled; ++k) v -= B.col(k).dot(v) * B.col(k);
    const double len = v.norm();
    if (len > 1e-10 && filled < dim) B.col(filled++) = v / len;
  };
  push(u);
  for (int i = 0; i < dim && filled < dim; ++i) push(Vector::Unit(dim, i));
  return B;
}

inline AdaptedBasis adapted_basis(const Curve& c, GroupPtr group, double t0, int q,
                                  double tol_rel = kDefaultDegreeTolerance) {
  const Group& g = *group;
  if (pointwise_degree(c, t0, g.frame(), tol_rel) != q)
    throw PreconditionError("the degree-" + std::to_string(q) + " projection of the velocity vanishes at t0");
  const auto& alg = g.algebra();
  // After recentering gamma(t0) to 0, the velocity at 0 equals the frame coordinates.
  const Vector lambda = curve_frame_coordinates(c, g.frame(), t0).lambda;
  const int begin = alg.layer_begin(q), dim = alg.layer_dims()[static_cast<std::size_t>(q - 1)];
  const Vector pq = lambda.segment(begin, dim);
  if (pq.norm() == 0.0) throw PreconditionError("the degree-q projection of the velocity vanishes at t0");
  AdaptedBasis basis;
  basis.rotation = Matrix::Identity(g.dimension(), g.dimension());
  basis.rotation.block(begin, begin, dim, dim) = complete_layer_basis(pq / pq.norm(), dim);
  basis.distinguished = begin;
  basis.degree = q;
  basis.t0 = t0;
  basis.base_point = c.position(t0);
  return basis;
}

/// c'^c_{ab} = sum R_{ia} R_{jb} c^k_{ij} R_{kc}, dense, index (a*n + b)*n + c.
inline std::vector<double> transformed_structure_constants(const ValidatedAlgebra& alg, const Matrix& R) {
  const int n = alg.dimension();
  std::vector<double> out(static_cast<std::size_t>(n * n * n), 0.0);
  for (const auto& sc : alg.structure_constants()) {
    const double c = to_double(sc.c);
    for (int a = 0; a < n; ++a) {
      if (R(sc.i, a) == 0.0) continue;
      for (int b = 0; b < n; ++b) {
        if (R(sc.j, b) == 0.0) continue;
        for (int cc = 0; cc < n; ++cc)
          out[static_cast<std::size_t>((a * n + b) * n + cc)] += R(sc.i, a) * R(sc.j, b) * c * R(sc.k, cc);
      }
    }
  }
  return out;
}

/// Largest |c'^k_{ij}| among entries that the grading forces to vanish.
inline double grading_defect(const ValidatedAlgebra& alg, const std::vector<double>& dense) {
  const int n = alg.dimension();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (alg.degree(k) != alg.degree(i) + alg.degree(j))
          worst = std::max(worst, std::abs(dense[static_cast<std::size_t>((i * n + j) * n + k)]));
  return worst;
}

/// Group product expressed in the adapted coordinates: R^T ((R x) . (R y)).
inline Vector multiply_in_basis(const GroupLaw& law, const AdaptedBasis& basis, const Vector& x, const Vector& y) {
  return basis.to_basis(law.multiply(basis.from_basis(x), basis.from_basis(y)));
}

// ---------------------------------------------------------------------------
// Little-o coordinate estimates

struct LittleOOptions {
  double h0 = 0.1;
  int levels = 20;  ///< schedule h0 * 2^-k, k = 0..levels
  double margin = 0.05;
};

struct CoordinateSlope {
  int index = 0;  ///< 0-based coordinate in the chosen basis
  double slope = 0.0;
  double target = 0.0;
  bool vacuous = false;
  bool distinguished = false;  ///< i0 in the max-degree case, not tested
  bool passes = false;
};

enum class LittleOCase { MaxDegree, LowDegree };

struct LittleOReport {
  LittleOCase kind = LittleOCase::MaxDegree;
  int curve_degree = 0;
  int pointwise_degree = 0;
  std::vector<double> radii;
  std::vector<CoordinateSlope> coordinates;
  bool all_pass = true;
};

/// Least-squares slope of log|y| against log h.
inline double loglog_slope(const std::vector<double>& h, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(y[i] > 0) || !(h[i] > 0)) continue;
    const double lx = std::log(h[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = m * sxx - sx * sx;
  return (m * sxy - sx * sy) / denom;
}

/// Fits the decay exponent of every coordinate of gamma(t0)^{-1} gamma(t0 + h)
/// (in `basis` when given) over the geometric schedule, then compares it with
/// d_i/q at a max-degree point (i != i0) or with p_j = d_j/d(Sigma) at a
/// low-degree point. A coordinate passes when slope >= target + margin;
/// coordinates that vanish on the whole schedule pass vacuously.
inline LittleOReport little_o_check(const Curve& c, GroupPtr group, double t0, int curve_degree,
                                    const std::optional<AdaptedBasis>& basis = std::nullopt,
                                    const LittleOOptions& opt = {}, double tol_rel = kDefaultDegreeTolerance) {
  const Group& g = *group;
  LittleOReport rep;
  rep.curve_degree = curve_degree;
  rep.pointwise_degree = pointwise_degree(c, t0, g.frame(), tol_rel);
  rep.kind = rep.pointwise_degree == curve_degree ? LittleOCase::MaxDegree : LittleOCase::LowDegree;
  Matrix R = Matrix::Identity(g.dimension(), g.dimension());
  int i0 = -1;
  if (rep.kind == LittleOCase::MaxDegree) {
    const AdaptedBasis b = basis ? *basis : adapted_basis(c, group, t0, curve_degree, tol_rel);
    R = b.rotation;
    i0 = b.distinguished;
  } else if (basis) {
    R = basis->rotation;
  }
  const Curve centered = recenter(c, group, t0);
  const int n = g.dimension();
  std::vector<std::vector<double>> mags(static_cast<std::size_t>(n));
  for (int k = 0; k <= opt.levels; ++k) {
    const double h = opt.h0 * std::ldexp(1.0, -k);
    rep.radii.push_back(h);
    Vector best = Vector::Zero(n);
    for (double s : {h, -h}) {
      if (s < centered.a() || s > centered.b()) continue;
      best = best.cwiseMax((R.transpose() * centered.position(s)).cwiseAbs());
    }
    for (int i = 0; i < n; ++i) mags[static_cast<std::size_t>(i)].push_back(best[i]);
  }
  for (int i = 0; i < n; ++i) {
    CoordinateSlope cs;
    cs.index = i;
    const double d = g.degree(i);
    cs.target = d / curve_degree;
    cs.distinguished = i == i0;
    const auto& m = mags[static_cast<std::size_t>(i)];
    cs.vacuous = std::all_of(m.begin(), m.end(), [](double v) { return v == 0.0; });
    if (cs.vacuous) {
      cs.slope = std::numeric_limits<double>::infinity();
      cs.passes = true;
    } else {
      cs.slope = loglog_slope(rep.radii, m);
      cs.passes = cs.distinguished || cs.slope >= cs.target + opt.margin;
    }
    rep.all_pass = rep.all_pass && cs.passes;
    rep.coordinates.push_back(cs);
  }
  return rep;
}

}  // namespace carnot
