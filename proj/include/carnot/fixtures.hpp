#pragma once

#include "carnot/curves.hpp"
#include "carnot/errors.hpp"
#include "carnot/group.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace carnot::fixtures {

struct CurveFixture {
  std::string name;
  std::string group;
  std::string description;
  double a, b;
  Curve::Map position;
  Curve::Map velocity;

  Curve curve() const { return Curve(name, a, b, position, velocity); }
};

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline const std::vector<CurveFixture>& curves() {
  static const std::vector<CurveFixture> all = [] {
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<CurveFixture> v;
    v.push_back({"vertical", "heisenberg", "vertical unit segment (0,0,t), degree 2", -0.5, 0.5,
                 [](double t) { return vec({0, 0, t}); }, [](double) { return vec({0, 0, 1}); }});
    v.push_back({"vertical_down", "heisenberg", "reversed vertical segment (0,0,-t)", -0.5, 0.5,
                 [](double t) { return vec({0, 0, -t}); }, [](double) { return vec({0, 0, -1}); }});
    v.push_back({"horizontal", "heisenberg", "horizontal unit segment (t,0,0), an X1 integral curve", -0.5, 0.5,
                 [](double t) { return vec({t, 0, 0}); }, [](double) { return vec({1, 0, 0}); }});
    v.push_back({"rotated_horizontal", "heisenberg", "horizontal line (t/sqrt2, t/sqrt2, 0)", -0.5, 0.5,
                 [s](double t) { return vec({s * t, s * t, 0}); }, [s](double) { return vec({s, s, 0}); }});
    v.push_back({"tilted", "heisenberg", "line (t,0,t), degree 2", -0.5, 0.5, [](double t) { return vec({t, 0, t}); },
                 [](double) { return vec({1, 0, 1}); }});
    v.push_back({"quadratic_vertical", "heisenberg", "(t^2, 0, t), degree 2 everywhere", -0.5, 0.5,
                 [](double t) { return vec({t * t, 0, t}); }, [](double t) { return vec({2 * t, 0, 1}); }});
    v.push_back({"parabola_lift", "heisenberg", "(t, 0, t^2/2), degree 1 only at t = 0", -1.0, 1.0,
                 [](double t) { return vec({t, 0, 0.5 * t * t}); }, [](double t) { return vec({1, 0, t}); }});
    v.push_back({"glued_hv", "heisenberg",
                 "C1 curve: horizontal (t,0,0) on [-1,0], then (t - t^2/2, 0, t^2/2) turning vertical at t = 1", -1.0,
                 1.0,
                 [](double t) { return t <= 0 ? vec({t, 0, 0}) : vec({t - 0.5 * t * t, 0, 0.5 * t * t}); },
                 [](double t) { return t <= 0 ? vec({1, 0, 0}) : vec({1 - t, 0, t}); }});
    v.push_back({"engel_vertical", "engel", "(0,0,0,t), degree 3", -0.5, 0.5, [](double t) { return vec({0, 0, 0, t}); },
                 [](double) { return vec({0, 0, 0, 1}); }});
    v.push_back({"engel_cubic", "engel", "(t, t^2, 0, t), degree 3 near 0", -0.5, 0.5,
                 [](double t) { return vec({t, t * t, 0, t}); }, [](double t) { return vec({1, 2 * t, 0, 1}); }});
    v.push_back({"abelian_line", "abelian_w12", "(t, t) in the weighted abelian group, degree 2", -0.5, 0.5,
                 [](double t) { return vec({t, t}); }, [](double) { return vec({1, 1}); }});
    return v;
  }();
  return all;
}

inline const CurveFixture& curve_fixture(const std::string& name) {
  for (const auto& f : curves())
    if (f.name == name) return f;
  throw ConfigError("unknown curve '" + name + "'");
}

/// Heisenberg horizontal rotation by `angle`: an automorphism that preserves
/// the layer-max gauge.
inline Matrix heisenberg_rotation(double angle) {
  Matrix R = Matrix::Identity(3, 3);
  R(0, 0) = std::cos(angle);
  R(0, 1) = -std::sin(angle);
  R(1, 0) = std::sin(angle);
  R(1, 1) = std::cos(angle);
  return R;
}

/// Default layer constants shipped for each built-in group; all pass the
/// triangle audit.
inline std::vector<double> default_eps(const Group& g) { return std::vector<double>(static_cast<std::size_t>(g.step()), 1.0); }

}  // namespace carnot::fixtures
