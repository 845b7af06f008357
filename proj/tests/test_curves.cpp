#include "carnot/curves.hpp"
#include "carnot/fixtures.hpp"
#include "carnot/io.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace carnot;
using fixtures::vec;

namespace {

const Frame& frame_of(const char* group) {
  static std::map<std::string, GroupPtr> cache;
  auto& g = cache[group];
  if (!g) g = make_group(group);
  return g->frame();
}

bool single_point_near(const std::vector<Interval>& set, double t, double tol) {
  return set.size() == 1 && std::abs(set[0].lo - t) < tol && std::abs(set[0].hi - t) < tol;
}

}  // namespace

TEST_CASE("fixture degree profiles", "[curves][degree]") {
  struct Expect {
    const char* name;
    int degree;
    std::vector<Interval> low;
  };
  const std::vector<Expect> cases = {
      {"vertical", 2, {}},           {"vertical_down", 2, {}},      {"horizontal", 1, {}},
      {"rotated_horizontal", 1, {}}, {"tilted", 2, {}},             {"quadratic_vertical", 2, {}},
      {"parabola_lift", 2, {{0, 0}}}, {"glued_hv", 2, {{-1, 0}}},   {"engel_vertical", 3, {}},
      {"engel_cubic", 3, {}},        {"abelian_line", 2, {}},
  };
  for (const auto& e : cases) {
    INFO(e.name);
    const auto& f = fixtures::curve_fixture(e.name);
    const DegreeProfile p = curve_degree(f.curve(), frame_of(f.group.c_str()));
    CHECK(p.curve_degree == e.degree);
    REQUIRE(p.low_degree_set.size() == e.low.size());
    // The resolved set is the exact one widened by the relative degree tolerance.
    for (std::size_t k = 0; k < e.low.size(); ++k) {
      CHECK(p.low_degree_set[k].lo == Catch::Approx(e.low[k].lo).margin(2 * p.tol_rel));
      CHECK(p.low_degree_set[k].hi == Catch::Approx(e.low[k].hi).margin(2 * p.tol_rel));
    }
  }
}

TEST_CASE("engel_cubic top-layer coordinate", "[curves][degree]") {
  const auto c = fixtures::curve_fixture("engel_cubic").curve();
  const Frame& f = frame_of("engel");
  for (double t : {-0.5, -0.2, 0.0, 0.3, 0.5}) {
    const Vector l = curve_frame_coordinates(c, f, t).lambda;
    CHECK(l[0] == Catch::Approx(1.0));
    CHECK(l[1] == Catch::Approx(2 * t).margin(1e-15));
    CHECK(l[3] == Catch::Approx(1 + t * t * t / 6));
    CHECK(pointwise_degree(c, t, f) == 3);
  }
}

TEST_CASE("isolated sign change between grid points is found", "[curves][degree]") {
  const auto c = fixtures::curve_fixture("parabola_lift").curve();
  const DegreeProfile p = curve_degree(c, frame_of("heisenberg"), 2000);
  for (double t : p.t) CHECK(t != 0.0);
  CHECK(p.curve_degree == 2);
  CHECK(single_point_near(p.low_degree_set, 0.0, 1e-12));
}

TEST_CASE("exponents and pointwise degree with tolerance", "[curves][degree]") {
  const auto c = fixtures::curve_fixture("tilted").curve();
  const DegreeProfile p = curve_degree(c, frame_of("heisenberg"), 11);
  CHECK(p.exponents == std::vector<double>{0.5, 0.5, 1.0});
  CHECK(p.t.size() == 11);
  CHECK(p.t.front() == -0.5);
  CHECK(p.t.back() == 0.5);
  // A vertical component of relative size 1e-10 is below the default tolerance.
  const Curve almost("almost", -1, 1, [](double t) { return vec({t, 0, 1e-10 * t}); },
                     [](double) { return vec({1, 0, 1e-10}); });
  CHECK(pointwise_degree(almost, 0.0, frame_of("heisenberg")) == 1);
  CHECK(pointwise_degree(almost, 0.0, frame_of("heisenberg"), 1e-12) == 2);
  CHECK_THROWS_AS(pointwise_degree(almost, 0.0, frame_of("heisenberg"), 0.0), PreconditionError);
}

TEST_CASE("zero velocity is rejected", "[curves][errors]") {
  const Curve stall("stall", -1, 1, [](double t) { return vec({t * t, 0, 0}); },
                    [](double t) { return vec({2 * t, 0, 0}); });
  CHECK_THROWS_AS(curve_degree(stall, frame_of("heisenberg"), 21), PreconditionError);
  CHECK_THROWS_AS(Curve("empty", 1, 1, nullptr, nullptr), PreconditionError);
  CHECK_THROWS_AS(curve_degree(stall, frame_of("heisenberg"), 1), PreconditionError);
}

TEST_CASE("degree profile is invariant under translations, dilations and rotations", "[curves][property]") {
  const GroupPtr g = make_group("heisenberg");
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2, 2);
  for (const char* name : {"parabola_lift", "glued_hv", "tilted", "horizontal"}) {
    const Curve c = fixtures::curve_fixture(name).curve();
    const DegreeProfile p = curve_degree(c, g->frame(), 401);
    const Vector z = vec({u(rng), u(rng), u(rng)});
    for (const Curve& moved : {translate(c, g, z), dilate(c, g, 0.5), dilate(c, g, 2.0),
                               apply_linear(c, fixtures::heisenberg_rotation(0.7))}) {
      const DegreeProfile m = curve_degree(moved, g->frame(), 401);
      CHECK(m.degree == p.degree);
      CHECK(m.curve_degree == p.curve_degree);
      REQUIRE(m.low_degree_set.size() == p.low_degree_set.size());
      // Endpoints resolve the relative degree tolerance, whose width scales with the map.
      for (std::size_t k = 0; k < p.low_degree_set.size(); ++k) {
        CHECK(m.low_degree_set[k].lo == Catch::Approx(p.low_degree_set[k].lo).margin(1e-7));
        CHECK(m.low_degree_set[k].hi == Catch::Approx(p.low_degree_set[k].hi).margin(1e-7));
      }
    }
  }
}

TEST_CASE("translated velocities are pushforwards", "[curves]") {
  const GroupPtr g = make_group("engel");
  const Curve c = fixtures::curve_fixture("engel_cubic").curve();
  const Vector z = vec({0.4, -1.0, 0.3, 2.0});
  const Curve m = translate(c, g, z);
  const double h = 1e-6;
  for (double t : {-0.3, 0.0, 0.2}) {
    const Vector fd = (m.position(t + h) - m.position(t - h)) / (2 * h);
    CHECK((m.velocity(t) - fd).norm() < 1e-7);
    CHECK((curve_frame_coordinates(m, g->frame(), t).lambda - curve_frame_coordinates(c, g->frame(), t).lambda).norm() <
          1e-12);
  }
  const Curve r = recenter(c, g, 0.2);
  CHECK(r.position(0.0).norm() < 1e-15);
  CHECK(r.a() == Catch::Approx(-0.7));
  CHECK(r.b() == Catch::Approx(0.3));
}

TEST_CASE("tangent projections", "[curves]") {
  const Frame& f = frame_of("heisenberg");
  const auto v = fixtures::curve_fixture("vertical").curve();
  const auto e = AmbientMetric::euclidean(), li = AmbientMetric::left_invariant();
  CHECK(tangent_projection(v, 0.1, 2, f, e).norm == Catch::Approx(1));
  CHECK(tangent_projection(v, 0.1, 1, f, e).norm == 0);
  const auto t = fixtures::curve_fixture("tilted").curve();
  CHECK(tangent_projection(t, 0.3, 2, f, li).norm == Catch::Approx(1 / std::sqrt(2.0)));
  CHECK(tangent_projection(t, 0.3, 1, f, li).norm == Catch::Approx(1 / std::sqrt(2.0)));
  CHECK(parse_metric("g").name() == "left_invariant");
  CHECK(parse_metric("euclidean").name() == "euclidean");
  CHECK_THROWS_AS(parse_metric("taxicab"), ConfigError);
}

TEST_CASE("sampled curves interpolate cubics exactly", "[curves][io]") {
  auto pos = [](double t) { return vec({t, t * t, 0.5 * t * t * t - t}); };
  auto vel = [](double t) { return vec({1, 2 * t, 1.5 * t * t - 1}); };
  std::vector<CurveSample> s;
  for (double t : {0.0, 0.4, 1.0}) s.push_back({t, pos(t), vel(t)});
  const Curve c = curve_from_samples("cubic", s);
  for (double t : {0.0, 0.1, 0.37, 0.5, 0.93, 1.0}) {
    CHECK((c.position(t) - pos(t)).norm() < 1e-14);
    CHECK((c.velocity(t) - vel(t)).norm() < 1e-13);
  }
  CHECK_THROWS_AS(curve_from_samples("one", {s[0]}), ConfigError);
  CHECK_THROWS_AS(curve_from_samples("dup", {s[0], s[0]}), ConfigError);
  const Curve back = io::curve_from_json(io::curve_to_json(c, 9), "back");
  CHECK((back.position(0.55) - pos(0.55)).norm() < 1e-14);
  CHECK_THROWS_AS(io::curve_from_json(nlohmann::json::parse(R"([[0,[1],[1]],[1,[1,2],[0,0]]])"), "bad"), ConfigError);
}

TEST_CASE("adapted basis", "[curves][basis]") {
  const GroupPtr g = make_group("heisenberg");
  const Curve c = fixtures::curve_fixture("rotated_horizontal").curve();
  const AdaptedBasis b = adapted_basis(c, g, 0.1, 1);
  CHECK(b.distinguished == 0);
  CHECK(b.rotation(0, 0) == Catch::Approx(1 / std::sqrt(2.0)));
  CHECK(b.rotation(1, 0) == Catch::Approx(1 / std::sqrt(2.0)));
  CHECK((b.rotation.transpose() * b.rotation - Matrix::Identity(3, 3)).norm() < 1e-14);
  const auto dense = transformed_structure_constants(g->algebra(), b.rotation);
  CHECK(grading_defect(g->algebra(), dense) < 1e-15);
  CHECK(std::abs(std::abs(dense[(0 * 3 + 1) * 3 + 2]) - 1.0) < 1e-14);
  // The product in the new basis is the group law with the transformed constants.
  const Vector x = vec({0.3, -0.2, 0.5}), y = vec({-1.0, 0.7, 0.1});
  const Vector p = multiply_in_basis(g->law(), b, x, y);
  CHECK(p[2] == Catch::Approx(x[2] + y[2] + 0.5 * dense[(0 * 3 + 1) * 3 + 2] * (x[0] * y[1] - x[1] * y[0])));
  CHECK_THROWS_AS(adapted_basis(c, g, 0.1, 2), PreconditionError);
  const Matrix B = complete_layer_basis(vec({0, 1}), 2);
  CHECK((B.col(0) - vec({0, 1})).norm() == 0);
  CHECK((B.col(1) - vec({1, 0})).norm() == 0);
}

TEST_CASE("log-log slope", "[curves][littleo]") {
  std::vector<double> h, y;
  for (int k = 0; k < 10; ++k) {
    h.push_back(std::ldexp(1.0, -k));
    y.push_back(3.0 * std::pow(h.back(), 1.7));
  }
  CHECK(loglog_slope(h, y) == Catch::Approx(1.7));
  CHECK(std::isnan(loglog_slope({1.0}, {1.0})));
}

TEST_CASE("little-o coordinate estimates", "[curves][littleo]") {
  const GroupPtr h = make_group("heisenberg");
  SECTION("vertical line passes vacuously") {
    const auto r = little_o_check(fixtures::curve_fixture("vertical").curve(), h, 0.1, 2);
    CHECK(r.kind == LittleOCase::MaxDegree);
    CHECK(r.all_pass);
    CHECK(r.coordinates[0].vacuous);
    CHECK(r.coordinates[1].vacuous);
    CHECK(r.coordinates[2].distinguished);
  }
  SECTION("max-degree points") {
    for (const char* name : {"tilted", "parabola_lift", "quadratic_vertical", "glued_hv"}) {
      INFO(name);
      const auto r = little_o_check(fixtures::curve_fixture(name).curve(), h, 0.3, 2);
      CHECK(r.kind == LittleOCase::MaxDegree);
      CHECK(r.all_pass);
      for (const auto& cs : r.coordinates)
        if (!cs.distinguished && !cs.vacuous) CHECK(cs.slope >= h->degree(cs.index) / 2.0 + 0.05);
    }
  }
  SECTION("low-degree points") {
    const auto r = little_o_check(fixtures::curve_fixture("parabola_lift").curve(), h, 0.0, 2);
    CHECK(r.kind == LittleOCase::LowDegree);
    CHECK(r.pointwise_degree == 1);
    CHECK(r.all_pass);
    CHECK(r.coordinates[0].slope == Catch::Approx(1.0).epsilon(1e-6));
    CHECK(r.coordinates[2].slope == Catch::Approx(2.0).epsilon(1e-6));
    const auto g = little_o_check(fixtures::curve_fixture("glued_hv").curve(), h, -0.5, 2);
    CHECK(g.kind == LittleOCase::LowDegree);
    CHECK(g.all_pass);
  }
  SECTION("Engel") {
    const GroupPtr e = make_group("engel");
    const auto r = little_o_check(fixtures::curve_fixture("engel_cubic").curve(), e, 0.0, 3);
    CHECK(r.kind == LittleOCase::MaxDegree);
    CHECK(r.all_pass);
    CHECK(r.coordinates[3].distinguished);
  }
  SECTION("decay within the margin of the critical rate is reported as failing") {
    // (t, |t|^1.02) is C^1 with degree 1 at 0; y_2(h) = |h|^1.02 is o(h^{p_2}) with
    // p_2 = 1, but its slope is below p_2 + margin.
    const GroupPtr w = make_group("abelian_w12");
    const Curve c("slow", -1, 1, [](double t) { return vec({t, std::pow(std::abs(t), 1.02)}); },
                  [](double t) { return vec({1, t == 0 ? 0.0 : std::copysign(1.02 * std::pow(std::abs(t), 0.02), t)}); });
    const auto r = little_o_check(c, w, 0.0, 2);
    CHECK(r.kind == LittleOCase::LowDegree);
    CHECK(r.coordinates[0].passes);
    CHECK(r.coordinates[1].slope == Catch::Approx(1.02).epsilon(1e-9));
    CHECK_FALSE(r.coordinates[1].passes);
    CHECK_FALSE(r.all_pass);
  }
}
