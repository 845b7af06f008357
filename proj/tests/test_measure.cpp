#include "carnot/fixtures.hpp"
#include "carnot/measure.hpp"

#include <catch_amalgamated.hpp>

using namespace carnot;
using fixtures::vec;

namespace {

Curve fixture(const char* name) { return fixtures::curve_fixture(name).curve(); }

/// Every sampled curve point of `set` lies in some closed cover ball.
bool cover_is_valid(const Curve& c, const HomogeneousDistance& D, const CoveringEstimate& est,
                    const std::vector<Interval>& set, int samples) {
  for (const auto& I : set) {
    for (int k = 0; k <= samples; ++k) {
      const double t = I.lo + I.length() * k / samples;
      const Vector x = c.position(t);
      bool hit = false;
      for (const auto& b : est.balls) {
        if (D.distance(c.position(b.center), x) <= b.radius * (1 + 1e-9) + 1e-15) {
          hit = true;
          break;
        }
      }
      if (!hit) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("quadrature and lengths", "[measure]") {
  CHECK(integrate([](double x) { return x * x; }, 0, 1) == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(integrate([](double) { return 1.0; }, 1, 1) == 0.0);
  const GroupPtr h = make_group("heisenberg");
  const auto g = AmbientMetric::left_invariant(), e = AmbientMetric::euclidean();
  CHECK(riemannian_length(fixture("vertical"), h->frame(), Interval{-0.5, 0.5}, e) == Catch::Approx(1.0));
  CHECK(riemannian_length(fixture("horizontal"), h->frame(), Interval{-0.5, 0.5}, g) == Catch::Approx(1.0));
  // Along (t, 0, t^2/2) the frame coordinates are (1, 0, t): length sqrt2 + asinh 1.
  const double expected = std::sqrt(2.0) + std::asinh(1.0);
  CHECK(riemannian_length(fixture("parabola_lift"), h->frame(), Interval{-1, 1}, g) == Catch::Approx(expected));
  CHECK(riemannian_length(fixture("parabola_lift"), h->frame(), Interval{-5, 5}, g) == Catch::Approx(expected));
  CHECK(riemannian_length(fixture("parabola_lift"), h->frame(), std::vector<Interval>{{-1, 0}, {0, 1}}, g) ==
        Catch::Approx(expected));
}

TEST_CASE("ball sections on lines", "[measure][balls]") {
  for (double e2 : {0.5, 1.0, 2.0}) {
    const HomogeneousDistance D(make_group("heisenberg"), {1.0, e2});
    const Curve v = fixture("vertical");
    for (double r : {0.3, 0.1, 0.01}) {
      // d(0, (0,0,s)) = e2 sqrt|s| < r iff |s| < r^2 / e2^2.
      const BallSection sec = ball_parameter_set(v, D, 0.0, r);
      REQUIRE(sec.params.size() == 1);
      CHECK(sec.params[0].hi == Catch::Approx(r * r / (e2 * e2)).epsilon(1e-9));
      CHECK(sec.params[0].lo == Catch::Approx(-r * r / (e2 * e2)).epsilon(1e-9));
      CHECK_FALSE(sec.truncated);
    }
  }
  const HomogeneousDistance D(make_group("heisenberg"));
  const double m = ball_intersection_measure(fixture("horizontal"), D, 0.1, 0.05, AmbientMetric::euclidean());
  CHECK(m == Catch::Approx(0.1).epsilon(1e-9));
  bool truncated = false;
  const double tm = ball_intersection_measure(fixture("horizontal"), D, 0.45, 0.2, AmbientMetric::euclidean(),
                                              BallKind::Closed, &truncated);
  CHECK(truncated);
  CHECK(tm == Catch::Approx(0.25).epsilon(1e-9));
  CHECK_THROWS_AS(ball_parameter_set(fixture("horizontal"), D, 0.0, 0.0), PreconditionError);
}

TEST_CASE("ball sections find far components", "[measure][balls]") {
  // (t^2 - 1/4, 1e-6 t): gamma(1/2) and gamma(-1/2) are 1e-3 apart.
  const HomogeneousDistance D(make_group("abelian_w12"));
  const Curve c("fold", -1, 1, [](double t) { return vec({t * t - 0.25, 1e-6 * t}); },
                [](double t) { return vec({2 * t, 1e-6}); });
  const BallSection sec = ball_parameter_set(c, D, 0.5, 0.01);
  REQUIRE(sec.params.size() == 2);
  const double w = std::sqrt(0.26) - std::sqrt(0.24);
  CHECK(sec.params[0].length() == Catch::Approx(w).epsilon(1e-6));
  CHECK(sec.params[1].length() == Catch::Approx(w).epsilon(1e-6));
  CHECK(sec.params[0].hi < 0);
  CHECK(sec.params[1].lo > 0);
}

TEST_CASE("blow-up on the vertical line is exact", "[measure][blowup]") {
  for (double e2 : {0.5, 1.0, 2.0}) {
    const HomogeneousDistance D(make_group("heisenberg"), {1.0, e2});
    const BlowupReport rep =
        blowup_sequence(fixture("vertical"), D, 0.0, geometric_schedule(0.25, 6), AmbientMetric::euclidean());
    CHECK(rep.q == 2);
    CHECK(rep.theta == Catch::Approx(2.0 / (e2 * e2)));
    CHECK(rep.tau_norm == Catch::Approx(1.0));
    for (double ratio : rep.ratios) CHECK(ratio == Catch::Approx(rep.predicted).epsilon(1e-8));
    CHECK(rep.diagnostic < 1e-8);
  }
}

TEST_CASE("blow-up at a tilted point converges to the prediction", "[measure][blowup]") {
  const HomogeneousDistance D(make_group("heisenberg"));
  for (const auto& metric : {AmbientMetric::euclidean(), AmbientMetric::left_invariant()}) {
    const BlowupReport rep = blowup_sequence(fixture("parabola_lift"), D, 0.5, geometric_schedule(0.125, 8), metric);
    CHECK(rep.q == 2);
    CHECK(rep.diagnostic < 0.02);
    // Errors shrink along the schedule.
    CHECK(std::abs(rep.ratios.back() - rep.predicted) < std::abs(rep.ratios.front() - rep.predicted));
  }
}

TEST_CASE("blow-up is invariant under isometries", "[measure][blowup][property]") {
  const GroupPtr g = make_group("heisenberg");
  const HomogeneousDistance D(g, {1.0, 0.5});
  const auto radii = geometric_schedule(0.25, 6);
  const auto e = AmbientMetric::euclidean();
  const Curve c = fixture("vertical");
  const BlowupReport base = blowup_sequence(c, D, 0.1, radii, e);
  const Curve moved = translate(apply_linear(c, fixtures::heisenberg_rotation(1.1)), g, vec({0.3, -0.2, 0.7}));
  const BlowupReport copy = blowup_sequence(moved, D, 0.1, radii, e);
  for (std::size_t k = 0; k < radii.size(); ++k) CHECK(copy.ratios[k] == Catch::Approx(base.ratios[k]).epsilon(1e-6));
  const BlowupReport down = blowup_sequence(fixture("vertical_down"), D, 0.1, radii, e);
  for (std::size_t k = 0; k < radii.size(); ++k) CHECK(down.ratios[k] == Catch::Approx(base.ratios[k]).epsilon(1e-9));
}

TEST_CASE("blow-up and divergence check their hypotheses", "[measure][errors]") {
  const HomogeneousDistance D(make_group("heisenberg"));
  CHECK_THROWS_AS(blowup_sequence(fixture("parabola_lift"), D, 0.0, {0.1}, AmbientMetric::euclidean()),
                  PreconditionError);
  CHECK_THROWS_AS(density_divergence(fixture("parabola_lift"), D, 0.5, {0.1}), PreconditionError);
}

TEST_CASE("density diverges at a low-degree point", "[measure][divergence]") {
  const HomogeneousDistance D(make_group("heisenberg"));
  const DivergenceReport rep = density_divergence(fixture("parabola_lift"), D, 0.0, geometric_schedule(1.0 / 16, 6));
  CHECK(rep.q == 2);
  CHECK(rep.divergent);
  CHECK(rep.slope <= -0.9);
  for (std::size_t k = 0; k + 1 < rep.ratios.size(); ++k) CHECK(rep.ratios[k + 1] > rep.ratios[k]);
  // On the horizontal part of glued_hv the ratio grows like 2/r.
  const DivergenceReport g = density_divergence(fixture("glued_hv"), D, -0.5, geometric_schedule(1.0 / 16, 6));
  CHECK(g.slope == Catch::Approx(-1.0).margin(1e-6));
}

TEST_CASE("greedy covers are valid and sharp on lines", "[measure][cover]") {
  const HomogeneousDistance D(make_group("heisenberg"));
  CoverOptions keep;
  keep.keep_balls = true;
  for (const char* name : {"vertical", "horizontal", "parabola_lift", "glued_hv"}) {
    INFO(name);
    const Curve c = fixture(name);
    const double q = curve_degree(c, D.group().frame()).curve_degree;
    const CoveringEstimate est = spherical_measure_upper(c, D, q, 1.0 / 16, {}, keep);
    CHECK(est.ball_count == est.balls.size());
    for (const auto& b : est.balls) CHECK(b.radius <= 1.0 / 16);
    CHECK(cover_is_valid(c, D, est, {c.domain()}, 4000));
  }
  // Vertical: each interior ball covers exactly 2 delta^2 of parameter.
  const CoveringEstimate v = spherical_measure_upper(fixture("vertical"), D, 2, 1.0 / 32);
  CHECK(v.value == Catch::Approx(0.5).epsilon(2e-3));
  CHECK(v.ball_count == 512);
  const CoveringEstimate hz = spherical_measure_upper(fixture("horizontal"), D, 1, 1.0 / 32);
  CHECK(hz.value == Catch::Approx(0.5).epsilon(2e-3));
  CHECK_THROWS_AS(spherical_measure_upper(fixture("vertical"), D, 2, 0.0), PreconditionError);
}

TEST_CASE("covers of point sets and subsets", "[measure][cover]") {
  const HomogeneousDistance D(make_group("heisenberg"));
  const Curve c = fixture("horizontal");
  const CoveringEstimate p = spherical_measure_upper(c, D, 1, 0.1, {{0.2, 0.2}});
  CHECK(p.ball_count == 1);
  CHECK(p.value == 0.0);
  const CoveringEstimate half = spherical_measure_upper(c, D, 1, 1.0 / 64, {{-0.5, 0.0}, {2.0, 3.0}});
  CHECK(half.value == Catch::Approx(0.25).epsilon(1e-2));
}

TEST_CASE("Richardson extrapolation", "[measure][cover]") {
  std::vector<double> lin, quad;
  for (double d : geometric_schedule(0.25, 6)) {
    lin.push_back(1.0 + 3.0 * d);
    quad.push_back(0.5 + 7.0 * d * d);
  }
  double p = 0;
  CHECK(richardson_extrapolate(lin, &p) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(p == Catch::Approx(1.0));
  CHECK(richardson_extrapolate(quad, &p) == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(p == Catch::Approx(2.0));
  CHECK(richardson_extrapolate({0.5, 0.5, 0.5}) == 0.5);
  CHECK(richardson_extrapolate({2.0}) == 2.0);
  CHECK(geometric_schedule(1.0, 3) == std::vector<double>{1.0, 0.5, 0.25});
}

TEST_CASE("cover values scale under dilations", "[measure][cover][property]") {
  const GroupPtr g = make_group("heisenberg");
  const HomogeneousDistance D(g);
  const Curve c = fixture("parabola_lift");
  const auto deltas = geometric_schedule(0.25, 5);
  const CoverSchedule base = cover_schedule(c, D, 2, deltas);
  for (double s : {0.5, 2.0}) {
    std::vector<double> scaled;
    for (double d : deltas) scaled.push_back(s * d);
    const CoverSchedule m = cover_schedule(dilate(c, g, s), D, 2, scaled);
    for (std::size_t k = 0; k < deltas.size(); ++k)
      CHECK(m.values[k] == Catch::Approx(s * s * base.values[k]).epsilon(1e-3));
  }
}

TEST_CASE("area formula on unit segments", "[measure][area]") {
  const HomogeneousDistance D(make_group("heisenberg"));
  AreaFormulaOptions opt;
  opt.levels = 6;
  for (const char* name : {"vertical", "horizontal", "tilted"}) {
    INFO(name);
    for (const auto& metric : {AmbientMetric::euclidean(), AmbientMetric::left_invariant()}) {
      const AreaFormulaReport rep = area_formula_residual(fixture(name), D, metric, opt);
      CHECK(rep.rhs == Catch::Approx(1.0));
      CHECK(rep.residual < 0.02);
      CHECK_FALSE(rep.low_degree_warning);
    }
  }
  const AreaFormulaReport p = area_formula_residual(fixture("parabola_lift"), D, AmbientMetric::euclidean(), opt);
  CHECK(p.rhs == Catch::Approx(1.0));
  CHECK(p.c_q == Catch::Approx(2.0));
  CHECK(p.residual < 0.05);
  const AreaFormulaReport gl = area_formula_residual(fixture("glued_hv"), D, AmbientMetric::euclidean(), opt);
  CHECK(gl.low_degree_warning);
}

TEST_CASE("the low-degree set of glued_hv is negligible", "[measure][negligibility]") {
  const HomogeneousDistance D(make_group("heisenberg"));
  const NegligibilityReport rep = negligibility_estimate(fixture("glued_hv"), D, geometric_schedule(0.25, 6));
  CHECK(rep.q == 2);
  REQUIRE(rep.low_degree_set.size() == 1);
  CHECK(rep.decreasing);
  for (double r : rep.halving_ratios) CHECK(r <= 0.6);
  const NegligibilityReport none = negligibility_estimate(fixture("vertical"), D, geometric_schedule(0.25, 3));
  CHECK(none.low_degree_set.empty());
  CHECK(none.cover.values == std::vector<double>{0, 0, 0});
}

TEST_CASE("density lemma bracket", "[measure][federer]") {
  const HomogeneousDistance D(make_group("heisenberg"));
  SECTION("positive density: mu(Z) >= kappa S^a(Z)") {
    const FedererVerdict v = federer_density_check(fixture("vertical"), D, {{-0.25, 0.25}}, 2, 1.0);
    CHECK(v.density_bound_holds);
    CHECK(v.min_upper_density == Catch::Approx(2.0).epsilon(1e-6));
    CHECK(v.mu_Z == Catch::Approx(0.5));
    CHECK(v.inequality_holds);
    CHECK(v.pass);
  }
  SECTION("divergent density: covers shrink") {
    const FedererVerdict v = federer_density_check(fixture("glued_hv"), D, {{-0.9, -0.1}}, 2, 1.0);
    CHECK(v.divergent);
    CHECK(v.shrinking);
    CHECK(v.pass);
    const FedererVerdict pt = federer_density_check(fixture("parabola_lift"), D, {{0.0, 0.0}}, 2, 1.0);
    CHECK(pt.divergent);
    CHECK(pt.pass);
  }
  SECTION("empty set is vacuous") {
    const FedererVerdict v = federer_density_check(fixture("vertical"), D, {{3.0, 4.0}}, 2, 1.0);
    CHECK(v.vacuous);
    CHECK(v.pass);
  }
}
