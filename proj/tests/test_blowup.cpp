#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flowbox/blowup.hpp"
#include "flowbox/counterexample.hpp"
#include "flowbox/geometry.hpp"
#include "flowbox/integrate.hpp"

#include <cmath>
#include <random>

using namespace flowbox;

namespace {

const std::vector<std::string> kXY = {"x", "y"};

Polynomial P(const std::string& t, const std::vector<std::string>& vars = kXY) {
  return Polynomial::parse(t, vars);
}
VectorField VF(const std::vector<std::string>& comps,
               const std::vector<std::string>& vars = kXY) {
  return VectorField::parse(comps, vars);
}

FoliatedSystem rotation_system() {
  return FoliatedSystem(kXY, Distribution({VF({"-y", "x"})}), Ideal(kXY, {P("y")}), {});
}

}  // namespace

TEST_CASE("rotation blow-up in the x-chart") {
  TransformedSystem chart = blowup_chart(rotation_system(), {{"x", "y"}, "x"});
  // Substituted y = x*y': field becomes -x*y d/dx + (1 + y^2) d/dy in chart
  // coordinates (names reused).
  const auto& field = chart.system.theta().generators[0];
  CHECK(field.component(0) == P("-x*y"));
  CHECK(field.component(1) == P("1 + y^2"));
  REQUIRE(chart.system.ideal().generators().size() == 1);
  CHECK(chart.system.ideal().generators()[0] == P("y"));
  CHECK(chart.exceptional == P("x"));
  REQUIRE(chart.system.divisor().size() == 1);
  CHECK(chart.system.divisor()[0] == P("x"));
}

TEST_CASE("center equal to X trivializes the weak transform") {
  FoliatedSystem sys(kXY, Distribution({VF({"-y", "x"})}), Ideal(kXY, {P("x"), P("y")}), {});
  TransformedSystem chart = blowup_chart(sys, {{"x", "y"}, "x"});
  CHECK(chart.system.ideal().is_whole_ring());
}

TEST_CASE("non-invariant centers are rejected") {
  FoliatedSystem sys(kXY, Distribution({VF({"1", "0"})}), Ideal(kXY, {P("y")}), {});
  CHECK_THROWS_WITH_AS(blowup_chart(sys, {{"x", "y"}, "x"}),
                       doctest::Contains("not theta-invariant"), std::invalid_argument);
}

TEST_CASE("order-one gate: the 4D shadow rejects the plane center") {
  CounterexampleSystem ce = build_counterexample4d();
  CHECK_THROWS_WITH_AS(blowup_chart(ce.shadow, {{"x", "y"}, "x"}),
                       doctest::Contains("order one"), std::invalid_argument);
}

TEST_CASE("transform identity on the rotation example") {
  CHECK(verify_transform_identity(rotation_system(), {{"x", "y"}, "x"}, 0));
  CHECK(verify_transform_identity(rotation_system(), {{"x", "y"}, "x"}, 1));
  CHECK(verify_transform_identity(rotation_system(), {{"x", "y"}, "y"}, 1));
}

TEST_CASE("transform identity on the counterexample shadow with center (x,y,w)") {
  CounterexampleSystem ce = build_counterexample4d();
  const BlowupSpec spec{{"x", "y", "w"}, "x"};
  CHECK(verify_transform_identity(ce.shadow, spec, 0));
  CHECK(verify_transform_identity(ce.shadow, spec, 1));
}

TEST_CASE("exceptional divisor is invariant after any accepted blow-up") {
  for (const auto& [sys, spec] : std::vector<std::pair<FoliatedSystem, BlowupSpec>>{
           {rotation_system(), {{"x", "y"}, "x"}},
           {rotation_system(), {{"x", "y"}, "y"}},
           {build_counterexample4d().shadow, {{"x", "y", "w"}, "x"}}}) {
    TransformedSystem chart = blowup_chart(sys, spec);
    CHECK(is_invariant_ideal(chart.system.theta(),
                             Ideal(sys.vars(), {chart.exceptional})));
  }
}

TEST_CASE("weak transform identity I_F * I~ = sigma* I by generators") {
  for (const auto& [sys, spec] : std::vector<std::pair<FoliatedSystem, BlowupSpec>>{
           {rotation_system(), {{"x", "y"}, "x"}},
           {build_counterexample4d().shadow, {{"x", "y", "w"}, "x"}}}) {
    TransformedSystem chart = blowup_chart(sys, spec);
    // sigma* of each original generator.
    std::vector<Polynomial> images;
    Polynomial chart_poly = Polynomial::variable(sys.vars(), spec.chart_var);
    for (const auto& name : sys.vars()) {
      Polynomial xi = Polynomial::variable(sys.vars(), name);
      const bool in_center = std::find(spec.center_vars.begin(), spec.center_vars.end(),
                                       name) != spec.center_vars.end();
      images.push_back(in_center && name != spec.chart_var ? chart_poly * xi : xi);
    }
    std::vector<Polynomial> pulled;
    for (const auto& g : sys.ideal().generators()) pulled.push_back(g.substitute(images));
    Ideal sigma_i(sys.vars(), pulled);
    Ideal lhs = Ideal::product(Ideal(sys.vars(), {chart.exceptional}), chart.system.ideal());
    CHECK(lhs.contains(sigma_i));
    CHECK(sigma_i.contains(lhs));
  }
}

TEST_CASE("off-center flow conjugacy at random seeds") {
  FoliatedSystem sys = rotation_system();
  TransformedSystem chart = blowup_chart(sys, {{"x", "y"}, "x"});
  AnalyticField down = AnalyticField::from_polynomials(sys.theta().generators[0]);
  AnalyticField up = AnalyticField::from_polynomials(chart.system.theta().generators[0]);

  IntegrateOptions tight;
  tight.rtol = 1e-11;
  tight.atol = 1e-13;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(0.5, 1.0), uy(-0.4, 0.4);
  for (int seed = 0; seed < 5; ++seed) {
    const double x0 = ux(rng), y0 = uy(rng);
    const double t_end = 0.5;
    auto downstairs = integrate(down, std::vector<double>{x0, y0}, t_end, tight).states.back();
    auto upstairs =
        integrate(up, std::vector<double>{x0, y0 / x0}, t_end, tight).states.back();
    // sigma(x, y') = (x, x*y').
    CHECK(std::abs(upstairs[0] - downstairs[0]) < 1e-7);
    CHECK(std::abs(upstairs[0] * upstairs[1] - downstairs[1]) < 1e-7);
  }
}

TEST_CASE("polar blow-up of the counterexample field") {
  CounterexampleSystem ce = build_counterexample4d();
  AnalyticField tilde = polar_blowup(ce.field, 0, 1);
  REQUIRE(tilde.vars()[0] == "r");
  REQUIRE(tilde.vars()[1] == "alpha");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ur(0.05, 0.5), ua(-3.0, 3.0);
  for (int k = 0; k < 10; ++k) {
    const double r = ur(rng), a = ua(rng);
    std::vector<double> p = {r, a, 0.3, -0.2};
    auto v = tilde.eval(p);
    CHECK(std::abs(v[0]) < 1e-12);                                  // dr/dt = 0
    CHECK(std::abs(v[1] - 1.0) < 1e-12);                            // dalpha/dt = 1
    CHECK(std::abs(v[2]) < 1e-12);                                  // dz/dt = 0
    CHECK(std::abs(v[3] - r * r * std::sin(a) * std::sin(a)) < 1e-12);
  }
}

TEST_CASE("polar blow-up of the rotation field is d/dalpha") {
  AnalyticField rot = AnalyticField::from_polynomials(VF({"-y", "x"}));
  AnalyticField tilde = polar_blowup(rot, 0, 1);
  std::vector<double> p = {0.3, 1.1};
  auto v = tilde.eval(p);
  CHECK(std::abs(v[0]) < 1e-12);
  CHECK(std::abs(v[1] - 1.0) < 1e-12);
  // The removable singularity at r = 0 is lifted by the symmetric difference.
  std::vector<double> axis = {0.0, 0.7};
  auto v0 = tilde.eval(axis);
  CHECK(std::abs(v0[1] - 1.0) < 1e-6);
}

TEST_CASE("polar blow-up leaves transverse-free components untouched") {
  const std::vector<std::string> v3 = {"x", "y", "w"};
  AnalyticField dw = AnalyticField::from_polynomials(VF({"0", "0", "1"}, v3));
  AnalyticField tilde = polar_blowup(dw, 0, 1);
  std::vector<double> p = {0.2, 0.4, 0.0};
  auto v = tilde.eval(p);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 0.0);
  CHECK(v[2] == 1.0);
  // On the axis the zero numerator is removable.
  std::vector<double> axis = {0.0, 0.4, 0.0};
  CHECK(std::abs(tilde.eval(axis)[1]) < 1e-12);
}

TEST_CASE("polar blow-up flags non-liftable fields on the axis") {
  AnalyticField dx = AnalyticField::from_polynomials(VF({"1", "0"}));
  AnalyticField tilde = polar_blowup(dx, 0, 1);
  std::vector<double> axis = {0.0, 0.3};
  CHECK_THROWS_AS(tilde.eval(axis), std::domain_error);
}

TEST_CASE("divisor components must be coordinates (syntactic SNC)") {
  FoliatedSystem sys(kXY, Distribution({VF({"-y", "x"})}), Ideal(kXY, {P("y")}), {});
  // Construct a system whose divisor is not a coordinate: rejected at the
  // blow-up gate, not at load (tangency may still hold).
  FoliatedSystem curved(kXY, Distribution({VF({"x", "y"})}), Ideal(kXY, {P("y")}),
                        {P("x^2 + y^2")});
  CHECK_THROWS_WITH_AS(blowup_chart(curved, {{"x", "y"}, "x"}),
                       doctest::Contains("not a coordinate"), std::invalid_argument);
  CHECK_NOTHROW(blowup_chart(sys, {{"x", "y"}, "x"}));
}
