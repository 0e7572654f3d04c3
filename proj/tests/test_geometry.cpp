#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flowbox/geometry.hpp"
#include "flowbox/integrate.hpp"
#include "oracles.hpp"

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

FoliatedSystem example1() {
  return FoliatedSystem(kXY, Distribution({VF({"-y", "x"})}), Ideal(kXY, {P("y")}), {});
}
FoliatedSystem example2() {
  return FoliatedSystem(kXY, Distribution({VF({"1", "x"})}), Ideal(kXY, {P("y")}), {});
}

}  // namespace

TEST_CASE("lie bracket: coordinate fields commute") {
  CHECK(lie_bracket(VF({"1", "0"}), VF({"0", "1"})).is_zero());
}

TEST_CASE("lie bracket: rotation commutes with a transverse translation") {
  const std::vector<std::string> vars = {"x", "y", "v"};
  VectorField rot = VF({"-y", "x", "0"}, vars);
  VectorField dv = VF({"0", "0", "1"}, vars);
  CHECK(lie_bracket(rot, dv).is_zero());
}

TEST_CASE("lie bracket: shear example, with a finite-difference flow check") {
  const std::vector<std::string> vars = {"y", "z1"};
  VectorField dy = VF({"1", "0"}, vars);
  VectorField w = VF({"0", "z1 + y*z1"}, vars);  // (1+y) z1 d/dz1
  VectorField expected = VF({"0", "z1"}, vars);
  VectorField bracket = lie_bracket(dy, w);
  CHECK(bracket == expected);

  // Flow-commutator oracle: psi_{-t}^W psi_{-t}^V psi_t^W psi_t^V (p)
  // = p + t^2 [V,W](p) + O(t^3).
  auto fv = AnalyticField::from_polynomials(dy);
  auto fw = AnalyticField::from_polynomials(w);
  const double t = 1e-3;
  std::vector<double> p = {0.2, 0.7};
  auto flow = [&](const AnalyticField& f, std::span<const double> q, double dt) {
    return integrate(f, q, dt).states.back();
  };
  auto q = flow(fw, flow(fv, p, t), t);
  q = flow(fw, flow(fv, q, -t), -t);
  auto br = bracket.evaluate_double(p);
  for (std::size_t i = 0; i < p.size(); ++i)
    CHECK(std::abs((q[i] - p[i]) / (t * t) - br[i]) < 1e-2);
}

TEST_CASE("involutivity: single generator and commuting pairs") {
  CHECK(is_involutive(Distribution({VF({"1", "0"})})).verdict == Tristate::True);
  const std::vector<std::string> vars = {"x", "y", "v"};
  Distribution rot_dv({VF({"-y", "x", "0"}, vars), VF({"0", "0", "1"}, vars)});
  CHECK(is_involutive(rot_dv).verdict == Tristate::True);
}

TEST_CASE("involutivity: bracket escaping the module is certified false") {
  const std::vector<std::string> vars = {"y", "z1", "z2"};
  Distribution theta({VF({"1", "0", "0"}, vars), VF({"0", "1", "y"}, vars)});
  auto report = is_involutive(theta);
  CHECK(report.verdict == Tristate::False);
  CHECK(report.witness_bracket == VF({"0", "0", "1"}, vars));
}

TEST_CASE("derivative ideal on the two plane examples") {
  Ideal iy(kXY, {P("y")});
  Ideal d1 = derivative_ideal(Distribution({VF({"-y", "x"})}), iy);
  REQUIRE(d1.generators().size() == 1);
  CHECK(d1.generators()[0] == P("x"));
  Ideal d2 = derivative_ideal(Distribution({VF({"1", "x"})}), iy);
  CHECK(d2.generators()[0] == P("x"));
  Ideal dz = derivative_ideal(Distribution({VF({"-y", "x"})}), Ideal::zero(kXY));
  CHECK(dz.is_zero_ideal());
}

TEST_CASE("iterated derivative ideals") {
  Distribution rot({VF({"-y", "x"})});
  Distribution shear({VF({"1", "x"})});
  Ideal iy(kXY, {P("y")});
  Ideal rot2 = iterated_derivative_ideal(rot, iy, 2);
  CHECK(rot2.contains(P("y")));
  CHECK(Ideal(kXY, {P("y")}).contains(rot2));
  Ideal shear2 = iterated_derivative_ideal(shear, iy, 2);
  CHECK(shear2.is_whole_ring());
  CHECK(iterated_derivative_ideal(rot, iy, 0).generators() == iy.generators());
}

TEST_CASE("fitting order") {
  Distribution rot({VF({"-y", "x"})});
  Distribution shear({VF({"1", "x"})});
  Ideal iy(kXY, {P("y")});
  CHECK(fitting_order(rot, iy, 5) == 1u);
  CHECK(fitting_order(shear, iy, 5) == 2u);
  CHECK(fitting_order(rot, Ideal::zero(kXY), 5) == 0u);
  // Budget exhaustion yields none rather than an error.
  CHECK(!fitting_order(shear, iy, 1).has_value());
}

TEST_CASE("fitting order certificate") {
  // nu is minimal: the containment holds at nu and fails at nu-1.
  Distribution shear({VF({"1", "x"})});
  Ideal iy(kXY, {P("y")});
  const unsigned nu = *fitting_order(shear, iy, 5);
  REQUIRE(nu == 2);
  Ideal sum = iy;
  Ideal iterate = iy;
  for (unsigned i = 1; i <= nu; ++i) {
    iterate = derivative_ideal(shear, iterate);
    sum = sum + iterate;
  }
  CHECK(sum.contains(derivative_ideal(shear, iterate)));
  Ideal sum_prev = iy;
  Ideal it_prev = iy;
  for (unsigned i = 1; i + 1 <= nu; ++i) {
    it_prev = derivative_ideal(shear, it_prev);
    sum_prev = sum_prev + it_prev;
  }
  CHECK(!sum_prev.contains(derivative_ideal(shear, it_prev)));
}

TEST_CASE("invariant ideals") {
  Distribution rot({VF({"-y", "x"})});
  CHECK(is_invariant_ideal(rot, Ideal(kXY, {P("x"), P("y")})));

  const std::vector<std::string> v4 = {"x", "y", "z", "w"};
  Distribution ce({VF({"-y", "x", "0", "y^2"}, v4)});
  CHECK(is_invariant_ideal(ce, Ideal(v4, {P("x", v4), P("y", v4)})));

  Distribution dx({VF({"1", "0"})});
  CHECK(!is_invariant_ideal(dx, Ideal(kXY, {P("x")})));
}

TEST_CASE("invariance verdict is stable under unit rescaling of the generators") {
  Distribution rot({VF({"-y", "x"})});
  Ideal j(kXY, {P("x"), P("y")});
  for (const char* unit : {"2", "-3", "7/2", "1 + x"}) {
    Distribution scaled({rot.generators[0].scaled(P(unit))});
    CHECK(is_invariant_ideal(scaled, j) == is_invariant_ideal(rot, j));
  }
  Distribution dx({VF({"1", "0"})});
  Ideal jx(kXY, {P("x")});
  for (const char* unit : {"2", "1 + x"}) {
    Distribution scaled({dx.generators[0].scaled(P(unit))});
    CHECK(is_invariant_ideal(scaled, jx) == is_invariant_ideal(dx, jx));
  }
}

TEST_CASE("exact geometric quasi-transversality at points") {
  auto qt1 = geometric_qt_at(example1(), {Rational(1), Rational(0)});
  CHECK(qt1.L_dim == 1);
  CHECK(qt1.T_dim == 1);
  CHECK(qt1.sum_dim == 2);
  CHECK(qt1.verdict);

  auto qt2 = geometric_qt_at(example2(), {Rational(0), Rational(0)});
  CHECK(qt2.L_dim == 1);
  CHECK(qt2.T_dim == 1);
  CHECK(qt2.sum_dim == 1);
  CHECK(!qt2.verdict);

  // Verdict equals the stacked-rank criterion.
  for (const auto& [sys, pt] :
       std::vector<std::pair<FoliatedSystem, std::vector<Rational>>>{
           {example1(), {Rational(1), Rational(0)}},
           {example1(), {Rational(-1, 2), Rational(0)}},
           {example2(), {Rational(0), Rational(0)}},
           {example2(), {Rational(1, 3), Rational(0)}}}) {
    auto qt = geometric_qt_at(sys, pt);
    CHECK(qt.verdict == (qt.sum_dim == qt.L_dim + qt.T_dim));
  }

  CHECK_THROWS_WITH_AS(geometric_qt_at(example1(), {Rational(1), Rational(1)}),
                       doctest::Contains("not on X"), std::invalid_argument);
}

TEST_CASE("quasi-transversality at a singular point of theta is trivially true") {
  const std::vector<std::string> v4 = {"x", "y", "z", "w"};
  // Polynomial shadow of the 4D system: all generators vanish at the origin.
  FoliatedSystem sys(v4, Distribution({VF({"-y", "x", "0", "y^2"}, v4)}),
                     Ideal(v4, {P("w - 1/2*x^5*y - x^3*y^3 - 1/2*x*y^5", v4)}), {});
  auto qt = geometric_qt_at(sys, {Rational(0), Rational(0), Rational(0), Rational(0)});
  CHECK(qt.L_dim == 0);
  CHECK(qt.verdict);
}

TEST_CASE("divisor points are rejected with the component named") {
  FoliatedSystem sys(kXY, Distribution({VF({"0", "x"})}), Ideal(kXY, {P("y")}), {P("x")});
  CHECK_THROWS_WITH_AS(geometric_qt_at(sys, {Rational(0), Rational(0)}),
                       doctest::Contains("divisor component x"), std::invalid_argument);
}

TEST_CASE("scan: rotation clean, shear fails near the tangency line") {
  ScanOptions opts;
  opts.box = {{-1.0, 1.0}, {-1.0, 1.0}};
  opts.grid = {20, 20};
  opts.tol = 1e-7;
  auto clean = geometric_qt_scan(example1(), opts);
  CHECK(clean.failures.empty());
  CHECK(clean.projected > 0);

  auto failing = geometric_qt_scan(example2(), opts);
  REQUIRE(!failing.failures.empty());
  for (const auto& f : failing.failures) CHECK(std::abs(f.point[0]) < 1e-3);

  // Parallel sweep gives the same failure count.
  opts.jobs = 4;
  auto parallel = geometric_qt_scan(example2(), opts);
  CHECK(parallel.failures.size() == failing.failures.size());
}

TEST_CASE("scan: empty X in the box yields an empty report") {
  FoliatedSystem sys(kXY, Distribution({VF({"-y", "x"})}),
                     Ideal(kXY, {P("x^2 + y^2 + 1")}), {});
  ScanOptions opts;
  opts.box = {{-1.0, 1.0}, {-1.0, 1.0}};
  opts.grid = {5, 5};
  auto report = geometric_qt_scan(sys, opts);
  CHECK(report.failures.empty());
  CHECK(report.projected == 0);
}

TEST_CASE("analytic quasi-transversality: algebraic condition only") {
  CHECK(is_analytically_qt(example1()));
  CHECK(!is_analytically_qt(example2()));
}

TEST_CASE("tangency locus") {
  Ideal w1 = tangency_locus(example1());
  CHECK(w1.contains(P("x")));
  CHECK(w1.contains(P("y")));
  CHECK(!w1.is_whole_ring());
  Ideal w2 = tangency_locus(example2());
  CHECK(w2.contains(P("x")));
  CHECK(w2.contains(P("y")));
  FoliatedSystem zero_sys(kXY, Distribution({VF({"-y", "x"})}), Ideal::zero(kXY), {});
  CHECK(tangency_locus(zero_sys).is_zero_ideal());
}

TEST_CASE("regular curve criterion") {
  const std::vector<std::string> v4 = {"x1", "x2", "x3", "y"};
  // theta = y d/dx1 is tangent to E = (y) and GQT along the y-axis curve.
  FoliatedSystem sys(v4, Distribution({VF({"y", "0", "0", "0"}, v4)}),
                     Ideal(v4, {P("x1", v4), P("x2", v4), P("x3", v4)}),
                     {P("y", v4)});
  CHECK(regular_curve_aqt_check(sys));

  // The check runs regardless of the GQT flag: d/dy is transverse nowhere
  // special, the containment is what is verified.
  FoliatedSystem tangent_sys(v4, Distribution({VF({"0", "0", "0", "1"}, v4)}),
                             Ideal(v4, {P("x1", v4), P("x2", v4), P("x3", v4)}), {});
  CHECK(regular_curve_aqt_check(tangent_sys));

  // E empty and theta[I] containing a unit: J is the whole ring.
  FoliatedSystem unit_sys(v4, Distribution({VF({"1", "0", "0", "0"}, v4)}),
                          Ideal(v4, {P("x1", v4), P("x2", v4), P("x3", v4)}), {});
  CHECK(regular_curve_aqt_check(unit_sys));

  FoliatedSystem bad(kXY, Distribution({VF({"1", "0"})}), Ideal(kXY, {P("y^2")}), {});
  CHECK_THROWS_WITH_AS(regular_curve_aqt_check(bad), doctest::Contains("not affine"),
                       std::invalid_argument);
}

TEST_CASE("Leibniz containment on random data") {
  std::mt19937_64 rng(99);
  const std::vector<std::string> vars = {"x", "y", "z"};
  int trials = 0;
  while (trials < 50) {
    Polynomial f = oracles::random_polynomial(rng, vars, 3, 2);
    Polynomial g = oracles::random_polynomial(rng, vars, 3, 2);
    if (f.is_zero() || g.is_zero()) continue;
    ++trials;
    std::vector<VectorField> gens;
    const std::size_t ngen = 1 + rng() % 2;
    for (std::size_t k = 0; k < ngen; ++k) {
      std::vector<Polynomial> comps;
      for (std::size_t c = 0; c < vars.size(); ++c)
        comps.push_back(oracles::random_polynomial(rng, vars, 2, 2));
      gens.emplace_back(vars, comps);
    }
    Distribution theta(gens);
    Ideal fg(vars, {f * g});
    Ideal lhs = derivative_ideal(theta, fg);
    Ideal rhs = Ideal::product(Ideal(vars, {f}), derivative_ideal(theta, Ideal(vars, {g}))) +
                Ideal::product(Ideal(vars, {g}), derivative_ideal(theta, Ideal(vars, {f})));
    CHECK(rhs.contains(lhs));
  }
}

TEST_CASE("monotonicity: I in J implies theta[I] in theta[J] + J") {
  std::mt19937_64 rng(123);
  const std::vector<std::string> vars = {"x", "y"};
  for (int trial = 0; trial < 20; ++trial) {
    Polynomial j1 = oracles::random_polynomial(rng, vars, 2, 2);
    Polynomial j2 = oracles::random_polynomial(rng, vars, 2, 2);
    Ideal big(vars, {j1, j2});
    if (big.generators().empty()) continue;
    // I generated by random combinations of J's generators.
    std::vector<Polynomial> small_gens;
    for (int k = 0; k < 2; ++k) {
      Polynomial mult1 = oracles::random_polynomial(rng, vars, 1, 2);
      Polynomial mult2 = oracles::random_polynomial(rng, vars, 1, 2);
      small_gens.push_back(j1 * mult1 + j2 * mult2);
    }
    Ideal small(vars, small_gens);
    std::vector<Polynomial> comps;
    for (std::size_t c = 0; c < vars.size(); ++c)
      comps.push_back(oracles::random_polynomial(rng, vars, 2, 2));
    Distribution theta({VectorField(vars, comps)});
    Ideal lhs = derivative_ideal(theta, small);
    Ideal rhs = derivative_ideal(theta, big) + big;
    CHECK(rhs.contains(lhs));
  }
}

TEST_CASE("numeric qt at a point matches the exact verdicts") {
  auto sys1 = example1();
  std::vector<AnalyticField> theta = {AnalyticField::from_polynomials(sys1.theta().generators[0])};
  std::vector<AnalyticFun> evals = {
      {[](std::span<const double> p) { return p[1]; }, "y"}};
  auto nqt = numeric_qt_at(theta, evals, std::vector<double>{1.0, 0.0}, 1e-7);
  CHECK(nqt.verdict);
  CHECK(nqt.L_dim == 1);
  CHECK(nqt.T_dim == 1);
  auto sys2 = example2();
  std::vector<AnalyticField> theta2 = {AnalyticField::from_polynomials(sys2.theta().generators[0])};
  auto nqt2 = numeric_qt_at(theta2, evals, std::vector<double>{0.0, 0.0}, 1e-7);
  CHECK(!nqt2.verdict);
}

TEST_CASE("divisor tangency is enforced at system construction") {
  CHECK_NOTHROW(FoliatedSystem(kXY, Distribution({VF({"1", "0"})}), Ideal(kXY, {P("x")}),
                               {P("y")}));
  CHECK_THROWS_WITH_AS(FoliatedSystem(kXY, Distribution({VF({"0", "1"})}),
                                      Ideal(kXY, {P("x")}), {P("y")}),
                       doctest::Contains("not tangent"), std::invalid_argument);
}
