#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flowbox/blowup.hpp"
#include "flowbox/counterexample.hpp"
#include "flowbox/returns.hpp"
#include "flowbox/subriemannian.hpp"

#include <cmath>
#include <random>

using namespace flowbox;

namespace {

const std::vector<std::string> kXY = {"x", "y"};

AnalyticField field_of(const std::vector<std::string>& comps,
                       const std::vector<std::string>& vars = kXY) {
  return AnalyticField::from_polynomials(VectorField::parse(comps, vars));
}

const std::vector<AnalyticFun> kYEval = {
    {[](std::span<const double> p) { return p[1]; }, "y"}};

}  // namespace

TEST_CASE("integrate: rotation half turn") {
  auto rot = field_of({"-y", "x"});
  Trajectory traj = integrate(rot, std::vector<double>{1.0, 0.0}, M_PI);
  CHECK(std::abs(traj.states.back()[0] + 1.0) < 1e-8);
  CHECK(std::abs(traj.states.back()[1]) < 1e-8);
}

TEST_CASE("integrate: shear closed form") {
  auto shear = field_of({"1", "x"});
  const double x0 = 0.3;
  Trajectory traj = integrate(shear, std::vector<double>{x0, 0.0}, 1.5);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    CHECK(std::abs(traj.states[k][0] - (x0 + t)) < 1e-9);
    CHECK(std::abs(traj.states[k][1] - (x0 * t + t * t / 2)) < 1e-9);
  }
}

TEST_CASE("integrate: zero field is constant; backward time works") {
  auto zero = field_of({"0", "0"});
  Trajectory traj = integrate(zero, std::vector<double>{0.4, -0.2}, 3.0);
  for (const auto& s : traj.states) {
    CHECK(s[0] == 0.4);
    CHECK(s[1] == -0.2);
  }
  auto rot = field_of({"-y", "x"});
  Trajectory back = integrate(rot, std::vector<double>{1.0, 0.0}, -M_PI / 2);
  CHECK(std::abs(back.states.back()[0]) < 1e-8);
  CHECK(std::abs(back.states.back()[1] + 1.0) < 1e-8);
}

TEST_CASE("conservation: rotation radius over a long window") {
  auto rot = field_of({"-y", "x"});
  Trajectory traj = integrate(rot, std::vector<double>{1.0, 0.0}, 10.0);
  for (const auto& s : traj.states)
    CHECK(std::abs(s[0] * s[0] + s[1] * s[1] - 1.0) < 1e-8);
}

TEST_CASE("dense output: exact at nodes, accurate between") {
  auto rot = field_of({"-y", "x"});
  Trajectory traj = integrate(rot, std::vector<double>{1.0, 0.0}, 2.0);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    auto s = traj.state_at(traj.times[k]);
    CHECK(s[0] == traj.states[k][0]);
    CHECK(s[1] == traj.states[k][1]);
  }
  for (double t : {0.321, 1.234, 1.999}) {
    auto s = traj.state_at(t);
    CHECK(std::abs(s[0] - std::cos(t)) < 1e-6);
    CHECK(std::abs(s[1] - std::sin(t)) < 1e-6);
  }
}

TEST_CASE("domain exit truncates with a flag") {
  std::vector<AnalyticFun> comps = {{[](std::span<const double>) { return 1.0; }, "1"},
                                    {[](std::span<const double>) { return 0.0; }, "0"}};
  Box box{{{-2.0, 0.5}, {-1.0, 1.0}}};
  AnalyticField f(kXY, comps, box);
  Trajectory traj = integrate(f, std::vector<double>{0.0, 0.0}, 2.0);
  CHECK(traj.truncated);
  CHECK(traj.states.back()[0] <= 0.5 + 1e-12);
  CHECK(traj.times.back() < 2.0);
}

TEST_CASE("detect_returns on the rotation example") {
  auto rot = field_of({"-y", "x"});
  auto report = detect_returns(rot, kYEval, std::vector<double>{1.0, 0.0}, 4.0, {});
  REQUIRE(report.min_return.has_value());
  CHECK(std::abs(*report.min_return - M_PI) < 1e-7);
  // Window below the first return: no crossing.
  auto none = detect_returns(rot, kYEval, std::vector<double>{1.0, 0.0}, 1.0, {});
  CHECK(!none.min_return.has_value());
  CHECK(!none.never_left);
}

TEST_CASE("detect_returns on the shear example, forward and time-reversed") {
  auto shear = field_of({"1", "x"});
  auto report = detect_returns(shear, kYEval, std::vector<double>{-0.1, 0.0}, 4.0, {});
  REQUIRE(report.min_return.has_value());
  CHECK(std::abs(*report.min_return - 0.2) < 1e-7);

  // x0 > 0 returns only in negative time: the reversed field shows it.
  auto fwd = detect_returns(shear, kYEval, std::vector<double>{0.1, 0.0}, 4.0, {});
  CHECK(!fwd.min_return.has_value());
  auto bwd = detect_returns(shear.reversed(), kYEval, std::vector<double>{0.1, 0.0}, 4.0, {});
  REQUIRE(bwd.min_return.has_value());
  CHECK(std::abs(*bwd.min_return - 0.2) < 1e-7);
}

TEST_CASE("detect_returns error paths") {
  auto rot = field_of({"-y", "x"});
  CHECK_THROWS_WITH_AS(detect_returns(rot, kYEval, std::vector<double>{1.0, 0.5}, 1.0, {}),
                       doctest::Contains("not on X"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(detect_returns(rot, kYEval, std::vector<double>{0.0, 0.0}, 1.0, {}),
                       doctest::Contains("singular"), std::invalid_argument);
}

TEST_CASE("higher-codimension returns on the blown-up 4D system") {
  CounterexampleSystem ce = build_counterexample4d();
  AnalyticField tilde = polar_blowup(ce.field, 0, 1);
  const HTable& ht = HTable::instance();
  std::vector<AnalyticFun> evals = {
      {[&ht](std::span<const double> p) {
         const double h = ht.h(p[0] * p[0]);
         return p[2] - p[0] * p[0] * std::sin(p[1]) *
                           (std::sin(p[1]) * std::cos(h) - std::cos(p[1]) * std::sin(h));
       },
       "z - f~"},
      {[](std::span<const double> p) {
         return p[3] - 0.5 * std::pow(p[0], 6) * std::sin(p[1]) * std::cos(p[1]);
       },
       "w - g~"},
  };
  double prev = std::numeric_limits<double>::infinity();
  for (double r0 : {0.5, 0.3, 0.1, 0.05}) {
    auto report = detect_returns(tilde, evals, std::vector<double>{r0, 0, 0, 0}, 1.0, {});
    REQUIRE(report.min_return.has_value());
    const double expected = solve_h(r0 * r0).h;
    CHECK(std::abs(*report.min_return - expected) < 1e-8);
    CHECK(*report.min_return < prev);
    prev = *report.min_return;
  }
}

TEST_CASE("flow-box delta on the rotation annulus") {
  auto rot = field_of({"-y", "x"});
  DeltaOptions opts;
  opts.box = {{0.2, 1.0}, {0.0, 0.0}};
  opts.grid = {8, 1};
  opts.delta_max = 4.0;
  auto report = estimate_flowbox_delta(rot, kYEval, {}, opts);
  REQUIRE(report.delta_est.has_value());
  CHECK(std::abs(*report.delta_est - M_PI) < 1e-6);
  CHECK(report.samples.size() == 9);
  // Returns are radius independent.
  for (const auto& s : report.samples) {
    REQUIRE(s.min_return.has_value());
    CHECK(std::abs(*s.min_return - M_PI) < 1e-6);
  }
}

TEST_CASE("flow-box delta on the shear shrinks with the grid") {
  auto shear = field_of({"1", "x"});
  DeltaOptions coarse;
  coarse.box = {{-0.5, -0.1}, {0.0, 0.0}};
  coarse.grid = {4, 1};
  auto d1 = estimate_flowbox_delta(shear, kYEval, {}, coarse);
  REQUIRE(d1.delta_est.has_value());
  CHECK(std::abs(*d1.delta_est - 0.2) < 1e-7);

  DeltaOptions fine = coarse;
  fine.box = {{-0.5, -0.05}, {0.0, 0.0}};
  fine.grid = {9, 1};
  auto d2 = estimate_flowbox_delta(shear, kYEval, {}, fine);
  REQUIRE(d2.delta_est.has_value());
  CHECK(std::abs(*d2.delta_est - 0.1) < 1e-7);
  CHECK(*d2.delta_est < *d1.delta_est);
}

TEST_CASE("flow-box delta uses both time directions") {
  auto shear = field_of({"1", "x"});
  DeltaOptions opts;
  opts.box = {{0.1, 0.5}, {0.0, 0.0}};
  opts.grid = {4, 1};
  auto report = estimate_flowbox_delta(shear, kYEval, {}, opts);
  REQUIRE(report.delta_est.has_value());
  CHECK(std::abs(*report.delta_est - 0.2) < 1e-7);

  opts.both_directions = false;
  auto fwd_only = estimate_flowbox_delta(shear, kYEval, {}, opts);
  CHECK(!fwd_only.delta_est.has_value());
}

TEST_CASE("flow-box delta: no sample on X is an error") {
  auto rot = field_of({"-y", "x"});
  std::vector<AnalyticFun> far = {
      {[](std::span<const double> p) { return p[0] * p[0] + p[1] * p[1] + 1.0; }, "x^2+y^2+1"}};
  DeltaOptions opts;
  opts.box = {{-0.5, 0.5}, {-0.5, 0.5}};
  opts.grid = {3, 3};
  CHECK_THROWS_AS(estimate_flowbox_delta(rot, far, {}, opts), std::runtime_error);
}

TEST_CASE("sr_distance: straight line, unreachable pair, rotation arc") {
  auto dx = field_of({"1", "0"});
  SROptions opts;
  const double straight =
      sr_distance({dx}, std::vector<double>{0, 0}, std::vector<double>{1, 0}, opts);
  CHECK(std::abs(straight - 1.0) < 2e-3);

  const double unreachable =
      sr_distance({dx}, std::vector<double>{0, 0}, std::vector<double>{0, 1}, opts);
  CHECK(std::isinf(unreachable));

  auto rot = field_of({"-y", "x"});
  const double arc =
      sr_distance({rot}, std::vector<double>{1, 0}, std::vector<double>{0, 1}, opts);
  CHECK(std::abs(arc - M_PI / 2) < 5e-3);
}

TEST_CASE("sr_distance equals time-of-flight for a single generator") {
  auto dx = field_of({"1", "0"});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  SROptions opts;
  opts.budget = 12;
  for (int k = 0; k < 10; ++k) {
    const double a = u(rng), b = u(rng), y = u(rng);
    if (std::abs(a - b) < 0.05) continue;
    const double d =
        sr_distance({dx}, std::vector<double>{a, y}, std::vector<double>{b, y}, opts);
    CHECK(std::abs(d - std::abs(b - a)) < 2e-3);
  }
}

TEST_CASE("sr_distance symmetry and triangle inequality within tolerance") {
  auto dx = field_of({"1", "0"});
  SROptions opts;
  opts.budget = 12;
  const std::vector<double> p = {0.0, 0.2}, q = {0.7, 0.2}, r = {-0.4, 0.2};
  const double pq = sr_distance({dx}, p, q, opts);
  const double qp = sr_distance({dx}, q, p, opts);
  CHECK(std::abs(pq - qp) < 2 * 2e-3);
  const double pr = sr_distance({dx}, p, r, opts);
  const double qr = sr_distance({dx}, q, r, opts);
  CHECK(pr <= pq + qr + 3 * 2e-3);
}

TEST_CASE("sr_ball_probe: rotation needs cost pi to return") {
  auto rot = field_of({"-y", "x"});
  SRQuery query;
  query.generators = {rot};
  query.q = {1.0, 0.0};
  query.eta = 1.0;
  query.budget = 300;
  auto report = sr_ball_probe(query, kYEval, 1e-7);
  CHECK(report.k_q == 1);
  CHECK(!report.intersects_X_off_center);
}

TEST_CASE("sr_ball_probe: shear self-returns inside a small ball") {
  auto shear = field_of({"1", "x"});
  SRQuery query;
  query.generators = {shear};
  query.q = {-0.05, 0.0};
  query.eta = 0.2;
  query.budget = 400;
  auto report = sr_ball_probe(query, kYEval, 1e-7);
  CHECK(report.k_q == 1);
  CHECK(report.intersects_X_off_center);
  CHECK(report.hit_cost <= 0.2);
}

TEST_CASE("sr_ball_probe: vanishing radius finds nothing at a nonsingular point") {
  auto shear = field_of({"1", "x"});
  SRQuery query;
  query.generators = {shear};
  query.q = {-0.05, 0.0};
  query.eta = 1e-6;
  query.budget = 100;
  auto report = sr_ball_probe(query, kYEval, 1e-7);
  CHECK(!report.intersects_X_off_center);
}
