#include "flowbox/counterexample.hpp"

#include "flowbox/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace flowbox {

namespace {

constexpr double kSqrt6Half = 1.2247448713915890;  // sqrt(6)/2
constexpr double kHWindow = 0.7;

double h_equation(double s, double a) { return (1.0 + s * s) * std::cos(a) * std::sin(a) - a; }
double h_equation_da(double s, double a) { return (1.0 + s * s) * std::cos(2.0 * a) - 1.0; }

}  // namespace

HSolution solve_h(double s) {
  if (s < 0.0 || s > kHWindow) {
    std::ostringstream os;
    os << "solve_h: s = " << s << " outside the validated branch window [0, " << kHWindow << "]";
    throw std::domain_error(os.str());
  }
  HSolution sol;
  sol.s = s;
  if (s == 0.0) {
    sol.h = 0.0;
    sol.u = kSqrt6Half;
    sol.residual = 0.0;
    return sol;
  }
  double a = s * kSqrt6Half;
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    const double f = h_equation(s, a);
    if (std::abs(f) < 1e-12) {
      converged = true;
      break;
    }
    const double df = h_equation_da(s, a);
    if (df == 0.0) break;
    a -= f / df;
  }
  if (!converged) {
    std::ostringstream os;
    os << "solve_h: Newton did not converge for s = " << s;
    throw std::runtime_error(os.str());
  }
  sol.h = a;
  sol.u = a / s;
  sol.residual = std::abs(h_equation(s, a));
  return sol;
}

HTable::HTable() {
  const std::size_t n = 1400;  // step 5e-4: local-cubic error well under 1e-10
  ds_ = s_max_ / static_cast<double>(n);
  h_.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    h_[i] = solve_h(std::min(s_max_, static_cast<double>(i) * ds_)).h;
}

const HTable& HTable::instance() {
  static const HTable table;
  return table;
}

double HTable::h(double s) const {
  if (s < 0.0 || s > s_max_) {
    std::ostringstream os;
    os << "h(s): s = " << s << " outside [0, " << s_max_ << "]";
    throw std::domain_error(os.str());
  }
  const double pos = s / ds_;
  std::size_t k = static_cast<std::size_t>(pos);
  if (k >= h_.size() - 1) k = h_.size() - 2;
  // 4-point Lagrange on the uniform grid (clamped at the ends).
  std::size_t k0 = (k == 0) ? 0 : k - 1;
  if (k0 + 3 >= h_.size()) k0 = h_.size() - 4;
  const double t = pos - static_cast<double>(k0);
  const double c0 = -(t - 1) * (t - 2) * (t - 3) / 6.0;
  const double c1 = t * (t - 2) * (t - 3) / 2.0;
  const double c2 = -t * (t - 1) * (t - 3) / 2.0;
  const double c3 = t * (t - 1) * (t - 2) / 6.0;
  return c0 * h_[k0] + c1 * h_[k0 + 1] + c2 * h_[k0 + 2] + c3 * h_[k0 + 3];
}

double HTable::u(double s) const {
  if (s < 1e-4) {
    // h(s)/s = sqrt(6)/2 * (1 - 7/20 s^2 + O(s^4)).
    return kSqrt6Half * (1.0 - 0.35 * s * s);
  }
  return h(s) / s;
}

double HTable::hprime(double s) const {
  if (s < 1e-3) {
    // h'(s) = sqrt(6)/2 * (1 - 21/20 s^2 + O(s^4)).
    return kSqrt6Half * (1.0 - 1.05 * s * s);
  }
  const double hs = h(s);
  return -(2.0 * s * std::cos(hs) * std::sin(hs)) / h_equation_da(s, hs);
}

double ce_f(double x, double y) {
  const double rho = x * x + y * y;
  const double hv = HTable::instance().h(rho);
  return y * y * std::cos(hv) - x * y * std::sin(hv);
}

double ce_g(double x, double y) {
  const double rho = x * x + y * y;
  return 0.5 * x * y * rho * rho;
}

double ce_t1(double x, double y) {
  const double rho = x * x + y * y;
  const double hv = HTable::instance().h(rho);
  return -2.0 * x * y * std::cos(hv) + (x * x - y * y) * std::sin(hv);
}

double ce_t2(double x, double y) {
  const double rho = x * x + y * y;
  return 2.0 * y * y - (x * x - y * y) * rho * rho;
}

CounterexampleSystem build_counterexample4d() {
  CounterexampleSystem sys;
  sys.vars = {"x", "y", "z", "w"};

  VectorField field = VectorField::parse({"-y", "x", "0", "y^2"}, sys.vars);
  sys.field = AnalyticField::from_polynomials(field);

  sys.x_evals = {
      {[](std::span<const double> p) { return p[2] - ce_f(p[0], p[1]); },
       "z - (y^2*cos(h(x^2+y^2)) - x*y*sin(h(x^2+y^2)))"},
      {[](std::span<const double> p) { return p[3] - ce_g(p[0], p[1]); },
       "w - 1/2*x*y*(x^2+y^2)^2"},
  };

  // Polynomial shadow: same field, I = (w - g) with g expanded.
  Polynomial w_poly = Polynomial::variable(sys.vars, "w");
  Polynomial x_poly = Polynomial::variable(sys.vars, "x");
  Polynomial y_poly = Polynomial::variable(sys.vars, "y");
  Polynomial rho = x_poly * x_poly + y_poly * y_poly;
  Polynomial g = (x_poly * y_poly * rho * rho).scaled(Rational(1, 2));
  Ideal shadow_ideal(sys.vars, {w_poly - g});
  sys.shadow = FoliatedSystem(sys.vars, Distribution({field}), shadow_ideal, {});
  return sys;
}

Claim1Report verify_claim1(const Claim1Options& opts) {
  if (opts.r_max <= 0.0 || opts.r_max > 0.5)
    throw std::invalid_argument("verify_claim1: r_max must lie in (0, 0.5]");
  if (opts.n_r < 2 || opts.n_alpha < 2)
    throw std::invalid_argument("verify_claim1: grid must be at least 2x2");

  Claim1Report report;
  report.min_joint_normalized = std::numeric_limits<double>::infinity();
  report.min_joint_raw = std::numeric_limits<double>::infinity();
  report.min_t1_near_t2_locus = std::numeric_limits<double>::infinity();
  report.min_t2_near_t1_locus = std::numeric_limits<double>::infinity();
  report.circle_min_raw = std::numeric_limits<double>::infinity();
  report.circle_r = opts.r_max / 2.0;

  struct Acc {
    double joint_norm = std::numeric_limits<double>::infinity();
    double joint_raw = std::numeric_limits<double>::infinity();
    double t1_near = std::numeric_limits<double>::infinity();
    double t2_near = std::numeric_limits<double>::infinity();
    double circle = std::numeric_limits<double>::infinity();
    bool zero_hit = false;
  };

  const unsigned jobs = std::max(1u, opts.jobs);
  std::vector<Acc> accs(jobs);
  // Prime the shared table before the sweep threads start.
  (void)HTable::instance();

  auto worker = [&](unsigned wid) {
    Acc& acc = accs[wid];
    for (unsigned ir = 1 + wid; ir <= opts.n_r; ir += jobs) {
      const double r = opts.r_max * static_cast<double>(ir) / opts.n_r;
      const double r4 = r * r * r * r, r6 = r4 * r * r;
      const bool on_circle = std::abs(r - opts.r_max / 2.0) < 1e-15;
      for (unsigned ia = 0; ia < opts.n_alpha; ++ia) {
        const double alpha = 2.0 * M_PI * static_cast<double>(ia) / opts.n_alpha;
        const double x = r * std::cos(alpha), y = r * std::sin(alpha);
        const double t1 = ce_t1(x, y), t2 = ce_t2(x, y);
        const double n1 = std::abs(t1) / r4, n2 = std::abs(t2) / r6;
        const double joint_norm = std::max(n1, n2);
        const double joint_raw = std::max(std::abs(t1), std::abs(t2));
        acc.joint_norm = std::min(acc.joint_norm, joint_norm);
        acc.joint_raw = std::min(acc.joint_raw, joint_raw);
        if (n2 < 0.05) acc.t1_near = std::min(acc.t1_near, std::abs(t1));
        if (n1 < 0.05) acc.t2_near = std::min(acc.t2_near, std::abs(t2));
        if (on_circle) acc.circle = std::min(acc.circle, joint_raw);
        if (joint_norm < opts.tol) acc.zero_hit = true;
      }
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();
  }
  for (const auto& acc : accs) {
    report.min_joint_normalized = std::min(report.min_joint_normalized, acc.joint_norm);
    report.min_joint_raw = std::min(report.min_joint_raw, acc.joint_raw);
    report.min_t1_near_t2_locus = std::min(report.min_t1_near_t2_locus, acc.t1_near);
    report.min_t2_near_t1_locus = std::min(report.min_t2_near_t1_locus, acc.t2_near);
    report.circle_min_raw = std::min(report.circle_min_raw, acc.circle);
    report.common_zero_off_origin |= acc.zero_hit;
  }

  // Branch continuation on T2: solve 2y^2 = (x^2-y^2)(x^2+y^2)^2 for
  // y = x^3 V(x), stepping x toward 0 with warm starts.
  double x = 0.3;
  double y = x * x * x * std::sqrt(0.5);
  while (true) {
    for (int it = 0; it < 80; ++it) {
      const double t2 = ce_t2(x, y);
      const double rho = x * x + y * y;
      const double dt2 = 4.0 * y + 2.0 * y * rho * rho - (x * x - y * y) * 2.0 * rho * 2.0 * y;
      if (dt2 == 0.0) break;
      const double step = t2 / dt2;
      y -= step;
      if (std::abs(step) < 1e-16) break;
    }
    if (x <= 0.01) break;
    const double x_next = std::max(0.01, 0.8 * x);
    y *= (x_next / x) * (x_next / x) * (x_next / x);
    x = x_next;
  }
  report.v_sample_x = x;
  report.v0_estimate = y / (x * x * x);
  return report;
}

Claim2Report verify_claim2(double r0, const IntegrateOptions& opts) {
  if (r0 <= 0.0 || r0 > 0.5)
    throw std::invalid_argument("verify_claim2: r0 must lie in (0, 0.5]");

  const HTable& table = HTable::instance();
  Claim2Report report;
  report.r0 = r0;
  report.t_return = solve_h(r0 * r0).h;

  // Blown-up field in (r, alpha, z, w) from the 4D field via the polar chart.
  CounterexampleSystem ce = build_counterexample4d();
  AnalyticField tilde = polar_blowup(ce.field, 0, 1);

  const std::vector<double> start = {r0, 0.0, 0.0, 0.0};
  Trajectory traj = integrate(tilde, start, report.t_return, opts);

  // Closed form: (r0, t, 0, r0^2/4 (2t - sin 2t)).
  double dev = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    const auto& st = traj.states[k];
    dev = std::max(dev, std::abs(st[0] - r0));
    dev = std::max(dev, std::abs(st[1] - t));
    dev = std::max(dev, std::abs(st[2]));
    dev = std::max(dev, std::abs(st[3] - r0 * r0 / 4.0 * (2.0 * t - std::sin(2.0 * t))));
  }
  report.orbit_deviation = dev;

  const auto& end = traj.states.back();
  const double r = end[0], alpha = end[1];
  const double hr2 = table.h(r * r);
  const double f_tilde = r * r * std::sin(alpha) *
                         (std::sin(alpha) * std::cos(hr2) - std::cos(alpha) * std::sin(hr2));
  const double g_tilde = 0.5 * std::pow(r, 6) * std::sin(alpha) * std::cos(alpha);
  report.residual_z = std::abs(end[2] - f_tilde);
  report.residual_w = std::abs(end[3] - g_tilde);
  report.membership_residual = std::max(report.residual_z, report.residual_w);
  return report;
}

Remark5D build_remark_5d() {
  Remark5D remark;
  remark.vars = {"x", "y", "z", "w", "v"};

  VectorField d1 = VectorField::parse({"-y", "x", "0", "y^2", "0"}, remark.vars);
  VectorField d2 = VectorField::coordinate(remark.vars, "v");
  remark.theta = {AnalyticField::from_polynomials(d1), AnalyticField::from_polynomials(d2)};

  remark.ideal_evals = {
      {[](std::span<const double> p) { return p[2] - ce_f(p[0], p[1]); },
       "z - (y^2*cos(h(x^2+y^2)) - x*y*sin(h(x^2+y^2)))"},
      {[](std::span<const double> p) { return p[3] - ce_g(p[0], p[1]); },
       "w - 1/2*x*y*(x^2+y^2)^2"},
      {[](std::span<const double> p) { return p[4]; }, "v"},
  };

  remark.shadow_theta = Distribution({d1, d2});
  remark.shadow_ideal = Ideal(remark.vars, {Polynomial::variable(remark.vars, "v")});
  remark.tag = "satisfies the one-step algebraic condition; fails the generalized Flow-Box "
               "property after leaf reduction";
  return remark;
}

CounterexampleSystem leaf_reduce_remark(const Remark5D&) { return build_counterexample4d(); }

double remark5d_unit_minimum(const Remark5D& remark, unsigned samples) {
  // d2 applied to the generator v of the ideal: the (2,3) entry of the
  // derivative matrix d_i(g_j); a unit makes eq:aqt trivial.
  double min_unit = std::numeric_limits<double>::infinity();
  const double fd = 1e-6;
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  auto next01 = [&]() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<double>(state >> 11) / 9007199254740992.0;
  };
  for (unsigned i = 0; i < samples; ++i) {
    std::vector<double> p(5);
    for (auto& c : p) c = 0.4 * (2.0 * next01() - 1.0);
    // Directional derivative of v-eval along theta_2 = d/dv.
    std::vector<double> dir = remark.theta[1].eval(p);
    std::vector<double> pp = p, pm = p;
    for (std::size_t k = 0; k < 5; ++k) {
      pp[k] += fd * dir[k];
      pm[k] -= fd * dir[k];
    }
    const double d = (remark.ideal_evals[2](pp) - remark.ideal_evals[2](pm)) / (2.0 * fd);
    min_unit = std::min(min_unit, std::abs(d));
  }
  return min_unit;
}

}  // namespace flowbox
