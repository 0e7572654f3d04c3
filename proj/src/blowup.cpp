#include "flowbox/blowup.hpp"

#include "flowbox/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace flowbox {

namespace {

// Divisor components must be coordinate hypersurfaces in the current chart.
std::size_t divisor_variable(const Polynomial& e) {
  if (e.terms().size() != 1) throw std::invalid_argument("divisor component is not a coordinate");
  const auto& [exps, c] = *e.terms().begin();
  if (exps_total_degree(exps) != 1)
    throw std::invalid_argument("divisor component is not a coordinate");
  for (std::size_t i = 0; i < exps.size(); ++i)
    if (exps[i] == 1) return i;
  throw std::logic_error("unreachable");
}

struct ChartData {
  std::vector<std::size_t> center_idx;
  std::size_t chart_idx = 0;
  std::vector<Polynomial> images;  // sigma: old var -> chart polynomial
};

ChartData prepare_chart(const FoliatedSystem& sys, const BlowupSpec& spec) {
  const auto& vars = sys.vars();
  if (spec.center_vars.size() < 2)
    throw std::invalid_argument("blow-up center needs at least two variables");
  ChartData data;
  Polynomial probe(vars);
  for (const auto& name : spec.center_vars) data.center_idx.push_back(probe.var_index(name));
  if (std::find(spec.center_vars.begin(), spec.center_vars.end(), spec.chart_var) ==
      spec.center_vars.end())
    throw std::invalid_argument("chart variable must belong to the center");
  data.chart_idx = probe.var_index(spec.chart_var);

  const Polynomial chart_poly = Polynomial::variable(vars, spec.chart_var);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const bool in_center =
        std::find(data.center_idx.begin(), data.center_idx.end(), i) != data.center_idx.end();
    Polynomial xi = Polynomial::variable(vars, vars[i]);
    if (in_center && i != data.chart_idx) {
      data.images.push_back(chart_poly * xi);
    } else {
      data.images.push_back(xi);
    }
  }
  return data;
}

}  // namespace

TransformedSystem blowup_chart(const FoliatedSystem& sys, const BlowupSpec& spec) {
  const auto& vars = sys.vars();
  ChartData data = prepare_chart(sys, spec);

  // SNC with the divisor, checked syntactically.
  for (const auto& e : sys.divisor()) divisor_variable(e);

  // theta-invariance of the center ideal.
  std::vector<Polynomial> center_gens;
  for (std::size_t ci : data.center_idx)
    center_gens.push_back(Polynomial::variable(vars, vars[ci]));
  Ideal center_ideal(vars, center_gens);
  for (const auto& d : sys.theta().generators) {
    for (std::size_t ci : data.center_idx) {
      Polynomial dv = d.apply(Polynomial::variable(vars, vars[ci]));
      if (!center_ideal.contains(dv)) {
        std::ostringstream os;
        os << "center is not theta-invariant: derivative of " << vars[ci] << " along "
           << d.to_string() << " is " << dv.to_string() << ", not in " << center_ideal.to_string();
        throw std::invalid_argument(os.str());
      }
    }
  }

  // Order-one weak transform: every pulled-back generator divides once by the
  // chart variable.
  std::vector<Polynomial> weak_gens;
  for (const auto& g : sys.ideal().generators()) {
    Polynomial pulled = g.substitute(data.images);
    auto divided = pulled.divide_by_variable(data.chart_idx, 1);
    if (!divided) {
      std::ostringstream os;
      os << "center is not of order one in the ideal: pullback of " << g.to_string()
         << " is not divisible by " << spec.chart_var;
      throw std::invalid_argument(os.str());
    }
    weak_gens.push_back(std::move(*divided));
  }

  // Vector-field pullback; exactness is guaranteed by the invariance gate.
  std::vector<VectorField> new_gens;
  for (const auto& d : sys.theta().generators) {
    std::vector<Polynomial> comps(vars.size(), Polynomial::zero(vars));
    Polynomial a_chart = d.component(data.chart_idx).substitute(data.images);
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const bool in_center =
          std::find(data.center_idx.begin(), data.center_idx.end(), i) != data.center_idx.end();
      if (i == data.chart_idx) {
        comps[i] = a_chart;
      } else if (in_center) {
        Polynomial xi = Polynomial::variable(vars, vars[i]);
        Polynomial numer = d.component(i).substitute(data.images) - xi * a_chart;
        auto divided = numer.divide_by_variable(data.chart_idx, 1);
        if (!divided)
          throw std::logic_error(
              "non-polynomial vector-field pullback despite an invariant center");
        comps[i] = std::move(*divided);
      } else {
        comps[i] = d.component(i).substitute(data.images);
      }
    }
    new_gens.emplace_back(vars, std::move(comps));
  }

  // Divisor: strict transforms plus the exceptional hypersurface.
  std::vector<Polynomial> new_divisor;
  auto push_component = [&](std::size_t var_idx) {
    Polynomial comp = Polynomial::variable(vars, vars[var_idx]);
    if (std::find(new_divisor.begin(), new_divisor.end(), comp) == new_divisor.end())
      new_divisor.push_back(std::move(comp));
  };
  push_component(data.chart_idx);
  for (const auto& e : sys.divisor()) push_component(divisor_variable(e));

  TransformedSystem out;
  out.system = FoliatedSystem(vars, Distribution(std::move(new_gens)),
                              Ideal(vars, std::move(weak_gens)), std::move(new_divisor));
  out.exceptional = Polynomial::variable(vars, spec.chart_var);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (data.images[i] != Polynomial::variable(vars, vars[i]))
      out.substitution_log.emplace_back(vars[i], data.images[i].to_string());
  }
  return out;
}

bool verify_transform_identity(const FoliatedSystem& sys, const BlowupSpec& spec, unsigned nu) {
  TransformedSystem chart = blowup_chart(sys, spec);
  ChartData data = prepare_chart(sys, spec);
  const auto& vars = sys.vars();

  // sigma* of the accumulated derivative ideals.
  Ideal sum = sys.ideal();
  Ideal iterate = sys.ideal();
  for (unsigned i = 1; i <= nu; ++i) {
    iterate = derivative_ideal(sys.theta(), iterate);
    sum = sum + iterate;
  }
  std::vector<Polynomial> pulled;
  for (const auto& g : sum.generators()) pulled.push_back(g.substitute(data.images));
  Ideal rhs(vars, std::move(pulled));

  Ideal tilde_sum = chart.system.ideal();
  Ideal tilde_iter = chart.system.ideal();
  for (unsigned i = 1; i <= nu; ++i) {
    tilde_iter = derivative_ideal(chart.system.theta(), tilde_iter);
    tilde_sum = tilde_sum + tilde_iter;
  }
  Ideal lhs = Ideal::product(Ideal(vars, {chart.exceptional}), tilde_sum);

  return lhs.contains(rhs) && rhs.contains(lhs);
}

AnalyticField polar_blowup(const AnalyticField& field, std::size_t x_index, std::size_t y_index) {
  const std::size_t n = field.dimension();
  if (x_index >= n || y_index >= n || x_index == y_index)
    throw std::invalid_argument("polar_blowup: invalid variable pair");
  if (field.vars().size() < 2)
    throw std::invalid_argument("polar_blowup: field must have at least two variables");

  std::vector<std::string> vars = field.vars();
  vars[x_index] = "r";
  vars[y_index] = "alpha";

  // sigma(p): substitute x = r cos(alpha), y = r sin(alpha).
  auto downstairs = [x_index, y_index](std::span<const double> p, double r) {
    std::vector<double> q(p.begin(), p.end());
    q[x_index] = r * std::cos(p[y_index]);
    q[y_index] = r * std::sin(p[y_index]);
    return q;
  };

  const auto& comps = field.components();
  auto ax = comps[x_index].fn;
  auto ay = comps[y_index].fn;

  std::vector<AnalyticFun> out(n);
  // dr/dt = cos(alpha) a_x + sin(alpha) a_y.
  out[x_index] = {[=](std::span<const double> p) {
                    const auto q = downstairs(p, p[x_index]);
                    return std::cos(p[y_index]) * ax(q) + std::sin(p[y_index]) * ay(q);
                  },
                  "cos(alpha)*(" + comps[x_index].form + ") + sin(alpha)*(" +
                      comps[y_index].form + ")"};
  // dalpha/dt = (cos(alpha) a_y - sin(alpha) a_x) / r; the r-factor of the
  // numerator is removed by a symmetric difference on the axis.
  out[y_index] = {[=](std::span<const double> p) {
                    auto numer = [&](double r) {
                      const auto q = downstairs(p, r);
                      return std::cos(p[y_index]) * ay(q) - std::sin(p[y_index]) * ax(q);
                    };
                    const double r = p[x_index];
                    if (std::abs(r) > 1e-12) return numer(r) / r;
                    if (std::abs(numer(0.0)) > 1e-9)
                      throw std::domain_error(
                          "polar_blowup: field is not liftable over r = 0 at this point");
                    const double eps = 1e-5;
                    return (numer(eps) - numer(-eps)) / (2.0 * eps);
                  },
                  "(cos(alpha)*(" + comps[y_index].form + ") - sin(alpha)*(" +
                      comps[x_index].form + "))/r"};
  for (std::size_t k = 0; k < n; ++k) {
    if (k == x_index || k == y_index) continue;
    auto akf = comps[k].fn;
    out[k] = {[=](std::span<const double> p) { return akf(downstairs(p, p[x_index])); },
              comps[k].form + " in polar coordinates"};
  }
  return AnalyticField(std::move(vars), std::move(out));
}

}  // namespace flowbox
