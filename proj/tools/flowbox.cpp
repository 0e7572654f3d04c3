// flowbox: symbolic-numeric checks for quasi-transversality of singular
// distributions, blow-up transforms, orbit-return experiments and the 4D/5D
// counterexample suite.
#include <CLI11.hpp>

#include "flowbox/blowup.hpp"
#include "flowbox/counterexample.hpp"
#include "flowbox/geometry.hpp"
#include "flowbox/returns.hpp"
#include "flowbox/splitting.hpp"
#include "flowbox/subriemannian.hpp"
#include "flowbox/sysfile.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace flowbox;

namespace {

struct GlobalOpts {
  double rtol = 1e-9;
  double atol = 1e-12;
  double tol = 1e-7;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string csv_path;
  std::size_t spair_budget = 100000;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_key(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing";
  std::ostringstream buf;
  buf << in.rdbuf();
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a(buf.str())));
  return std::string("fnv1a:") + hex;
}

std::string args_digest(const std::string& echo) {
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(echo)));
  return std::string("fnv1a:") + hex;
}

// Wall time is the one nondeterministic field and is printed last.
class RunReport {
 public:
  RunReport(std::string echo, std::string digest, const GlobalOpts& g)
      : start_(std::chrono::steady_clock::now()) {
    lines_.push_back("command: " + std::move(echo));
    lines_.push_back("input_digest: " + std::move(digest));
    std::ostringstream os;
    os << "tolerances: rtol=" << g.rtol << " atol=" << g.atol << " tol=" << g.tol
       << " seed=" << g.seed << " jobs=" << g.jobs;
    lines_.push_back(os.str());
  }

  void add(const std::string& key, const std::string& value) {
    lines_.push_back(key + ": " + value);
  }
  void add(const std::string& key, double value) { add(key, fmt(value)); }
  void add(const std::string& key, bool value) { add(key, value ? std::string("true") : "false"); }
  void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }

  void flush() {
    for (const auto& l : lines_) std::cout << l << "\n";
    const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
    std::cout << "wall_time_s: " << dt.count() << "\n";
  }

 private:
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> lines_;
};

void write_csv(const std::string& path, const std::string& content) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write CSV file '" + path + "'");
  out << content;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::vector<Rational> parse_rationals(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string t;
    for (char c : item)
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (!t.empty()) out.push_back(parse_rational(t));
  }
  return out;
}

// --box x=0.2:1,y=0:0 ; every system variable must be covered.
std::vector<std::pair<double, double>> parse_box(const std::string& text,
                                                 const std::vector<std::string>& vars) {
  std::vector<std::pair<double, double>> box(vars.size(), {0.0, 0.0});
  std::vector<bool> seen(vars.size(), false);
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    const auto colon = item.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos)
      throw std::runtime_error("box entries look like var=lo:hi; got '" + item + "'");
    const std::string name = item.substr(0, eq);
    std::size_t idx = SIZE_MAX;
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i] == name) idx = i;
    if (idx == SIZE_MAX) throw std::runtime_error("box names unknown variable '" + name + "'");
    box[idx] = {std::stod(item.substr(eq + 1, colon - eq - 1)), std::stod(item.substr(colon + 1))};
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (!seen[i]) throw std::runtime_error("box does not cover variable '" + vars[i] + "'");
  return box;
}

std::vector<unsigned> parse_grid(const std::string& text, std::size_t nvars) {
  std::vector<unsigned> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) grid.push_back(static_cast<unsigned>(std::stoul(item)));
  if (grid.size() == 1) grid.assign(nvars, grid.front());
  if (grid.size() != nvars)
    throw std::runtime_error("grid needs one entry per variable (or a single shared value)");
  return grid;
}

FunctionRegistry registry_with_h() {
  FunctionRegistry reg = default_registry();
  reg["h"] = [](double s) { return HTable::instance().h(s); };
  return reg;
}

std::string echo_of(int argc, char** argv) {
  std::string echo;
  for (int i = 0; i < argc; ++i) {
    if (i) echo += ' ';
    echo += argv[i];
  }
  return echo;
}

// ---------------------------------------------------------------------------

int run_check(const GlobalOpts& g, const std::string& kind, const std::string& path,
              const std::vector<std::string>& point_args, const std::string& box_arg,
              const std::string& grid_arg, const std::string& echo) {
  SystemFile file = load_system_file(path);
  FoliatedSystem sys = file.to_system();
  RunReport report(echo, file_digest(path), g);

  std::vector<std::vector<Rational>> points = file.points;
  for (const auto& p : point_args) points.push_back(parse_rationals(p));

  bool ok = true;
  if (kind == "gqt" || kind == "aqt") {
    for (const auto& p : points) {
      PointQT qt = geometric_qt_at(sys, p);
      std::ostringstream key, val;
      key << "gqt@(";
      for (std::size_t i = 0; i < p.size(); ++i) key << (i ? "," : "") << p[i].str();
      key << ")";
      val << (qt.verdict ? "true" : "false") << " L_dim=" << qt.L_dim << " T_dim=" << qt.T_dim
          << " sum_dim=" << qt.sum_dim;
      report.add(key.str(), val.str());
      if (kind == "gqt") ok = ok && qt.verdict;
    }
    if (!box_arg.empty()) {
      ScanOptions opts;
      opts.box = parse_box(box_arg, sys.vars());
      opts.grid = grid_arg.empty() ? std::vector<unsigned>(sys.vars().size(), 20)
                                   : parse_grid(grid_arg, sys.vars().size());
      opts.tol = g.tol;
      opts.jobs = g.jobs;
      ScanReport scan = geometric_qt_scan(sys, opts);
      report.add("scan_nodes", scan.nodes);
      report.add("scan_projected", scan.projected);
      report.add("scan_projection_failures", scan.projection_failures);
      report.add("scan_divisor_skipped", scan.divisor_skipped);
      report.add("scan_failures", scan.failures.size());
      for (std::size_t i = 0; i < std::min<std::size_t>(scan.failures.size(), 10); ++i) {
        std::ostringstream os;
        for (std::size_t j = 0; j < scan.failures[i].point.size(); ++j)
          os << (j ? "," : "") << fmt(scan.failures[i].point[j]);
        report.add("scan_failure_" + std::to_string(i), os.str());
      }
      if (kind == "gqt") ok = ok && scan.failures.empty();
    }
    if (kind == "aqt") {
      const bool algebraic = is_analytically_qt(sys);
      report.add("aqt_algebraic", algebraic);
      Ideal t1 = derivative_ideal(sys.theta(), sys.ideal());
      report.add("theta1_ideal", t1.to_string());
      report.add("theta2_ideal", derivative_ideal(sys.theta(), t1).to_string());
      ok = algebraic;
    }
  } else if (kind == "tangency") {
    Ideal w = tangency_locus(sys);
    report.add("tangency_locus", w.to_string());
    std::ostringstream basis;
    basis << "(";
    const auto& b = w.basis();
    for (std::size_t i = 0; i < b.size(); ++i) basis << (i ? ", " : "") << b[i].to_string();
    basis << ")";
    report.add("tangency_groebner", basis.str());
    report.add("tangency_whole_ring", w.is_whole_ring());
  } else {
    throw std::runtime_error("unknown check kind '" + kind + "' (gqt|aqt|tangency)");
  }
  report.add("verdict", ok);
  report.flush();
  return ok ? 0 : 1;
}

int run_blowup(const GlobalOpts& g, const std::string& path, const std::string& center_arg,
               const std::string& chart_var, unsigned nu, const std::string& out_path,
               const std::string& echo) {
  SystemFile file = load_system_file(path);
  FoliatedSystem sys = file.to_system();
  RunReport report(echo, file_digest(path), g);

  BlowupSpec spec;
  std::stringstream ss(center_arg);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) spec.center_vars.push_back(item);
  spec.chart_var = chart_var;

  TransformedSystem chart = blowup_chart(sys, spec);
  for (const auto& [from, to] : chart.substitution_log)
    report.add("substitution " + from, to);
  report.add("exceptional", chart.exceptional.to_string());
  report.add("weak_transform", chart.system.ideal().to_string());

  bool ok = true;
  const bool weak_identity = verify_transform_identity(sys, spec, 0);
  report.add("weak_transform_identity", weak_identity);
  ok = ok && weak_identity;

  const bool exc_invariant =
      is_invariant_ideal(chart.system.theta(), Ideal(sys.vars(), {chart.exceptional}));
  report.add("exceptional_invariant", exc_invariant);
  ok = ok && exc_invariant;

  for (unsigned k = 0; k <= nu; ++k) {
    const bool identity = verify_transform_identity(sys, spec, k);
    report.add("transform_identity_nu" + std::to_string(k), identity);
    ok = ok && identity;
  }

  SystemFile out;
  out.variables = sys.vars();
  out.field_generators = chart.system.theta().generators;
  out.ideal_gens = chart.system.ideal().generators();
  out.divisor = chart.system.divisor();
  if (!out_path.empty()) {
    save_system_file(out_path, out);
    report.add("output", out_path);
  } else {
    report.add("transformed_system", "\n" + format_system_file(out));
  }
  report.add("verdict", ok);
  report.flush();
  return ok ? 0 : 1;
}

int run_simulate(const GlobalOpts& g, const std::string& path, const std::string& p0_arg,
                 double tmax, unsigned generator, const std::string& echo) {
  SystemFile file = load_system_file(path);
  RunReport report(echo, file_digest(path), g);
  auto fields = file.to_fields();
  if (generator >= fields.size()) throw std::runtime_error("generator index out of range");
  std::vector<double> p0 = parse_doubles(p0_arg);

  IntegrateOptions opts;
  opts.rtol = g.rtol;
  opts.atol = g.atol;
  Trajectory traj = integrate(fields[generator], p0, tmax, opts);

  report.add("steps_accepted", traj.step_sizes.size());
  report.add("truncated", traj.truncated);
  std::ostringstream end;
  for (std::size_t i = 0; i < traj.states.back().size(); ++i)
    end << (i ? "," : "") << fmt(traj.states.back()[i]);
  report.add("t_end", traj.times.back());
  report.add("endpoint", end.str());

  std::ostringstream csv;
  csv << "t";
  for (const auto& v : file.variables) csv << "," << v;
  csv << "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    csv << fmt(traj.times[k]);
    for (double x : traj.states[k]) csv << "," << fmt(x);
    csv << "\n";
  }
  write_csv(g.csv_path, csv.str());
  report.flush();
  return 0;
}

int run_delta(const GlobalOpts& g, const std::string& path, const std::string& box_arg,
              const std::string& grid_arg, double delta_max, bool forward_only,
              unsigned generator, const std::string& echo) {
  SystemFile file = load_system_file(path);
  RunReport report(echo, file_digest(path), g);
  auto fields = file.to_fields();
  if (generator >= fields.size()) throw std::runtime_error("generator index out of range");

  DeltaOptions opts;
  opts.box = parse_box(box_arg, file.variables);
  opts.grid = grid_arg.empty() ? std::vector<unsigned>(file.variables.size(), 8)
                               : parse_grid(grid_arg, file.variables.size());
  opts.delta_max = delta_max;
  opts.both_directions = !forward_only;
  opts.jobs = g.jobs;
  opts.returns.tol = g.tol;
  opts.returns.integ.rtol = g.rtol;
  opts.returns.integ.atol = g.atol;

  DeltaReport delta = estimate_flowbox_delta(fields[generator],
                                             file.ideal_evaluators(registry_with_h()),
                                             file.divisor_evaluators(), opts);

  report.add("nodes", delta.nodes);
  report.add("samples_on_x", delta.samples.size());
  report.add("projection_failures", delta.projection_failures);
  report.add("singular_skipped", delta.singular_skipped);
  report.add("divisor_skipped", delta.divisor_skipped);
  if (delta.delta_est) {
    report.add("delta_est", *delta.delta_est);
    std::ostringstream worst;
    for (std::size_t i = 0; i < delta.worst.start.size(); ++i)
      worst << (i ? "," : "") << fmt(delta.worst.start[i]);
    report.add("worst_start", worst.str());
    report.add("worst_crossings", delta.worst.crossing_times.size());
  } else {
    report.add("delta_est", "none (no return inside the window)");
  }

  std::ostringstream csv;
  csv << "sample_id,min_return,backward\n";
  for (std::size_t i = 0; i < delta.samples.size(); ++i) {
    csv << i << ",";
    if (delta.samples[i].min_return)
      csv << fmt(*delta.samples[i].min_return);
    else
      csv << "none";
    csv << "," << (delta.samples[i].backward ? 1 : 0) << "\n";
  }
  write_csv(g.csv_path, csv.str());
  report.flush();
  return 0;
}

int run_srdist(const GlobalOpts& g, const std::string& path, const std::string& from_arg,
               const std::string& to_arg, double horizon, int steps, int budget,
               const std::string& echo) {
  SystemFile file = load_system_file(path);
  RunReport report(echo, file_digest(path), g);

  SROptions opts;
  opts.horizon = horizon;
  opts.n_steps = steps;
  opts.budget = budget;
  opts.seed = g.seed;
  const double d = sr_distance(file.to_fields(), parse_doubles(from_arg),
                               parse_doubles(to_arg), opts);
  report.add("sr_distance", std::isfinite(d) ? fmt(d) : std::string("inf"));
  report.flush();
  return 0;
}

int run_split(const GlobalOpts& g, const std::string& path, const std::string& y_var,
              const std::string& span_arg, unsigned y_samples, unsigned z_nodes,
              int degree_bound, double split_tol, const std::string& echo) {
  SystemFile file = load_system_file(path);
  RunReport report(echo, file_digest(path), g);

  // Y is the generator equal to d/dy; the others are the W's.
  VectorField y_field;
  std::vector<VectorField> w;
  const VectorField wanted = VectorField::coordinate(file.variables, y_var);
  bool found = false;
  for (const auto& gen : file.field_generators) {
    if (gen == wanted && !found) {
      y_field = gen;
      found = true;
    } else {
      w.push_back(gen);
    }
  }
  if (!found)
    throw std::runtime_error("no generator equals d/d" + y_var +
                             "; supply the system in rectified coordinates");

  int bound = degree_bound;
  if (bound < 0) {
    int maxdeg = 0;
    for (const auto& gen : w)
      for (const auto& c : gen.components()) maxdeg = std::max(maxdeg, c.total_degree());
    bound = maxdeg + 2;
  }
  PolyMatrix a = extract_connection(y_field, w, static_cast<unsigned>(bound));
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::ostringstream row;
    for (std::size_t j = 0; j < a[i].size(); ++j) row << (j ? ", " : "") << a[i][j].to_string();
    report.add("A_row" + std::to_string(i), row.str());
  }

  SplitOptions opts;
  auto span = parse_doubles(span_arg);
  if (span.size() != 2) throw std::runtime_error("--span needs lo,hi");
  opts.y_lo = span[0];
  opts.y_hi = span[1];
  opts.y_samples = y_samples;
  Polynomial probe(file.variables);
  for (std::size_t i = 0; i < file.variables.size(); ++i) {
    if (file.variables[i] == y_var) continue;
    std::vector<double> axis;
    for (unsigned k = 0; k < z_nodes; ++k)
      axis.push_back(-1.0 + 2.0 * static_cast<double>(k) / std::max(1u, z_nodes - 1));
    opts.z_axes.push_back(std::move(axis));
  }

  SplitResult result = leaf_split(y_field, w, a, opts);
  report.add("commutator_residual", result.commutator_residual);
  report.add("truncated", result.truncated);
  const bool ok = verify_split(result, split_tol);
  report.add("verdict", ok);

  std::ostringstream csv;
  csv << "z_node,y,i,j,mu\n";
  for (std::size_t zn = 0; zn < result.z_nodes.size(); ++zn)
    for (std::size_t yn = 0; yn < result.y_nodes.size(); ++yn)
      for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j)
          csv << zn << "," << fmt(result.y_nodes[yn]) << "," << i << "," << j << ","
              << fmt(result.mu[zn][yn](static_cast<long>(i), static_cast<long>(j))) << "\n";
  write_csv(g.csv_path, csv.str());
  report.flush();
  return ok ? 0 : 1;
}

int run_counterexample(const GlobalOpts& g, const std::string& part, double r0_arg,
                       unsigned grid, const std::string& echo) {
  RunReport report(echo, args_digest(echo + "#" + part), g);
  bool ok = true;

  if (part == "lemma") {
    const HSolution u0 = solve_h(0.0);
    report.add("U0", u0.u);
    report.add("U0_target", std::sqrt(6.0) / 2.0);
    ok = std::abs(u0.u - std::sqrt(6.0) / 2.0) < 1e-9;
    std::ostringstream csv;
    csv << "s,h,U\n";
    double prev_h = -1.0;
    for (unsigned i = 0; i < 50; ++i) {
      const double s = 0.7 * static_cast<double>(i) / 49.0;
      const HSolution sol = solve_h(s);
      csv << fmt(s) << "," << fmt(sol.h) << "," << fmt(sol.u) << "\n";
      if (sol.residual > 1e-12) ok = false;
      if (sol.h <= prev_h && i > 0) ok = false;
      prev_h = sol.h;
    }
    report.add("grid_residuals_below_1e-12", ok);
    write_csv(g.csv_path, csv.str());
  } else if (part == "claim1") {
    Claim1Options opts;
    opts.n_r = grid;
    opts.n_alpha = grid;
    opts.tol = g.tol;
    opts.jobs = g.jobs;
    Claim1Report c1 = verify_claim1(opts);
    report.add("common_zero_off_origin", c1.common_zero_off_origin);
    report.add("min_joint_normalized", c1.min_joint_normalized);
    report.add("min_joint_raw", c1.min_joint_raw);
    report.add("min_T1_near_T2_locus", c1.min_t1_near_t2_locus);
    report.add("min_T2_near_T1_locus", c1.min_t2_near_t1_locus);
    report.add("circle_r", c1.circle_r);
    report.add("circle_min_raw", c1.circle_min_raw);
    report.add("V0_estimate", c1.v0_estimate);
    report.add("V0_target", std::sqrt(2.0) / 2.0);
    report.add("V_sample_x", c1.v_sample_x);
    ok = !c1.common_zero_off_origin &&
         std::abs(c1.v0_estimate - std::sqrt(2.0) / 2.0) < 1e-3 && c1.circle_min_raw > 1e-6;
  } else if (part == "claim2") {
    IntegrateOptions opts;
    opts.rtol = g.rtol;
    opts.atol = g.atol;
    std::vector<double> r0s;
    if (r0_arg > 0) {
      r0s = {r0_arg};
    } else {
      r0s = {0.5, 0.3, 0.1, 0.05};
    }
    std::ostringstream csv;
    csv << "r0,t_return,residual_z,residual_w\n";
    double prev_t = std::numeric_limits<double>::infinity();
    for (double r0 : r0s) {
      Claim2Report c2 = verify_claim2(r0, opts);
      csv << fmt(r0) << "," << fmt(c2.t_return) << "," << fmt(c2.residual_z) << ","
          << fmt(c2.residual_w) << "\n";
      report.add("t_return@r0=" + fmt_key(r0), c2.t_return);
      report.add("membership_residual@r0=" + fmt_key(r0), c2.membership_residual);
      report.add("orbit_deviation@r0=" + fmt_key(r0), c2.orbit_deviation);
      if (c2.membership_residual >= 1e-8) ok = false;
      if (c2.orbit_deviation >= 1e-9) ok = false;
      if (c2.t_return >= prev_t) ok = false;
      prev_t = c2.t_return;
      if (std::abs(r0 - 0.05) < 1e-12) {
        const double ratio = c2.t_return / (r0 * r0);
        report.add("t_over_r0sq@r0=0.05", ratio);
        if (std::abs(ratio - std::sqrt(6.0) / 2.0) >= 1e-2) ok = false;
      }
    }
    write_csv(g.csv_path, csv.str());
  } else {
    throw std::runtime_error("unknown counterexample part '" + part + "' (lemma|claim1|claim2)");
  }
  report.add("verdict", ok);
  report.flush();
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi-transversality and generalized flow-box toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--rtol", g.rtol, "integration relative tolerance");
  app.add_option("--atol", g.atol, "integration absolute tolerance");
  app.add_option("--tol", g.tol, "crossing/rank tolerance");
  app.add_option("--seed", g.seed, "seed for stochastic subroutines");
  app.add_option("--jobs", g.jobs, "parallel workers for grid sweeps");
  app.add_option("--csv", g.csv_path, "write machine-readable CSV here");
  app.add_option("--spair-budget", g.spair_budget, "Groebner S-pair budget");

  std::string kind, path, box_arg, grid_arg, center_arg, chart_var, p0_arg, from_arg, to_arg;
  std::vector<std::string> point_args;
  std::string out_path, y_var = "y", span_arg = "-1,1", part;
  double tmax = 1.0, delta_max = 4.0, horizon = 2.0, r0_arg = -1.0, split_tol = 1e-6;
  unsigned nu = 1, generator = 0, y_samples = 33, z_nodes = 5, ce_grid = 200;
  int sr_steps = 16, sr_budget = 24, degree_bound = -1;
  bool forward_only = false;

  auto* check = app.add_subcommand("check", "symbolic quasi-transversality checks");
  check->add_option("kind", kind, "gqt|aqt|tangency")->required();
  check->add_option("file", path, "system file")->required();
  check->add_option("--point", point_args, "extra rational point(s) p1,p2,...");
  check->add_option("--box", box_arg, "scan box var=lo:hi,...");
  check->add_option("--grid", grid_arg, "scan grid subdivisions");

  auto* blowup = app.add_subcommand("blowup", "chart-wise blow-up with identity checks");
  blowup->add_option("file", path, "system file")->required();
  blowup->add_option("--center", center_arg, "center variables, e.g. x,y")->required();
  blowup->add_option("--chart", chart_var, "chart variable")->required();
  blowup->add_option("--nu", nu, "verify the pullback identity for 0..nu");
  blowup->add_option("--out", out_path, "write the transformed system here");

  auto* simulate = app.add_subcommand("simulate", "integrate one generator");
  simulate->add_option("file", path)->required();
  simulate->add_option("--p0", p0_arg, "initial point")->required();
  simulate->add_option("--tmax", tmax, "integration time (may be negative)")->required();
  simulate->add_option("--generator", generator, "generator index");

  auto* delta = app.add_subcommand("delta", "sampled flow-box delta over a box");
  delta->add_option("file", path)->required();
  delta->add_option("--box", box_arg, "box var=lo:hi,...")->required();
  delta->add_option("--grid", grid_arg, "subdivisions per axis");
  delta->add_option("--delta-max", delta_max, "return-time window");
  delta->add_flag("--forward-only", forward_only, "scan positive times only");
  delta->add_option("--generator", generator, "generator index");

  auto* srdist = app.add_subcommand("srdist", "sub-Riemannian distance upper bound");
  srdist->add_option("file", path)->required();
  srdist->add_option("--from", from_arg)->required();
  srdist->add_option("--to", to_arg)->required();
  srdist->add_option("--horizon", horizon, "control horizon");
  srdist->add_option("--steps", sr_steps, "piecewise-constant control steps");
  srdist->add_option("--budget", sr_budget, "multistart budget");

  auto* split = app.add_subcommand("split", "leaf reduction along a rectified generator");
  split->add_option("file", path)->required();
  split->add_option("--y-var", y_var, "rectified variable");
  split->add_option("--span", span_arg, "y span lo,hi (must contain 0)");
  split->add_option("--y-samples", y_samples, "y grid nodes");
  split->add_option("--z-nodes", z_nodes, "nodes per z axis on [-1,1]");
  split->add_option("--degree-bound", degree_bound, "connection degree bound");
  split->add_option("--split-tol", split_tol, "commutator residual tolerance");

  auto* ce = app.add_subcommand("counterexample", "lemma/claim verification suite");
  ce->add_option("part", part, "lemma|claim1|claim2")->required();
  ce->add_option("--r0", r0_arg, "single r0 for claim2 (default: sweep)");
  ce->add_option("--grid", ce_grid, "polar grid size for claim1");

  CLI11_PARSE(app, argc, argv);

  const std::string echo = echo_of(argc, argv);
  try {
    if (check->parsed())
      return run_check(g, kind, path, point_args, box_arg, grid_arg, echo);
    if (blowup->parsed())
      return run_blowup(g, path, center_arg, chart_var, nu, out_path, echo);
    if (simulate->parsed()) return run_simulate(g, path, p0_arg, tmax, generator, echo);
    if (delta->parsed())
      return run_delta(g, path, box_arg, grid_arg, delta_max, forward_only, generator, echo);
    if (srdist->parsed())
      return run_srdist(g, path, from_arg, to_arg, horizon, sr_steps, sr_budget, echo);
    if (split->parsed())
      return run_split(g, path, y_var, span_arg, y_samples, z_nodes, degree_bound, split_tol,
                       echo);
    if (ce->parsed()) return run_counterexample(g, part, r0_arg, ce_grid, echo);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}
