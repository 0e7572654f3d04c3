#include "flowbox/sysfile.hpp"

#include <fstream>
#include <sstream>

namespace flowbox {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  const std::string last = trim(cur);
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

// Variable lists accept commas or plain whitespace.
std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

SystemFile parse_system_text(const std::string& text) {
  SystemFile file;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;

  struct Pending {
    std::size_t line;
    std::string key, value;
  };
  std::vector<Pending> pendings;

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError(lineno, "expected 'key: value', got '" + line + "'");
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (key == "variables") {
      if (!file.variables.empty()) throw ParseError(lineno, "duplicate 'variables' line");
      file.variables = split_names(value);
      if (file.variables.empty()) throw ParseError(lineno, "empty variable list");
    } else {
      pendings.push_back({lineno, key, value});
    }
  }
  if (file.variables.empty()) throw ParseError(1, "missing 'variables' line");

  for (const auto& p : pendings) {
    try {
      if (p.key == "field" || p.key == "field_generators") {
        auto comps = split_csv(p.value);
        if (comps.size() != file.variables.size())
          throw std::invalid_argument("field generator needs one component per variable");
        file.field_generators.push_back(VectorField::parse(comps, file.variables));
      } else if (p.key == "ideal") {
        for (const auto& g : split_csv(p.value))
          if (!g.empty()) file.ideal_gens.push_back(Polynomial::parse(g, file.variables));
      } else if (p.key == "divisor") {
        for (const auto& g : split_csv(p.value))
          if (!g.empty()) file.divisor.push_back(Polynomial::parse(g, file.variables));
      } else if (p.key == "point") {
        auto coords = split_csv(p.value);
        if (coords.size() != file.variables.size())
          throw std::invalid_argument("point needs one coordinate per variable");
        std::vector<Rational> pt;
        for (const auto& c : coords) pt.push_back(parse_rational(c));
        file.points.push_back(std::move(pt));
      } else if (p.key == "analytic_ideal") {
        if (p.value.empty()) throw std::invalid_argument("empty analytic expression");
        file.analytic_ideal_texts.push_back(p.value);
      } else {
        throw std::invalid_argument("unknown key '" + p.key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ParseError(p.line, ex.what());
    }
  }
  return file;
}

SystemFile load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open system file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system_text(buf.str());
}

FoliatedSystem SystemFile::to_system() const {
  if (field_generators.empty())
    throw std::runtime_error("system file declares no field generators");
  if (!has_symbolic_ideal())
    throw std::runtime_error(
        "system file has no symbolic ideal; only numeric operations are available");
  return FoliatedSystem(variables, Distribution(field_generators), Ideal(variables, ideal_gens),
                        divisor);
}

std::vector<AnalyticField> SystemFile::to_fields() const {
  std::vector<AnalyticField> out;
  out.reserve(field_generators.size());
  for (const auto& g : field_generators) out.push_back(AnalyticField::from_polynomials(g));
  return out;
}

std::vector<AnalyticFun> SystemFile::ideal_evaluators(const FunctionRegistry& registry) const {
  std::vector<AnalyticFun> out;
  if (has_analytic_ideal()) {
    for (const auto& text : analytic_ideal_texts)
      out.push_back(parse_analytic(text, variables, registry));
    return out;
  }
  for (const auto& g : ideal_gens) {
    out.push_back(
        {[g](std::span<const double> x) { return g.evaluate_double(x); }, g.to_string()});
  }
  return out;
}

std::vector<AnalyticFun> SystemFile::divisor_evaluators() const {
  std::vector<AnalyticFun> out;
  for (const auto& e : divisor) {
    out.push_back(
        {[e](std::span<const double> x) { return e.evaluate_double(x); }, e.to_string()});
  }
  return out;
}

std::string format_system_file(const SystemFile& file) {
  std::ostringstream os;
  os << "variables: ";
  for (std::size_t i = 0; i < file.variables.size(); ++i)
    os << (i ? ", " : "") << file.variables[i];
  os << "\n";
  for (const auto& g : file.field_generators) {
    os << "field: ";
    for (std::size_t i = 0; i < g.components().size(); ++i)
      os << (i ? ", " : "") << g.component(i).to_string();
    os << "\n";
  }
  if (!file.ideal_gens.empty()) {
    os << "ideal: ";
    for (std::size_t i = 0; i < file.ideal_gens.size(); ++i)
      os << (i ? ", " : "") << file.ideal_gens[i].to_string();
    os << "\n";
  }
  os << "divisor:";
  for (std::size_t i = 0; i < file.divisor.size(); ++i)
    os << (i ? "," : "") << " " << file.divisor[i].to_string();
  os << "\n";
  for (const auto& p : file.points) {
    os << "point: ";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i].str();
    os << "\n";
  }
  for (const auto& t : file.analytic_ideal_texts) os << "analytic_ideal: " << t << "\n";
  return os.str();
}

void save_system_file(const std::string& path, const SystemFile& file) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write system file '" + path + "'");
  out << format_system_file(file);
}

}  // namespace flowbox
