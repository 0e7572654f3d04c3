// Reader/writer for the structured-text system files consumed by the CLI.
#ifndef FLOWBOX_SYSFILE_HPP
#define FLOWBOX_SYSFILE_HPP

#include "flowbox/analytic.hpp"
#include "flowbox/system.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace flowbox {

struct ParseError : std::runtime_error {
  std::size_t line;
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
};

// File grammar (UTF-8, line oriented, '#' starts a comment):
//   variables: x, y
//   field: -y, x              # one generator per line, components in order
//   ideal: y                  # symbolic generators (polynomial grammar)
//   divisor:                  # may be empty or omitted
//   point: 1, 0               # rational coordinates, repeatable
//   analytic_ideal: z - (...) # analytic evaluators; sin, cos, h allowed here
struct SystemFile {
  std::vector<std::string> variables;
  std::vector<VectorField> field_generators;
  std::vector<Polynomial> ideal_gens;
  std::vector<Polynomial> divisor;
  std::vector<std::vector<Rational>> points;
  std::vector<std::string> analytic_ideal_texts;

  bool has_symbolic_ideal() const { return !ideal_gens.empty(); }
  bool has_analytic_ideal() const { return !analytic_ideal_texts.empty(); }

  // Validated foliated system (requires a symbolic ideal; divisor tangency is
  // enforced by the FoliatedSystem constructor).
  FoliatedSystem to_system() const;

  // Numeric generator fields.
  std::vector<AnalyticField> to_fields() const;

  // Evaluators of the subvariety: analytic section when present, otherwise
  // the symbolic generators.
  std::vector<AnalyticFun> ideal_evaluators(const FunctionRegistry& registry) const;
  std::vector<AnalyticFun> divisor_evaluators() const;
};

SystemFile load_system_file(const std::string& path);
SystemFile parse_system_text(const std::string& text);
void save_system_file(const std::string& path, const SystemFile& file);
std::string format_system_file(const SystemFile& file);

}  // namespace flowbox

#endif
