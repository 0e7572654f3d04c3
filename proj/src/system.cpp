#include "flowbox/system.hpp"

#include <sstream>
#include <stdexcept>

namespace flowbox {

FoliatedSystem::FoliatedSystem(std::vector<std::string> vars, Distribution theta, Ideal ideal,
                               std::vector<Polynomial> divisor)
    : vars_(std::move(vars)),
      theta_(std::move(theta)),
      ideal_(std::move(ideal)),
      divisor_(std::move(divisor)) {
  if (theta_.vars() != vars_)
    throw std::invalid_argument("foliated system: distribution variable list mismatch");
  if (ideal_.vars() != vars_)
    throw std::invalid_argument("foliated system: ideal variable list mismatch");
  for (const auto& e : divisor_) {
    if (e.vars() != vars_)
      throw std::invalid_argument("foliated system: divisor component variable list mismatch");
    if (e.is_zero())
      throw std::invalid_argument("foliated system: divisor component must be nonzero");
  }
  // Mandatory at load: theta tangent to every divisor component.
  for (std::size_t gi = 0; gi < theta_.generators.size(); ++gi) {
    for (const auto& e : divisor_) {
      Ideal comp(vars_, {e});
      Polynomial de = theta_.generators[gi].apply(e);
      if (!comp.contains(de)) {
        std::ostringstream os;
        os << "distribution generator " << gi << " (" << theta_.generators[gi].to_string()
           << ") is not tangent to divisor component " << e.to_string() << ": derivative "
           << de.to_string() << " is not in (" << e.to_string() << ")";
        throw std::invalid_argument(os.str());
      }
    }
  }
}

}  // namespace flowbox
