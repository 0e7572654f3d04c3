// The foliated-system data model: ambient variables, distribution, defining
// ideal of the subvariety, and a divisor the distribution is tangent to.
#ifndef FLOWBOX_SYSTEM_HPP
#define FLOWBOX_SYSTEM_HPP

#include "flowbox/ideal.hpp"
#include "flowbox/vector_field.hpp"

#include <string>
#include <vector>

namespace flowbox {

class FoliatedSystem {
 public:
  FoliatedSystem() = default;
  // Validates shape and the divisor tangency requirement: for every generator
  // d of theta and every divisor component e, d(e) must lie in (e).
  FoliatedSystem(std::vector<std::string> vars, Distribution theta, Ideal ideal,
                 std::vector<Polynomial> divisor);

  const std::vector<std::string>& vars() const { return vars_; }
  std::size_t dimension() const { return vars_.size(); }
  const Distribution& theta() const { return theta_; }
  const Ideal& ideal() const { return ideal_; }
  const std::vector<Polynomial>& divisor() const { return divisor_; }

 private:
  std::vector<std::string> vars_;
  Distribution theta_;
  Ideal ideal_;
  std::vector<Polynomial> divisor_;
};

}  // namespace flowbox

#endif
