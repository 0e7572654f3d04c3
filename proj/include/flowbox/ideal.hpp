// Polynomial ideals with cached reduced Groebner bases.
//
// Membership is decided, not estimated: all reductions run in exact rational
// arithmetic. A configurable S-pair budget aborts pathological computations
// with SPairBudgetExceeded.
#ifndef FLOWBOX_IDEAL_HPP
#define FLOWBOX_IDEAL_HPP

#include "flowbox/polynomial.hpp"

#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace flowbox {

struct SPairBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GroebnerOptions {
  std::size_t spair_budget = 100000;
};

// Reduced, auto-reduced, monic basis; deterministic for fixed input and order.
std::vector<Polynomial> groebner_basis(const std::vector<Polynomial>& gens,
                                       const MonomialOrder& order,
                                       const GroebnerOptions& opts = {});

Polynomial normal_form(const Polynomial& f, const std::vector<Polynomial>& basis,
                       const MonomialOrder& order);

Polynomial spolynomial(const Polynomial& f, const Polynomial& g, const MonomialOrder& order);

class Ideal {
 public:
  Ideal() = default;
  Ideal(std::vector<std::string> vars, std::vector<Polynomial> gens);

  static Ideal zero(const std::vector<std::string>& vars) { return Ideal(vars, {}); }

  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<Polynomial>& generators() const { return gens_; }
  bool is_zero_ideal() const { return gens_.empty(); }

  // Cached for the first order requested; other orders are computed fresh.
  const std::vector<Polynomial>& basis(const MonomialOrder& order = MonomialOrder::grevlex(),
                                       const GroebnerOptions& opts = {}) const;

  Polynomial normal_form(const Polynomial& f,
                         const MonomialOrder& order = MonomialOrder::grevlex()) const;
  bool contains(const Polynomial& f) const;
  bool contains(const Ideal& other) const;
  bool is_whole_ring() const;

  friend Ideal operator+(const Ideal& a, const Ideal& b);
  static Ideal product(const Ideal& a, const Ideal& b);

  std::string to_string() const;

 private:
  std::vector<std::string> vars_;
  std::vector<Polynomial> gens_;

  struct Cache {
    std::once_flag once;
    std::string tag;
    std::vector<Polynomial> basis;
    // Fresh results for orders other than the cached one.
    std::mutex scratch_mutex;
    std::vector<std::unique_ptr<std::vector<Polynomial>>> scratch;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

}  // namespace flowbox

#endif
