#include "flowbox/ideal.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace flowbox {

namespace {

bool divides(const Exponents& a, const Exponents& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Exponents exps_sub(const Exponents& a, const Exponents& b) {
  Exponents r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Exponents exps_lcm(const Exponents& a, const Exponents& b) {
  Exponents r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

Polynomial mul_monomial(const Polynomial& p, const Exponents& m, const Rational& c) {
  Polynomial r(p.vars());
  for (const auto& [e, k] : p.terms()) {
    Exponents s(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) s[i] = e[i] + m[i];
    r.add_term(s, k * c);
  }
  return r;
}

Polynomial make_monic(const Polynomial& p, const MonomialOrder& order) {
  if (p.is_zero()) return p;
  auto [e, c] = p.leading_term(order);
  return p.scaled(Rational(1) / c);
}

}  // namespace

Polynomial normal_form(const Polynomial& f, const std::vector<Polynomial>& basis,
                       const MonomialOrder& order) {
  Polynomial h = f;
  Polynomial r(f.vars());
  while (!h.is_zero()) {
    auto [lt_h, c_h] = h.leading_term(order);
    bool reduced = false;
    for (const auto& g : basis) {
      if (g.is_zero()) continue;
      auto [lt_g, c_g] = g.leading_term(order);
      if (divides(lt_g, lt_h)) {
        h -= mul_monomial(g, exps_sub(lt_h, lt_g), c_h / c_g);
        reduced = true;
        break;
      }
    }
    if (!reduced) {
      r.add_term(lt_h, c_h);
      h.add_term(lt_h, -c_h);
    }
  }
  return r;
}

Polynomial spolynomial(const Polynomial& f, const Polynomial& g, const MonomialOrder& order) {
  auto [lt_f, c_f] = f.leading_term(order);
  auto [lt_g, c_g] = g.leading_term(order);
  Exponents l = exps_lcm(lt_f, lt_g);
  return mul_monomial(f, exps_sub(l, lt_f), Rational(1) / c_f) -
         mul_monomial(g, exps_sub(l, lt_g), Rational(1) / c_g);
}

std::vector<Polynomial> groebner_basis(const std::vector<Polynomial>& gens,
                                       const MonomialOrder& order, const GroebnerOptions& opts) {
  std::vector<Polynomial> G;
  for (const auto& g : gens)
    if (!g.is_zero()) G.push_back(g);
  if (G.empty()) return G;

  struct PairRec {
    Exponents lcm;
    std::size_t i, j;
  };
  auto cmp = [&order](const PairRec& a, const PairRec& b) {
    if (a.lcm != b.lcm) return order.less(a.lcm, b.lcm);
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  };
  std::set<PairRec, decltype(cmp)> pairs(cmp);

  auto push_pairs_for = [&](std::size_t k) {
    auto [lt_k, ck] = G[k].leading_term(order);
    for (std::size_t i = 0; i < k; ++i) {
      auto [lt_i, ci] = G[i].leading_term(order);
      pairs.insert({exps_lcm(lt_i, lt_k), i, k});
    }
  };
  for (std::size_t k = 1; k < G.size(); ++k) push_pairs_for(k);

  std::size_t processed = 0;
  while (!pairs.empty()) {
    PairRec p = *pairs.begin();
    pairs.erase(pairs.begin());
    if (++processed > opts.spair_budget) {
      std::ostringstream os;
      os << "S-pair budget of " << opts.spair_budget << " exhausted";
      throw SPairBudgetExceeded(os.str());
    }
    auto [lt_i, ci] = G[p.i].leading_term(order);
    auto [lt_j, cj] = G[p.j].leading_term(order);
    // Coprime leading monomials reduce to zero (Buchberger's first criterion).
    bool coprime = true;
    for (std::size_t v = 0; v < lt_i.size(); ++v)
      if (lt_i[v] > 0 && lt_j[v] > 0) coprime = false;
    if (coprime) continue;

    Polynomial h = normal_form(spolynomial(G[p.i], G[p.j], order), G, order);
    if (!h.is_zero()) {
      G.push_back(h);
      push_pairs_for(G.size() - 1);
    }
  }

  // Minimalize: drop elements whose leading term is divisible by another's.
  std::vector<Polynomial> minimal;
  for (std::size_t i = 0; i < G.size(); ++i) {
    auto [lt_i, ci] = G[i].leading_term(order);
    bool redundant = false;
    for (std::size_t j = 0; j < G.size(); ++j) {
      if (i == j) continue;
      auto [lt_j, cj] = G[j].leading_term(order);
      if (divides(lt_j, lt_i) && (lt_j != lt_i || j < i)) {
        redundant = true;
        break;
      }
    }
    if (!redundant) minimal.push_back(G[i]);
  }

  // Full auto-reduction and monic scaling give the unique reduced basis.
  std::vector<Polynomial> reduced = minimal;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < reduced.size(); ++i) {
      std::vector<Polynomial> others;
      for (std::size_t j = 0; j < reduced.size(); ++j)
        if (j != i) others.push_back(reduced[j]);
      Polynomial nf = normal_form(reduced[i], others, order);
      if (nf != reduced[i]) {
        changed = true;
        if (nf.is_zero()) {
          reduced.erase(reduced.begin() + static_cast<long>(i));
          --i;
        } else {
          reduced[i] = nf;
        }
      }
    }
  }
  for (auto& g : reduced) g = make_monic(g, order);
  std::sort(reduced.begin(), reduced.end(), [&order](const Polynomial& a, const Polynomial& b) {
    return order.less(b.leading_term(order).first, a.leading_term(order).first);
  });
  return reduced;
}

Ideal::Ideal(std::vector<std::string> vars, std::vector<Polynomial> gens)
    : vars_(std::move(vars)) {
  for (auto& g : gens) {
    if (g.is_zero()) continue;
    if (g.vars() != vars_)
      throw std::invalid_argument("ideal generator over a different variable list");
    if (std::find(gens_.begin(), gens_.end(), g) == gens_.end()) gens_.push_back(std::move(g));
  }
}

const std::vector<Polynomial>& Ideal::basis(const MonomialOrder& order,
                                            const GroebnerOptions& opts) const {
  const std::string tag = order.tag(vars_.size());
  std::call_once(cache_->once, [&] {
    cache_->tag = tag;
    cache_->basis = groebner_basis(gens_, order, opts);
  });
  if (cache_->tag == tag) return cache_->basis;
  // A different order than the cached one: computed fresh, kept alive.
  std::lock_guard<std::mutex> lock(cache_->scratch_mutex);
  cache_->scratch.push_back(
      std::make_unique<std::vector<Polynomial>>(groebner_basis(gens_, order, opts)));
  return *cache_->scratch.back();
}

Polynomial Ideal::normal_form(const Polynomial& f, const MonomialOrder& order) const {
  if (f.vars() != vars_) throw std::invalid_argument("normal_form: variable lists differ");
  return flowbox::normal_form(f, basis(order), order);
}

bool Ideal::contains(const Polynomial& f) const { return normal_form(f).is_zero(); }

bool Ideal::contains(const Ideal& other) const {
  if (other.vars_ != vars_) throw std::invalid_argument("ideal_contains: variable lists differ");
  for (const auto& g : other.gens_)
    if (!contains(g)) return false;
  return true;
}

bool Ideal::is_whole_ring() const {
  const auto& b = basis();
  return b.size() == 1 && b.front().is_constant() && !b.front().is_zero();
}

Ideal operator+(const Ideal& a, const Ideal& b) {
  if (a.vars_ != b.vars_) throw std::invalid_argument("ideal_sum: variable lists differ");
  std::vector<Polynomial> gens = a.gens_;
  gens.insert(gens.end(), b.gens_.begin(), b.gens_.end());
  return Ideal(a.vars_, std::move(gens));
}

Ideal Ideal::product(const Ideal& a, const Ideal& b) {
  if (a.vars_ != b.vars_) throw std::invalid_argument("ideal product: variable lists differ");
  std::vector<Polynomial> gens;
  for (const auto& f : a.gens_)
    for (const auto& g : b.gens_) gens.push_back(f * g);
  return Ideal(a.vars_, std::move(gens));
}

std::string Ideal::to_string() const {
  std::ostringstream os;
  os << "(";
  if (gens_.empty()) os << "0";
  for (std::size_t i = 0; i < gens_.size(); ++i) os << (i ? ", " : "") << gens_[i].to_string();
  os << ")";
  return os.str();
}

}  // namespace flowbox
