#include "flowbox/analytic.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace flowbox {

AnalyticField::AnalyticField(std::vector<std::string> vars, std::vector<AnalyticFun> comps,
                             std::optional<Box> domain)
    : vars_(std::move(vars)), comps_(std::move(comps)), domain_(std::move(domain)) {
  if (comps_.size() != vars_.size())
    throw std::invalid_argument("analytic field: one component per variable required");
}

AnalyticField AnalyticField::from_polynomials(const VectorField& vf) {
  std::vector<AnalyticFun> comps;
  comps.reserve(vf.dimension());
  for (const auto& p : vf.components()) {
    comps.push_back({[p](std::span<const double> x) { return p.evaluate_double(x); },
                     p.to_string()});
  }
  return AnalyticField(vf.vars(), std::move(comps));
}

void AnalyticField::eval(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < comps_.size(); ++i) out[i] = comps_[i](x);
}

std::vector<double> AnalyticField::eval(std::span<const double> x) const {
  std::vector<double> out(comps_.size());
  eval(x, out);
  return out;
}

double AnalyticField::norm_at(std::span<const double> x) const {
  double s = 0;
  for (const auto& c : comps_) {
    double v = c(x);
    s += v * v;
  }
  return std::sqrt(s);
}

AnalyticField AnalyticField::reversed() const {
  std::vector<AnalyticFun> comps;
  comps.reserve(comps_.size());
  for (const auto& c : comps_) {
    auto fn = c.fn;
    comps.push_back({[fn](std::span<const double> x) { return -fn(x); }, "-(" + c.form + ")"});
  }
  return AnalyticField(vars_, std::move(comps), domain_);
}

const FunctionRegistry& default_registry() {
  static const FunctionRegistry reg = {
      {"sin", [](double t) { return std::sin(t); }},
      {"cos", [](double t) { return std::cos(t); }},
  };
  return reg;
}

namespace {

// Expression nodes built by the parser; evaluation walks the tree.
struct Node {
  virtual ~Node() = default;
  virtual double eval(std::span<const double> x) const = 0;
};
using NodePtr = std::shared_ptr<const Node>;

struct ConstNode : Node {
  double v;
  explicit ConstNode(double v) : v(v) {}
  double eval(std::span<const double>) const override { return v; }
};
struct VarNode : Node {
  std::size_t idx;
  explicit VarNode(std::size_t i) : idx(i) {}
  double eval(std::span<const double> x) const override { return x[idx]; }
};
struct BinNode : Node {
  char op;
  NodePtr a, b;
  BinNode(char op, NodePtr a, NodePtr b) : op(op), a(std::move(a)), b(std::move(b)) {}
  double eval(std::span<const double> x) const override {
    const double u = a->eval(x), v = b->eval(x);
    switch (op) {
      case '+': return u + v;
      case '-': return u - v;
      case '*': return u * v;
      default: return u / v;
    }
  }
};
struct PowNode : Node {
  NodePtr a;
  int n;
  PowNode(NodePtr a, int n) : a(std::move(a)), n(n) {}
  double eval(std::span<const double> x) const override { return std::pow(a->eval(x), n); }
};
struct NegNode : Node {
  NodePtr a;
  explicit NegNode(NodePtr a) : a(std::move(a)) {}
  double eval(std::span<const double> x) const override { return -a->eval(x); }
};
struct CallNode : Node {
  std::function<double(double)> f;
  NodePtr a;
  CallNode(std::function<double(double)> f, NodePtr a) : f(std::move(f)), a(std::move(a)) {}
  double eval(std::span<const double> x) const override { return f(a->eval(x)); }
};

class ExprParser {
 public:
  ExprParser(const std::string& text, const std::vector<std::string>& vars,
             const FunctionRegistry& registry)
      : text_(text), vars_(vars), registry_(registry) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "analytic expression error at column " << (pos_ + 1) << ": " << msg;
    throw std::invalid_argument(os.str());
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr a = term();
    while (true) {
      if (eat('+')) {
        a = std::make_shared<BinNode>('+', a, term());
      } else if (eat('-')) {
        a = std::make_shared<BinNode>('-', a, term());
      } else {
        return a;
      }
    }
  }

  NodePtr term() {
    NodePtr a = factor();
    while (true) {
      if (eat('*')) {
        a = std::make_shared<BinNode>('*', a, factor());
      } else if (eat('/')) {
        a = std::make_shared<BinNode>('/', a, factor());
      } else {
        return a;
      }
    }
  }

  NodePtr factor() {
    if (eat('-')) return std::make_shared<NegNode>(factor());
    if (eat('+')) return factor();
    NodePtr a = atom();
    if (eat('^')) {
      skip_ws();
      bool neg = eat('-');
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        fail("integer exponent expected");
      int n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        n = n * 10 + (text_[pos_++] - '0');
      a = std::make_shared<PowNode>(a, neg ? -n : n);
    }
    return a;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) fail("')' expected");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      long v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        v = v * 10 + (text_[pos_++] - '0');
      if (pos_ < text_.size() && text_[pos_] == '.')
        fail("floating-point literals are not accepted; use p/q rationals");
      return std::make_shared<ConstNode>(static_cast<double>(v));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_'))
        name += text_[pos_++];
      if (peek() == '(') {
        auto it = registry_.find(name);
        if (it == registry_.end()) fail("unknown function '" + name + "'");
        eat('(');
        NodePtr arg = expr();
        if (!eat(')')) fail("')' expected after function argument");
        return std::make_shared<CallNode>(it->second, arg);
      }
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) return std::make_shared<VarNode>(i);
      fail("unknown variable '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& text_;
  const std::vector<std::string>& vars_;
  const FunctionRegistry& registry_;
  std::size_t pos_ = 0;
};

}  // namespace

AnalyticFun parse_analytic(const std::string& text, const std::vector<std::string>& vars,
                           const FunctionRegistry& registry) {
  ExprParser parser(text, vars, registry);
  NodePtr root = parser.parse();
  return {[root](std::span<const double> x) { return root->eval(x); }, text};
}

}  // namespace flowbox
