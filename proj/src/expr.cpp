#include "hjs/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "hjs/types.hpp"

namespace hjs {

struct Expression::Node {
  enum class Kind { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Abs, Min, Max };
  Kind kind = Kind::Constant;
  double value = 0.0;
  int index = -1;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars) : text_(text), vars_(vars) {}

  NodePtr parse(std::vector<bool>& used) {
    used_ = &used;
    NodePtr n = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("expression \"" + text_ + "\": " + msg + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expression() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) {
        n = make(Node::Kind::Add, n, term());
      } else if (accept('-')) {
        n = make(Node::Kind::Sub, n, term());
      } else {
        return n;
      }
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) {
        n = make(Node::Kind::Mul, n, unary());
      } else if (accept('/')) {
        n = make(Node::Kind::Div, n, unary());
      } else {
        return n;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end");
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr n = expression();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Constant;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name = text_.substr(start, pos_ - start);
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '(') return call(name);
      return variable(name);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr call(const std::string& name) {
    expect('(');
    NodePtr a = expression();
    if (name == "min" || name == "max") {
      expect(',');
      NodePtr b = expression();
      expect(')');
      return make(name == "min" ? Node::Kind::Min : Node::Kind::Max, a, b);
    }
    expect(')');
    if (name == "sin") return make(Node::Kind::Sin, a);
    if (name == "cos") return make(Node::Kind::Cos, a);
    if (name == "exp") return make(Node::Kind::Exp, a);
    if (name == "abs") return make(Node::Kind::Abs, a);
    fail("unknown function '" + name + "'");
  }

  int find(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  NodePtr variable(const std::string& name) {
    if (name == "pi") {
      auto n = std::make_shared<Node>();
      n->value = M_PI;
      return n;
    }
    int idx = find(name);
    if (idx < 0 && find(name + "1") >= 0 && find(name + "2") < 0) idx = find(name + "1");
    if (idx < 0) fail("unknown variable '" + name + "'");
    (*used_)[static_cast<std::size_t>(idx)] = true;
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Variable;
    n->index = idx;
    return n;
  }

  const std::string& text_;
  const std::vector<std::string>& vars_;
  std::vector<bool>* used_ = nullptr;
  std::size_t pos_ = 0;
};

double eval_node(const Node& n, std::span<const double> args) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::Constant: return n.value;
    case K::Variable: return args[static_cast<std::size_t>(n.index)];
    case K::Neg: return -eval_node(*n.lhs, args);
    case K::Add: return eval_node(*n.lhs, args) + eval_node(*n.rhs, args);
    case K::Sub: return eval_node(*n.lhs, args) - eval_node(*n.rhs, args);
    case K::Mul: return eval_node(*n.lhs, args) * eval_node(*n.rhs, args);
    case K::Div: return eval_node(*n.lhs, args) / eval_node(*n.rhs, args);
    case K::Pow: return std::pow(eval_node(*n.lhs, args), eval_node(*n.rhs, args));
    case K::Sin: return std::sin(eval_node(*n.lhs, args));
    case K::Cos: return std::cos(eval_node(*n.lhs, args));
    case K::Exp: return std::exp(eval_node(*n.lhs, args));
    case K::Abs: return std::abs(eval_node(*n.lhs, args));
    case K::Min: return std::min(eval_node(*n.lhs, args), eval_node(*n.rhs, args));
    case K::Max: return std::max(eval_node(*n.lhs, args), eval_node(*n.rhs, args));
  }
  return 0.0;
}

constexpr int kN = Jet::kMaxVars;

// f(a) given f(a.val), f'(a.val), f''(a.val).
Jet chain(const Jet& a, double f, double d1, double d2) {
  Jet r;
  r.val = f;
  for (int i = 0; i < kN; ++i) r.grad[i] = d1 * a.grad[i];
  for (int i = 0; i < kN; ++i) {
    for (int k = 0; k < kN; ++k) {
      r.hess[i * kN + k] = d2 * a.grad[i] * a.grad[k] + d1 * a.hess[i * kN + k];
    }
  }
  return r;
}

Jet add(const Jet& a, const Jet& b, double sb) {
  Jet r;
  r.val = a.val + sb * b.val;
  for (int i = 0; i < kN; ++i) r.grad[i] = a.grad[i] + sb * b.grad[i];
  for (int i = 0; i < kN * kN; ++i) r.hess[i] = a.hess[i] + sb * b.hess[i];
  return r;
}

Jet mul(const Jet& a, const Jet& b) {
  Jet r;
  r.val = a.val * b.val;
  for (int i = 0; i < kN; ++i) r.grad[i] = a.grad[i] * b.val + a.val * b.grad[i];
  for (int i = 0; i < kN; ++i) {
    for (int k = 0; k < kN; ++k) {
      r.hess[i * kN + k] = a.hess[i * kN + k] * b.val + b.hess[i * kN + k] * a.val +
                           a.grad[i] * b.grad[k] + a.grad[k] * b.grad[i];
    }
  }
  return r;
}

bool is_constant(const Jet& a) {
  for (double g : a.grad) {
    if (g != 0.0) return false;
  }
  for (double h : a.hess) {
    if (h != 0.0) return false;
  }
  return true;
}

Jet eval_jet_node(const Node& n, std::span<const double> args) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::Constant: return Jet::constant(n.value);
    case K::Variable: return Jet::variable(args[static_cast<std::size_t>(n.index)], n.index);
    case K::Neg: {
      const Jet a = eval_jet_node(*n.lhs, args);
      return chain(a, -a.val, -1.0, 0.0);
    }
    case K::Add: return add(eval_jet_node(*n.lhs, args), eval_jet_node(*n.rhs, args), 1.0);
    case K::Sub: return add(eval_jet_node(*n.lhs, args), eval_jet_node(*n.rhs, args), -1.0);
    case K::Mul: return mul(eval_jet_node(*n.lhs, args), eval_jet_node(*n.rhs, args));
    case K::Div: {
      const Jet b = eval_jet_node(*n.rhs, args);
      const double bv = b.val;
      return mul(eval_jet_node(*n.lhs, args), chain(b, 1.0 / bv, -1.0 / (bv * bv), 2.0 / (bv * bv * bv)));
    }
    case K::Pow: {
      const Jet a = eval_jet_node(*n.lhs, args);
      const Jet b = eval_jet_node(*n.rhs, args);
      if (is_constant(b)) {
        const double p = b.val;
        const double av = a.val;
        const double f = std::pow(av, p);
        const double d1 = p == 0.0 ? 0.0 : p * std::pow(av, p - 1.0);
        const double d2 = (p == 0.0 || p == 1.0) ? 0.0 : p * (p - 1.0) * std::pow(av, p - 2.0);
        return chain(a, f, d1, d2);
      }
      // a^b = exp(b log a)
      const Jet loga = chain(a, std::log(a.val), 1.0 / a.val, -1.0 / (a.val * a.val));
      const Jet e = mul(b, loga);
      const double ev = std::exp(e.val);
      return chain(e, ev, ev, ev);
    }
    case K::Sin: {
      const Jet a = eval_jet_node(*n.lhs, args);
      return chain(a, std::sin(a.val), std::cos(a.val), -std::sin(a.val));
    }
    case K::Cos: {
      const Jet a = eval_jet_node(*n.lhs, args);
      return chain(a, std::cos(a.val), -std::sin(a.val), -std::cos(a.val));
    }
    case K::Exp: {
      const Jet a = eval_jet_node(*n.lhs, args);
      const double e = std::exp(a.val);
      return chain(a, e, e, e);
    }
    case K::Abs: {
      const Jet a = eval_jet_node(*n.lhs, args);
      const double s = a.val < 0.0 ? -1.0 : 1.0;
      return chain(a, std::abs(a.val), s, 0.0);
    }
    case K::Min: {
      Jet a = eval_jet_node(*n.lhs, args);
      Jet b = eval_jet_node(*n.rhs, args);
      return a.val <= b.val ? a : b;
    }
    case K::Max: {
      Jet a = eval_jet_node(*n.lhs, args);
      Jet b = eval_jet_node(*n.rhs, args);
      return a.val >= b.val ? a : b;
    }
  }
  return {};
}

}  // namespace

Expression Expression::parse(const std::string& text, const std::vector<std::string>& variables) {
  Expression e;
  e.text_ = text;
  e.used_.assign(variables.size(), false);
  Parser p(text, variables);
  e.root_ = p.parse(e.used_);
  return e;
}

double Expression::eval(std::span<const double> args) const {
  if (!root_) throw ValidationError("evaluating an empty expression");
  return eval_node(*root_, args);
}

Jet Expression::eval_jet(std::span<const double> args) const {
  if (!root_) throw ValidationError("evaluating an empty expression");
  if (args.size() > static_cast<std::size_t>(Jet::kMaxVars)) {
    throw ValidationError("expression jets support at most 6 variables");
  }
  return eval_jet_node(*root_, args);
}

bool Expression::uses(int index) const {
  return index >= 0 && static_cast<std::size_t>(index) < used_.size() && used_[static_cast<std::size_t>(index)];
}

std::vector<std::string> state_variable_names(int dim) {
  std::vector<std::string> names;
  for (int i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
  for (int i = 1; i <= dim; ++i) names.push_back("v" + std::to_string(i));
  return names;
}

std::vector<std::string> position_variable_names(int dim) {
  std::vector<std::string> names;
  for (int i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

}  // namespace hjs
