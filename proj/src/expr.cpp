#include "bimetric/expr.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <quadmath.h>
#include <sstream>
#include <type_traits>

namespace bimetric {

namespace {

Expr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

Expr binary(Op op, Expr a, Expr b) {
  ExprNode n;
  n.op = op;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}

int precedence(const Expr& e) {
  switch (e->op) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Num:
      return e->num < 0 || std::signbit(e->num) ? 3 : 5;
    case Op::Pow:
      return 4;
    default:
      return 5;
  }
}

const char* func_name(Op op) {
  switch (op) {
    case Op::Sqrt: return "sqrt";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    default: return "?";
  }
}

std::string format_number(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void print_into(const Expr& e, std::string& out);

void print_child(const Expr& c, bool parens, std::string& out) {
  if (parens) out += '(';
  print_into(c, out);
  if (parens) out += ')';
}

void print_into(const Expr& e, std::string& out) {
  switch (e->op) {
    case Op::Num:
      out += format_number(e->num);
      return;
    case Op::Var:
      out += 'x';
      out += std::to_string(e->var + 1);
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const int p = precedence(e);
      print_child(e->lhs, precedence(e->lhs) < p, out);
      out += e->op == Op::Add ? "+" : e->op == Op::Sub ? "-" : e->op == Op::Mul ? "*" : "/";
      print_child(e->rhs, precedence(e->rhs) <= p, out);
      return;
    }
    case Op::Neg:
      out += '-';
      print_child(e->lhs, precedence(e->lhs) < 3, out);
      return;
    case Op::Pow:
      print_child(e->lhs, precedence(e->lhs) <= 4, out);
      out += '^';
      if (e->power < 0) out += "(" + std::to_string(e->power) + ")";
      else out += std::to_string(e->power);
      return;
    default:
      out += func_name(e->op);
      out += '(';
      print_into(e->lhs, out);
      out += ')';
      return;
  }
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Expr run() {
    Expr e = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    int line = 1, col = 1;
    for (size_t i = 0; i < pos_ && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "expression parse error at " << line << ":" << col << ": " << what;
    throw ConfigError(os.str());
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  Expr sum() {
    Expr e = product();
    for (;;) {
      if (eat('+')) e = add(e, product());
      else if (eat('-')) e = sub(e, product());
      else return e;
    }
  }
  Expr product() {
    Expr e = unary();
    for (;;) {
      if (eat('*')) e = mul(e, unary());
      else if (eat('/')) e = div(e, unary());
      else return e;
    }
  }
  Expr unary() {
    if (eat('-')) return neg(unary());
    return power();
  }
  Expr power() {
    Expr base = atom();
    if (!eat('^')) return base;
    const bool paren = eat('(');
    skip();
    bool minus = false;
    if (pos_ < s_.size() && s_[pos_] == '-') {
      minus = true;
      ++pos_;
    }
    const size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be an integer literal");
    if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
      fail("exponent must be an integer literal");
    int n = 0;
    std::from_chars(s_.data() + start, s_.data() + pos_, n);
    if (paren) expect(')');
    return ipow(base, minus ? -n : n);
  }
  Expr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "pi") return num(std::numbers::pi);
      if (id[0] == 'x' && id.size() > 1 && id.find_first_not_of("0123456789", 1) == std::string::npos) {
        const int k = std::stoi(id.substr(1));
        if (k < 1) {
          pos_ = start;
          fail("bad coordinate index in '" + id + "'");
        }
        return var(k - 1);
      }
      static const std::pair<const char*, Op> funcs[] = {
          {"sqrt", Op::Sqrt}, {"exp", Op::Exp}, {"log", Op::Log}, {"sin", Op::Sin}, {"cos", Op::Cos}};
      for (const auto& [name, op] : funcs) {
        if (id == name) {
          expect('(');
          Expr a = sum();
          expect(')');
          return apply(op, a);
        }
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
  Expr number() {
    const size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      size_t q = pos_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        pos_ = q;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0;
    auto r = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (r.ec != std::errc() || r.ptr != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return num(v);
  }

  const std::string& s_;
  size_t pos_ = 0;
};

template <class T>
[[noreturn]] void domain_fail(const Expr& e, const std::string& what) {
  throw DomainError(what + " in '" + print(e) + "'");
}

template <class T>
T eval_node(const Expr& e, const T* x);

#define BIMETRIC_MATH(name, qname)                        \
  double m_##name(double a) { return std::name(a); }      \
  __float128 m_##name(__float128 a) { return qname(a); } \
  Jet m_##name(const Jet& a) { return name(a); }
BIMETRIC_MATH(sqrt, sqrtq)
BIMETRIC_MATH(exp, expq)
BIMETRIC_MATH(log, logq)
BIMETRIC_MATH(sin, sinq)
BIMETRIC_MATH(cos, cosq)
#undef BIMETRIC_MATH

template <class T>
T eval_func(const Expr& e, const T& a) {
  const double v = value_of(a);
  switch (e->op) {
    case Op::Sqrt:
      if (!(v > 0) && !(v == 0 && !std::is_same_v<T, Jet>)) domain_fail<T>(e, "sqrt of non-positive value");
      return m_sqrt(a);
    case Op::Exp:
      return m_exp(a);
    case Op::Log:
      if (!(v > 0)) domain_fail<T>(e, "log of non-positive value");
      return m_log(a);
    case Op::Sin:
      return m_sin(a);
    case Op::Cos:
      return m_cos(a);
    default:
      throw std::logic_error("eval: not a function node");
  }
}

double ipow_value(double a, int n) { return std::pow(a, n); }
__float128 ipow_value(__float128 a, int n) {
  __float128 r = 1;
  for (int i = 0; i < std::abs(n); ++i) r *= a;
  return n < 0 ? 1 / r : r;
}
Jet ipow_value(const Jet& a, int n) { return ipow(a, n); }

template <class T>
T eval_node(const Expr& e, const T* x) {
  switch (e->op) {
    case Op::Num:
      return T(e->num);
    case Op::Var:
      return x[e->var];
    case Op::Add:
      return eval_node(e->lhs, x) + eval_node(e->rhs, x);
    case Op::Sub:
      return eval_node(e->lhs, x) - eval_node(e->rhs, x);
    case Op::Mul:
      return eval_node(e->lhs, x) * eval_node(e->rhs, x);
    case Op::Div: {
      T d = eval_node(e->rhs, x);
      if (!(std::abs(value_of(d)) > kJetSingularFloor)) domain_fail<T>(e, "division by zero");
      return eval_node(e->lhs, x) / d;
    }
    case Op::Neg:
      return -eval_node(e->lhs, x);
    case Op::Pow: {
      T b = eval_node(e->lhs, x);
      if (e->power < 0 && !(std::abs(value_of(b)) > kJetSingularFloor))
        domain_fail<T>(e, "negative power of zero");
      return ipow_value(b, e->power);
    }
    default:
      return eval_func(e, eval_node(e->lhs, x));
  }
}

}  // namespace

Expr num(double v) {
  ExprNode n;
  n.op = Op::Num;
  n.num = v;
  return make(std::move(n));
}
Expr var(int k) {
  if (k < 0) throw ConfigError("bad coordinate index");
  ExprNode n;
  n.op = Op::Var;
  n.var = k;
  return make(std::move(n));
}
Expr add(Expr a, Expr b) { return binary(Op::Add, std::move(a), std::move(b)); }
Expr sub(Expr a, Expr b) { return binary(Op::Sub, std::move(a), std::move(b)); }
Expr mul(Expr a, Expr b) { return binary(Op::Mul, std::move(a), std::move(b)); }
Expr div(Expr a, Expr b) { return binary(Op::Div, std::move(a), std::move(b)); }
Expr neg(Expr a) {
  if (a->op == Op::Num && !std::signbit(a->num)) return num(-a->num);
  ExprNode n;
  n.op = Op::Neg;
  n.lhs = std::move(a);
  return make(std::move(n));
}
Expr ipow(Expr a, int p) {
  ExprNode n;
  n.op = Op::Pow;
  n.lhs = std::move(a);
  n.power = p;
  return make(std::move(n));
}
Expr apply(Op f, Expr a) {
  ExprNode n;
  n.op = f;
  n.lhs = std::move(a);
  return make(std::move(n));
}
Expr rpow(Expr a, double p) { return apply(Op::Exp, mul(num(p), apply(Op::Log, std::move(a)))); }

bool is_zero_literal(const Expr& e) { return e->op == Op::Num && e->num == 0.0; }

bool equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (!a || !b || a->op != b->op) return false;
  switch (a->op) {
    case Op::Num:
      return std::bit_cast<std::uint64_t>(a->num) == std::bit_cast<std::uint64_t>(b->num);
    case Op::Var:
      return a->var == b->var;
    case Op::Pow:
      return a->power == b->power && equal(a->lhs, b->lhs);
    default:
      return equal(a->lhs, b->lhs) && (a->rhs == nullptr ? b->rhs == nullptr : equal(a->rhs, b->rhs));
  }
}

int max_var(const Expr& e) {
  if (!e) return -1;
  if (e->op == Op::Var) return e->var;
  return std::max(max_var(e->lhs), max_var(e->rhs));
}

std::string print(const Expr& e) {
  std::string out;
  print_into(e, out);
  return out;
}

Expr parse(const std::string& text) { return Parser(text).run(); }

double eval(const Expr& e, const double* x) { return eval_node<double>(e, x); }
__float128 eval(const Expr& e, const __float128* x) { return eval_node<__float128>(e, x); }

Jet jet_eval(const Expr& e, const double* x, int dim, int degree) {
  if (degree < 0) throw ConfigError("jet_eval: degree must be non-negative");
  if (max_var(e) >= dim) throw ConfigError("jet_eval: coordinate index beyond chart dimension");
  std::vector<Jet> vars;
  vars.reserve(dim);
  for (int k = 0; k < dim; ++k) vars.push_back(Jet::variable(dim, degree, k, x[k]));
  Jet r = eval_node<Jet>(e, vars.data());
  if (r.is_plain()) r = Jet::constant(dim, degree, r.value());
  if (!r.all_finite()) throw DomainError("non-finite jet in '" + print(e) + "'");
  return r;
}

}  // namespace bimetric
