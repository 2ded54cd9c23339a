#pragma once

// Closed-form scalar fields over chart coordinates x1..xn.
//
// Grammar (lowest to highest precedence):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' int | '^' '(' int ')')?
//   atom    := number | 'pi' | 'x'<k> | func '(' sum ')' | '(' sum ')'
//   func    := sqrt | exp | log | sin | cos

#include <memory>
#include <string>
#include <vector>

#include "bimetric/jet.hpp"

namespace bimetric {

enum class Op { Num, Var, Add, Sub, Mul, Div, Neg, Pow, Sqrt, Exp, Log, Sin, Cos };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  Op op = Op::Num;
  double num = 0;  // Num literal
  int var = 0;     // Var index, 0-based
  int power = 0;   // Pow exponent
  Expr lhs, rhs;
};

// Builders. neg folds into literals so that printing round-trips.
Expr num(double v);
Expr var(int k);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr neg(Expr a);
Expr ipow(Expr a, int n);
Expr apply(Op f, Expr a);
// a^p for real p as exp(p·log a); a must stay positive where evaluated.
Expr rpow(Expr a, double p);

bool is_zero_literal(const Expr& e);
bool equal(const Expr& a, const Expr& b);
// Highest coordinate index used, 0-based; -1 for constants.
int max_var(const Expr& e);

std::string print(const Expr& e);
// Throws ConfigError with line:column on malformed text.
Expr parse(const std::string& text);

double eval(const Expr& e, const double* x);
// Quad precision evaluation for finite-difference oracles.
__float128 eval(const Expr& e, const __float128* x);
// Jet of e at x: every partial up to degree.
Jet jet_eval(const Expr& e, const double* x, int dim, int degree);

}  // namespace bimetric
