#pragma once

// A small exact symbolic expression system for ODE right-hand sides.
//
// Expressions are immutable, hash-consed DAG nodes: two structurally equal
// expressions share one node, so equality and hashing are O(1). Construction
// applies a fixed set of local simplifications (flattening, constant folding,
// removal of zeros and ones, collecting identical factors into powers and
// identical terms into multiples). There is no polynomial expansion unless
// requested explicitly through `expand`.
//
// Division is represented as a power with exponent -1.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bsharp/coefficient.hpp"

namespace bsharp {

enum class ExprKind : std::uint8_t { constant, variable, sum, product, power };

class Expr;

struct ExprNode {
  ExprKind kind;
  std::uint64_t hash;
  BigRational value;   // constant
  std::size_t var = 0; // variable index
  long exponent = 0;   // power; never 0 or 1
  std::vector<Expr> args;
};

class Expr {
 public:
  /// The constant 0.
  Expr();
  Expr(long v);         // NOLINT(google-explicit-constructor)
  Expr(BigRational v);  // NOLINT(google-explicit-constructor)

  static Expr constant(BigRational v);
  static Expr variable(std::size_t index);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(const Expr& base, long exponent);

  ExprKind kind() const noexcept { return node_->kind; }
  const BigRational& value() const noexcept { return node_->value; }
  std::size_t var() const noexcept { return node_->var; }
  long exponent() const noexcept { return node_->exponent; }
  const std::vector<Expr>& args() const noexcept { return node_->args; }
  std::uint64_t hash() const noexcept { return node_->hash; }
  const ExprNode* node() const noexcept { return node_.get(); }

  bool is_constant() const noexcept { return kind() == ExprKind::constant; }
  bool is_zero() const noexcept { return is_constant() && value() == 0; }
  bool is_one() const noexcept { return is_constant() && value() == 1; }

  friend bool operator==(const Expr& a, const Expr& b) noexcept {
    return a.node_ == b.node_;
  }

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  static Expr intern(ExprNode node);

  std::shared_ptr<const ExprNode> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, long exponent);

/// Deterministic total order used for canonical child ordering.
bool expr_less(const Expr& a, const Expr& b);

/// Exact partial derivative with respect to variable `var`.
Expr differentiate(const Expr& e, std::size_t var);

/// Number of distinct DAG nodes reachable from `e`.
std::size_t expr_dag_size(const Expr& e);

/// Exact evaluation; throws ArithmeticError on a zero denominator.
BigRational eval_expression(const Expr& e, std::span<const BigRational> point);
/// IEEE double evaluation; division by zero produces inf/nan.
double eval_expression(const Expr& e, std::span<const double> point);

enum class ExprFormat { text, latex };

std::string to_string(const Expr& e, const std::vector<std::string>& names,
                      ExprFormat format = ExprFormat::text);

/// Converts to a rational function in the named variables (full expansion).
Coefficient to_rational_function(const Expr& e, const std::vector<std::string>& names);
/// Inverse of to_rational_function for symbols contained in `names`.
Expr from_rational_function(const Coefficient& c, const std::vector<std::string>& names);
/// Normal form N / (P_1^k_1 ... P_m^k_m): N expanded, the denominator kept as
/// powers of monic polynomials, each P_i cancelled from N while it divides.
/// Polynomial input gives the fully expanded polynomial.
Expr expand(const Expr& e, const std::vector<std::string>& names);

/// Linearized evaluation program for fast repeated double evaluation of a
/// set of expressions sharing subexpressions.
class CompiledExprs {
 public:
  explicit CompiledExprs(const std::vector<Expr>& outputs);

  std::size_t size() const noexcept { return outputs_.size(); }
  std::size_t instruction_count() const noexcept { return code_.size(); }
  void evaluate(std::span<const double> point, std::span<double> out) const;

 private:
  struct Instr {
    ExprKind kind;
    double value;
    std::size_t var;
    long exponent;
    std::size_t first_arg;
    std::size_t arg_count;
  };

  std::vector<Instr> code_;
  std::vector<std::size_t> arg_pool_;
  std::vector<std::size_t> outputs_;
  mutable std::vector<double> scratch_;
};

}  // namespace bsharp
