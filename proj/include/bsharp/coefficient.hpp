#pragma once

// Exact scalars for B-series coefficients.
//
// A Coefficient is either a rational number (fast path) or a quotient of two
// multivariate polynomials with rational coefficients in named symbols.
// Quotients are not reduced by polynomial GCD: only common monomial factors
// and rational content are removed, so equality is decided by
// cross-multiplication.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace bsharp {

using BigInt = mpz_class;
using BigRational = mpq_class;

/// Parses "p", "-p", "p/q" or a decimal like "0.25" into an exact rational.
BigRational parse_rational(std::string_view text);
std::string to_string(const BigRational& q);

/// Product of symbol powers, kept sorted by symbol name; exponents > 0.
class Monomial {
 public:
  using Factor = std::pair<std::string, unsigned>;

  Monomial() = default;
  explicit Monomial(std::string symbol, unsigned exponent = 1);

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  unsigned degree() const noexcept;
  bool is_one() const noexcept { return factors_.empty(); }
  unsigned exponent_of(std::string_view symbol) const noexcept;

  bool divides(const Monomial& other) const noexcept;
  Monomial operator*(const Monomial& other) const;
  /// Requires `other` to divide this monomial.
  Monomial divided_by(const Monomial& other) const;
  static Monomial gcd(const Monomial& a, const Monomial& b);

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<Factor> factors_;
};

/// Graded lexicographic order; the "greater" monomial prints first.
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class Polynomial {
 public:
  using Terms = std::map<Monomial, BigRational, MonomialOrder>;

  Polynomial() = default;
  explicit Polynomial(BigRational constant);
  static Polynomial symbol(const std::string& name);

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept;
  BigRational constant_value() const;  // 0 when no constant term
  const std::pair<const Monomial, BigRational>& leading() const;
  std::vector<std::string> symbols() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial scaled(const BigRational& s) const;
  Polynomial times(const Monomial& m) const;
  Polynomial divided_by(const Monomial& m) const;
  Monomial monomial_content() const;
  /// q with q * d == *this, if d divides this polynomial exactly.
  std::optional<Polynomial> exact_quotient(const Polynomial& d) const;

  BigRational evaluate(const std::map<std::string, BigRational>& at) const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void add_term(const Monomial& m, const BigRational& c);

  Terms terms_;
};

enum class CoeffFormat { text, latex };

class Coefficient {
 public:
  Coefficient() : value_(0) {}
  Coefficient(long v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  Coefficient(BigRational v) : value_(std::move(v)) {  // NOLINT
    value_.canonicalize();
  }
  Coefficient(long num, long den);
  static Coefficient symbol(const std::string& name);
  static Coefficient from_polynomials(Polynomial num, Polynomial den);

  bool is_rational() const noexcept { return func_ == nullptr; }
  bool is_zero() const noexcept { return is_rational() && value_ == 0; }
  bool is_one() const noexcept { return is_rational() && value_ == 1; }

  /// Rational value; throws if the coefficient is symbolic.
  const BigRational& rational() const;
  Polynomial numerator() const;
  const Polynomial& denominator() const;
  std::vector<std::string> symbols() const;

  Coefficient operator+(const Coefficient& o) const;
  Coefficient operator-(const Coefficient& o) const;
  Coefficient operator*(const Coefficient& o) const;
  Coefficient operator/(const Coefficient& o) const;
  Coefficient operator-() const;
  Coefficient& operator+=(const Coefficient& o) { return *this = *this + o; }
  Coefficient& operator-=(const Coefficient& o) { return *this = *this - o; }
  Coefficient& operator*=(const Coefficient& o) { return *this = *this * o; }
  Coefficient& operator/=(const Coefficient& o) { return *this = *this / o; }
  friend Coefficient operator+(long a, const Coefficient& b) { return Coefficient(a) + b; }
  friend Coefficient operator-(long a, const Coefficient& b) { return Coefficient(a) - b; }
  friend Coefficient operator*(long a, const Coefficient& b) { return Coefficient(a) * b; }
  friend Coefficient operator/(long a, const Coefficient& b) { return Coefficient(a) / b; }
  Coefficient pow(long exponent) const;

  /// Identically equal as rational functions.
  friend bool operator==(const Coefficient& a, const Coefficient& b);

  BigRational evaluate(const std::map<std::string, BigRational>& at) const;
  /// Binds the given symbols; unbound symbols stay symbolic.
  Coefficient substitute(const std::map<std::string, BigRational>& at) const;

  std::string to_string(CoeffFormat format = CoeffFormat::text) const;
  static Coefficient parse(std::string_view text);

 private:
  struct Fraction {
    Polynomial num;
    Polynomial den;
  };

  BigRational value_;
  std::shared_ptr<const Fraction> func_;
};

inline Coefficient coeff_add(const Coefficient& a, const Coefficient& b) { return a + b; }
inline Coefficient coeff_mul(const Coefficient& a, const Coefficient& b) { return a * b; }
inline Coefficient coeff_neg(const Coefficient& a) { return -a; }
inline Coefficient coeff_div(const Coefficient& a, const Coefficient& b) { return a / b; }
inline bool coeff_eq(const Coefficient& a, const Coefficient& b) { return a == b; }
inline Coefficient coeff_parse(std::string_view text) { return Coefficient::parse(text); }
inline std::string coeff_print(const Coefficient& c,
                               CoeffFormat format = CoeffFormat::text) {
  return c.to_string(format);
}
BigRational coeff_eval(const Coefficient& c,
                       const std::map<std::string, BigRational>& bindings);

/// LaTeX spelling of a symbol name: "alpha1" -> "\alpha_{1}".
std::string latex_symbol(std::string_view name);

}  // namespace bsharp
