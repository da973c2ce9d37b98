#include "bsharp/coefficient.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "bsharp/detail/arith_parser.hpp"
#include "bsharp/errors.hpp"

namespace bsharp {

BigRational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          s.end());
  auto all_digits = [](std::string_view v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](unsigned char c) {
      return std::isdigit(c);
    });
  };
  std::string_view body(s);
  bool negative = false;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
    negative = body[0] == '-';
    body.remove_prefix(1);
  }
  BigRational result;
  if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac)) || (whole.empty() && frac.empty())) {
      throw ValidationError("malformed rational '" + s + "'");
    }
    std::string digits = std::string(whole) + std::string(frac);
    BigInt num(digits.empty() ? "0" : digits, 10);
    BigInt den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    result = BigRational(num, den);
  } else if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw ValidationError("malformed rational '" + s + "'");
    }
    BigInt d(std::string(den), 10);
    if (d == 0) throw ArithmeticError("zero denominator in '" + s + "'");
    result = BigRational(BigInt(std::string(num), 10), d);
  } else {
    if (!all_digits(body)) throw ValidationError("malformed rational '" + s + "'");
    result = BigRational(BigInt(std::string(body), 10));
  }
  result.canonicalize();
  return negative ? BigRational(-result) : result;
}

std::string to_string(const BigRational& q) { return q.get_str(); }

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::string symbol, unsigned exponent) {
  if (exponent > 0) factors_.emplace_back(std::move(symbol), exponent);
}

unsigned Monomial::degree() const noexcept {
  unsigned d = 0;
  for (const auto& f : factors_) d += f.second;
  return d;
}

unsigned Monomial::exponent_of(std::string_view symbol) const noexcept {
  for (const auto& [name, e] : factors_) {
    if (name == symbol) return e;
  }
  return 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  auto a = factors_.begin();
  auto b = other.factors_.begin();
  while (a != factors_.end() || b != other.factors_.end()) {
    if (b == other.factors_.end() || (a != factors_.end() && a->first < b->first)) {
      out.factors_.push_back(*a++);
    } else if (a == factors_.end() || b->first < a->first) {
      out.factors_.push_back(*b++);
    } else {
      out.factors_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  return out;
}

bool Monomial::divides(const Monomial& other) const noexcept {
  for (const auto& [name, e] : factors_) {
    if (other.exponent_of(name) < e) return false;
  }
  return true;
}

Monomial Monomial::divided_by(const Monomial& other) const {
  Monomial out;
  for (const auto& [name, e] : factors_) {
    const unsigned d = other.exponent_of(name);
    if (e > d) out.factors_.emplace_back(name, e - d);
  }
  return out;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
  Monomial out;
  for (const auto& [name, e] : a.factors_) {
    const unsigned m = std::min(e, b.exponent_of(name));
    if (m > 0) out.factors_.emplace_back(name, m);
  }
  return out;
}

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
  const unsigned da = a.degree();
  const unsigned db = b.degree();
  if (da != db) return da > db;
  auto x = a.factors().begin();
  auto y = b.factors().begin();
  const auto xe = a.factors().end();
  const auto ye = b.factors().end();
  while (x != xe || y != ye) {
    unsigned ea = 0;
    unsigned eb = 0;
    if (y == ye || (x != xe && x->first < y->first)) {
      ea = x->second;
      ++x;
    } else if (x == xe || y->first < x->first) {
      eb = y->second;
      ++y;
    } else {
      ea = x->second;
      eb = y->second;
      ++x;
      ++y;
    }
    if (ea != eb) return ea > eb;
  }
  return false;
}

// -------------------------------------------------------------- Polynomial

Polynomial::Polynomial(BigRational constant) {
  if (constant != 0) terms_.emplace(Monomial(), std::move(constant));
}

Polynomial Polynomial::symbol(const std::string& name) {
  Polynomial p;
  p.terms_.emplace(Monomial(name), BigRational(1));
  return p;
}

bool Polynomial::is_constant() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

BigRational Polynomial::constant_value() const {
  auto it = terms_.find(Monomial());
  return it == terms_.end() ? BigRational(0) : it->second;
}

const std::pair<const Monomial, BigRational>& Polynomial::leading() const {
  if (terms_.empty()) throw DomainError("leading term of the zero polynomial");
  return *terms_.begin();
}

std::vector<std::string> Polynomial::symbols() const {
  std::set<std::string> names;
  for (const auto& [m, c] : terms_) {
    for (const auto& f : m.factors()) names.insert(f.first);
  }
  return {names.begin(), names.end()};
}

void Polynomial::add_term(const Monomial& m, const BigRational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(m, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(m, -c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial out;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

Polynomial Polynomial::operator-() const { return scaled(BigRational(-1)); }

Polynomial Polynomial::scaled(const BigRational& s) const {
  Polynomial out;
  if (s == 0) return out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, c * s);
  return out;
}

Polynomial Polynomial::times(const Monomial& m) const {
  Polynomial out;
  for (const auto& [t, c] : terms_) out.terms_.emplace(t * m, c);
  return out;
}

Polynomial Polynomial::divided_by(const Monomial& m) const {
  Polynomial out;
  for (const auto& [t, c] : terms_) out.terms_.emplace(t.divided_by(m), c);
  return out;
}

std::optional<Polynomial> Polynomial::exact_quotient(const Polynomial& d) const {
  if (d.is_zero()) throw ArithmeticError("division by the zero polynomial");
  const auto& [lm, lc] = d.leading();
  Polynomial q;
  Polynomial r = *this;
  while (!r.is_zero()) {
    const auto [m, c] = r.leading();
    if (!lm.divides(m)) return std::nullopt;
    const Monomial t = m.divided_by(lm);
    const BigRational s = c / lc;
    q.add_term(t, s);
    r = r - d.times(t).scaled(s);
  }
  return q;
}

Monomial Polynomial::monomial_content() const {
  if (terms_.empty()) return Monomial();
  Monomial g = terms_.begin()->first;
  for (const auto& [m, c] : terms_) {
    g = Monomial::gcd(g, m);
    if (g.is_one()) break;
  }
  return g;
}

BigRational Polynomial::evaluate(const std::map<std::string, BigRational>& at) const {
  BigRational total = 0;
  for (const auto& [m, c] : terms_) {
    BigRational term = c;
    for (const auto& [name, e] : m.factors()) {
      auto it = at.find(name);
      if (it == at.end()) throw ValidationError("unbound symbol '" + name + "'");
      BigRational p = 1;
      for (unsigned k = 0; k < e; ++k) p *= it->second;
      term *= p;
    }
    total += term;
  }
  return total;
}

namespace {

Polynomial substitute_polynomial(const Polynomial& p,
                                 const std::map<std::string, BigRational>& at) {
  Polynomial out;
  for (const auto& [m, c] : p.terms()) {
    BigRational coeff = c;
    Monomial rest;
    for (const auto& [name, e] : m.factors()) {
      auto it = at.find(name);
      if (it == at.end()) {
        rest = rest * Monomial(name, e);
      } else {
        for (unsigned k = 0; k < e; ++k) coeff *= it->second;
      }
    }
    Polynomial term = Polynomial(coeff).times(rest);
    out = out + term;
  }
  return out;
}

BigInt lcm_of_denominators(const Polynomial& p, BigInt acc) {
  for (const auto& [m, c] : p.terms()) {
    mpz_lcm(acc.get_mpz_t(), acc.get_mpz_t(), c.get_den_mpz_t());
  }
  return acc;
}

BigInt gcd_of_numerators(const Polynomial& p, BigInt acc) {
  for (const auto& [m, c] : p.terms()) {
    mpz_gcd(acc.get_mpz_t(), acc.get_mpz_t(), c.get_num_mpz_t());
  }
  return acc;
}

std::string monomial_text(const Monomial& m, CoeffFormat format) {
  std::string out;
  for (const auto& [name, e] : m.factors()) {
    if (!out.empty()) out += format == CoeffFormat::latex ? " " : "*";
    if (format == CoeffFormat::latex) {
      out += latex_symbol(name);
      if (e > 1) out += "^{" + std::to_string(e) + "}";
    } else {
      out += name;
      if (e > 1) out += "^" + std::to_string(e);
    }
  }
  return out;
}

// Prints a polynomial; with `integral` the coefficients are known integers.
std::string polynomial_text(const Polynomial& p, CoeffFormat format) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const bool negative = c < 0;
    const BigRational mag = abs(c);
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    const BigInt num = mag.get_num();
    const BigInt den = mag.get_den();
    const std::string mono = monomial_text(m, format);
    if (format == CoeffFormat::latex) {
      std::string top;
      if (mono.empty()) {
        top = num.get_str();
      } else {
        top = num == 1 ? mono : num.get_str() + " " + mono;
      }
      out += den == 1 ? top : "\\frac{" + top + "}{" + den.get_str() + "}";
    } else {
      std::string top;
      if (mono.empty()) {
        top = num.get_str();
      } else {
        top = num == 1 ? mono : num.get_str() + "*" + mono;
      }
      out += den == 1 ? top : top + "/" + den.get_str();
    }
  }
  return out;
}

bool is_bare_factor(const Polynomial& p) {
  if (p.terms().size() != 1) return false;
  const auto& [m, c] = *p.terms().begin();
  return c == 1 && m.factors().size() == 1 && m.factors()[0].second == 1;
}

struct CoeffActions {
  using Value = Coefficient;
  Value number(const BigRational& q) { return Coefficient(q); }
  Value identifier(std::string_view name, std::size_t) {
    return Coefficient::symbol(std::string(name));
  }
  Value add(Value a, Value b) { return a + b; }
  Value sub(Value a, Value b) { return a - b; }
  Value mul(Value a, Value b) { return a * b; }
  Value div(Value a, Value b, std::size_t) { return a / b; }
  Value neg(Value a) { return -a; }
  Value pow(Value a, long e, std::size_t) { return a.pow(e); }
};

}  // namespace

// ------------------------------------------------------------- Coefficient

Coefficient::Coefficient(long num, long den) {
  if (den == 0) throw ArithmeticError("division by zero");
  value_ = BigRational(num, den);
  value_.canonicalize();
}

Coefficient Coefficient::symbol(const std::string& name) {
  return from_polynomials(Polynomial::symbol(name), Polynomial(BigRational(1)));
}

Coefficient Coefficient::from_polynomials(Polynomial num, Polynomial den) {
  if (den.is_zero()) throw ArithmeticError("division by zero");
  if (num.is_zero()) return Coefficient();
  const Monomial g = Monomial::gcd(num.monomial_content(), den.monomial_content());
  if (!g.is_one()) {
    num = num.divided_by(g);
    den = den.divided_by(g);
  }
  const BigRational lead = den.leading().second;
  if (lead != 1) {
    const BigRational inv = 1 / lead;
    num = num.scaled(inv);
    den = den.scaled(inv);
  }
  Coefficient out;
  if (den.is_constant() && num.is_constant()) {
    out.value_ = num.constant_value();
    return out;
  }
  // num = c * den collapses to the rational c.
  if (num.terms().size() == den.terms().size() && num.leading().first == den.leading().first) {
    const BigRational c = num.leading().second;
    if (num == den.scaled(c)) {
      out.value_ = c;
      return out;
    }
  }
  out.func_ = std::make_shared<const Fraction>(Fraction{std::move(num), std::move(den)});
  return out;
}

const BigRational& Coefficient::rational() const {
  if (!is_rational()) {
    throw DomainError("coefficient '" + to_string() + "' is not a rational number");
  }
  return value_;
}

Polynomial Coefficient::numerator() const {
  return func_ ? func_->num : Polynomial(value_);
}

const Polynomial& Coefficient::denominator() const {
  static const Polynomial one(BigRational(1));
  return func_ ? func_->den : one;
}

std::vector<std::string> Coefficient::symbols() const {
  if (!func_) return {};
  std::set<std::string> names;
  for (auto& s : func_->num.symbols()) names.insert(s);
  for (auto& s : func_->den.symbols()) names.insert(s);
  return {names.begin(), names.end()};
}

Coefficient Coefficient::operator+(const Coefficient& o) const {
  if (is_rational() && o.is_rational()) return Coefficient(BigRational(value_ + o.value_));
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  const Polynomial n1 = numerator();
  const Polynomial& d1 = denominator();
  const Polynomial n2 = o.numerator();
  const Polynomial& d2 = o.denominator();
  if (d1 == d2) return from_polynomials(n1 + n2, d1);
  const bool mono1 = d1.terms().size() == 1;
  const bool mono2 = d2.terms().size() == 1;
  if (mono1 && mono2) {
    // Monic single-term denominators: combine over their least common multiple.
    const Monomial& m1 = d1.terms().begin()->first;
    const Monomial& m2 = d2.terms().begin()->first;
    const Monomial lcm = (m1 * m2).divided_by(Monomial::gcd(m1, m2));
    return from_polynomials(n1.times(lcm.divided_by(m1)) + n2.times(lcm.divided_by(m2)),
                            Polynomial(BigRational(1)).times(lcm));
  }
  return from_polynomials(n1 * d2 + n2 * d1, d1 * d2);
}

Coefficient Coefficient::operator-() const {
  if (is_rational()) return Coefficient(BigRational(-value_));
  return from_polynomials(-func_->num, func_->den);
}

Coefficient Coefficient::operator-(const Coefficient& o) const { return *this + (-o); }

Coefficient Coefficient::operator*(const Coefficient& o) const {
  if (is_rational() && o.is_rational()) return Coefficient(BigRational(value_ * o.value_));
  if (is_zero() || o.is_zero()) return Coefficient();
  if (is_rational()) return from_polynomials(o.func_->num.scaled(value_), o.func_->den);
  if (o.is_rational()) return from_polynomials(func_->num.scaled(o.value_), func_->den);
  return from_polynomials(func_->num * o.func_->num, func_->den * o.func_->den);
}

Coefficient Coefficient::operator/(const Coefficient& o) const {
  if (o.is_zero()) throw ArithmeticError("division by zero");
  if (is_rational() && o.is_rational()) return Coefficient(BigRational(value_ / o.value_));
  if (o.is_rational()) return from_polynomials(func_->num, func_->den.scaled(o.value_));
  return from_polynomials(numerator() * o.func_->den, denominator() * o.func_->num);
}

Coefficient Coefficient::pow(long exponent) const {
  if (exponent < 0) {
    if (is_zero()) throw ArithmeticError("zero raised to a negative power");
    return Coefficient(1) / pow(-exponent);
  }
  Coefficient result(1);
  Coefficient base = *this;
  unsigned long e = static_cast<unsigned long>(exponent);
  while (e > 0) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e > 0) base *= base;
  }
  return result;
}

bool operator==(const Coefficient& a, const Coefficient& b) {
  if (a.is_rational() && b.is_rational()) return a.value_ == b.value_;
  if (a.is_rational()) return b.func_->num == b.func_->den.scaled(a.value_);
  if (b.is_rational()) return a.func_->num == a.func_->den.scaled(b.value_);
  if (a.func_->den == b.func_->den) return a.func_->num == b.func_->num;
  return a.func_->num * b.func_->den == b.func_->num * a.func_->den;
}

BigRational Coefficient::evaluate(const std::map<std::string, BigRational>& at) const {
  if (is_rational()) return value_;
  const BigRational den = func_->den.evaluate(at);
  if (den == 0) {
    throw ArithmeticError("denominator of '" + to_string() + "' vanishes at the binding");
  }
  return func_->num.evaluate(at) / den;
}

Coefficient Coefficient::substitute(const std::map<std::string, BigRational>& at) const {
  if (is_rational()) return *this;
  Polynomial den = substitute_polynomial(func_->den, at);
  if (den.is_zero()) {
    throw ArithmeticError("denominator of '" + to_string() + "' vanishes at the binding");
  }
  return from_polynomials(substitute_polynomial(func_->num, at), std::move(den));
}

std::string Coefficient::to_string(CoeffFormat format) const {
  if (is_rational()) {
    if (format == CoeffFormat::latex && value_.get_den() != 1) {
      const bool negative = value_ < 0;
      return std::string(negative ? "-" : "") + "\\frac{" +
             BigInt(abs(value_.get_num())).get_str() + "}{" +
             value_.get_den().get_str() + "}";
    }
    return value_.get_str();
  }
  if (func_->den.is_constant()) return polynomial_text(func_->num, format);

  // Clear rational content so that numerator and denominator print with
  // coprime integer coefficients.
  BigInt lcm = lcm_of_denominators(func_->den, lcm_of_denominators(func_->num, BigInt(1)));
  Polynomial num = func_->num.scaled(BigRational(lcm));
  Polynomial den = func_->den.scaled(BigRational(lcm));
  BigInt g = gcd_of_numerators(den, gcd_of_numerators(num, BigInt(0)));
  if (g != 0 && g != 1) {
    num = num.scaled(BigRational(1, 1) / BigRational(g));
    den = den.scaled(BigRational(1, 1) / BigRational(g));
  }
  bool negative = false;
  if (num.terms().size() == 1 && num.terms().begin()->second < 0) {
    negative = true;
    num = -num;
  }
  if (format == CoeffFormat::latex) {
    return std::string(negative ? "-" : "") + "\\frac{" +
           polynomial_text(num, format) + "}{" + polynomial_text(den, format) + "}";
  }
  std::string top = polynomial_text(num, format);
  if (num.terms().size() > 1) top = "(" + top + ")";
  std::string bottom = polynomial_text(den, format);
  if (!is_bare_factor(den)) bottom = "(" + bottom + ")";
  return std::string(negative ? "-" : "") + top + "/" + bottom;
}

Coefficient Coefficient::parse(std::string_view text) {
  CoeffActions actions;
  detail::ArithParser<CoeffActions> parser(text, actions);
  return parser.parse();
}

BigRational coeff_eval(const Coefficient& c,
                       const std::map<std::string, BigRational>& bindings) {
  return c.evaluate(bindings);
}

std::string latex_symbol(std::string_view name) {
  static const std::set<std::string, std::less<>> greek = {
      "alpha", "beta",  "gamma", "delta", "epsilon", "zeta",  "eta",
      "theta", "iota",  "kappa", "lambda", "mu",     "nu",    "xi",
      "pi",    "rho",   "sigma", "tau",   "upsilon", "phi",   "chi",
      "psi",   "omega", "Gamma", "Delta", "Theta",   "Lambda", "Xi",
      "Pi",    "Sigma", "Phi",   "Psi",   "Omega"};
  std::size_t split = name.size();
  while (split > 0 && std::isdigit(static_cast<unsigned char>(name[split - 1]))) --split;
  std::string_view base = name.substr(0, split);
  std::string_view digits = name.substr(split);
  std::string out = greek.count(base) ? "\\" + std::string(base) : std::string(base);
  if (!digits.empty() && !base.empty()) out += "_{" + std::string(digits) + "}";
  if (base.empty()) out = std::string(name);
  return out;
}

}  // namespace bsharp
