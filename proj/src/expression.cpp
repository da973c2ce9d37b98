#include "bsharp/expression.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <unordered_map>

#include "bsharp/errors.hpp"

namespace bsharp {

namespace {

constexpr std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  v ^= v >> 30;
  v *= 0xbf58476d1ce4e5b9ULL;
  v ^= v >> 27;
  v *= 0x94d049bb133111ebULL;
  v ^= v >> 31;
  return h ^ v;
}

std::uint64_t hash_mpz(std::uint64_t h, const mpz_class& z) {
  const mpz_srcptr p = z.get_mpz_t();
  h = mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(p->_mp_size)));
  const int n = std::abs(p->_mp_size);
  for (int i = 0; i < n; ++i) h = mix(h, static_cast<std::uint64_t>(p->_mp_d[i]));
  return h;
}

std::uint64_t compute_hash(const ExprNode& n) {
  std::uint64_t h = mix(0x51ed270b27e1f3a5ULL, static_cast<std::uint64_t>(n.kind));
  switch (n.kind) {
    case ExprKind::constant:
      h = hash_mpz(h, n.value.get_num());
      h = hash_mpz(h, n.value.get_den());
      break;
    case ExprKind::variable:
      h = mix(h, n.var);
      break;
    case ExprKind::power:
      h = mix(h, static_cast<std::uint64_t>(n.exponent));
      [[fallthrough]];
    default:
      for (const auto& a : n.args) h = mix(h, a.hash());
  }
  return h;
}

bool same_node(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.hash != b.hash) return false;
  switch (a.kind) {
    case ExprKind::constant:
      return a.value == b.value;
    case ExprKind::variable:
      return a.var == b.var;
    default:
      return a.exponent == b.exponent && a.args == b.args;
  }
}

struct InternTable {
  std::mutex mutex;
  std::unordered_map<std::uint64_t, std::vector<std::weak_ptr<const ExprNode>>> buckets;
  std::size_t entries = 0;
  std::size_t next_sweep = 4096;

  void sweep() {
    entries = 0;
    for (auto it = buckets.begin(); it != buckets.end();) {
      auto& v = it->second;
      std::erase_if(v, [](const auto& w) { return w.expired(); });
      entries += v.size();
      it = v.empty() ? buckets.erase(it) : std::next(it);
    }
    next_sweep = std::max<std::size_t>(4096, 2 * entries);
  }
};

InternTable& table() {
  static auto* t = new InternTable();  // never destroyed: nodes may outlive statics
  return *t;
}

// (base, exponent) view used for collecting factors.
std::pair<Expr, long> as_power(const Expr& e) {
  if (e.kind() == ExprKind::power) return {e.args()[0], e.exponent()};
  return {e, 1};
}

// (coefficient, rest) view used for collecting terms.
std::pair<BigRational, Expr> as_term(const Expr& e) {
  if (e.is_constant()) return {e.value(), Expr(1)};
  if (e.kind() == ExprKind::product && e.args()[0].is_constant()) {
    std::vector<Expr> rest(e.args().begin() + 1, e.args().end());
    return {e.args()[0].value(), Expr::product(std::move(rest))};
  }
  return {BigRational(1), e};
}

int kind_rank(ExprKind k) {
  switch (k) {
    case ExprKind::variable: return 0;
    case ExprKind::product: return 1;
    case ExprKind::sum: return 2;
    case ExprKind::constant: return 3;
    case ExprKind::power: return 4;
  }
  return 5;
}

int compare(const Expr& a, const Expr& b) {
  if (a == b) return 0;
  const auto [ba, ea] = as_power(a);
  const auto [bb, eb] = as_power(b);
  if (!(ba == bb)) {
    const int ra = kind_rank(ba.kind());
    const int rb = kind_rank(bb.kind());
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (ba.kind()) {
      case ExprKind::constant:
        return ba.value() < bb.value() ? -1 : 1;
      case ExprKind::variable:
        return ba.var() < bb.var() ? -1 : 1;
      default: {
        const auto& x = ba.args();
        const auto& y = bb.args();
        for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
          if (int c = compare(x[i], y[i]); c != 0) return c;
        }
        if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
        return ba.hash() < bb.hash() ? -1 : 1;
      }
    }
  }
  if (ea != eb) return ea < eb ? -1 : 1;
  return 0;
}

}  // namespace

Expr Expr::intern(ExprNode node) {
  node.hash = compute_hash(node);
  auto& t = table();
  std::lock_guard lock(t.mutex);
  auto& bucket = t.buckets[node.hash];
  for (const auto& w : bucket) {
    if (auto sp = w.lock(); sp && same_node(*sp, node)) return Expr(std::move(sp));
  }
  auto sp = std::make_shared<const ExprNode>(std::move(node));
  bucket.push_back(sp);
  if (++t.entries > t.next_sweep) t.sweep();
  return Expr(std::move(sp));
}

Expr::Expr() : Expr(constant(BigRational(0))) {}
Expr::Expr(long v) : Expr(constant(BigRational(v))) {}
Expr::Expr(BigRational v) : Expr(constant(std::move(v))) {}

Expr Expr::constant(BigRational v) {
  v.canonicalize();
  ExprNode n{ExprKind::constant, 0, std::move(v), 0, 0, {}};
  return intern(std::move(n));
}

Expr Expr::variable(std::size_t index) {
  ExprNode n{ExprKind::variable, 0, BigRational(0), index, 0, {}};
  return intern(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  BigRational constant_part(0);
  std::vector<std::pair<BigRational, Expr>> collected;
  std::unordered_map<const ExprNode*, std::size_t> position;

  std::function<void(const Expr&)> add = [&](const Expr& t) {
    if (t.kind() == ExprKind::sum) {
      for (const auto& a : t.args()) add(a);
      return;
    }
    if (t.is_constant()) {
      constant_part += t.value();
      return;
    }
    auto [c, rest] = as_term(t);
    auto [it, fresh] = position.try_emplace(rest.node(), collected.size());
    if (fresh) {
      collected.emplace_back(std::move(c), std::move(rest));
    } else {
      collected[it->second].first += c;
    }
  };
  for (const auto& t : terms) add(t);

  std::erase_if(collected, [](const auto& p) { return p.first == 0; });
  std::sort(collected.begin(), collected.end(),
            [](const auto& x, const auto& y) { return compare(x.second, y.second) < 0; });

  std::vector<Expr> args;
  args.reserve(collected.size() + 1);
  for (auto& [c, rest] : collected) {
    args.push_back(c == 1 ? rest : product({constant(c), rest}));
  }
  if (constant_part != 0) args.push_back(constant(constant_part));
  if (args.empty()) return constant(BigRational(0));
  if (args.size() == 1) return args[0];
  ExprNode n{ExprKind::sum, 0, BigRational(0), 0, 0, std::move(args)};
  return intern(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  BigRational constant_part(1);
  std::vector<std::pair<Expr, long>> collected;
  std::unordered_map<const ExprNode*, std::size_t> position;

  std::function<void(const Expr&)> mul = [&](const Expr& f) {
    if (f.kind() == ExprKind::product) {
      for (const auto& a : f.args()) mul(a);
      return;
    }
    if (f.is_constant()) {
      constant_part *= f.value();
      return;
    }
    auto [base, e] = as_power(f);
    auto [it, fresh] = position.try_emplace(base.node(), collected.size());
    if (fresh) {
      collected.emplace_back(std::move(base), e);
    } else {
      collected[it->second].second += e;
    }
  };
  for (const auto& f : factors) mul(f);

  if (constant_part == 0) return constant(BigRational(0));
  std::erase_if(collected, [](const auto& p) { return p.second == 0; });
  std::sort(collected.begin(), collected.end(), [](const auto& x, const auto& y) {
    return compare(x.first, y.first) < 0;
  });

  std::vector<Expr> args;
  args.reserve(collected.size() + 1);
  if (constant_part != 1) args.push_back(constant(constant_part));
  for (auto& [base, e] : collected) args.push_back(power(base, e));
  if (args.empty()) return constant(BigRational(1));
  if (args.size() == 1) return args[0];
  ExprNode n{ExprKind::product, 0, BigRational(0), 0, 0, std::move(args)};
  return intern(std::move(n));
}

namespace {

BigRational rational_pow(const BigRational& q, long n) {
  if (n < 0) {
    if (q == 0) throw ArithmeticError("division by zero in expression");
    return rational_pow(BigRational(q.get_den(), q.get_num()), -n);
  }
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), static_cast<unsigned long>(n));
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), static_cast<unsigned long>(n));
  BigRational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

Expr Expr::power(const Expr& base, long exponent) {
  if (exponent == 0) return constant(BigRational(1));
  if (exponent == 1) return base;
  switch (base.kind()) {
    case ExprKind::constant:
      return constant(rational_pow(base.value(), exponent));
    case ExprKind::power:
      return power(base.args()[0], base.exponent() * exponent);
    case ExprKind::product: {
      std::vector<Expr> fs;
      fs.reserve(base.args().size());
      for (const auto& f : base.args()) fs.push_back(power(f, exponent));
      return product(std::move(fs));
    }
    default:
      break;
  }
  ExprNode n{ExprKind::power, 0, BigRational(0), 0, exponent, {base}};
  return intern(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw ArithmeticError("division by zero in expression");
  return Expr::product({a, Expr::power(b, -1)});
}
Expr operator-(const Expr& a) { return Expr::product({Expr(-1), a}); }
Expr pow(const Expr& base, long exponent) { return Expr::power(base, exponent); }

bool expr_less(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

// -------------------------------------------------------------- calculus

Expr differentiate(const Expr& e, std::size_t var) {
  std::unordered_map<const ExprNode*, Expr> memo;
  std::function<Expr(const Expr&)> d = [&](const Expr& x) -> Expr {
    if (auto it = memo.find(x.node()); it != memo.end()) return it->second;
    Expr r;
    switch (x.kind()) {
      case ExprKind::constant:
        break;
      case ExprKind::variable:
        r = Expr(x.var() == var ? 1L : 0L);
        break;
      case ExprKind::sum: {
        std::vector<Expr> ts;
        for (const auto& a : x.args()) ts.push_back(d(a));
        r = Expr::sum(std::move(ts));
        break;
      }
      case ExprKind::product: {
        const auto& fs = x.args();
        std::vector<Expr> ts;
        for (std::size_t i = 0; i < fs.size(); ++i) {
          Expr di = d(fs[i]);
          if (di.is_zero()) continue;
          std::vector<Expr> parts;
          parts.reserve(fs.size());
          for (std::size_t j = 0; j < fs.size(); ++j) parts.push_back(j == i ? di : fs[j]);
          ts.push_back(Expr::product(std::move(parts)));
        }
        r = Expr::sum(std::move(ts));
        break;
      }
      case ExprKind::power: {
        const Expr& b = x.args()[0];
        Expr db = d(b);
        if (!db.is_zero()) {
          r = Expr::product({Expr(x.exponent()), Expr::power(b, x.exponent() - 1), db});
        }
        break;
      }
    }
    memo.emplace(x.node(), r);
    return r;
  };
  return d(e);
}

std::size_t expr_dag_size(const Expr& e) {
  std::unordered_map<const ExprNode*, bool> seen;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (!seen.emplace(x.node(), true).second) return;
    for (const auto& a : x.args()) walk(a);
  };
  walk(e);
  return seen.size();
}

// ------------------------------------------------------------ evaluation

namespace {

template <class T>
T evaluate_impl(const Expr& e, std::span<const T> point) {
  std::unordered_map<const ExprNode*, T> memo;
  std::function<T(const Expr&)> ev = [&](const Expr& x) -> T {
    if (auto it = memo.find(x.node()); it != memo.end()) return it->second;
    T r{};
    switch (x.kind()) {
      case ExprKind::constant:
        if constexpr (std::is_same_v<T, double>) {
          r = x.value().get_d();
        } else {
          r = x.value();
        }
        break;
      case ExprKind::variable:
        if (x.var() >= point.size()) throw ContractError("evaluation point too short");
        r = point[x.var()];
        break;
      case ExprKind::sum:
        r = T(0);
        for (const auto& a : x.args()) r += ev(a);
        break;
      case ExprKind::product:
        r = T(1);
        for (const auto& a : x.args()) r *= ev(a);
        break;
      case ExprKind::power:
        if constexpr (std::is_same_v<T, double>) {
          r = std::pow(ev(x.args()[0]), static_cast<double>(x.exponent()));
        } else {
          r = rational_pow(ev(x.args()[0]), x.exponent());
        }
        break;
    }
    memo.emplace(x.node(), r);
    return r;
  };
  return ev(e);
}

}  // namespace

BigRational eval_expression(const Expr& e, std::span<const BigRational> point) {
  return evaluate_impl<BigRational>(e, point);
}

double eval_expression(const Expr& e, std::span<const double> point) {
  return evaluate_impl<double>(e, point);
}

CompiledExprs::CompiledExprs(const std::vector<Expr>& outputs) {
  std::unordered_map<const ExprNode*, std::size_t> slot;
  std::function<std::size_t(const Expr&)> emit = [&](const Expr& x) -> std::size_t {
    if (auto it = slot.find(x.node()); it != slot.end()) return it->second;
    std::vector<std::size_t> args;
    for (const auto& a : x.args()) args.push_back(emit(a));
    Instr in{x.kind(), x.is_constant() ? x.value().get_d() : 0.0, x.var(), x.exponent(),
             arg_pool_.size(), args.size()};
    arg_pool_.insert(arg_pool_.end(), args.begin(), args.end());
    code_.push_back(in);
    slot.emplace(x.node(), code_.size() - 1);
    return code_.size() - 1;
  };
  for (const auto& e : outputs) outputs_.push_back(emit(e));
  scratch_.resize(code_.size());
}

void CompiledExprs::evaluate(std::span<const double> point, std::span<double> out) const {
  if (out.size() < outputs_.size()) throw ContractError("output span too short");
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    const std::size_t* args = arg_pool_.data() + in.first_arg;
    double r = 0.0;
    switch (in.kind) {
      case ExprKind::constant:
        r = in.value;
        break;
      case ExprKind::variable:
        r = point[in.var];
        break;
      case ExprKind::sum:
        for (std::size_t k = 0; k < in.arg_count; ++k) r += scratch_[args[k]];
        break;
      case ExprKind::product:
        r = 1.0;
        for (std::size_t k = 0; k < in.arg_count; ++k) r *= scratch_[args[k]];
        break;
      case ExprKind::power: {
        const double b = scratch_[args[0]];
        if (in.exponent == 2) {
          r = b * b;
        } else if (in.exponent == -1) {
          r = 1.0 / b;
        } else {
          r = std::pow(b, static_cast<double>(in.exponent));
        }
        break;
      }
    }
    scratch_[i] = r;
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = scratch_[outputs_[k]];
}

// -------------------------------------------------------------- printing

namespace {

class Printer {
 public:
  Printer(const std::vector<std::string>& names, ExprFormat format)
      : names_(names), latex_(format == ExprFormat::latex) {}

  // ctx: 0 top/sum term, 1 product factor, 2 power base
  std::string print(const Expr& e, int ctx) {
    switch (e.kind()) {
      case ExprKind::constant:
        return constant(e.value(), ctx);
      case ExprKind::variable:
        return name(e.var());
      case ExprKind::sum: {
        std::string s = sum(e);
        return ctx >= 1 ? paren(s) : s;
      }
      case ExprKind::product:
        return product(e, ctx);
      case ExprKind::power:
        if (e.exponent() < 0) return product(e, ctx);
        return power_text(e.args()[0], e.exponent());
    }
    return {};
  }

 private:
  std::string name(std::size_t i) const {
    std::string n = i < names_.size() ? names_[i] : "y" + std::to_string(i);
    return latex_ ? latex_symbol(n) : n;
  }

  std::string paren(const std::string& s) const {
    return latex_ ? "\\left(" + s + "\\right)" : "(" + s + ")";
  }

  std::string constant(const BigRational& q, int ctx) const {
    std::string s;
    if (latex_ && q.get_den() != 1) {
      s = std::string(q < 0 ? "-" : "") + "\\frac{" + mpz_class(abs(q.get_num())).get_str() +
          "}{" + q.get_den().get_str() + "}";
    } else {
      s = bsharp::to_string(q);
    }
    const bool compound = q < 0 || (!latex_ && q.get_den() != 1);
    return ctx >= 1 && compound ? paren(s) : s;
  }

  std::string power_text(const Expr& base, long n) {
    std::string b = print(base, 2);
    if (base.kind() == ExprKind::power || base.kind() == ExprKind::product) b = paren(b);
    return latex_ ? b + "^{" + std::to_string(n) + "}" : b + "^" + std::to_string(n);
  }

  static bool negative_term(const Expr& t) {
    if (t.is_constant()) return t.value() < 0;
    return t.kind() == ExprKind::product && t.args()[0].is_constant() &&
           t.args()[0].value() < 0;
  }

  std::string sum(const Expr& e) {
    std::string s;
    bool first = true;
    for (const auto& t : e.args()) {
      const bool neg = negative_term(t);
      const std::string body = print(neg ? -t : t, 0);
      if (first) {
        s = neg ? "-" + body : body;
      } else {
        s += neg ? " - " : " + ";
        s += body;
      }
      first = false;
    }
    return s;
  }

  std::string product(const Expr& e, int ctx) {
    BigRational c(1);
    std::vector<Expr> fs;
    if (e.kind() == ExprKind::product) {
      fs = e.args();
    } else {
      fs = {e};
    }
    if (!fs.empty() && fs[0].is_constant()) {
      c = fs[0].value();
      fs.erase(fs.begin());
    }
    const bool neg = c < 0;
    if (neg) c = -c;

    std::vector<std::string> num;
    std::vector<std::string> den;
    if (c.get_num() != 1) num.push_back(c.get_num().get_str());
    if (c.get_den() != 1) den.push_back(c.get_den().get_str());
    for (const auto& f : fs) {
      if (f.kind() == ExprKind::power && f.exponent() < 0) {
        den.push_back(f.exponent() == -1 ? print(f.args()[0], 1)
                                         : power_text(f.args()[0], -f.exponent()));
      } else {
        num.push_back(print(f, 1));
      }
    }
    const std::string mul = latex_ ? " " : "*";
    auto join = [&](const std::vector<std::string>& parts) {
      std::string s;
      for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? mul : "") + parts[i];
      return s;
    };
    std::string n = num.empty() ? "1" : join(num);
    std::string s;
    if (den.empty()) {
      s = n;
    } else if (latex_) {
      s = "\\frac{" + n + "}{" + join(den) + "}";
    } else {
      s = n + "/" + (den.size() == 1 ? den[0] : paren(join(den)));
    }
    if (neg) s = "-" + s;
    const bool compound = neg || !den.empty() || num.size() > 1;
    return ctx >= 2 && compound ? paren(s) : (ctx == 1 && neg ? paren(s) : s);
  }

  const std::vector<std::string>& names_;
  bool latex_;
};

}  // namespace

std::string to_string(const Expr& e, const std::vector<std::string>& names,
                      ExprFormat format) {
  Printer p(names, format);
  return p.print(e, 0);
}

// ------------------------------------------------- rational-function form

Coefficient to_rational_function(const Expr& e, const std::vector<std::string>& names) {
  std::unordered_map<const ExprNode*, Coefficient> memo;
  std::function<Coefficient(const Expr&)> conv = [&](const Expr& x) -> Coefficient {
    if (auto it = memo.find(x.node()); it != memo.end()) return it->second;
    Coefficient r;
    switch (x.kind()) {
      case ExprKind::constant:
        r = Coefficient(x.value());
        break;
      case ExprKind::variable:
        if (x.var() >= names.size()) throw ContractError("variable without a name");
        r = Coefficient::symbol(names[x.var()]);
        break;
      case ExprKind::sum:
        for (const auto& a : x.args()) r += conv(a);
        break;
      case ExprKind::product:
        r = Coefficient(1);
        for (const auto& a : x.args()) r *= conv(a);
        break;
      case ExprKind::power:
        r = conv(x.args()[0]).pow(x.exponent());
        break;
    }
    memo.emplace(x.node(), r);
    return r;
  };
  return conv(e);
}

namespace {

Expr polynomial_to_expr(const Polynomial& p, const std::map<std::string, std::size_t>& index) {
  std::vector<Expr> terms;
  for (const auto& [mono, c] : p.terms()) {
    std::vector<Expr> fs{Expr(c)};
    for (const auto& [sym, e] : mono.factors()) {
      auto it = index.find(sym);
      if (it == index.end()) throw ValidationError("unknown symbol '" + sym + "'");
      fs.push_back(Expr::power(Expr::variable(it->second), static_cast<long>(e)));
    }
    terms.push_back(Expr::product(std::move(fs)));
  }
  return Expr::sum(std::move(terms));
}

}  // namespace

Expr from_rational_function(const Coefficient& c, const std::vector<std::string>& names) {
  if (c.is_rational()) return Expr(c.rational());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
  const Expr num = polynomial_to_expr(c.numerator(), index);
  const Polynomial& den = c.denominator();
  if (den.is_constant()) return num / Expr(den.constant_value());
  return num / polynomial_to_expr(den, index);
}

namespace {

// num / Π base_i^{k_i} with polynomial bases kept factored.
struct RationalForm {
  struct Base {
    Polynomial poly;
    long k;
  };
  Polynomial num;
  std::map<std::string, Base> den;  // keyed by the printed base
};

Polynomial poly_pow(const Polynomial& p, long n) {
  Polynomial r(BigRational(1));
  for (long i = 0; i < n; ++i) r = r * p;
  return r;
}

class NormalFormBuilder {
 public:
  explicit NormalFormBuilder(const std::vector<std::string>& names) : names_(names) {}

  RationalForm build(const Expr& x) {
    if (auto it = memo_.find(x.node()); it != memo_.end()) return it->second;
    RationalForm r;
    switch (x.kind()) {
      case ExprKind::constant:
        r.num = Polynomial(x.value());
        break;
      case ExprKind::variable:
        if (x.var() >= names_.size()) throw ContractError("variable without a name");
        r.num = Polynomial::symbol(names_[x.var()]);
        break;
      case ExprKind::sum: {
        std::vector<RationalForm> parts;
        for (const auto& a : x.args()) parts.push_back(build(a));
        for (const auto& p : parts) {
          for (const auto& [key, b] : p.den) {
            auto [it, fresh] = r.den.try_emplace(key, b);
            if (!fresh) it->second.k = std::max(it->second.k, b.k);
          }
        }
        for (const auto& p : parts) {
          Polynomial term = p.num;
          for (const auto& [key, b] : r.den) {
            auto it = p.den.find(key);
            const long have = it == p.den.end() ? 0 : it->second.k;
            term = term * poly_pow(b.poly, b.k - have);
          }
          r.num = r.num + term;
        }
        break;
      }
      case ExprKind::product:
        r.num = Polynomial(BigRational(1));
        for (const auto& a : x.args()) multiply(r, build(a));
        break;
      case ExprKind::power: {
        const RationalForm b = build(x.args()[0]);
        const long n = std::abs(x.exponent());
        RationalForm p;
        if (x.exponent() > 0) {
          p.num = poly_pow(b.num, n);
          for (auto [key, base] : b.den) {
            base.k *= n;
            p.den.emplace(key, base);
          }
        } else {
          p.num = Polynomial(BigRational(1));
          for (const auto& [key, base] : b.den) p.num = p.num * poly_pow(base.poly, base.k * n);
          invert_into(p, b.num, n);
        }
        r = std::move(p);
        break;
      }
    }
    reduce(r);
    memo_.emplace(x.node(), r);
    return r;
  }

  Expr to_expr(const RationalForm& r) const {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < names_.size(); ++i) index.emplace(names_[i], i);
    std::vector<Expr> fs{polynomial_to_expr(r.num, index)};
    for (const auto& [key, b] : r.den) {
      fs.push_back(Expr::power(polynomial_to_expr(b.poly, index), -b.k));
    }
    return Expr::product(std::move(fs));
  }

 private:
  static void multiply(RationalForm& r, const RationalForm& f) {
    r.num = r.num * f.num;
    for (const auto& [key, b] : f.den) {
      auto [it, fresh] = r.den.try_emplace(key, b);
      if (!fresh) it->second.k += b.k;
    }
  }

  // Multiplies r by 1/n^k, splitting n into content, monomial and the rest.
  void invert_into(RationalForm& r, const Polynomial& n, long k) const {
    if (n.is_zero()) throw ArithmeticError("division by zero in expression");
    const Monomial mono = n.monomial_content();
    Polynomial rest = n.divided_by(mono);
    const BigRational lc = rest.leading().second;
    rest = rest.scaled(1 / lc);
    r.num = r.num.scaled(1 / rational_pow(lc, k));
    for (const auto& [sym, e] : mono.factors()) {
      add_base(r, Polynomial::symbol(sym), static_cast<long>(e) * k);
    }
    if (!rest.is_constant()) add_base(r, rest, k);
  }

  static void add_base(RationalForm& r, const Polynomial& p, long k) {
    std::string key;
    for (const auto& [m, c] : p.terms()) {
      key += c.get_str() + "*";
      for (const auto& [sym, e] : m.factors()) key += sym + "^" + std::to_string(e);
      key += "+";
    }
    auto [it, fresh] = r.den.try_emplace(key, RationalForm::Base{p, k});
    if (!fresh) it->second.k += k;
  }

  static void reduce(RationalForm& r) {
    for (auto it = r.den.begin(); it != r.den.end();) {
      auto& b = it->second;
      while (b.k > 0 && !r.num.is_zero()) {
        auto q = r.num.exact_quotient(b.poly);
        if (!q) break;
        r.num = std::move(*q);
        --b.k;
      }
      it = (b.k == 0 || r.num.is_zero()) ? r.den.erase(it) : std::next(it);
    }
  }

  const std::vector<std::string>& names_;
  std::unordered_map<const ExprNode*, RationalForm> memo_;
};

}  // namespace

Expr expand(const Expr& e, const std::vector<std::string>& names) {
  NormalFormBuilder builder(names);
  return builder.to_expr(builder.build(e));
}

}  // namespace bsharp
