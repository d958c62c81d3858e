#include "kharmonic/diffpoly.hpp"

#include <algorithm>
#include <cmath>

namespace kharmonic {

CurvatureSymbol kappa_symbol(int index, int order) {
  if (index < 1) throw std::invalid_argument("curvature index must be >= 1, got " + std::to_string(index));
  if (order < 0) throw std::invalid_argument("derivative order must be >= 0, got " + std::to_string(order));
  return CurvatureSymbol{index, order};
}

int PowerProduct::degree() const {
  int d = k_power;
  for (const auto& f : factors) d += f.exponent;
  return d;
}

int PowerProduct::exponent_of(CurvatureSymbol s) const {
  auto it = std::lower_bound(factors.begin(), factors.end(), s,
                             [](const Factor& f, const CurvatureSymbol& v) { return f.symbol < v; });
  return (it != factors.end() && it->symbol == s) ? it->exponent : 0;
}

PowerProduct PowerProduct::operator*(const PowerProduct& other) const {
  PowerProduct out;
  out.k_power = k_power + other.k_power;
  out.factors.reserve(factors.size() + other.factors.size());
  auto a = factors.begin();
  auto b = other.factors.begin();
  while (a != factors.end() && b != other.factors.end()) {
    if (a->symbol < b->symbol) {
      out.factors.push_back(*a++);
    } else if (b->symbol < a->symbol) {
      out.factors.push_back(*b++);
    } else {
      out.factors.push_back({a->symbol, a->exponent + b->exponent});
      ++a;
      ++b;
    }
  }
  out.factors.insert(out.factors.end(), a, factors.end());
  out.factors.insert(out.factors.end(), b, other.factors.end());
  return out;
}

int compare(const PowerProduct& a, const PowerProduct& b) {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db ? -1 : 1;
  auto ia = a.factors.begin();
  auto ib = b.factors.begin();
  for (; ia != a.factors.end() && ib != b.factors.end(); ++ia, ++ib) {
    if (ia->symbol != ib->symbol) {
      // The side holding the smaller variable has a positive exponent where the other has 0.
      return ia->symbol < ib->symbol ? 1 : -1;
    }
    if (ia->exponent != ib->exponent) return ia->exponent < ib->exponent ? -1 : 1;
  }
  if (ia != a.factors.end()) return 1;
  if (ib != b.factors.end()) return -1;
  // Equal degree and equal curvature part force equal K powers.
  return a.k_power == b.k_power ? 0 : (a.k_power < b.k_power ? -1 : 1);
}

DiffPoly normalize(std::vector<Monomial> terms) {
  for (auto& t : terms) {
    auto& f = t.powers.factors;
    std::sort(f.begin(), f.end(), [](const Factor& x, const Factor& y) { return x.symbol < y.symbol; });
    std::vector<Factor> merged;
    merged.reserve(f.size());
    for (const auto& x : f) {
      if (!merged.empty() && merged.back().symbol == x.symbol) {
        merged.back().exponent += x.exponent;
      } else {
        merged.push_back(x);
      }
    }
    std::erase_if(merged, [](const Factor& x) { return x.exponent == 0; });
    f = std::move(merged);
    t.coefficient.canonicalize();
  }
  std::sort(terms.begin(), terms.end(),
            [](const Monomial& x, const Monomial& y) { return compare(x.powers, y.powers) > 0; });
  DiffPoly out;
  out.terms_.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.terms_.empty() && out.terms_.back().powers == t.powers) {
      out.terms_.back().coefficient += t.coefficient;
    } else {
      if (!out.terms_.empty() && out.terms_.back().coefficient == 0) out.terms_.pop_back();
      out.terms_.push_back(std::move(t));
    }
  }
  if (!out.terms_.empty() && out.terms_.back().coefficient == 0) out.terms_.pop_back();
  return out;
}

DiffPoly::DiffPoly(long constant) : DiffPoly(Rational(constant)) {}

DiffPoly::DiffPoly(const Rational& constant) {
  if (constant != 0) terms_.push_back({constant, {}});
}

DiffPoly DiffPoly::symbol(CurvatureSymbol s, int exponent) {
  if (exponent < 0) throw std::invalid_argument("negative exponent");
  DiffPoly p;
  Monomial m{1, {}};
  if (exponent > 0) m.powers.factors.push_back({s, exponent});
  p.terms_.push_back(std::move(m));
  return p;
}

DiffPoly DiffPoly::curvature_constant(int exponent) {
  if (exponent < 0) throw std::invalid_argument("negative exponent");
  DiffPoly p;
  p.terms_.push_back({1, {{}, exponent}});
  return p;
}

const Monomial& DiffPoly::leading() const {
  if (terms_.empty()) throw std::logic_error("leading term of the zero polynomial");
  return terms_.front();
}

int DiffPoly::max_index() const {
  int m = 0;
  for (const auto& t : terms_)
    for (const auto& f : t.powers.factors) m = std::max(m, f.symbol.index);
  return m;
}

int DiffPoly::max_order() const {
  int m = -1;
  for (const auto& t : terms_)
    for (const auto& f : t.powers.factors) m = std::max(m, f.symbol.order);
  return m;
}

std::set<CurvatureSymbol> DiffPoly::symbols() const {
  std::set<CurvatureSymbol> out;
  for (const auto& t : terms_)
    for (const auto& f : t.powers.factors) out.insert(f.symbol);
  return out;
}

bool DiffPoly::contains_k() const {
  return std::any_of(terms_.begin(), terms_.end(), [](const Monomial& m) { return m.powers.k_power > 0; });
}

DiffPoly DiffPoly::operator-() const {
  DiffPoly out = *this;
  for (auto& t : out.terms_) t.coefficient = -t.coefficient;
  return out;
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& other) {
  std::vector<Monomial> merged;
  merged.reserve(terms_.size() + other.terms_.size());
  auto a = terms_.begin();
  auto b = other.terms_.begin();
  while (a != terms_.end() && b != other.terms_.end()) {
    const int c = compare(a->powers, b->powers);
    if (c > 0) {
      merged.push_back(std::move(*a++));
    } else if (c < 0) {
      merged.push_back(*b++);
    } else {
      Rational sum = a->coefficient + b->coefficient;
      if (sum != 0) merged.push_back({std::move(sum), std::move(a->powers)});
      ++a;
      ++b;
    }
  }
  for (; a != terms_.end(); ++a) merged.push_back(std::move(*a));
  merged.insert(merged.end(), b, other.terms_.end());
  terms_ = std::move(merged);
  return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& other) { return *this += -other; }

DiffPoly& DiffPoly::operator*=(const DiffPoly& other) { return *this = *this * other; }

DiffPoly& DiffPoly::operator*=(const Rational& scalar) {
  if (scalar == 0) {
    terms_.clear();
  } else {
    for (auto& t : terms_) t.coefficient *= scalar;
  }
  return *this;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Monomial> products;
  products.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) products.push_back({x.coefficient * y.coefficient, x.powers * y.powers});
  return normalize(std::move(products));
}

DiffPoly pow(const DiffPoly& base, int exponent) {
  if (exponent < 0) throw std::invalid_argument("negative exponent");
  DiffPoly result(1L);
  DiffPoly square = base;
  while (exponent > 0) {
    if (exponent & 1) result *= square;
    exponent >>= 1;
    if (exponent > 0) square = square * square;
  }
  return result;
}

DiffPoly differentiate(const DiffPoly& p) {
  std::vector<Monomial> out;
  for (const auto& t : p.terms()) {
    const auto& f = t.powers.factors;
    for (std::size_t i = 0; i < f.size(); ++i) {
      Monomial d{t.coefficient * f[i].exponent, t.powers};
      auto& df = d.powers.factors;
      const CurvatureSymbol next{f[i].symbol.index, f[i].symbol.order + 1};
      if (--df[i].exponent == 0) df.erase(df.begin() + static_cast<std::ptrdiff_t>(i));
      // Sorted insert keeps the factor list canonical without a full resort.
      auto pos = std::lower_bound(df.begin(), df.end(), next,
                                  [](const Factor& x, const CurvatureSymbol& s) { return x.symbol < s; });
      if (pos != df.end() && pos->symbol == next) {
        ++pos->exponent;
      } else {
        df.insert(pos, Factor{next, 1});
      }
      out.push_back(std::move(d));
    }
  }
  return normalize(std::move(out));
}

DiffPoly differentiate(const DiffPoly& p, int times) {
  DiffPoly out = p;
  for (int i = 0; i < times; ++i) out = differentiate(out);
  return out;
}

SubstitutionRules& SubstitutionRules::set(CurvatureSymbol s, DiffPoly value) {
  if (explicit_.count(s)) {
    throw std::invalid_argument("conflicting substitution rules: " + to_text(DiffPoly::symbol(s)) +
                                " already has a rule");
  }
  const bool covered = zero_.count(s.index) || (s.order >= 1 && constant_.count(s.index));
  if (covered && !value.is_zero()) {
    throw std::invalid_argument("conflicting substitution rules: " + to_text(DiffPoly::symbol(s)) +
                                " is forced to 0 but a rule maps it to " + to_text(value));
  }
  explicit_.emplace(s, std::move(value));
  return *this;
}

SubstitutionRules& SubstitutionRules::set_k(DiffPoly value) {
  if (k_rule_) throw std::invalid_argument("conflicting substitution rules: K already has a rule");
  k_rule_ = std::move(value);
  return *this;
}

void SubstitutionRules::check_family_conflict(int index, bool all_orders) const {
  for (const auto& [s, v] : explicit_) {
    if (s.index == index && (all_orders || s.order >= 1) && !v.is_zero()) {
      throw std::invalid_argument("conflicting substitution rules: " + to_text(DiffPoly::symbol(s)) + " -> " +
                                  to_text(v) + " contradicts forcing it to 0");
    }
  }
}

SubstitutionRules& SubstitutionRules::make_constant(int index) {
  kappa_symbol(index);
  check_family_conflict(index, false);
  constant_.insert(index);
  return *this;
}

SubstitutionRules& SubstitutionRules::make_zero(int index) {
  kappa_symbol(index);
  check_family_conflict(index, true);
  zero_.insert(index);
  return *this;
}

std::optional<DiffPoly> SubstitutionRules::lookup(CurvatureSymbol s) const {
  if (auto it = explicit_.find(s); it != explicit_.end()) return it->second;
  if (zero_.count(s.index)) return DiffPoly{};
  if (s.order >= 1 && constant_.count(s.index)) return DiffPoly{};
  return std::nullopt;
}

bool SubstitutionRules::empty() const {
  return explicit_.empty() && !k_rule_ && constant_.empty() && zero_.empty();
}

DiffPoly substitute(const DiffPoly& p, const SubstitutionRules& rules) {
  if (rules.empty()) return p;
  std::map<std::pair<CurvatureSymbol, int>, DiffPoly> power_cache;
  std::map<int, DiffPoly> k_cache;
  auto power_of = [&](CurvatureSymbol s, const DiffPoly& v, int e) -> const DiffPoly& {
    auto key = std::make_pair(s, e);
    auto it = power_cache.find(key);
    if (it == power_cache.end()) it = power_cache.emplace(key, pow(v, e)).first;
    return it->second;
  };

  std::vector<Monomial> expanded;
  for (const auto& t : p.terms()) {
    Monomial kept{t.coefficient, {}};
    DiffPoly replaced(1L);
    bool zero = false;
    for (const auto& f : t.powers.factors) {
      if (auto v = rules.lookup(f.symbol)) {
        if (v->is_zero()) {
          zero = true;
          break;
        }
        replaced *= power_of(f.symbol, *v, f.exponent);
      } else {
        kept.powers.factors.push_back(f);
      }
    }
    if (zero) continue;
    if (rules.k_rule() && t.powers.k_power > 0) {
      const int e = t.powers.k_power;
      auto it = k_cache.find(e);
      if (it == k_cache.end()) it = k_cache.emplace(e, pow(*rules.k_rule(), e)).first;
      replaced *= it->second;
    } else {
      kept.powers.k_power = t.powers.k_power;
    }
    if (replaced.size() == 1 && replaced.terms().front().powers.degree() == 0) {
      kept.coefficient *= replaced.terms().front().coefficient;
      expanded.push_back(std::move(kept));
    } else {
      for (const auto& r : replaced.terms())
        expanded.push_back({kept.coefficient * r.coefficient, kept.powers * r.powers});
    }
  }
  return normalize(std::move(expanded));
}

Rational content(const DiffPoly& p) {
  if (p.is_zero()) return 0;
  mpz_class num = 0;
  mpz_class den = 1;
  for (const auto& t : p.terms()) {
    mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), t.coefficient.get_num_mpz_t());
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), t.coefficient.get_den_mpz_t());
  }
  Rational c(num, den);
  c.canonicalize();
  return c;
}

DiffPoly primitive_part(const DiffPoly& p) {
  if (p.is_zero()) return p;
  Rational c = content(p);
  if (p.leading().coefficient < 0) c = -c;
  return p * Rational(1 / c);
}

double evaluate(const DiffPoly& p, const std::function<double(CurvatureSymbol)>& value, double k_value) {
  std::map<CurvatureSymbol, double> cache;
  double sum = 0.0;
  for (const auto& t : p.terms()) {
    double term = t.coefficient.get_d();
    for (const auto& f : t.powers.factors) {
      auto it = cache.find(f.symbol);
      if (it == cache.end()) it = cache.emplace(f.symbol, value(f.symbol)).first;
      term *= std::pow(it->second, f.exponent);
    }
    if (t.powers.k_power > 0) term *= std::pow(k_value, t.powers.k_power);
    sum += term;
  }
  return sum;
}

}  // namespace kharmonic
