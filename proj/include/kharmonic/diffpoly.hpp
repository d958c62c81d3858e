#pragma once

// Exact differential polynomials in the Frenet curvatures kappa_i^(m) and the
// sectional-curvature constant K, with rational coefficients.
//
// Monomial order: graded lexicographic. Total degree (curvature exponents plus
// the exponent of K) is compared first; ties are broken by comparing exponent
// vectors over the variable sequence kappa_1, kappa_1', kappa_1'', ...,
// kappa_2, kappa_2', ..., K, where the first differing exponent decides (the
// larger exponent is the larger monomial). Terms are stored in descending order.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kharmonic {

using Rational = mpq_class;

/// kappa_index^(order): the order-th arclength derivative of the index-th curvature.
struct CurvatureSymbol {
  int index = 1;
  int order = 0;

  friend auto operator<=>(const CurvatureSymbol&, const CurvatureSymbol&) = default;
};

/// Validating constructor; index >= 1, order >= 0.
CurvatureSymbol kappa_symbol(int index, int order = 0);

struct Factor {
  CurvatureSymbol symbol;
  int exponent = 1;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// The coefficient-free part of a monomial. Factors are sorted by symbol, exponents > 0.
struct PowerProduct {
  std::vector<Factor> factors;
  int k_power = 0;

  int degree() const;
  int exponent_of(CurvatureSymbol s) const;
  PowerProduct operator*(const PowerProduct& other) const;

  friend bool operator==(const PowerProduct&, const PowerProduct&) = default;
};

/// Graded lexicographic comparison; returns <0, 0, >0.
int compare(const PowerProduct& a, const PowerProduct& b);

struct Monomial {
  Rational coefficient;
  PowerProduct powers;

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.coefficient == b.coefficient && a.powers == b.powers;
  }
};

class DiffPoly;

/// Sorts, merges like terms, drops zero coefficients and zero exponents.
/// Content is left untouched.
DiffPoly normalize(std::vector<Monomial> terms);

class DiffPoly {
 public:
  DiffPoly() = default;
  DiffPoly(long constant);  // NOLINT(google-explicit-constructor)
  explicit DiffPoly(const Rational& constant);

  static DiffPoly symbol(CurvatureSymbol s, int exponent = 1);
  static DiffPoly kappa(int index, int order = 0) { return symbol(kappa_symbol(index, order)); }
  static DiffPoly curvature_constant(int exponent = 1);

  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Leading (largest) term; precondition: nonzero.
  const Monomial& leading() const;

  /// Largest curvature index and derivative order appearing (0 / -1 when absent).
  int max_index() const;
  int max_order() const;
  std::set<CurvatureSymbol> symbols() const;
  bool contains_k() const;

  DiffPoly operator-() const;
  DiffPoly& operator+=(const DiffPoly& other);
  DiffPoly& operator-=(const DiffPoly& other);
  DiffPoly& operator*=(const DiffPoly& other);
  DiffPoly& operator*=(const Rational& scalar);

  friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
  friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
  friend DiffPoly operator*(DiffPoly a, const Rational& s) { return a *= s; }
  friend DiffPoly operator*(const Rational& s, DiffPoly a) { return a *= s; }

  friend bool operator==(const DiffPoly& a, const DiffPoly& b) { return a.terms_ == b.terms_; }

 private:
  friend DiffPoly normalize(std::vector<Monomial> terms);
  std::vector<Monomial> terms_;
};

DiffPoly pow(const DiffPoly& base, int exponent);

/// Formal arclength derivative: kappa_i^(m) -> kappa_i^(m+1), K' = 0.
DiffPoly differentiate(const DiffPoly& p);
DiffPoly differentiate(const DiffPoly& p, int times);

/// Rule set for simultaneous substitution. Besides explicit rules for single
/// symbols (and for K) it supports two rule families used for constraint
/// handling: "kappa_i is constant" (every order >= 1 maps to 0) and
/// "kappa_i vanishes identically" (every order maps to 0).
class SubstitutionRules {
 public:
  /// Throws std::invalid_argument when the symbol already has a rule, or
  /// when a family already covers it with a different value.
  SubstitutionRules& set(CurvatureSymbol s, DiffPoly value);
  SubstitutionRules& set_k(DiffPoly value);
  SubstitutionRules& make_constant(int index);
  SubstitutionRules& make_zero(int index);

  /// Rule for s, if any (explicit rules win over the families they agree with).
  std::optional<DiffPoly> lookup(CurvatureSymbol s) const;
  const std::optional<DiffPoly>& k_rule() const { return k_rule_; }
  bool empty() const;

 private:
  void check_family_conflict(int index, bool all_orders) const;

  std::map<CurvatureSymbol, DiffPoly> explicit_;
  std::optional<DiffPoly> k_rule_;
  std::set<int> constant_;
  std::set<int> zero_;
};

DiffPoly substitute(const DiffPoly& p, const SubstitutionRules& rules);

/// Rational content: positive gcd of numerators over lcm of denominators; 0 for the zero polynomial.
Rational content(const DiffPoly& p);
/// p / content(p), sign chosen so the leading coefficient is positive.
DiffPoly primitive_part(const DiffPoly& p);

/// Numeric evaluation. `value` supplies kappa_i^(m)(t).
double evaluate(const DiffPoly& p, const std::function<double(CurvatureSymbol)>& value, double k_value);

// Text form. Grammar (whitespace is insignificant):
//   poly    := "0" | ["+"|"-"] term (("+"|"-") term)*
//   term    := coeff | [coeff "*"] factor ("*" factor)*
//   coeff   := digits ["/" digits]
//   factor  := "K" ["^" digits] | "k" digits ["." "d" digits] ["^" digits]
// "k2.d3^2" is (kappa_2''')^2. Printing emits terms in descending order, omits
// unit coefficients and exponents equal to 1, and writes order-0 symbols as "k<i>".
std::string to_text(const DiffPoly& p);
std::string to_text(const PowerProduct& m);
DiffPoly parse_diffpoly(std::string_view text);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kharmonic
