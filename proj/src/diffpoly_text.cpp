#include <cctype>
#include <sstream>

#include "kharmonic/diffpoly.hpp"

namespace kharmonic {

namespace {

void append_factor(std::string& out, const Factor& f) {
  out += 'k';
  out += std::to_string(f.symbol.index);
  if (f.symbol.order > 0) {
    out += ".d";
    out += std::to_string(f.symbol.order);
  }
  if (f.exponent != 1) {
    out += '^';
    out += std::to_string(f.exponent);
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  DiffPoly parse() {
    skip_ws();
    if (at_end()) fail("empty input");
    std::vector<Monomial> terms;
    bool first = true;
    while (true) {
      skip_ws();
      if (at_end()) break;
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      terms.push_back(parse_term());
      if (sign < 0) terms.back().coefficient = -terms.back().coefficient;
      first = false;
    }
    return normalize(std::move(terms));
  }

 private:
  Monomial parse_term() {
    Monomial m{1, {}};
    bool need_factor = true;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      mpz_class num(read_digits());
      mpz_class den = 1;
      skip_ws();
      if (peek() == '/') {
        ++pos_;
        skip_ws();
        den = mpz_class(read_digits());
        if (den == 0) fail("zero denominator");
      }
      m.coefficient = Rational(num, den);
      m.coefficient.canonicalize();
      skip_ws();
      if (peek() != '*') return m;
      ++pos_;
    }
    while (need_factor) {
      skip_ws();
      parse_factor(m);
      skip_ws();
      need_factor = peek() == '*';
      if (need_factor) ++pos_;
    }
    return m;
  }

  void parse_factor(Monomial& m) {
    const char c = peek();
    if (c == 'K') {
      ++pos_;
      m.powers.k_power += read_exponent();
    } else if (c == 'k') {
      ++pos_;
      const int index = std::stoi(read_digits());
      int order = 0;
      if (peek() == '.') {
        ++pos_;
        if (peek() != 'd') fail("expected 'd' after '.'");
        ++pos_;
        order = std::stoi(read_digits());
      }
      if (index < 1) fail("curvature index must be >= 1");
      m.powers.factors.push_back({{index, order}, read_exponent()});
    } else {
      fail("expected a factor ('k<i>' or 'K')");
    }
  }

  int read_exponent() {
    skip_ws();
    if (peek() != '^') return 1;
    ++pos_;
    skip_ws();
    const int e = std::stoi(read_digits());
    if (e < 1) fail("exponent must be positive");
    return e;
  }

  std::string read_digits() {
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected digits");
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "diffpoly parse error at offset " << pos_ << ": " << what << " in \"" << text_ << "\"";
    throw ParseError(os.str());
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_text(const PowerProduct& m) {
  std::string out;
  for (const auto& f : m.factors) {
    if (!out.empty()) out += '*';
    append_factor(out, f);
  }
  if (m.k_power > 0) {
    if (!out.empty()) out += '*';
    out += 'K';
    if (m.k_power != 1) out += '^' + std::to_string(m.k_power);
  }
  return out.empty() ? "1" : out;
}

std::string to_text(const DiffPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : p.terms()) {
    Rational c = t.coefficient;
    if (first) {
      if (c < 0) out += '-';
    } else {
      out += c < 0 ? " - " : " + ";
    }
    c = abs(c);
    const bool constant = t.powers.degree() == 0;
    if (constant) {
      out += c.get_str();
    } else {
      if (c != 1) out += c.get_str() + "*";
      out += to_text(t.powers);
    }
    first = false;
  }
  return out;
}

DiffPoly parse_diffpoly(std::string_view text) {
  std::string_view trimmed = text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.remove_suffix(1);
  if (trimmed == "0") return {};
  return Parser(text).parse();
}

}  // namespace kharmonic
