#include "kharmonic/profile.hpp"

#include <charconv>
#include <climits>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace kharmonic {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid number for " + what + ": '" + s + "'");
  }
}

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

MissingDerivative::MissingDerivative(int index, int required_order, int available_order)
    : std::runtime_error("curvature profile cannot supply derivative order " + std::to_string(required_order) +
                         (index > 0 ? " of k" + std::to_string(index) : std::string()) + " (available up to order " +
                         std::to_string(available_order) + ")"),
      index_(index),
      required_(required_order),
      available_(available_order) {}

CurvatureFunction CurvatureFunction::constant(double value) {
  CurvatureFunction f;
  f.kind_ = Kind::constant;
  f.params_ = {value};
  return f;
}

CurvatureFunction CurvatureFunction::polynomial(std::vector<double> coeffs) {
  CurvatureFunction f;
  f.kind_ = Kind::polynomial;
  f.params_ = std::move(coeffs);
  if (f.params_.empty()) f.params_ = {0.0};
  return f;
}

CurvatureFunction CurvatureFunction::sinusoid(double offset, double amplitude, double frequency, double phase) {
  CurvatureFunction f;
  f.kind_ = Kind::sinusoid;
  f.params_ = {offset, amplitude, frequency, phase};
  return f;
}

double CurvatureFunction::derivative(int order, double t) const {
  switch (kind_) {
    case Kind::constant:
      return order == 0 ? params_[0] : 0.0;
    case Kind::polynomial: {
      // Horner on the order-th derivative's coefficients.
      double sum = 0;
      for (int j = static_cast<int>(params_.size()) - 1; j >= order; --j) {
        double falling = 1;
        for (int q = 0; q < order; ++q) falling *= j - q;
        sum = sum * t + falling * params_[static_cast<std::size_t>(j)];
      }
      return sum;
    }
    case Kind::sinusoid: {
      const double offset = params_[0];
      const double amp = params_[1];
      const double w = params_[2];
      const double phase = params_[3];
      const double v = amp * std::pow(w, order) * std::sin(w * t + phase + order * std::numbers::pi / 2);
      return order == 0 ? offset + v : v;
    }
  }
  return 0.0;
}

std::string CurvatureFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::constant:
      os << "constant value=" << params_[0];
      break;
    case Kind::polynomial: {
      os << "polynomial coeffs=";
      for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? "," : "") << params_[i];
      break;
    }
    case Kind::sinusoid:
      os << "sinusoid offset=" << params_[0] << " amplitude=" << params_[1] << " frequency=" << params_[2]
         << " phase=" << params_[3];
      break;
  }
  return os.str();
}

void CurvatureProfile::set(int index, CurvatureFunction f) {
  if (index < 1) throw std::invalid_argument("curvature index must be >= 1");
  if (static_cast<int>(kappas_.size()) < index) {
    kappas_.resize(static_cast<std::size_t>(index), CurvatureFunction::constant(0.0));
  }
  kappas_[static_cast<std::size_t>(index - 1)] = std::move(f);
}

void CurvatureProfile::use_central_differences(int max_order, double step) {
  set_fd_max_order(max_order);
  set_fd_step(step);
  mode_ = DerivativeMode::central_difference;
}

void CurvatureProfile::set_fd_max_order(int max_order) {
  if (max_order < 0) throw std::invalid_argument("fd_max_order must be >= 0");
  fd_max_order_ = max_order;
}

void CurvatureProfile::set_fd_step(double step) {
  if (!(step > 0)) throw std::invalid_argument("fd_step must be > 0");
  fd_step_ = step;
}

int CurvatureProfile::max_available_order() const {
  return mode_ == DerivativeMode::analytic ? INT_MAX : fd_max_order_;
}

void CurvatureProfile::require_order(int order) const {
  if (order > max_available_order()) throw MissingDerivative(0, order, max_available_order());
}

double CurvatureProfile::value(CurvatureSymbol s, double t) const {
  if (s.order > max_available_order()) throw MissingDerivative(s.index, s.order, max_available_order());
  if (s.index < 1 || s.index > count()) return 0.0;
  const CurvatureFunction& f = kappas_[static_cast<std::size_t>(s.index - 1)];
  if (mode_ == DerivativeMode::analytic || s.order == 0) return f.derivative(s.order, t);
  // Central difference of order m on a stencil of spacing h, error O(h^2).
  const int m = s.order;
  const double h = fd_step_;
  double sum = 0;
  for (int j = 0; j <= m; ++j) {
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    sum += sign * binomial(m, j) * f.derivative(0, t + (m / 2.0 - j) * h);
  }
  return sum / std::pow(h, m);
}

CurvatureFunction parse_curvature_function(std::string_view spec) {
  std::istringstream in{std::string(spec)};
  std::string kind;
  in >> kind;
  std::map<std::string, std::string> params;
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("expected name=value, got '" + token + "'");
    params[token.substr(0, eq)] = token.substr(eq + 1);
  }
  auto take = [&](const std::string& name, std::optional<double> fallback) {
    auto it = params.find(name);
    if (it == params.end()) {
      if (!fallback) throw std::invalid_argument(kind + " profile requires parameter '" + name + "'");
      return *fallback;
    }
    const double v = parse_double(it->second, name);
    params.erase(it);
    return v;
  };
  CurvatureFunction f = CurvatureFunction::constant(0);
  if (kind == "constant") {
    f = CurvatureFunction::constant(take("value", std::nullopt));
  } else if (kind == "polynomial") {
    auto it = params.find("coeffs");
    if (it == params.end()) throw std::invalid_argument("polynomial profile requires parameter 'coeffs'");
    std::vector<double> coeffs;
    std::istringstream list(it->second);
    std::string c;
    while (std::getline(list, c, ',')) coeffs.push_back(parse_double(trim(c), "coeffs"));
    params.erase(it);
    f = CurvatureFunction::polynomial(std::move(coeffs));
  } else if (kind == "sinusoid") {
    const double offset = take("offset", 0.0);
    const double amplitude = take("amplitude", std::nullopt);
    const double frequency = take("frequency", 1.0);
    const double phase = take("phase", 0.0);
    f = CurvatureFunction::sinusoid(offset, amplitude, frequency, phase);
  } else {
    throw std::invalid_argument("unknown profile kind '" + kind + "' (expected constant, polynomial, sinusoid)");
  }
  if (!params.empty()) throw std::invalid_argument("unknown parameter '" + params.begin()->first + "' for " + kind);
  return f;
}

void apply_profile_line(CurvatureProfile& profile, std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw std::invalid_argument("expected key = value, got '" + std::string(line) + "'");
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (key.size() > 1 && key[0] == 'k') {
    int index = 0;
    auto [ptr, ec] = std::from_chars(key.data() + 1, key.data() + key.size(), index);
    if (ec != std::errc{} || ptr != key.data() + key.size() || index < 1) {
      throw std::invalid_argument("bad curvature key '" + key + "'");
    }
    profile.set(index, parse_curvature_function(value));
  } else if (key == "derivatives") {
    if (value == "analytic") {
      profile.set_derivative_mode(DerivativeMode::analytic);
    } else if (value == "central") {
      profile.set_derivative_mode(DerivativeMode::central_difference);
    } else {
      throw std::invalid_argument("derivatives must be 'analytic' or 'central'");
    }
  } else if (key == "fd_max_order") {
    const double v = parse_double(value, key);
    if (v != std::floor(v)) throw std::invalid_argument("fd_max_order must be an integer");
    profile.set_fd_max_order(static_cast<int>(v));
  } else if (key == "fd_step") {
    profile.set_fd_step(parse_double(value, key));
  } else {
    throw std::invalid_argument("unknown profile key '" + key + "'");
  }
}

CurvatureProfile parse_profile_config(std::string_view text) {
  CurvatureProfile profile;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    try {
      apply_profile_line(profile, line);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("profile line " + std::to_string(n) + ": " + e.what());
    }
  }
  return profile;
}

}  // namespace kharmonic
