#pragma once

// Curvature profiles kappa_i(t) with arclength derivatives.
//
// Config format (one entry per line, '#' comments):
//   k1 = constant value=1
//   k2 = polynomial coeffs=0.5,0.1,-0.02      # c0 + c1 t + c2 t^2
//   k3 = sinusoid offset=1 amplitude=0.2 frequency=1 phase=0
//   derivatives = analytic | central           # default analytic
//   fd_max_order = 4                           # central differences only
//   fd_step = 1e-2
// Curvatures not listed are identically zero.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kharmonic/diffpoly.hpp"

namespace kharmonic {

class MissingDerivative : public std::runtime_error {
 public:
  MissingDerivative(int index, int required_order, int available_order);
  int index() const { return index_; }
  int required_order() const { return required_; }
  int available_order() const { return available_; }

 private:
  int index_;
  int required_;
  int available_;
};

class CurvatureFunction {
 public:
  enum class Kind { constant, polynomial, sinusoid };

  static CurvatureFunction constant(double value);
  /// coeffs[j] multiplies t^j.
  static CurvatureFunction polynomial(std::vector<double> coeffs);
  /// offset + amplitude * sin(frequency * t + phase)
  static CurvatureFunction sinusoid(double offset, double amplitude, double frequency, double phase);

  Kind kind() const { return kind_; }
  /// Exact order-th derivative at t.
  double derivative(int order, double t) const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::constant;
  std::vector<double> params_;
};

enum class DerivativeMode { analytic, central_difference };

class CurvatureProfile {
 public:
  CurvatureProfile() = default;
  explicit CurvatureProfile(std::vector<CurvatureFunction> kappas) : kappas_(std::move(kappas)) {}

  /// Sets kappa_index (1-based), growing the list with zero constants as needed.
  void set(int index, CurvatureFunction f);
  int count() const { return static_cast<int>(kappas_.size()); }

  void use_central_differences(int max_order, double step);
  void set_derivative_mode(DerivativeMode m) { mode_ = m; }
  void set_fd_max_order(int max_order);
  void set_fd_step(double step);
  DerivativeMode mode() const { return mode_; }
  /// Highest derivative order the profile can supply (large for analytic profiles).
  int max_available_order() const;

  /// kappa_index^(order)(t). Throws MissingDerivative beyond max_available_order().
  double value(CurvatureSymbol s, double t) const;
  double value(int index, double t) const { return value(CurvatureSymbol{index, 0}, t); }

  /// Throws MissingDerivative when order exceeds the available order.
  void require_order(int order) const;

 private:
  std::vector<CurvatureFunction> kappas_;
  DerivativeMode mode_ = DerivativeMode::analytic;
  int fd_max_order_ = 4;
  double fd_step_ = 1e-2;
};

/// Parses "constant value=1" style specifications. Throws std::invalid_argument.
CurvatureFunction parse_curvature_function(std::string_view spec);
/// Applies one "key = value" config line to the profile.
void apply_profile_line(CurvatureProfile& profile, std::string_view line);
CurvatureProfile parse_profile_config(std::string_view text);

}  // namespace kharmonic
