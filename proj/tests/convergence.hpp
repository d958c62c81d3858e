#pragma once

#include <cmath>
#include <vector>

#include "kharmonic/frenet.hpp"
#include "kharmonic/geometry.hpp"

namespace kharmonic::testing {

/// Applies the numeric nabla twice to samples of `field` and compares with the
/// evaluated symbolic (nabla nabla) field at the probe times. Returns the max error.
inline double second_derivative_fd_error(const ModelSpace& space, const CurvatureProfile& profile,
                                         const FrameField& field, double h, const std::vector<double>& probes,
                                         double t_end = 1.0) {
  const CurveTrace trace = integrate_frenet(space, profile, initial_state(space), t_end, h);
  const double dt = trace.step;
  std::vector<Eigen::VectorXd> y;
  y.reserve(trace.states.size());
  for (const auto& s : trace.states) y.push_back(evaluate_frame_field(field, profile, space, s));

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(space.ambient_dim);
  std::vector<Eigen::VectorXd> dy(y.size(), zero);
  for (std::size_t i = 1; i + 1 < y.size(); ++i) dy[i] = numeric_covariant_derivative(trace, y, i, dt);

  const FrameField target = second_derivative_power(field, 1);
  double err = 0.0;
  for (double t : probes) {
    const auto i = static_cast<std::size_t>(std::lround(t / dt));
    const Eigen::VectorXd numeric = numeric_covariant_derivative(trace, dy, i, dt);
    const Eigen::VectorXd symbolic = evaluate_frame_field(target, profile, space, trace.states[i]);
    err = std::max(err, (numeric - symbolic).norm());
  }
  return err;
}

/// Observed orders log2(e(h)/e(h/2)) over the step sequence.
inline std::vector<double> observed_orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 1; i < errors.size(); ++i) out.push_back(std::log2(errors[i - 1] / errors[i]));
  return out;
}

/// Slowly varying analytic test profiles.
inline CurvatureProfile s2_test_profile() {
  CurvatureProfile p;
  p.set(1, CurvatureFunction::sinusoid(1.0, 0.3, 1.0, 0.2));
  return p;
}

inline CurvatureProfile s3_test_profile() {
  CurvatureProfile p;
  p.set(1, CurvatureFunction::polynomial({0.8, 0.2, -0.05}));
  p.set(2, CurvatureFunction::sinusoid(0.5, 0.25, 1.3, 0.0));
  return p;
}

}  // namespace kharmonic::testing
