#pragma once

// Numerical realization of curves in the constant-curvature model spaces:
// sphere and hyperboloid (Lorentzian form) in R^{n+1}, and Euclidean R^n.
// Curves are integrated in ambient coordinates using the Gauss formula
//   D_X Y = nabla_X Y - K <X, Y> p,
// which holds for all three spaces (the correction vanishes when K = 0).

#include <Eigen/Dense>

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "kharmonic/frenet.hpp"
#include "kharmonic/profile.hpp"

namespace kharmonic {

enum class SpaceKind { sphere, euclidean, hyperbolic };
const char* to_string(SpaceKind kind);

struct ModelSpace {
  SpaceKind kind = SpaceKind::euclidean;
  double K = 0.0;
  int dim = 2;
  int ambient_dim = 2;

  /// Ambient bilinear form; Lorentzian (-,+,...,+) for the hyperboloid.
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  /// sqrt(|<v, v>|).
  double norm(const Eigen::VectorXd& v) const;
};

ModelSpace make_model_space(double K, int n);

/// Position and Frenet frame; frame column i-1 holds e_i.
struct CurveState {
  double t = 0.0;
  Eigen::VectorXd p;
  Eigen::MatrixXd frame;
};

/// The standard starting state: sphere p = r e_{n+1}, hyperboloid p = r e_0
/// (timelike-positive sheet), Euclidean p = 0; frame along the remaining axes.
CurveState initial_state(const ModelSpace& space);

/// max_ij |<e_i,e_j> - delta_ij| + |<p,p> - 1/K| + max_i |<p,e_i>| (the last two
/// only for sphere and hyperboloid).
double state_drift(const ModelSpace& space, const CurveState& s);

/// Projects p back onto the model space and re-orthonormalizes the frame
/// (tangential projection followed by two passes of modified Gram-Schmidt).
void reorthonormalize(const ModelSpace& space, CurveState& s);

struct IntegratorSettings {
  /// Re-orthonormalize every this many steps; 0 disables.
  int reorthonormalize_every = 100;
  /// Abort when the drift of any state exceeds this.
  double hard_limit = 1e-6;
};

struct CurveTrace {
  ModelSpace space;
  CurvatureProfile profile;
  std::vector<CurveState> states;
  /// Actual uniform step, t_end / round(t_end / h).
  double step = 0.0;
  int reorthonormalize_every = 0;
  /// Largest drift seen, measured before any correction.
  double max_drift = 0.0;
};

class ConstraintViolation : public std::runtime_error {
 public:
  ConstraintViolation(double last_good_t, double drift);
  double last_good_t() const { return last_good_t_; }
  double drift() const { return drift_; }

 private:
  double last_good_t_;
  double drift_;
};

/// Classical fixed-step RK4 on p' = e_1, e_1' = kappa_1 e_2 - K p,
/// e_i' = -kappa_{i-1} e_{i-1} + kappa_i e_{i+1}.
CurveTrace integrate_frenet(const ModelSpace& space, const CurvatureProfile& profile, const CurveState& init,
                            double t_end, double h, const IntegratorSettings& settings = {});

/// sum_i c_i(t) e_i with the coefficients evaluated from the profile.
Eigen::VectorXd evaluate_frame_field(const FrameField& v, const CurvatureProfile& profile, const ModelSpace& space,
                                     const CurveState& state);

/// Central-difference nabla_{gamma'} Y at sample i: (Y_{i+1} - Y_{i-1}) / 2h + K <e_1, Y_i> p_i.
Eigen::VectorXd numeric_covariant_derivative(const CurveTrace& trace, const std::vector<Eigen::VectorXd>& samples,
                                             std::size_t i, double h);

/// |tau_k| at sample i (any sample).
double residual_at(const CurveTrace& trace, const FrameField& tau, std::size_t i);

/// |tau_k| at every interior sample.
std::vector<double> numeric_residual(const CurveTrace& trace, int k);

/// Maximum state_drift over the trace.
double orthonormality_drift(const CurveTrace& trace);

/// Euclidean distance between the first and last positions.
double closure_error(const CurveTrace& trace);

/// Columns: t, p0..p{A-1}, e1_0..e1_{A-1}, ..., en_{A-1}, then res_k<k> per requested k.
void write_trace_csv(std::ostream& out, const CurveTrace& trace, const std::vector<int>& residual_ks = {});

}  // namespace kharmonic
