#include "kharmonic/geometry.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <string>

namespace kharmonic {

const char* to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::sphere:
      return "sphere";
    case SpaceKind::euclidean:
      return "euclidean";
    case SpaceKind::hyperbolic:
      return "hyperbolic";
  }
  return "euclidean";
}

double ModelSpace::inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  double s = a.dot(b);
  if (kind == SpaceKind::hyperbolic) s -= 2.0 * a[0] * b[0];
  return s;
}

double ModelSpace::norm(const Eigen::VectorXd& v) const { return std::sqrt(std::abs(inner(v, v))); }

ModelSpace make_model_space(double K, int n) {
  if (n < 2) throw std::invalid_argument("model space dimension must be >= 2, got " + std::to_string(n));
  if (!std::isfinite(K)) throw std::invalid_argument("curvature K must be finite");
  ModelSpace s;
  s.K = K;
  s.dim = n;
  if (K > 0) {
    s.kind = SpaceKind::sphere;
    s.ambient_dim = n + 1;
  } else if (K < 0) {
    s.kind = SpaceKind::hyperbolic;
    s.ambient_dim = n + 1;
  } else {
    s.kind = SpaceKind::euclidean;
    s.ambient_dim = n;
  }
  return s;
}

CurveState initial_state(const ModelSpace& space) {
  CurveState s;
  s.p = Eigen::VectorXd::Zero(space.ambient_dim);
  s.frame = Eigen::MatrixXd::Zero(space.ambient_dim, space.dim);
  switch (space.kind) {
    case SpaceKind::sphere:
      s.p[space.dim] = 1.0 / std::sqrt(space.K);
      for (int i = 0; i < space.dim; ++i) s.frame(i, i) = 1.0;
      break;
    case SpaceKind::hyperbolic:
      s.p[0] = 1.0 / std::sqrt(-space.K);
      for (int i = 0; i < space.dim; ++i) s.frame(i + 1, i) = 1.0;
      break;
    case SpaceKind::euclidean:
      s.frame.setIdentity();
      break;
  }
  return s;
}

double state_drift(const ModelSpace& space, const CurveState& s) {
  double frame_dev = 0.0;
  for (int i = 0; i < space.dim; ++i) {
    for (int j = i; j < space.dim; ++j) {
      const double g = space.inner(s.frame.col(i), s.frame.col(j));
      frame_dev = std::max(frame_dev, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  if (space.kind == SpaceKind::euclidean) return frame_dev;
  double tangency = 0.0;
  for (int i = 0; i < space.dim; ++i) tangency = std::max(tangency, std::abs(space.inner(s.p, s.frame.col(i))));
  return frame_dev + std::abs(space.inner(s.p, s.p) - 1.0 / space.K) + tangency;
}

void reorthonormalize(const ModelSpace& space, CurveState& s) {
  if (space.kind != SpaceKind::euclidean) {
    const double pp = space.inner(s.p, s.p);
    s.p *= std::sqrt((1.0 / space.K) / pp);
  }
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < space.dim; ++i) {
      Eigen::VectorXd e = s.frame.col(i);
      if (space.kind != SpaceKind::euclidean) e -= (space.inner(e, s.p) * space.K) * s.p;
      for (int j = 0; j < i; ++j) {
        const Eigen::VectorXd ej = s.frame.col(j);
        e -= space.inner(e, ej) * ej;
      }
      s.frame.col(i) = e / space.norm(e);
    }
  }
}

ConstraintViolation::ConstraintViolation(double last_good_t, double drift)
    : std::runtime_error("constraint drift " + std::to_string(drift) + " exceeds the hard limit; last good t = " +
                         std::to_string(last_good_t)),
      last_good_t_(last_good_t),
      drift_(drift) {}

namespace {

// Columns: p, e_1, ..., e_n.
using Block = Eigen::MatrixXd;

Block frenet_rhs(const ModelSpace& space, const CurvatureProfile& profile, double t, const Block& y) {
  const int n = space.dim;
  Block dy(y.rows(), y.cols());
  dy.col(0) = y.col(1);
  for (int i = 1; i <= n; ++i) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(y.rows());
    if (i > 1) d -= profile.value(i - 1, t) * y.col(i - 1);
    if (i < n) d += profile.value(i, t) * y.col(i + 1);
    if (i == 1 && space.K != 0.0) d -= space.K * y.col(0);
    dy.col(i) = d;
  }
  return dy;
}

Block pack(const CurveState& s) {
  Block y(s.p.size(), s.frame.cols() + 1);
  y.col(0) = s.p;
  y.rightCols(s.frame.cols()) = s.frame;
  return y;
}

CurveState unpack(const Block& y, double t) {
  return CurveState{t, y.col(0), y.rightCols(y.cols() - 1)};
}

}  // namespace

CurveTrace integrate_frenet(const ModelSpace& space, const CurvatureProfile& profile, const CurveState& init,
                            double t_end, double h, const IntegratorSettings& settings) {
  if (!(h > 0) || !std::isfinite(h)) throw std::invalid_argument("step h must be > 0");
  if (!(t_end > 0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be > 0");
  if (init.p.size() != space.ambient_dim || init.frame.rows() != space.ambient_dim || init.frame.cols() != space.dim) {
    throw std::invalid_argument("initial state does not match the model space dimensions");
  }
  if (const double d = state_drift(space, init); d > 1e-12) {
    throw std::invalid_argument("initial state violates the model-space constraints (drift " + std::to_string(d) + ")");
  }

  const long steps = std::max(1L, std::lround(t_end / h));
  const double dt = t_end / static_cast<double>(steps);

  CurveTrace trace;
  trace.space = space;
  trace.profile = profile;
  trace.step = dt;
  trace.reorthonormalize_every = settings.reorthonormalize_every;
  trace.states.reserve(static_cast<std::size_t>(steps + 1));
  trace.states.push_back(init);
  trace.max_drift = state_drift(space, init);

  const double t0 = init.t;
  Block y = pack(init);
  for (long k = 1; k <= steps; ++k) {
    const double t = t0 + static_cast<double>(k - 1) * dt;
    const Block k1 = frenet_rhs(space, profile, t, y);
    const Block k2 = frenet_rhs(space, profile, t + dt / 2, y + (dt / 2) * k1);
    const Block k3 = frenet_rhs(space, profile, t + dt / 2, y + (dt / 2) * k2);
    const Block k4 = frenet_rhs(space, profile, t + dt, y + dt * k3);
    y += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);

    CurveState s = unpack(y, t0 + static_cast<double>(k) * dt);
    const double drift = state_drift(space, s);
    if (!(drift <= settings.hard_limit)) throw ConstraintViolation(trace.states.back().t, drift);
    trace.max_drift = std::max(trace.max_drift, drift);
    if (settings.reorthonormalize_every > 0 && k % settings.reorthonormalize_every == 0) {
      reorthonormalize(space, s);
      y = pack(s);
    }
    trace.states.push_back(std::move(s));
  }
  return trace;
}

Eigen::VectorXd evaluate_frame_field(const FrameField& v, const CurvatureProfile& profile, const ModelSpace& space,
                                     const CurveState& state) {
  if (v.dim() != space.dim) {
    throw std::invalid_argument("frame field dimension " + std::to_string(v.dim()) + " does not match space dimension " +
                                std::to_string(space.dim));
  }
  int needed = -1;
  for (const auto& c : v.coeffs()) needed = std::max(needed, c.max_order());
  profile.require_order(needed);

  const auto value = [&](CurvatureSymbol s) { return profile.value(s, state.t); };
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.ambient_dim);
  for (int i = 1; i <= v.dim(); ++i) {
    if (v[i].is_zero()) continue;
    out += evaluate(v[i], value, space.K) * state.frame.col(i - 1);
  }
  return out;
}

Eigen::VectorXd numeric_covariant_derivative(const CurveTrace& trace, const std::vector<Eigen::VectorXd>& samples,
                                             std::size_t i, double h) {
  if (samples.size() != trace.states.size()) throw std::invalid_argument("samples must align with the trace");
  if (i == 0 || i + 1 >= samples.size()) {
    throw std::out_of_range("central difference needs an interior index, got " + std::to_string(i));
  }
  const CurveState& s = trace.states[i];
  Eigen::VectorXd d = (samples[i + 1] - samples[i - 1]) / (2.0 * h);
  if (trace.space.K != 0.0) d += trace.space.K * trace.space.inner(s.frame.col(0), samples[i]) * s.p;
  return d;
}

double residual_at(const CurveTrace& trace, const FrameField& tau, std::size_t i) {
  return trace.space.norm(evaluate_frame_field(tau, trace.profile, trace.space, trace.states.at(i)));
}

std::vector<double> numeric_residual(const CurveTrace& trace, int k) {
  const FrameField tau = tau_k(k, trace.space.dim);
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < trace.states.size(); ++i) out.push_back(residual_at(trace, tau, i));
  return out;
}

double orthonormality_drift(const CurveTrace& trace) {
  double d = 0.0;
  for (const auto& s : trace.states) d = std::max(d, state_drift(trace.space, s));
  return d;
}

double closure_error(const CurveTrace& trace) {
  if (trace.states.empty()) return 0.0;
  return (trace.states.back().p - trace.states.front().p).norm();
}

void write_trace_csv(std::ostream& out, const CurveTrace& trace, const std::vector<int>& residual_ks) {
  const int a = trace.space.ambient_dim;
  const int n = trace.space.dim;
  out << "t";
  for (int j = 0; j < a; ++j) out << ",p" << j;
  for (int i = 1; i <= n; ++i)
    for (int j = 0; j < a; ++j) out << ",e" << i << "_" << j;
  for (int k : residual_ks) out << ",res_k" << k;
  out << "\n";

  std::map<int, FrameField> taus;
  for (int k : residual_ks) taus.emplace(k, tau_k(k, n));

  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  for (std::size_t s = 0; s < trace.states.size(); ++s) {
    const CurveState& st = trace.states[s];
    out << st.t;
    for (int j = 0; j < a; ++j) out << "," << st.p[j];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < a; ++j) out << "," << st.frame(j, i);
    for (int k : residual_ks) out << "," << residual_at(trace, taus.at(k), s);
    out << "\n";
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

}  // namespace kharmonic
