#include <doctest.h>

#include <sstream>

#include "convergence.hpp"
#include "kharmonic/equations.hpp"
#include "kharmonic/reference_data.hpp"
#include "test_support.hpp"

using namespace kharmonic;
using namespace kharmonic::testing;

namespace {

CurvatureProfile constant_profile(std::vector<double> kappas) {
  CurvatureProfile p;
  for (std::size_t i = 0; i < kappas.size(); ++i) p.set(static_cast<int>(i) + 1, CurvatureFunction::constant(kappas[i]));
  return p;
}

CurveTrace run(double K, int n, const CurvatureProfile& profile, double t_end, double h,
               IntegratorSettings settings = {}) {
  const ModelSpace space = make_model_space(K, n);
  return integrate_frenet(space, profile, initial_state(space), t_end, h, settings);
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

TEST_CASE("model spaces") {
  const ModelSpace s = make_model_space(1.0, 2);
  CHECK(s.kind == SpaceKind::sphere);
  CHECK(s.ambient_dim == 3);
  const ModelSpace e = make_model_space(0.0, 3);
  CHECK(e.kind == SpaceKind::euclidean);
  CHECK(e.ambient_dim == 3);
  const ModelSpace h = make_model_space(-1.0, 2);
  CHECK(h.kind == SpaceKind::hyperbolic);
  CHECK(h.ambient_dim == 3);
  CHECK(h.inner(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(1, 0, 0)) == -1.0);
  CHECK(std::string(to_string(h.kind)) == "hyperbolic");
  CHECK_THROWS_AS(make_model_space(1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_model_space(std::nan(""), 2), std::invalid_argument);
}

TEST_CASE("initial states satisfy the constraints") {
  for (double K : {4.0, 1.0, 0.0, -1.0, -0.25}) {
    for (int n : {2, 3, 5}) {
      const ModelSpace space = make_model_space(K, n);
      const CurveState s = initial_state(space);
      CHECK(state_drift(space, s) <= 1e-15);
      if (K != 0.0) CHECK(space.inner(s.p, s.p) == doctest::Approx(1.0 / K));
      if (K < 0) CHECK(s.p[0] > 0);
    }
  }
}

TEST_CASE("great circle closes after 2 pi") {
  const CurveTrace tr = run(1.0, 2, constant_profile({0.0}), 2 * M_PI, 1e-3);
  CHECK(closure_error(tr) < 1e-9);
  CHECK(orthonormality_drift(tr) < 1e-9);
  // Strictly increasing, uniformly spaced.
  for (std::size_t i = 1; i < tr.states.size(); ++i) {
    REQUIRE(tr.states[i].t > tr.states[i - 1].t);
    REQUIRE(tr.states[i].t - tr.states[i - 1].t == doctest::Approx(tr.step).epsilon(1e-9));
  }
  CHECK(tr.states.back().t == doctest::Approx(2 * M_PI));
}

TEST_CASE("biharmonic small circle closes after pi sqrt 2") {
  const double length = M_PI * std::sqrt(2.0);
  const CurveTrace tr = run(1.0, 2, constant_profile({1.0}), length, 1e-3);
  CHECK(closure_error(tr) < 1e-6);
  // Halfway round the chord equals the circle's diameter 2 sin(pi/4).
  const CurveState& mid = tr.states[tr.states.size() / 2];
  CHECK((mid.p - tr.states.front().p).norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  for (int kk = 2; kk <= 6; ++kk) CHECK(max_of(numeric_residual(tr, kk)) < 1e-8);
}

TEST_CASE("hyperbolic horocycle stays on the hyperboloid") {
  const CurveTrace tr = run(-1.0, 2, constant_profile({1.0}), 5.0, 1e-3);
  for (const auto& s : tr.states) {
    REQUIRE(tr.space.inner(s.p, s.p) == doctest::Approx(-1.0).epsilon(1e-9));
    REQUIRE(s.p[0] > 0);
  }
  CHECK(orthonormality_drift(tr) < 1e-9);
  CHECK(closure_error(tr) > 1.0);
}

TEST_CASE("geodesics match the exact curves to integrator accuracy") {
  for (double h : {2e-2, 1e-2, 5e-3}) {
    const double t_end = 2 * M_PI;
    const CurveTrace sphere = run(1.0, 3, constant_profile({0.0, 0.0}), t_end, h);
    const CurveTrace flat = run(0.0, 3, constant_profile({0.0, 0.0}), t_end, h);
    double err_sphere = 0.0;
    double err_flat = 0.0;
    for (std::size_t i = 0; i < sphere.states.size(); ++i) {
      const double t = sphere.states[i].t;
      const Eigen::Vector4d exact(std::sin(t), 0.0, 0.0, std::cos(t));
      err_sphere = std::max(err_sphere, (sphere.states[i].p - exact).norm());
      const Eigen::Vector3d line(t, 0.0, 0.0);
      err_flat = std::max(err_flat, (flat.states[i].p - line).norm());
    }
    const double bound = std::pow(sphere.step, 4) * t_end;
    INFO("h=" << h);
    CHECK(err_sphere < bound);
    CHECK(err_flat < bound);
  }
}

TEST_CASE("step is adjusted to land on t_end") {
  IntegratorSettings coarse;
  coarse.hard_limit = 1e-3;
  const CurveTrace tr = run(1.0, 2, constant_profile({0.0}), 1.0, 0.3, coarse);
  CHECK(tr.states.size() == 4);
  CHECK(tr.step == doctest::Approx(1.0 / 3.0));
  CHECK(tr.states.back().t == doctest::Approx(1.0));
}

TEST_CASE("drift grows with the step size") {
  IntegratorSettings none;
  none.reorthonormalize_every = 0;
  none.hard_limit = 1.0;
  const CurvatureProfile curvy = s3_test_profile();
  double previous = 0.0;
  for (double h : {0.025, 0.05, 0.1}) {
    const double drift = run(1.0, 3, curvy, 10.0, h, none).max_drift;
    INFO("h=" << h << " drift=" << drift);
    CHECK(drift >= previous);
    previous = drift;
  }
  CHECK(previous > 0.0);
}

TEST_CASE("re-orthonormalization restores the constraints") {
  const ModelSpace space = make_model_space(-1.0, 3);
  CurveState s = initial_state(space);
  s.p *= 1.001;
  s.frame(1, 0) += 1e-3;
  s.frame(2, 1) -= 2e-3;
  CHECK(state_drift(space, s) > 1e-4);
  reorthonormalize(space, s);
  CHECK(state_drift(space, s) < 1e-14);
}

TEST_CASE("constraint violation aborts with the last good time") {
  IntegratorSettings strict;
  strict.reorthonormalize_every = 0;
  const CurvatureProfile fast = constant_profile({5.0, 3.0});
  try {
    run(1.0, 3, fast, 10.0, 0.2, strict);
    FAIL("expected a constraint violation");
  } catch (const ConstraintViolation& e) {
    CHECK(e.last_good_t() >= 0.0);
    CHECK(e.last_good_t() < 10.0);
    CHECK(e.drift() > strict.hard_limit);
    CHECK(std::string(e.what()).find("last good t") != std::string::npos);
  }
}

TEST_CASE("integrator preconditions") {
  const ModelSpace space = make_model_space(1.0, 2);
  const CurvatureProfile p = constant_profile({1.0});
  CHECK_THROWS_AS(integrate_frenet(space, p, initial_state(space), 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate_frenet(space, p, initial_state(space), 1.0, -1e-3), std::invalid_argument);
  CHECK_THROWS_AS(integrate_frenet(space, p, initial_state(space), 0.0, 1e-3), std::invalid_argument);
  CurveState bad = initial_state(space);
  bad.p *= 1.0 + 1e-9;
  CHECK_THROWS_AS(integrate_frenet(space, p, bad, 1.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(integrate_frenet(space, p, initial_state(make_model_space(1.0, 3)), 1.0, 1e-3),
                  std::invalid_argument);
}

TEST_CASE("evaluating frame fields") {
  const ModelSpace space = make_model_space(1.0, 2);
  const CurvatureProfile unit = constant_profile({1.0});
  const CurveState s = initial_state(space);
  CHECK((evaluate_frame_field(tension(2), unit, space, s) - s.frame.col(1)).norm() == 0.0);
  // Truncation of the transcribed (nabla nabla) tau to n = 2 under constants.
  const ReferenceSection& eq7 = reference_section("Eq7");
  SubstitutionRules drop;
  drop.make_zero(2).make_zero(3).make_zero(4);
  FrameField truncated(2);
  for (int i = 1; i <= 2; ++i) truncated[i] = substitute(eq7.components[static_cast<std::size_t>(i - 1)], drop);
  CHECK(truncated == second_derivative_power(tension(2), 1));
  CHECK((evaluate_frame_field(truncated, unit, space, s) + s.frame.col(1)).norm() < 1e-15);
  CHECK(evaluate_frame_field(FrameField(2), unit, space, s).norm() == 0.0);
  CHECK_THROWS_AS(evaluate_frame_field(tension(3), unit, space, s), std::invalid_argument);
}

TEST_CASE("missing profile derivatives are rejected with the order named") {
  const ModelSpace space = make_model_space(1.0, 2);
  CurvatureProfile p = constant_profile({1.0});
  p.use_central_differences(2, 1e-2);
  const CurveState s = initial_state(space);
  CHECK_NOTHROW(evaluate_frame_field(tau_k(2, 2), p, space, s));
  try {
    evaluate_frame_field(tau_k(3, 2), p, space, s);
    FAIL("expected MissingDerivative");
  } catch (const MissingDerivative& e) {
    CHECK(e.required_order() == 4);
    CHECK(e.available_order() == 2);
    CHECK(std::string(e.what()).find("4") != std::string::npos);
  }
}

TEST_CASE("numeric covariant derivative") {
  const double h = 1e-3;
  const CurveTrace geo = run(1.0, 2, constant_profile({0.0}), 1.0, h);
  std::vector<Eigen::VectorXd> e1;
  for (const auto& s : geo.states) e1.push_back(s.frame.col(0));
  for (std::size_t i : {std::size_t{1}, geo.states.size() / 2, geo.states.size() - 2}) {
    CHECK(numeric_covariant_derivative(geo, e1, i, geo.step).norm() < h * h);
  }
  CHECK_THROWS_AS(numeric_covariant_derivative(geo, e1, 0, geo.step), std::out_of_range);
  CHECK_THROWS_AS(numeric_covariant_derivative(geo, e1, geo.states.size() - 1, geo.step), std::out_of_range);
  std::vector<Eigen::VectorXd> short_samples(e1.begin(), e1.end() - 1);
  CHECK_THROWS_AS(numeric_covariant_derivative(geo, short_samples, 5, geo.step), std::invalid_argument);

  const CurveTrace circle = run(1.0, 2, constant_profile({1.0}), 1.0, h);
  std::vector<Eigen::VectorXd> c1;
  for (const auto& s : circle.states) c1.push_back(s.frame.col(0));
  const std::size_t mid = circle.states.size() / 2;
  CHECK((numeric_covariant_derivative(circle, c1, mid, circle.step) - circle.states[mid].frame.col(1)).norm() < h * h);

  // Twice on tau against the evaluated symbolic field.
  const double err = second_derivative_fd_error(circle.space, circle.profile, tension(2), h, {0.5});
  CHECK(err < h * h);
}

TEST_CASE("finite differences converge at second order") {
  const std::vector<double> steps = {1e-2, 5e-3, 2.5e-3};
  const std::vector<double> probes = {0.25, 0.5, 0.75};
  struct Case {
    int n;
    CurvatureProfile profile;
  };
  for (const Case& c : {Case{2, s2_test_profile()}, Case{3, s3_test_profile()}}) {
    const ModelSpace space = make_model_space(1.0, c.n);
    for (int j = 0; j <= 1; ++j) {
      const FrameField field = second_derivative_power(tension(c.n), j);
      std::vector<double> errors;
      for (double h : steps) errors.push_back(second_derivative_fd_error(space, c.profile, field, h, probes));
      for (double order : observed_orders(errors)) {
        INFO("n=" << c.n << " j=" << j << " order=" << order);
        CHECK(std::abs(order - 2.0) <= 0.2);
      }
    }
  }
}

TEST_CASE("residuals of constant-curvature curves") {
  const CurveTrace h2 = run(-1.0, 2, constant_profile({1.0}), 2.0, 1e-3);
  const auto r = numeric_residual(h2, 2);
  CHECK(r.size() == h2.states.size() - 2);
  for (double x : r) REQUIRE(x == doctest::Approx(2.0).epsilon(1e-9));

  const CurveTrace geo = run(1.0, 3, constant_profile({0.0, 0.0}), 2.0, 1e-3);
  for (int kk = 2; kk <= 5; ++kk) CHECK(max_of(numeric_residual(geo, kk)) == 0.0);

  const CurveTrace circle = run(1.0, 2, constant_profile({1.0}), 2.0, 1e-2);
  CHECK(max_of(numeric_residual(circle, 5)) < 1e-8);
}

TEST_CASE("k=2 residual agrees with the direct biharmonic formula") {
  // Direct formula: tau_2 = -(nabla nabla) tau - K k1 e2, built from the transcription.
  const ReferenceSection& eq7 = reference_section("Eq7");
  SubstitutionRules drop;
  drop.make_zero(3).make_zero(4);
  FrameField direct(3);
  for (int i = 1; i <= 3; ++i) direct[i] = -substitute(eq7.components[static_cast<std::size_t>(i - 1)], drop);
  direct = direct - K() * tension(3);
  const CurveTrace tr = run(1.0, 3, s3_test_profile(), 2.0, 1e-2);
  const auto generic = numeric_residual(tr, 2);
  for (std::size_t i = 0; i < generic.size(); ++i) {
    const double d = tr.space.norm(evaluate_frame_field(direct, tr.profile, tr.space, tr.states[i + 1]));
    REQUIRE(generic[i] == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("trace CSV") {
  const CurveTrace tr = run(1.0, 2, constant_profile({1.0}), 0.1, 0.05);
  std::ostringstream out;
  write_trace_csv(out, tr, {2});
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,p0,p1,p2,e1_0,e1_1,e1_2,e2_0,e2_1,e2_2,res_k2");
  std::string row;
  int rows = 0;
  while (std::getline(in, row)) {
    ++rows;
    CHECK(std::count(row.begin(), row.end(), ',') == 10);
  }
  CHECK(rows == 3);
  std::ostringstream again;
  write_trace_csv(again, tr, {2});
  CHECK(again.str() == out.str());
}

TEST_CASE("curvature functions") {
  const auto poly = CurvatureFunction::polynomial({1.0, 2.0, 3.0});
  CHECK(poly.derivative(0, 2.0) == doctest::Approx(17.0));
  CHECK(poly.derivative(1, 2.0) == doctest::Approx(14.0));
  CHECK(poly.derivative(2, 2.0) == doctest::Approx(6.0));
  CHECK(poly.derivative(3, 2.0) == 0.0);
  const auto sine = CurvatureFunction::sinusoid(1.0, 0.5, 2.0, 0.1);
  CHECK(sine.derivative(0, 0.3) == doctest::Approx(1.0 + 0.5 * std::sin(0.7)));
  CHECK(sine.derivative(1, 0.3) == doctest::Approx(1.0 * std::cos(0.7)));
  CHECK(sine.derivative(3, 0.3) == doctest::Approx(-4.0 * std::cos(0.7)));
  CHECK(CurvatureFunction::constant(2.5).derivative(1, 7.0) == 0.0);
}

TEST_CASE("profiles") {
  CurvatureProfile p;
  p.set(2, CurvatureFunction::constant(3.0));
  CHECK(p.count() == 2);
  CHECK(p.value(1, 0.0) == 0.0);
  CHECK(p.value(2, 0.0) == 3.0);
  CHECK(p.value(7, 0.0) == 0.0);

  CurvatureProfile fd;
  fd.set(1, CurvatureFunction::sinusoid(0.0, 1.0, 1.0, 0.0));
  fd.use_central_differences(2, 1e-3);
  CHECK(fd.max_available_order() == 2);
  CHECK(fd.value(kappa_symbol(1, 1), 0.4) == doctest::Approx(std::cos(0.4)).epsilon(1e-6));
  CHECK(fd.value(kappa_symbol(1, 2), 0.4) == doctest::Approx(-std::sin(0.4)).epsilon(1e-5));
  CHECK_THROWS_AS(fd.value(kappa_symbol(1, 3), 0.4), MissingDerivative);
}

TEST_CASE("profile config parsing") {
  const CurvatureProfile p = parse_profile_config(
      "# biharmonic helix\n"
      "k1 = constant value=1\n"
      "k2 = polynomial coeffs=0.5,0.1\n"
      "\n"
      "k3 = sinusoid offset=1 amplitude=0.2 frequency=2 phase=0.5  # trailing\n"
      "derivatives = central\n"
      "fd_max_order = 3\n"
      "fd_step = 1e-3\n");
  CHECK(p.count() == 3);
  CHECK(p.value(1, 4.0) == 1.0);
  CHECK(p.value(2, 2.0) == doctest::Approx(0.7));
  CHECK(p.value(3, 0.0) == doctest::Approx(1.0 + 0.2 * std::sin(0.5)));
  CHECK(p.mode() == DerivativeMode::central_difference);
  CHECK(p.max_available_order() == 3);

  CHECK_THROWS_AS(parse_profile_config("k1 = cubic value=1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile_config("k0 = constant value=1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile_config("k1 = constant\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile_config("k1 = constant value=x\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile_config("speed = 2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile_config("derivatives = symbolic\n"), std::invalid_argument);
  CHECK(parse_curvature_function("sinusoid offset=1 amplitude=0.2 frequency=2 phase=0").kind() ==
        CurvatureFunction::Kind::sinusoid);
}
