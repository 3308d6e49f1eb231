#include <doctest.h>

#include <cmath>

#include "sandwich/matrix_ops.hpp"
#include "sandwich/plant.hpp"

using namespace sandwich;

namespace {

PlantParameters scalar_load_params() {
  PlantParameters p;
  p.q1 = 1.0;
  p.q2 = 1.0;
  p.d1 = 0.0;
  p.d2 = 0.0;
  p.p = 1.0;
  p.b = 1.0;
  p.n = 1;
  p.m = 1;
  p.l = Eigen::VectorXd::Constant(1, -1.0);
  p.M = Eigen::VectorXd::Zero(1);
  p.qbar = Eigen::VectorXd::Zero(1);
  p.theta_box = {0.0, 0.0, 0.0, 0.0, 0.5, 1.5};
  set_nonlinearity_preset(p, "zero");
  return p;
}

PlantState zero_state(int nx, int m, int n) {
  PlantState s;
  s.z = Eigen::VectorXd::Zero(nx + 1);
  s.w = Eigen::VectorXd::Zero(nx + 1);
  s.X = Eigen::VectorXd::Zero(m);
  s.Y = Eigen::VectorXd::Zero(n);
  return s;
}

}  // namespace

TEST_CASE("parameter invariants are enforced") {
  PlantParameters p = scalar_load_params();
  CHECK_NOTHROW(p.check());
  SUBCASE("nonpositive speed") {
    p.q1 = 0.0;
    CHECK_THROWS_AS(p.check(), std::invalid_argument);
  }
  SUBCASE("qbar length mismatch") {
    p.qbar = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(p.check(), std::invalid_argument);
  }
  SUBCASE("theta outside its box") {
    p.d1 = 0.5;
    CHECK_THROWS_AS(p.check(), std::invalid_argument);
  }
  SUBCASE("m > 2 unsupported") {
    p.m = 3;
    CHECK_THROWS_AS(p.check(), std::invalid_argument);
  }
}

TEST_CASE("nonlinearity presets") {
  PlantParameters p = scalar_load_params();
  p.m = 2;
  p.qbar = Eigen::VectorXd::Zero(2);
  set_nonlinearity_preset(p, "benchmark");
  Eigen::VectorXd x1(1), x2(2);
  x1 << 3.0;
  x2 << 2.0, 5.0;
  CHECK(p.f[0](x1) == doctest::Approx(9.0));
  CHECK(p.f[1](x2) == doctest::Approx(10.0));
  CHECK(p.f1_prime(3.0) == doctest::Approx(6.0));
  CHECK_THROWS(set_nonlinearity_preset(p, "cubic"));
}

TEST_CASE("boundary time derivatives against hand-computed polynomial traces") {
  const int nx = 10;
  PlantState s = zero_state(nx, 1, 1);
  for (int i = 0; i <= nx; ++i) {
    const double x = static_cast<double>(i) / nx;
    s.z(i) = x * x;
    s.w(i) = 1.0 + 0.5 * x;
  }
  const double q1 = 1.0, q2 = 2.0, d1 = 0.3, d2 = 0.7;

  const auto b0 = boundary_time_derivatives(s, d1, d2, q1, q2, 0);
  CHECK(b0.z1 == doctest::Approx(1.0));
  CHECK(b0.z0 == doctest::Approx(0.0));
  CHECK(b0.w0 == doctest::Approx(1.0));
  CHECK(b0.w1 == doctest::Approx(1.5));

  // z_t = -q1 z_x + d1 w, w_t = q2 w_x + d2 z with exact polynomial slopes
  const auto b1 = boundary_time_derivatives(s, d1, d2, q1, q2, 1);
  CHECK(b1.z1 == doctest::Approx(-2.0 + 0.3 * 1.5).epsilon(1e-12));
  CHECK(b1.z0 == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(b1.w0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b1.w1 == doctest::Approx(1.0 + 0.7).epsilon(1e-12));

  // second substitution: z_tt = q1^2 z_xx + d1 (q2-q1) w_x + d1 d2 z
  const auto b2 = boundary_time_derivatives(s, d1, d2, q1, q2, 2);
  CHECK(b2.z1 == doctest::Approx(2.0 + 0.3 * 1.0 * 0.5 + 0.21 * 1.0).epsilon(1e-10));
  CHECK(b2.z0 == doctest::Approx(2.0 + 0.15).epsilon(1e-10));
  CHECK(b2.w0 == doctest::Approx(0.21).epsilon(1e-10));
  CHECK(b2.w1 == doctest::Approx(0.7 * 2.0 + 0.21 * 1.5).epsilon(1e-10));

  CHECK_THROWS(boundary_time_derivatives(s, d1, d2, q1, q2, 3));
}

TEST_CASE("uncoupled transport at unit CFL follows the characteristics exactly") {
  // d1 = d2 = 0, dt = dx, q1 = q2 = 1: the upwind scheme is an exact shift, so
  // every grid sample must match the method-of-characteristics solution.
  PlantParameters prm = scalar_load_params();
  const int nx = 50;
  SimGrid grid{nx, 1.0 / nx};
  PlantState s = zero_state(nx, 1, 1);
  for (int i = 0; i <= nx; ++i) {
    const double x = static_cast<double>(i) / nx;
    s.z(i) = std::sin(2.0 * M_PI * x);
    s.w(i) = std::sin(M_PI * x);
  }
  REQUIRE(enforce_boundary_compatibility(s, prm));  // already compatible

  const double t_end = 0.5;
  const int steps = static_cast<int>(std::round(t_end / grid.dt));
  for (int k = 0; k < steps; ++k) s = step(s, 0.0, prm, grid);

  for (int i = 0; i <= nx; ++i) {
    const double x = static_cast<double>(i) / nx;
    // w rides left at speed 1; the inflow at x = 1 is x1 = 0
    const double w_exact = (x + t_end <= 1.0 + 1e-12) ? std::sin(M_PI * (x + t_end)) : 0.0;
    // z rides right; the inflow at x = 0 is p * w(0, tau) = sin(pi tau)
    const double z_exact = (x >= t_end) ? std::sin(2.0 * M_PI * (x - t_end))
                                        : std::sin(M_PI * (t_end - x));
    CHECK(s.w(i) == doctest::Approx(w_exact).epsilon(1e-12));
    CHECK(s.z(i) == doctest::Approx(z_exact).epsilon(1e-12));
  }
}

TEST_CASE("distal ODE integrates its free dynamics at high order") {
  PlantParameters prm = scalar_load_params();
  prm.n = 2;
  prm.l = Eigen::VectorXd(2);
  prm.l << 1.0, -0.5;
  prm.M = Eigen::VectorXd::Zero(2);
  const int nx = 20;
  SimGrid grid{nx, 1.0 / nx / 2.0};
  PlantState s = zero_state(nx, 1, 2);
  s.Y << 1.0, -0.3;
  const Eigen::VectorXd Y0 = s.Y;

  const double t_end = 0.5;
  const int steps = static_cast<int>(std::round(t_end / grid.dt));
  for (int k = 0; k < steps; ++k) s = step(s, 0.0, prm, grid);

  // with zero profiles w(0,.) = 0, so Y(t) = e^{At} Y(0) exactly; the classical
  // 4-stage step carries ~3e-9 global error at this dt
  const Eigen::VectorXd Yref = expm(prm.A() * t_end) * Y0;
  CHECK((s.Y - Yref).norm() < 1e-8);
}

TEST_CASE("free distal prediction cross-validates against the simulator") {
  PlantParameters prm;
  prm.q1 = 1.0;
  prm.q2 = 1.0;
  prm.d1 = 0.8;
  prm.d2 = 1.0;
  prm.p = 1.0;
  prm.b = 1.0;
  prm.n = 2;
  prm.m = 1;
  prm.l = Eigen::VectorXd(2);
  prm.l << 1.0, -0.5;
  prm.M = Eigen::VectorXd::Zero(2);
  prm.qbar = Eigen::VectorXd::Zero(1);
  prm.theta_box = {0.2, 1.2, 0.2, 1.2, 0.5, 1.5};
  set_nonlinearity_preset(prm, "zero");

  const int nx = 400;
  SimGrid grid{nx, 1.0 / nx};
  PlantState s = zero_state(nx, 1, 2);
  for (int i = 0; i <= nx; ++i) {
    const double x = static_cast<double>(i) / nx;
    s.w(i) = std::cos(2.0 * M_PI * x);
    s.z(i) = 2.0 * std::sin(3.0 * M_PI * x);
  }
  s.X << 1.0;
  s.Y << 1.0, 0.5;
  enforce_boundary_compatibility(s, prm);

  const Eigen::MatrixXd pred = predict_Y_free(s, prm, 1.0 / prm.q2, nx + 1);
  PlantState cur = s;
  const int steps = static_cast<int>(std::round(1.0 / grid.dt));
  for (int k = 0; k < steps; ++k) cur = step(cur, 0.0, prm, grid);

  // the prediction is exact in the model; both sides carry O(dx) scheme error
  CHECK(std::abs(pred(nx, 0) - cur.Y(0)) < 0.02 * std::max(1.0, std::abs(cur.Y(0))));
  CHECK(std::abs(pred(nx, 1) - cur.Y(1)) < 0.02 * std::max(1.0, std::abs(cur.Y(1))));
  CHECK_THROWS(predict_Y_free(s, prm, 2.0 / prm.q2, nx + 1));
}

TEST_CASE("boundary compatibility is reported and enforced") {
  PlantParameters prm = scalar_load_params();
  PlantState s = zero_state(10, 1, 1);
  s.w(0) = 0.3;
  s.z(0) = 0.0;  // violates z(0) = p w(0)
  s.X << 0.7;    // violates w(1) = x1
  CHECK_FALSE(enforce_boundary_compatibility(s, prm));
  CHECK(s.z(0) == doctest::Approx(0.3));
  CHECK(s.w(10) == doctest::Approx(0.7));
  CHECK(enforce_boundary_compatibility(s, prm));
}

TEST_CASE("validation report flags CFL violations and passes a stable scalar load") {
  PlantParameters prm = scalar_load_params();
  const int nx = 100;
  PlantState s = zero_state(nx, 1, 1);
  s.Y << 1.0;
  s.X << 0.5;
  // compatible smooth ramp: w(x,0) = 0.5 x matches w(1) = x1 and z(0) = p w(0) = 0
  for (int i = 0; i <= nx; ++i) s.w(i) = 0.5 * i / nx;

  SimGrid bad{nx, 0.02};  // dt > dx
  const auto rep_bad = validate(prm, s, bad);
  CHECK_FALSE(rep_bad.cfl_ok);

  SimGrid good{nx, 0.005};
  const auto rep = validate(prm, s, good);
  CHECK(rep.cfl_ok);
  CHECK(rep.assumption1_ok);
  CHECK(rep.assumption2_ok);
  // d1 = d2 = 0: y1' = -y1 + w(t, 0) with inflow 0.5 t, so
  // y1(1) = e^{-1} + 0.5 int_0^1 e^{tau-1} tau dtau = 1.5 e^{-1}
  CHECK(rep.assumption3_ok);
  CHECK(rep.assumption3_terminal == doctest::Approx(1.5 * std::exp(-1.0)).epsilon(1e-4));
  CHECK(rep.assumption4_ok);  // x1(0) = 0.5 > 0 fallback threshold
  CHECK(rep.all_ok());

  s.Y << -1.0;
  const auto rep_neg = validate(prm, s, good);
  CHECK_FALSE(rep_neg.assumption3_ok);
}
