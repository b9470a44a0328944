// Copyright 2026 The tccbf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "tccbf/models.hpp"

using namespace tccbf;
namespace oracle = tccbf::testing;

namespace {

AsvParams random_params() {
  AsvParams p;
  p.m11 = oracle::uniform(5.0, 60.0);
  p.m22 = oracle::uniform(5.0, 60.0);
  p.m33 = oracle::uniform(1.0, 20.0);
  p.X_u = -oracle::uniform(1.0, 30.0);
  p.X_uu = -oracle::uniform(0.0, 20.0);
  p.Y_v = -oracle::uniform(1.0, 60.0);
  p.Y_vv = -oracle::uniform(0.0, 60.0);
  p.Y_r = -oracle::uniform(0.0, 2.0);
  p.N_v = -oracle::uniform(0.0, 2.0);
  p.N_r = -oracle::uniform(1.0, 15.0);
  p.N_rrr = -oracle::uniform(0.0, 8.0);
  p.l = oracle::uniform(0.1, 0.6);
  return p;
}

Eigen::VectorXd random_asv_state() {
  Eigen::VectorXd x(6);
  x << oracle::uniform(-10, 10), oracle::uniform(-10, 10),
      oracle::uniform(-3, 3), oracle::uniform(-2, 2), oracle::uniform(-2, 2),
      oracle::uniform(-1, 1);
  return x;
}

}  // namespace

TEST_CASE("unicycle derivative") {
  const double pi = std::numbers::pi;
  auto d = unicycle_deriv({0, 0, 0, 2}, {0, 0});
  CHECK(d.isApprox(Eigen::Vector4d{2, 0, 0, 0}, 1e-15));

  d = unicycle_deriv({0, 0, pi / 2, 2}, {0.3, 1});
  CHECK(d[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d[1] == doctest::Approx(2.0));
  CHECK(d[2] == doctest::Approx(0.3));
  CHECK(d[3] == doctest::Approx(1.0));

  d = unicycle_deriv({5, -1, pi / 4, std::sqrt(2.0)}, {0, 0});
  CHECK(d[0] == doctest::Approx(1.0));
  CHECK(d[1] == doctest::Approx(1.0));
}

TEST_CASE("asv derivative") {
  AsvParams p;

  SUBCASE("rest equilibrium") {
    const auto d = asv_deriv({0, 0, 0, 0, 0, 0}, {0, 0}, p);
    CHECK(d.norm() == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("pure surge thrust") {
    p.m11 = 10.0;
    const auto d = asv_deriv({0, 0, 0, 0, 0, 0}, {1, 1}, p);
    CHECK(d[3] == doctest::Approx(0.2));
    CHECK(std::abs(d[4]) < 1e-15);
    CHECK(std::abs(d[5]) < 1e-15);
  }
  SUBCASE("coriolis neutrality at a specific state") {
    // nu' * C(nu) * nu with nu = (1, 2, 3).
    const double u = 1, v = 2, r = 3;
    const double power = u * (-p.m22 * v * r) + v * (p.m11 * u * r) +
                         r * ((p.m22 - p.m11) * u * v);
    CHECK(power == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("coriolis energy neutrality over random samples") {
  for (int i = 0; i < 1000; ++i) {
    const AsvParams p = random_params();
    const double u = oracle::uniform(-2, 2);
    const double v = oracle::uniform(-2, 2);
    const double r = oracle::uniform(-1, 1);
    const double power = u * (-p.m22 * v * r) + v * (p.m11 * u * r) +
                         r * ((p.m22 - p.m11) * u * v);
    CHECK(std::abs(power) <= 1e-12);
  }
}

TEST_CASE("rotation preserves planar speed") {
  for (int i = 0; i < 200; ++i) {
    const AsvParams p = random_params();
    const Eigen::VectorXd x = random_asv_state();
    const auto d = asv_deriv(asv_state_from(x), {0, 0}, p);
    const double body = std::hypot(x[3], x[4]);
    const double inertial = std::hypot(d[0], d[1]);
    CHECK(inertial == doctest::Approx(body).epsilon(1e-12));
  }
}

TEST_CASE("thrust allocation") {
  auto [fx, fn] = thrust_allocation(1, 1, 0.3);
  CHECK(fx == doctest::Approx(2.0));
  CHECK(fn == doctest::Approx(0.0));
  std::tie(fx, fn) = thrust_allocation(0, 2, 0.3);
  CHECK(fx == doctest::Approx(2.0));
  CHECK(fn == doctest::Approx(0.6));
  std::tie(fx, fn) = thrust_allocation(2, 0, 0.3);
  CHECK(fx == doctest::Approx(2.0));
  CHECK(fn == doctest::Approx(-0.6));
}

TEST_CASE("speed and course over ground") {
  const double pi = std::numbers::pi;
  auto [v, course] = sog_cog({0, 0, 0, 0.9, 0, 0});
  CHECK(v == doctest::Approx(0.9));
  CHECK(course == doctest::Approx(0.0));

  std::tie(v, course) = sog_cog({0, 0, 0, 0.6, 0.6, 0});
  CHECK(v == doctest::Approx(0.6 * std::sqrt(2.0)));
  CHECK(course == doctest::Approx(pi / 4));

  std::tie(v, course) = sog_cog({0, 0, pi / 2, 1, -1, 0});
  CHECK(v == doctest::Approx(std::sqrt(2.0)));
  CHECK(course == doctest::Approx(pi / 2 - pi / 4));

  CHECK_THROWS_AS((void)sog_cog({0, 0, 0, 0, 0, 0}), std::domain_error);
}

TEST_CASE("sog/cog round trip") {
  for (int i = 0; i < 500; ++i) {
    AsvState s;
    s.psi = oracle::uniform(-3, 3);
    s.u = oracle::uniform(-2, 2);
    s.v = oracle::uniform(-2, 2);
    if (s.u == 0.0 && s.v == 0.0) continue;
    const auto [speed, course] = sog_cog(s);
    const double beta = course - s.psi;
    CHECK(speed * std::cos(beta) == doctest::Approx(s.u).epsilon(1e-12));
    CHECK(speed * std::sin(beta) == doctest::Approx(s.v).epsilon(1e-12));
  }
}

TEST_CASE("rk4 step") {
  const UnicycleModel model;

  SUBCASE("constant velocity") {
    const auto next = rk4_step(model, Eigen::Vector4d{0, 0, 0, 2},
                               Eigen::Vector2d{0, 0}, 0.1);
    CHECK(next.isApprox(Eigen::Vector4d{0.2, 0, 0, 2}, 1e-14));
  }
  SUBCASE("exact for linear-in-time integrand") {
    const auto next = rk4_step(model, Eigen::Vector4d{0, 0, 0, 2},
                               Eigen::Vector2d{0, 1}, 0.1);
    CHECK(next[0] == doctest::Approx(0.205).epsilon(1e-12));
    CHECK(next[3] == doctest::Approx(2.1).epsilon(1e-12));
  }
  SUBCASE("callable overload matches the model overload") {
    const DerivFn fn = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
      return model.deriv(x, u);
    };
    const Eigen::Vector4d x0{1, -2, 0.3, 1.5};
    const Eigen::Vector2d u0{0.1, -0.2};
    CHECK(rk4_step(fn, x0, u0, 0.1).isApprox(rk4_step(model, x0, u0, 0.1), 1e-15));
  }
}

TEST_CASE("rk4 order on the closed-form circle") {
  // Unit-speed, unit-turn-rate circle: x = sin t, y = 1 - cos t, psi = t.
  const UnicycleModel model;
  const Eigen::Vector2d input{1.0, 0.0};
  const auto global_error = [&](double ts) {
    Eigen::VectorXd x = Eigen::Vector4d{0, 0, 0, 1};
    const int steps = static_cast<int>(std::round(1.0 / ts));
    for (int i = 0; i < steps; ++i) x = rk4_step(model, x, input, ts);
    const Eigen::Vector4d exact{std::sin(1.0), 1.0 - std::cos(1.0), 1.0, 1.0};
    return (x - exact).norm();
  };
  const double ratio = global_error(0.01) / global_error(0.005);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("unicycle jacobians at axis-aligned pose") {
  const UnicycleModel model;
  Eigen::MatrixXd a, b;
  model.deriv_jacobians(Eigen::Vector4d{0, 0, 0, 2}, Eigen::Vector2d{0, 0}, &a,
                        &b);
  CHECK(a(0, 3) == doctest::Approx(1.0));  // d(xdot)/du
  CHECK(a(1, 3) == doctest::Approx(0.0));  // d(ydot)/du
  CHECK(a(1, 2) == doctest::Approx(2.0));  // d(ydot)/dpsi at u = 2
}

TEST_CASE("analytic jacobians match finite differences") {
  const UnicycleModel unicycle;
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXd x(4);
    x << oracle::uniform(-10, 10), oracle::uniform(-10, 10),
        oracle::uniform(-3, 3), oracle::uniform(-2, 3);
    Eigen::VectorXd u(2);
    u << oracle::uniform(-0.5, 0.5), oracle::uniform(-1, 1);
    Eigen::MatrixXd a, b;
    unicycle.deriv_jacobians(x, u, &a, &b);
    const auto fd_a = oracle::fd_jacobian(
        [&](const Eigen::VectorXd& xs) { return unicycle.deriv(xs, u); }, x);
    const auto fd_b = oracle::fd_jacobian(
        [&](const Eigen::VectorXd& us) { return unicycle.deriv(x, us); }, u);
    CHECK(oracle::relative_error(a, fd_a) <= 1e-4);
    CHECK(oracle::relative_error(b, fd_b) <= 1e-4);
  }

  for (int i = 0; i < 500; ++i) {
    const AsvModel asv(random_params());
    const Eigen::VectorXd x = random_asv_state();
    Eigen::VectorXd u(2);
    u << oracle::uniform(-15, 20), oracle::uniform(-15, 20);
    Eigen::MatrixXd a, b;
    asv.deriv_jacobians(x, u, &a, &b);
    const auto fd_a = oracle::fd_jacobian(
        [&](const Eigen::VectorXd& xs) { return asv.deriv(xs, u); }, x);
    const auto fd_b = oracle::fd_jacobian(
        [&](const Eigen::VectorXd& us) { return asv.deriv(x, us); }, u);
    CHECK(oracle::relative_error(a, fd_a) <= 1e-4);
    CHECK(oracle::relative_error(b, fd_b) <= 1e-4);
  }
}

TEST_CASE("discrete rk4 jacobians match finite differences") {
  const AsvModel asv(AsvParams{});
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd x = random_asv_state();
    Eigen::VectorXd u(2);
    u << oracle::uniform(-15, 20), oracle::uniform(-15, 20);
    Eigen::VectorXd next;
    Eigen::MatrixXd a_d, b_d;
    rk4_step_with_jacobians(asv, x, u, 0.1, &next, &a_d, &b_d);
    CHECK(next.isApprox(rk4_step(asv, x, u, 0.1), 1e-14));
    const auto fd_a = oracle::fd_jacobian(
        [&](const Eigen::VectorXd& xs) { return rk4_step(asv, xs, u, 0.1); }, x);
    const auto fd_b = oracle::fd_jacobian(
        [&](const Eigen::VectorXd& us) { return rk4_step(asv, x, us, 0.1); }, u);
    CHECK(oracle::relative_error(a_d, fd_a) <= 1e-4);
    CHECK(oracle::relative_error(b_d, fd_b) <= 1e-4);
  }
}

TEST_CASE("pose extraction and its jacobian") {
  const AsvModel asv(AsvParams{});
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd x = random_asv_state();
    if (std::hypot(x[3], x[4]) < 0.1) continue;  // stay off the rest singularity
    const PlanarKinematicPose pose = asv.pose_of(x);
    CHECK(pose.speed == doctest::Approx(std::hypot(x[3], x[4])));
    const auto fd = oracle::fd_jacobian(
        [&](const Eigen::VectorXd& xs) {
          const PlanarKinematicPose p = asv.pose_of(xs);
          return Eigen::Vector4d{p.x, p.y, p.course, p.speed};
        },
        x);
    CHECK(oracle::relative_error(asv.pose_jacobian(x), fd) <= 1e-4);
  }
}

TEST_CASE("asv parameter validation") {
  AsvParams p;
  CHECK_NOTHROW(p.validate());
  p.m22 = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = AsvParams{};
  p.X_u = 5.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = AsvParams{};
  p.l = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
