#include <catch_amalgamated.hpp>
#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "adsplit/controller.hpp"
#include "adsplit/errors.hpp"
#include "adsplit/models.hpp"
#include "adsplit/reaction.hpp"

using namespace adsplit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Central differences of model.rates, scaled per column.
void check_jacobian(const ReactionModel& model, double t, double x, std::vector<double> u,
                    double tol) {
  const std::size_t m = model.species();
  std::vector<double> jac(m * m), fp(m), fm(m);
  model.jacobian(t, x, u, jac);
  for (std::size_t c = 0; c < m; ++c) {
    const double h = 1e-6 * std::max(std::abs(u[c]), 1e-3);
    std::vector<double> up = u, um = u;
    up[c] += h;
    um[c] -= h;
    model.rates(t, x, up, fp);
    model.rates(t, x, um, fm);
    for (std::size_t r = 0; r < m; ++r) {
      const double fd = (fp[r] - fm[r]) / (2.0 * h);
      const double scale = std::max({std::abs(fd), std::abs(jac[r * m + c]), 1.0});
      INFO("row " << r << " col " << c << " fd " << fd << " analytic " << jac[r * m + c]);
      CHECK(std::abs(fd - jac[r * m + c]) <= tol * scale);
    }
  }
}

}  // namespace

TEST_CASE("KPP reaction derivatives and Jacobian", "[models]") {
  KppParams p;
  p.k = 10.0;
  const auto model = make_kpp_model(p);
  for (double u : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    const auto d = kpp_rhs(u, p);
    CHECK_THAT(d[0], WithinAbs(10.0 * u * u * (1 - u), 1e-14));
    // Finite differences of each derivative give the next one.
    for (std::size_t order = 0; order < 4; ++order) {
      const double h = 1e-5;
      const double fd = (kpp_rhs(u + h, p)[order] - kpp_rhs(u - h, p)[order]) / (2 * h);
      CHECK_THAT(fd, WithinAbs(d[order + 1], 1e-6 * std::max(1.0, std::abs(d[order + 1]))));
    }
    check_jacobian(*model.reaction, 0.0, 0.0, {u}, 1e-6);
  }
  CHECK(model.scalar != nullptr);
}

TEST_CASE("KPP exact front solves the traveling-wave problem", "[models]") {
  for (double k : {1.0, 100.0}) {
    KppParams p;
    p.k = k;
    p.diffusion = 1.0 / k;
    CHECK_THAT(kpp_exact_front(0.0, 0.0, p), WithinAbs(0.5, 1e-15));
    // Residual of u_t - D u_xx - k u^2(1-u) by finite differences.
    const double h = 1e-3, dt = 1e-5;
    for (double x : {-2.0, -0.3, 0.0, 0.4, 1.5}) {
      const double t = 0.2;
      const double u = kpp_exact_front(x, t, p);
      const double ut = (kpp_exact_front(x, t + dt, p) - kpp_exact_front(x, t - dt, p)) / (2 * dt);
      const double uxx =
          (kpp_exact_front(x + h, t, p) - 2 * u + kpp_exact_front(x - h, t, p)) / (h * h);
      CHECK(std::abs(ut - p.diffusion * uxx - k * u * u * (1 - u)) < 1e-4 * k);
    }
    // Half level moves at 1/sqrt(2) when kD = 1.
    CHECK_THAT(kpp_exact_front(1.0 / std::sqrt(2.0), 1.0, p), WithinAbs(0.5, 1e-14));
  }
}

TEST_CASE("KPP stays in [0, 1] under a splitting run", "[models]") {
  KppParams p;
  p.k = 10.0;
  p.diffusion = 0.1;
  p.x_min = -10.0;
  p.x_max = 10.0;
  p.n = 201;
  const auto model = make_kpp_model(p);
  ControllerConfig cfg;
  cfg.eta = 1e-5;
  cfg.dt0 = 1e-4;
  const RunResult r = run_adaptive(model, kpp_initial_state(p), 0.5, cfg, {});
  for (double v : r.final_state.row(0)) {
    CHECK(v >= -1e-10);
    CHECK(v <= 1.0 + 1e-10);
  }
}

TEST_CASE("BZ rest state is a stable fixed point", "[models]") {
  BzParams p;
  const auto rest = bz_rest_state(p);
  const auto r = bz_rhs(rest[0], rest[1], rest[2], p);
  CHECK(std::abs(r[0]) * p.mu < 1e-15);
  CHECK(std::abs(r[1]) * p.eps < 1e-15);
  CHECK(std::abs(r[2]) < 1e-15);
  CHECK(rest[1] > 0.0);
  CHECK(rest[1] == rest[2]);
  const auto jac = bz_jacobian(rest[0], rest[1], rest[2], p);
  Eigen::Matrix3d j;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) j(a, b) = jac[3 * a + b];
  for (const auto& lambda : j.eigenvalues()) CHECK(lambda.real() < 0.0);
}

TEST_CASE("BZ Jacobian matches finite differences", "[models]") {
  BzParams p;
  const auto model = make_bz_model(p);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    check_jacobian(*model.reaction, 0.0, 0.0, {100 * d(rng), d(rng), d(rng)}, 1e-6);
  }
}

TEST_CASE("BZ initial state", "[models]") {
  BzParams p;
  p.n = 801;
  const FieldState s = bz_initial_state(p);
  const auto rest = bz_rest_state(p);
  CHECK(s(1, 0) == p.excited_b);
  CHECK(s(2, 0) == rest[2]);
  CHECK_THAT(s(1, 800), WithinRel(rest[1], 1e-14));
  p.excited_c = 0.5;
  CHECK(bz_initial_state(p)(2, 0) == 0.5);
  BzParams bad;
  bad.mu = 0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("discharge field profile", "[models]") {
  DischargeParams p;
  CHECK(field_profile(0.005, 5e-9, p) == 40.0);
  CHECK(field_profile(0.005, 500e-9, p) == 0.0);
  CHECK(field_profile(0.005, p.period + 3e-9, p) == 40.0);
  CHECK(field_profile(0.2, 5e-9, p) == 0.0);
  CHECK_THAT(p.ionization(40.0), WithinRel(1.1e8, 1e-12));
  CHECK(p.ionization(0.0) == 0.0);
  CHECK(p.attachment(40.0) == p.attachment_rate);
}

TEST_CASE("discharge Jacobian matches finite differences", "[models]") {
  for (auto sign : {RecombinationSign::Physical, RecombinationSign::AsPrinted}) {
    DischargeParams p;
    p.recombination = sign;
    const auto model = make_discharge_model(p, 3e-6);
    for (double t : {5e-9, 500e-9}) {
      check_jacobian(*model.reaction, t, 0.005, {3e9, 5e9, 1e9}, 1e-6);
    }
  }
}

TEST_CASE("physical recombination conserves charge, as-printed does not", "[models]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(1e8, 1e11);
  for (int trial = 0; trial < 10; ++trial) {
    const double ne = d(rng), np = d(rng), nn = d(rng);
    DischargeParams p;
    auto r = discharge_rhs(ne, np, nn, 40.0, p);
    const double scale = std::abs(r[0]) + std::abs(r[1]) + std::abs(r[2]);
    CHECK(std::abs(r[1] - r[0] - r[2]) <= 1e-14 * scale);
    p.recombination = RecombinationSign::AsPrinted;
    r = discharge_rhs(ne, np, nn, 40.0, p);
    const double expected = 2.0 * p.beta_np * nn * np - 2.0 * p.beta_ep * ne * np;
    CHECK_THAT(r[1] - r[0] - r[2], WithinRel(expected, 1e-10));
  }
}

TEST_CASE("discharge events and breakpoints", "[models]") {
  DischargeParams p;
  const auto model = make_discharge_model(p, 3.5e-6);
  REQUIRE(model.events.size() == 3);
  CHECK(model.events[0].time == 1e-6);
  CHECK(model.events[0].reset_dt == 10e-9);
  CHECK(model.breakpoints.front() == 0.0);
  const FieldState s = discharge_initial_state(p);
  CHECK(s(0, 0) == p.seed_density);
  CHECK(s(1, 0) == p.seed_density);
  CHECK(s(2, 0) == 0.0);
}

TEST_CASE("negative densities are clamped and counted", "[models]") {
  DischargeParams p;
  const std::size_t before = discharge_clamp_count();
  const auto r = discharge_rhs(-1.0, 1e9, 0.0, 40.0, p);
  CHECK(r[0] == 0.0);
  CHECK(discharge_clamp_count() == before + 1);
}
