#include <doctest.h>

#include <cmath>

#include "bergman/errors.hpp"
#include "bergman/rng.hpp"
#include "bergman/weights.hpp"
#include "oracles.hpp"

using namespace bergman;

TEST_CASE("exp family closed forms") {
  const WeightModel w = make_weight("exp", 1.0, 1.0, 0.95);
  CHECK(w.phi(cplx(0.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w.rho(cplx(0.0, 0.0)) == doctest::Approx(0.5).epsilon(1e-15));

  const WeightModel w2 = make_weight("exp", 2.0, 1.0, 0.95);
  CHECK(w2.phi(cplx(0.5, 0.0)) == doctest::Approx(2.0 / 0.75).epsilon(1e-15));
}

TEST_CASE("rho(0) cross-checked against a finite-difference Laplacian") {
  const WeightModel w = make_weight("exp", 1.0, 1.0, 0.95);
  auto phi = [&](cplx z) { return w.phi(z); };
  const double lap0 = oracles::fd_laplacian(phi, cplx(0.0, 0.0), 1e-4);
  CHECK(1.0 / std::sqrt(lap0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("analytic Laplacian matches finite differences on the domain") {
  const WeightModel w = make_weight("exp", 1.0, 1.0, 0.95);
  auto phi = [&](cplx z) { return w.phi(z); };
  Rng rng(11);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const cplx z = rng.disc_point(w.r_max - 0.01);
    const double exact = w.laplacian_phi(z);
    // h balances stencil truncation against cancellation noise in phi
    const double fd = oracles::fd_laplacian(phi, z, 1e-4);
    worst = std::max(worst, std::fabs(fd - exact) / exact);
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("rho^2 laplacian = 1 exactly for the exp family") {
  const WeightModel w = make_weight("exp", 1.3, 0.7, 0.9);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const cplx z = rng.disc_point(w.r_max);
    const double prod = w.rho(z) * w.rho(z) * w.laplacian_phi(z);
    CHECK(std::fabs(prod - 1.0) <= 1e-12);
  }
}

TEST_CASE("phi is radial") {
  const WeightModel w = make_weight("exp", 1.0, 2.0, 0.95);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const double r = rng.uniform(0.0, w.r_max);
    const double t = rng.uniform(0.0, 6.28);
    CHECK(w.phi(cplx(r * std::cos(t), r * std::sin(t))) == w.phi_radial(r));
  }
}

TEST_CASE("parameter domain errors") {
  CHECK_THROWS_AS(make_weight("exp", -1.0, 1.0, 0.95), ParameterError);
  CHECK_THROWS_AS(make_weight("exp", 1.0, 0.0, 0.95), ParameterError);
  CHECK_THROWS_AS(make_weight("exp", 1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(make_weight("exp", 1.0, 1.0, -0.1), DomainError);
  CHECK_THROWS_AS(make_weight("nope", 1.0, 1.0, 0.5), ParameterError);
  // oracle families admit r_max = 1
  CHECK_NOTHROW(make_flat_oracle(1.0));
}

TEST_CASE("membership report for EXP(1,1)") {
  const WeightModel w = make_weight("exp", 1.0, 1.0, 0.95);
  const MembershipReport rep = check_membership(w, 2000, 7);

  // min of 4(1+|z|^2)(1-|z|^2)^{-3} over the disc is 4, attained at 0
  CHECK(rep.min_laplacian >= 4.0 - 1e-12);
  CHECK(rep.min_laplacian <= 4.4);

  REQUIRE(rep.l0_decay.size() == 10);
  CHECK(rep.l0_decay[9].second < rep.l0_decay[0].second);
  // thresholds filter a common pair sample, so the table is non-increasing
  for (std::size_t i = 0; i + 1 < rep.l0_decay.size(); ++i)
    CHECK(rep.l0_decay[i + 1].second <= rep.l0_decay[i].second);

  CHECK(std::isfinite(rep.rho_over_one_minus_mod));
  CHECK(rep.rho_over_one_minus_mod > 0.0);
  CHECK(rep.lipschitz_estimate > 0.0);
}

TEST_CASE("membership is deterministic in the seed") {
  const WeightModel w = make_weight("exp", 1.0, 1.0, 0.95);
  const MembershipReport a = check_membership(w, 500, 42);
  const MembershipReport b = check_membership(w, 500, 42);
  CHECK(a.min_laplacian == b.min_laplacian);
  CHECK(a.lipschitz_estimate == b.lipschitz_estimate);
  for (std::size_t i = 0; i < a.l0_decay.size(); ++i)
    CHECK(a.l0_decay[i].second == b.l0_decay[i].second);
}

TEST_CASE("constant-rho oracle has zero Lipschitz estimate") {
  const WeightModel w = make_const_rho_oracle(0.25, 0.9);
  const MembershipReport rep = check_membership(w, 500, 1);
  CHECK(rep.lipschitz_estimate == 0.0);
}

TEST_CASE("check_membership rejects tiny samples") {
  const WeightModel w = make_weight("exp", 1.0, 1.0, 0.95);
  CHECK_THROWS_AS(check_membership(w, 10, 1), ContractError);
}
