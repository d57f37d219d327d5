#include <doctest.h>

#include <cmath>
#include <complex>

#include "bergman/errors.hpp"
#include "bergman/geometry.hpp"
#include "bergman/kernel.hpp"
#include "bergman/rng.hpp"
#include "oracles.hpp"

using namespace bergman;

namespace {

const MomentTable& exp_table() {
  static const MomentTable t = compute_moments(make_weight("exp", 1.0, 1.0, 0.95), 256);
  return t;
}

const MomentTable& flat_table() {
  static const MomentTable t = compute_moments(make_flat_oracle(1.0), 256);
  return t;
}

const PolarGrid& exp_grid() {
  static const PolarGrid g = make_polar_grid(exp_table().rule, 512);
  return g;
}

const PolarGrid& flat_grid() {
  static const PolarGrid g = make_polar_grid(flat_table().rule, 512);
  return g;
}

}  // namespace

TEST_CASE("flat oracle moments: h_n = 1/(n+1)") {
  const MomentTable& t = flat_table();
  for (int n = 0; n <= t.n_basis; ++n)
    CHECK(t.h(n) == doctest::Approx(1.0 / (n + 1)).epsilon(1e-12));
}

TEST_CASE("exp moments agree with an adaptive-Simpson oracle") {
  const MomentTable& t = exp_table();
  for (int n : {0, 1, 7, 32}) {
    const double expected = 2.0 * oracles::adaptive_simpson(
        [n](double r) { return std::pow(r, 2 * n + 1) * std::exp(-2.0 / (1.0 - r * r)); }, 0.0,
        0.95, 1e-15);
    CHECK(t.h(n) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("moment invariants: positivity, decrease, log-convexity") {
  for (const MomentTable* t : {&exp_table(), &flat_table()}) {
    for (double lh : t->log_h) CHECK(std::isfinite(lh));
    for (std::size_t n = 0; n + 1 < t->log_h.size(); ++n) CHECK(t->log_h[n + 1] < t->log_h[n]);
    for (std::size_t n = 0; n + 2 < t->log_h.size(); ++n)
      CHECK(t->log_h[n] + t->log_h[n + 2] - 2.0 * t->log_h[n + 1] >= -1e-12);
  }
  // h_0 h_2 >= h_1^2 in plain form
  const MomentTable& t = exp_table();
  CHECK(t.h(0) * t.h(2) >= t.h(1) * t.h(1));
}

TEST_CASE("quadrature convergence failure raises PrecisionError") {
  QuadSpec spec;
  spec.initial_levels = 1;
  spec.max_levels = 2;
  spec.refine_rel_tol = 1e-18;  // unreachable
  CHECK_THROWS_AS(compute_moments(make_weight("exp", 1.0, 1.0, 0.95), 64, spec), PrecisionError);
}

TEST_CASE("flat oracle kernel matches the closed form") {
  const MomentTable& t = flat_table();
  Rng rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const cplx z = rng.disc_point(0.9);
    const cplx w = rng.disc_point(0.9);
    const cplx exact = oracles::flat_kernel(z, w);
    const cplx got = kernel_eval(t, z, w).kappa;  // phi = 0 so kappa = K
    worst = std::max(worst, std::abs(got - exact) / std::abs(exact));
  }
  CHECK(worst <= 1e-10);
  CHECK(kernel_eval(t, cplx(0.5, 0.0), cplx(0.5, 0.0)).kappa.real() ==
        doctest::Approx(1.0 / (0.75 * 0.75)).epsilon(1e-12));
}

TEST_CASE("kappa(z, 0) keeps only the constant term") {
  const MomentTable& t = exp_table();
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const cplx z = rng.disc_point(0.8);
    const cplx got = kernel_eval(t, z, cplx(0.0, 0.0)).kappa;
    const double expected =
        std::exp(-t.weight.phi(z) - t.weight.phi_radial(0.0) - t.log_h[0]);
    CHECK(std::abs(got - expected) <= 1e-12 * expected);
  }
}

TEST_CASE("diagonal positivity and the Cauchy-Schwarz bound") {
  const MomentTable& t = exp_table();
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const cplx z = rng.disc_point(0.85);
    const cplx w = rng.disc_point(0.85);
    const double dz = kernel_diag(t, z);
    const double dw = kernel_diag(t, w);
    CHECK(dz > 0.0);
    const cplx k = kernel_eval(t, z, w).kappa;
    CHECK(std::abs(k) <= std::sqrt(dz * dw) * (1.0 + 1e-12));
  }
}

TEST_CASE("kernel_eval raises TruncationError close to the rim") {
  const MomentTable& t = exp_table();
  const cplx z(0.948, 0.0);
  CHECK_THROWS_AS(kernel_eval(t, z, z), TruncationError);
  CHECK(kernel_valid_radius(t) > 0.8);
  CHECK(kernel_valid_radius(t) < 0.948);
}

TEST_CASE("RKHS identity: quadrature norm against the diagonal") {
  const MomentTable& t = exp_table();
  const PolarGrid& g = exp_grid();
  Rng rng(7);
  for (int i = 0; i < 15; ++i) {
    const cplx z = rng.disc_point(0.85);
    const double lhs = 2.0 * norm_Kz(t, g, z, 2.0).log_value;
    const double rhs = std::log(kernel_diag(t, z)) + 2.0 * t.weight.phi(z);
    CHECK(std::fabs(lhs - rhs) <= 1e-8);
  }
}

TEST_CASE("flat oracle: ||K_0||_p = 1 for every p") {
  const MomentTable& t = flat_table();
  const PolarGrid& g = flat_grid();
  for (double p : {1.0, 2.0, 4.0})
    CHECK(norm_Kz(t, g, cplx(0.0, 0.0), p).value() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("norm_Kz p = 1 agrees with Monte Carlo integration") {
  const MomentTable& t = exp_table();
  const PolarGrid& g = exp_grid();
  const cplx z(0.4, 0.2);

  const double quad = norm_Kz(t, g, z, 1.0).value();

  // MC over the truncated disc: integral |kappa(z,w)| dA(w), then
  // ||K_z||_1 = e^{phi(z)} * integral.
  const std::vector<cplx> uz = weighted_basis(t, z);
  Rng rng(123);
  const std::size_t n_samples = 2'000'000;
  double acc = 0.0, acc2 = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const cplx w = rng.disc_point(t.weight.r_max);
    const std::vector<cplx> uw = weighted_basis(t, w);
    cplx dot(0.0, 0.0);
    for (std::size_t n = 0; n < uz.size(); ++n) dot += uz[n] * std::conj(uw[n]);
    const double v = std::abs(dot);
    acc += v;
    acc2 += v * v;
  }
  const double area = t.weight.r_max * t.weight.r_max;  // normalized area
  const double mean = acc / n_samples;
  const double var = std::max(0.0, acc2 / n_samples - mean * mean);
  const double mc = mean * area;
  const double se = std::sqrt(var / n_samples) * area;
  const double mc_norm = std::exp(t.weight.phi(z)) * mc;
  const double mc_se = std::exp(t.weight.phi(z)) * se;
  CHECK(std::fabs(quad - mc_norm) <= 3.0 * mc_se);
}

TEST_CASE("normalized kernels have unit norm") {
  const MomentTable& t = exp_table();
  const PolarGrid& g = exp_grid();
  for (double p : {1.0, 2.0}) {
    const NormalizedKernel k = normalized_kernel(t, g, cplx(0.3, 0.1), p);
    // re-integrate |k_{p,z} e^{-phi}|^p
    double acc = 0.0;
    for (std::size_t i = 0; i < g.radial.size(); ++i) {
      const std::vector<cplx> ring = kernel_ring_values(t, k.u, g.radial.nodes[i], g.n_theta);
      double ring_acc = 0.0;
      for (const cplx& v : ring) ring_acc += std::pow(std::abs(v) * std::exp(k.log_scale), p);
      acc += g.radial.weights[i] * g.radial.nodes[i] * ring_acc;
    }
    acc *= 2.0 / g.n_theta;
    CHECK(std::pow(acc, 1.0 / p) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("peak window statistic |k_{2,w}(w)| e^{-phi} rho(w) stays bounded") {
  const MomentTable& t = exp_table();
  const PolarGrid& g = exp_grid();
  double lo = 1e300, hi = 0.0;
  for (double r : {0.0, 0.3, 0.6, 0.9 * 0.95}) {
    const cplx w(r, 0.0);
    const NormalizedKernel k = normalized_kernel(t, g, w, 2.0);
    const double v = std::abs(k.weighted_eval(t, w)) * t.weight.rho(w);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo <= 4.0);  // measured spread is ~1.4; generous margin
}

TEST_CASE("normalized kernels flatten on compact subsets as |z| grows") {
  const MomentTable& t = exp_table();
  const PolarGrid& g = exp_grid();
  double prev = 1e300;
  for (double zr : {0.5 * 0.95, 0.7 * 0.95, 0.9 * 0.95}) {
    const NormalizedKernel k = normalized_kernel(t, g, cplx(zr, 0.0), 2.0);
    double sup = 0.0;
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 16; ++j) {
        const double r = 0.5 * (i + 0.5) / 40.0;
        const double th = 6.283185307179586 * j / 16.0;
        const cplx w(r * std::cos(th), r * std::sin(th));
        sup = std::max(sup, std::abs(k.weighted_eval(t, w)));
      }
    CHECK(sup < prev);
    prev = sup;
  }
}

TEST_CASE("reproducing residuals") {
  const MomentTable& t = exp_table();
  const PolarGrid& g = exp_grid();

  const std::vector<cplx> one = {cplx(1.0, 0.0)};
  CHECK(reproducing_residual(t, g, one, cplx(0.2, 0.5)) <= 1e-8);

  const std::vector<cplx> cubic = {cplx(0, 0), cplx(0, 0), cplx(0, 0), cplx(1.0, 0.0)};
  CHECK(reproducing_residual(t, g, cubic, cplx(0.4, 0.0)) <= 1e-8);

  std::vector<cplx> too_big(static_cast<std::size_t>(t.n_basis), cplx(0.0, 0.0));
  too_big.push_back(cplx(1.0, 0.0));  // degree n_basis > n_basis - 2
  CHECK_THROWS_AS(reproducing_residual(t, g, too_big, cplx(0.1, 0.0)), ContractError);
}

TEST_CASE("sub-mean property with a stable measured constant") {
  const MomentTable& t = exp_table();
  const PolarGrid& g = exp_grid();
  const double r = 0.25;
  Rng rng(31);
  std::vector<double> ratios;
  for (int i = 0; i < 20; ++i) {
    const cplx a = rng.disc_point(0.8);
    const NormalizedKernel k = normalized_kernel(t, g, a, 2.0);
    const double lhs = std::norm(k.weighted_eval(t, a));
    const double radius = r * t.weight.rho(a);
    const DiscRule rule = make_disc_rule(a, radius);
    double integral = 0.0;
    for (std::size_t n = 0; n < rule.nodes.size(); ++n)
      integral += rule.weights[n] * std::norm(k.weighted_eval(t, rule.nodes[n]));
    const double rho2 = t.weight.rho(a) * t.weight.rho(a);
    ratios.push_back(lhs / (integral / rho2));
  }
  double lo = 1e300, hi = 0.0, sum = 0.0;
  for (double v : ratios) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  const double mid = sum / ratios.size();
  CHECK(hi <= 1.5 * mid);
  CHECK(lo >= 0.5 * mid);
}

TEST_CASE("decay fit: positive rate for the exp family, oracle flagged for flat") {
  const MomentTable& t = exp_table();
  const MetricGrid grid = make_metric_grid(t.weight, 128, 256);
  const DecayFit fit = fit_decay_sigma(t, grid, 200, 99);
  CHECK(fit.weight_in_scope);
  CHECK(fit.sigma > 0.0);

  // envelope property: C~ dominates the diagonal values
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    const cplx z = rng.disc_point(0.8);
    const double rho = t.weight.rho(z);
    CHECK(fit.c_tilde >= std::log(kernel_diag(t, z) * rho * rho) - 1e-9);
  }

  const MomentTable& ft = flat_table();
  const MetricGrid fgrid = make_metric_grid(ft.weight, 128, 256);
  const DecayFit ffit = fit_decay_sigma(ft, fgrid, 200, 99);
  CHECK_FALSE(ffit.weight_in_scope);
}
