#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bergman/errors.hpp"
#include "bergman/kernel.hpp"
#include "bergman/measures.hpp"
#include "bergman/rng.hpp"
#include "oracles.hpp"

using namespace bergman;

namespace {

const WeightModel& weight() {
  static const WeightModel w = make_weight("exp", 1.0, 1.0, 0.95);
  return w;
}

const MomentTable& table() {
  static const MomentTable t = compute_moments(weight(), 256);
  return t;
}

const PolarGrid& grid() {
  static const PolarGrid g = make_polar_grid(table().rule, 512);
  return g;
}

}  // namespace

TEST_CASE("avg_function: atom at the origin") {
  // mu^_r(0) = m / rho(0)^2 = 4m for EXP(1,1)
  const Measure mu = make_atomic({{cplx(0.0, 0.0), 0.7}}, 0.95);
  const TransformField f = avg_function(mu, weight(), 0.3, SampleSpec::at({cplx(0.0, 0.0)}));
  CHECK(f.values[0] == doctest::Approx(4.0 * 0.7).epsilon(1e-14));
}

TEST_CASE("avg_function: zero measure and linearity") {
  const Measure zero = make_zero_measure(0.95);
  const SampleSpec where = SampleSpec::at({cplx(0.1, 0.2), cplx(0.4, -0.3)});
  const TransformField fz = avg_function(zero, weight(), 0.4, where);
  for (double v : fz.values) CHECK(v == 0.0);

  const Measure mu = make_canonical_measure("atom-cluster", weight());
  const TransformField f1 = avg_function(mu, weight(), 0.4, where);
  const TransformField f3 = avg_function(scale_measure(mu, 3.0), weight(), 0.4, where);
  for (std::size_t i = 0; i < f1.values.size(); ++i)
    CHECK(f3.values[i] == doctest::Approx(3.0 * f1.values[i]).epsilon(1e-14));
}

TEST_CASE("avg_function: radial density mass agrees with a 2-D Riemann oracle") {
  const Measure mu = make_radial_density("one-minus-r2", 1.0, 0.95, 0.95);
  const cplx z(0.4, 0.1);
  const double r = 0.5;
  const double radius = r * weight().rho(z);
  const TransformField f = avg_function(mu, weight(), r, SampleSpec::at({z}));

  // brute-force mass on a fine Cartesian grid (normalized area)
  const int n = 600;
  double mass = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx p(z.real() - radius + 2.0 * radius * (i + 0.5) / n,
                   z.imag() - radius + 2.0 * radius * (j + 0.5) / n);
      if (std::abs(p - z) > radius || std::abs(p) > 0.95) continue;
      mass += (1.0 - std::norm(p)) * (2.0 * radius / n) * (2.0 * radius / n);
    }
  mass /= 3.14159265358979323846;
  const double rho2 = weight().rho(z) * weight().rho(z);
  CHECK(f.values[0] == doctest::Approx(mass / rho2).epsilon(2e-3));
}

TEST_CASE("berezin_measure: atom at the origin gives kappa(0,0)") {
  const Measure mu = make_atomic({{cplx(0.0, 0.0), 1.0}}, 0.95);
  const TransformField f = berezin_measure(mu, table(), SampleSpec::at({cplx(0.0, 0.0)}));
  const double expected = std::exp(-2.0 * weight().phi_radial(0.0) - table().log_h[0]);
  CHECK(f.values[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("berezin_measure: bounded by total mass times the peak") {
  const Measure mu = make_canonical_measure("atom-cluster", weight());
  Rng rng(4);
  std::vector<cplx> pts;
  for (int i = 0; i < 20; ++i) pts.push_back(rng.disc_point(0.85));
  const TransformField f = berezin_measure(mu, table(), SampleSpec::at(pts));
  const double mass = total_mass(mu, table().rule);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double diag_z = kernel_diag(table(), pts[i]);
    double peak = 0.0;
    for (const Atom& a : mu.atoms)
      peak = std::max(peak, std::norm(kernel_eval(table(), a.pos, pts[i]).kappa) / diag_z);
    CHECK(f.values[i] <= mass * peak * (1.0 + 1e-12));
  }
}

TEST_CASE("berezin of the constant function is 1 inside the bulk") {
  const RadialDensitySpec one{"uniform", 1.0, 0.95};
  std::vector<cplx> pts;
  for (double r : {0.0, 0.3, 0.6, 0.76}) pts.emplace_back(r, 0.0);
  const TransformField f = berezin_function(one, table(), SampleSpec::at(pts));
  for (double v : f.values) CHECK(std::fabs(v - 1.0) <= 1e-6);
}

TEST_CASE("radial-density Berezin transform: diagonal route vs direct quadrature") {
  // independent path: 2-D quadrature of |kappa(w,z)|^2 g(|w|) / kappa(z,z)
  const Measure mu = make_radial_density("quadratic", 1.0, 0.95, 0.95);
  const cplx z(0.5, 0.2);
  const TransformField f = berezin_measure(mu, table(), SampleSpec::at({z}));

  const std::vector<cplx> uz = weighted_basis(table(), z);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid().radial.size(); ++i) {
    const double r = grid().radial.nodes[i];
    const std::vector<cplx> ring = kernel_ring_values(table(), uz, r, grid().n_theta);
    double ring_acc = 0.0;
    for (const cplx& v : ring) ring_acc += std::norm(v);
    acc += grid().radial.weights[i] * r * (r * r) * ring_acc;
  }
  acc *= 2.0 / grid().n_theta;
  const double direct = acc / kernel_diag(table(), z);
  CHECK(f.values[0] == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("lp_norm of the unit field against dA is the normalized area") {
  TransformField f = make_field(FieldKind::Custom, SampleSpec::radial(grid()));
  for (double& v : f.values) v = 1.0;
  for (double p : {0.5, 1.0, 2.0})
    CHECK(lp_norm(f, p, BaseMeasure::LebesgueDA, grid(), weight()) ==
          doctest::Approx(std::pow(0.95 * 0.95, 1.0 / p)).epsilon(1e-12));

  // homogeneity
  TransformField g = f;
  for (double& v : g.values) v = 2.5;
  CHECK(lp_norm(g, 1.5, BaseMeasure::LebesgueDA, grid(), weight()) ==
        doctest::Approx(2.5 * lp_norm(f, 1.5, BaseMeasure::LebesgueDA, grid(), weight()))
            .epsilon(1e-12));
}

TEST_CASE("lp_norm rejects fields off the quadrature grid") {
  TransformField f = make_field(FieldKind::Custom, SampleSpec::at({cplx(0.1, 0.1)}));
  CHECK_THROWS_AS(lp_norm(f, 1.0, BaseMeasure::LebesgueDA, grid(), weight()), ContractError);
}

TEST_CASE("lattice_sum: single atom seen by exactly one disc") {
  const WeightModel w = make_const_rho_oracle(0.1, 0.9);
  Lattice lat;
  lat.params.r = 0.5;
  lat.params.s = 0.5;
  lat.params.r_max = 0.9;
  for (const cplx p : {cplx(0.0, 0.0), cplx(0.5, 0.0)}) {
    lat.points.push_back(p);
    lat.rho_at.push_back(w.rho(p));
  }
  // atom inside D^r(w_0) = D(0, 0.05) only
  const Measure mu = make_atomic({{cplx(0.02, 0.0), 0.3}}, 0.9);
  const double t_exp = 1.3;
  const double expected = 0.3 / (0.1 * 0.1) * std::pow(0.1, t_exp);
  for (double p : {0.5, 1.0, 2.0})
    CHECK(lattice_sum(mu, w, lat, p, t_exp) == doctest::Approx(expected).epsilon(1e-12));

  CHECK(lattice_sum(make_zero_measure(0.9), w, lat, 1.0, 0.0) == 0.0);
  CHECK(lattice_sum(scale_measure(mu, 5.0), w, lat, 2.0, t_exp) ==
        doctest::Approx(5.0 * expected).epsilon(1e-12));
}

TEST_CASE("restrict_measure") {
  const Measure mu = make_canonical_measure("atom-cluster", weight());

  // R at or beyond the support keeps everything
  const Measure full = restrict_measure(mu, mu.support_radius + 1e-9);
  CHECK(full.atoms.size() == mu.atoms.size());
  CHECK(total_mass(full, table().rule) ==
        doctest::Approx(total_mass(mu, table().rule)).epsilon(1e-15));

  // R below the innermost non-origin atom keeps only the origin atom
  const Measure inner = restrict_measure(mu, 0.05);
  CHECK(inner.atoms.size() == 1);

  // mass is monotone over a sweep
  double prev = 0.0;
  for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double m = total_mass(restrict_measure(mu, r), table().rule);
    CHECK(m >= prev - 1e-15);
    prev = m;
  }

  // densities truncate their support; the mass integral follows exactly
  const Measure dens = make_radial_density("uniform", 1.0, 0.95, 0.95);
  const Measure half = restrict_measure(dens, 0.5);
  CHECK(half.support_radius == doctest::Approx(0.5));
  CHECK(total_mass(half, table().rule) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("decay_profile") {
  const Measure mu = make_atomic({{cplx(0.3, 0.0), 1.0}}, 0.95);  // support radius 0.3
  const TransformField f = avg_function(mu, weight(), 0.4, SampleSpec::polar(grid()));
  const std::vector<double> thresholds = {0.2, 0.5, 0.7};
  const auto profile = decay_profile(f, thresholds);
  // beyond 0.3 + r * rho_max the field is exactly zero
  CHECK(profile[2].second == 0.0);
  CHECK(profile[0].second > 0.0);
  // non-increasing for this decaying field
  CHECK(profile[0].second >= profile[1].second);
  CHECK(profile[1].second >= profile[2].second);

  // constant field stays flat
  TransformField c = make_field(FieldKind::Custom, SampleSpec::polar(grid()));
  for (double& v : c.values) v = 2.0;
  for (const auto& [t, sup] : decay_profile(c, thresholds)) CHECK(sup == 2.0);

  CHECK_THROWS_AS(decay_profile(f, std::vector<double>{0.99}), DomainError);
}

TEST_CASE("monotonicity: mu <= nu implies transforms ordered") {
  const Measure mu = make_canonical_measure("atom-cluster", weight());
  Measure nu = mu;
  for (Atom& a : nu.atoms) a.mass *= 1.5;
  Rng rng(12);
  std::vector<cplx> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(rng.disc_point(0.8));
  const SampleSpec where = SampleSpec::at(pts);
  const TransformField am = avg_function(mu, weight(), 0.4, where);
  const TransformField an = avg_function(nu, weight(), 0.4, where);
  const TransformField bm = berezin_measure(mu, table(), where);
  const TransformField bn = berezin_measure(nu, table(), where);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(am.values[i] <= an.values[i] + 1e-15);
    CHECK(bm.values[i] <= bn.values[i] + 1e-15);
  }
}

TEST_CASE("grid density behaves like its generating density") {
  // realize the uniform density as a grid measure; transforms should agree
  std::vector<double> values(grid().node_count(), 1.0);
  const Measure gd = make_grid_density(values, grid(), 0.95);
  const Measure rd = make_radial_density("uniform", 1.0, 0.95, 0.95);
  CHECK(total_mass(gd, table().rule) ==
        doctest::Approx(total_mass(rd, table().rule)).epsilon(1e-12));

  const cplx z(0.3, 0.1);
  const TransformField fg = avg_function(gd, weight(), 0.4, SampleSpec::at({z}));
  const TransformField fr = avg_function(rd, weight(), 0.4, SampleSpec::at({z}));
  CHECK(fg.values[0] == doctest::Approx(fr.values[0]).epsilon(1e-3));
}

TEST_CASE("atom outside the domain is rejected") {
  CHECK_THROWS_AS(make_atomic({{cplx(0.97, 0.0), 1.0}}, 0.95), DomainError);
  CHECK_THROWS_AS(make_atomic({{cplx(0.1, 0.0), -1.0}}, 0.95), ParameterError);
}

TEST_CASE("canonical measure catalog") {
  const auto names = canonical_measure_names();
  REQUIRE(names.size() == 5);
  for (const std::string n :
       {"atom-cluster", "uniform", "boundary-concentrated", "lattice-atoms", "mixed"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  CHECK_THROWS_AS(make_canonical_measure("nope", weight()), ParameterError);
  CHECK_THROWS_AS(make_canonical_measure("lattice-atoms", weight(), nullptr), ContractError);
}
