#include <doctest.h>

#include <cmath>

#include "bergman/errors.hpp"
#include "bergman/measures.hpp"
#include "bergman/rng.hpp"
#include "bergman/toeplitz.hpp"

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

constexpr int kDim = 160;

}  // namespace

TEST_CASE("single atom at the origin fills only the (0,0) entry") {
  const double c = 0.8;
  const Measure mu = make_atomic({{cplx(0.0, 0.0), c}}, 0.95);
  const ToeplitzMatrix m = assemble(mu, table(), kDim);
  const double expected = c * std::exp(-2.0 * weight().phi_radial(0.0) - table().log_h[0]);
  CHECK(std::abs(m.entries(0, 0) - expected) <= 1e-14 * expected);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      if (a != 0 || b != 0) CHECK(std::abs(m.entries(a, b)) <= 1e-16);
}

TEST_CASE("assembly is linear in the measure") {
  const Measure mu = make_canonical_measure("atom-cluster", weight());
  const ToeplitzMatrix m1 = assemble(mu, table(), kDim);
  const ToeplitzMatrix m3 = assemble(scale_measure(mu, 3.0), table(), kDim);
  const double scale = m1.entries.cwiseAbs().maxCoeff();
  CHECK((m3.entries - 3.0 * m1.entries).cwiseAbs().maxCoeff() <= 1e-12 * scale);
}

TEST_CASE("uniform density gives the identity up to rounding") {
  const Measure mu = make_canonical_measure("uniform", weight());
  const ToeplitzMatrix m = assemble(mu, table(), kDim);
  for (int n = 0; n < kDim; ++n) CHECK(std::abs(m.entries(n, n) - 1.0) <= 1e-12);
  const SpectralReport spec = spectrum(m, {1.0});
  for (double l : spec.eigenvalues) CHECK(std::fabs(l - 1.0) <= 1e-12);
}

TEST_CASE("radial grid density assembles to a near-diagonal matrix") {
  // independent 2-D path for a radial symbol: uniform values on the grid
  std::vector<double> values(grid().node_count(), 1.0);
  const Measure gd = make_grid_density(values, grid(), 0.95);
  const ToeplitzMatrix m = assemble(gd, table(), kDim);
  const SpectralReport spec = spectrum(m, {});
  double offdiag = 0.0;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      if (a != b) offdiag = std::max(offdiag, std::abs(m.entries(a, b)));
  CHECK(offdiag <= 1e-10 * spec.operator_norm);

  // eigenvalues match the 1-D diagonal route
  const Measure rd = make_radial_density("uniform", 1.0, 0.95, 0.95);
  const std::vector<double> diag = density_diagonal(rd.density, table(), kDim - 1);
  std::vector<double> sorted = diag;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  REQUIRE(spec.eigenvalues.size() == sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    CHECK(spec.eigenvalues[i] == doctest::Approx(sorted[i]).epsilon(1e-8));
}

TEST_CASE("apply: matrix action matches the direct integral") {
  const Measure mu = make_atomic({{cplx(0.35, 0.1), 0.6}, {cplx(-0.2, 0.3), 0.4}}, 0.95);
  const ToeplitzMatrix m = assemble(mu, table(), kDim);

  // f = e_0
  std::vector<cplx> f(1, cplx(1.0, 0.0));
  const std::vector<cplx> y = bergman::apply(m, f);

  for (const cplx z : {cplx(0.0, 0.0), cplx(0.3, 0.0)}) {
    // direct: (T f)(z) e^{-phi(z)} = sum_j m_j [f(w_j) e^{-phi(w_j)}] kappa(z, w_j)
    const std::vector<cplx> uz = weighted_basis(table(), z);
    cplx direct(0.0, 0.0);
    for (const Atom& a : mu.atoms) {
      const std::vector<cplx> uw = weighted_basis(table(), a.pos);
      cplx kzw(0.0, 0.0);
      for (std::size_t n = 0; n < uz.size(); ++n) kzw += uz[n] * std::conj(uw[n]);
      direct += a.mass * uw[0] * kzw;  // f(w) e^{-phi(w)} = u_0(w) for f = e_0
    }
    cplx via_matrix(0.0, 0.0);
    for (int n = 0; n < kDim; ++n) via_matrix += y[static_cast<std::size_t>(n)] * uz[static_cast<std::size_t>(n)];
    CHECK(std::abs(via_matrix - direct) <= 1e-8 * std::abs(direct));
  }

  std::vector<cplx> zero(8, cplx(0.0, 0.0));
  for (const cplx& v : bergman::apply(m, zero)) CHECK(v == cplx(0.0, 0.0));

  std::vector<cplx> too_long(kDim + 1, cplx(1.0, 0.0));
  CHECK_THROWS_AS(bergman::apply(m, too_long), ContractError);
}

TEST_CASE("identity oracle: apply reproduces coefficients") {
  const Measure mu = make_canonical_measure("uniform", weight());
  const ToeplitzMatrix m = assemble(mu, table(), kDim);
  Rng rng(21);
  std::vector<cplx> f(kDim - 2);
  for (cplx& c : f) c = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  const std::vector<cplx> y = bergman::apply(m, f);
  for (std::size_t n = 0; n < f.size(); ++n) CHECK(std::abs(y[n] - f[n]) <= 1e-10);
}

TEST_CASE("operator Berezin transform matches the measure Berezin transform") {
  const Measure mu = make_canonical_measure("atom-cluster", weight());
  const ToeplitzMatrix m = assemble(mu, table(), 200);
  Rng rng(33);
  std::vector<cplx> pts;
  for (int i = 0; i < 100; ++i) pts.push_back(rng.disc_point(0.85));
  const TransformField ref = berezin_measure(mu, table(), SampleSpec::at(pts));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double ob = operator_berezin(m, table(), pts[i]);
    CHECK(std::fabs(ob - ref.values[i]) <= 1e-6 * ref.values[i]);
  }

  // rank-one closed form at the origin
  const Measure delta0 = make_atomic({{cplx(0.0, 0.0), 1.0}}, 0.95);
  const ToeplitzMatrix m0 = assemble(delta0, table(), 200);
  const double expected = std::exp(-2.0 * weight().phi_radial(0.0) - table().log_h[0]);
  CHECK(operator_berezin(m0, table(), cplx(0.0, 0.0)) ==
        doctest::Approx(expected).epsilon(1e-12));

  const Measure zero = make_zero_measure(0.95);
  const ToeplitzMatrix mz = assemble(zero, table(), 64);
  CHECK(operator_berezin(mz, table(), cplx(0.3, 0.2)) == 0.0);
}

TEST_CASE("operator_berezin_field agrees with the pointwise form") {
  // atoms plus a radial density exercises both structured paths
  const Measure mu =
      add_measures(scale_measure(make_canonical_measure("atom-cluster", weight()), 0.5),
                   make_radial_density("uniform", 0.5, 0.95, 0.95));
  const ToeplitzMatrix m = assemble(mu, table(), kDim);
  const TransformField field =
      operator_berezin_field(m, table(), SampleSpec::polar(grid(), 0.8));
  Rng rng(5);
  for (int i = 0; i < 24; ++i) {
    const std::size_t idx = rng.next_u64() % field.points.size();
    const double direct = operator_berezin(m, table(), field.points[idx]);
    CHECK(field.values[idx] == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("rank-one spectra: S_p independent of p") {
  for (const double a_mod : {0.0, 0.5}) {
    const double c = 1.3;
    const Measure mu = make_atomic({{cplx(a_mod, 0.0), c}}, 0.95);
    const ToeplitzMatrix m = assemble(mu, table(), 200);
    const SpectralReport spec = spectrum(m, {0.5, 1.0, 2.0, 4.0});
    // closed form: c * e^{-2 phi(a)} * sum_{n<dim} |a|^{2n} / h_n
    double khat = std::exp(-table().log_h[0]);
    for (int n = 1; n < 200 && a_mod > 0.0; ++n)
      khat += std::exp(2.0 * n * std::log(a_mod) - table().log_h[n]);
    const double expected = c * std::exp(-2.0 * weight().phi_radial(a_mod)) * khat;
    for (const auto& [p, s] : spec.schatten)
      CHECK(s == doctest::Approx(expected).epsilon(1e-10));
    CHECK(spec.eigenvalues[0] == doctest::Approx(expected).epsilon(1e-10));
    for (std::size_t i = 1; i < spec.eigenvalues.size(); ++i)
      CHECK(spec.eigenvalues[i] <= 1e-12 * expected);
  }
}

TEST_CASE("schatten norms scale linearly and decrease in p") {
  const Measure mu = make_canonical_measure("atom-cluster", weight());
  const ToeplitzMatrix m1 = assemble(mu, table(), kDim);
  const ToeplitzMatrix m3 = assemble(scale_measure(mu, 3.0), table(), kDim);
  const std::vector<double> ps = {0.5, 1.0, 2.0, 4.0};
  const SpectralReport s1 = spectrum(m1, ps);
  const SpectralReport s3 = spectrum(m3, ps);
  double prev = 1e300;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(s3.schatten[i].second == doctest::Approx(3.0 * s1.schatten[i].second).epsilon(1e-10));
    CHECK(s1.schatten[i].second <= prev * (1.0 + 1e-12));
    prev = s1.schatten[i].second;
  }
  // trace identity
  double esum = 0.0;
  for (double l : s1.eigenvalues) esum += l;
  CHECK(esum == doctest::Approx(s1.trace).epsilon(1e-10));
}

TEST_CASE("atoms hugging the rim are rejected for small truncations") {
  const Measure mu = make_atomic({{cplx(0.9495, 0.0), 1.0}}, 0.95);
  CHECK_THROWS_AS(assemble(mu, table(), 32), TruncationError);
}

TEST_CASE("compact_tail") {
  const Measure cluster = make_canonical_measure("atom-cluster", weight());
  const std::vector<double> sweep = {0.2, 0.4, 0.6, 0.7, 0.8};
  const auto tail = compact_tail(cluster, table(), kDim, sweep);
  REQUIRE(tail.size() == sweep.size());
  // non-increasing, exactly zero beyond the support (0.665)
  for (std::size_t i = 1; i < tail.size(); ++i)
    CHECK(tail[i].second <= tail[i - 1].second + 1e-12);
  CHECK(tail.back().second == 0.0);

  const auto zero_tail = compact_tail(make_zero_measure(0.95), table(), 32, sweep);
  for (const auto& [r, norm] : zero_tail) CHECK(norm == 0.0);

  // full-support density: the cut measure keeps the top basis modes, so the
  // norm stays near 1 until the sweep reaches the support itself
  const Measure dens = make_canonical_measure("uniform", weight());
  const std::vector<double> dsweep = {0.2, 0.5, 0.8, 0.95};
  const auto dtail = compact_tail(dens, table(), kDim, dsweep);
  for (std::size_t i = 1; i < dtail.size(); ++i)
    CHECK(dtail[i].second <= dtail[i - 1].second + 1e-12);
  CHECK(dtail.back().second == 0.0);
  CHECK(dtail.front().second > 0.5);
}

TEST_CASE("schatten bounds through the Berezin transform") {
  const Measure mu = make_atomic({{cplx(0.4, 0.1), 0.9}}, 0.95);
  const ToeplitzMatrix m = assemble(mu, table(), kDim);

  const SchattenBounds b_half = schatten_bounds_check(m, table(), grid(), 0.5);
  CHECK(b_half.ordering_holds);
  CHECK(b_half.c_meas > 0.0);

  const SchattenBounds b1 = schatten_bounds_check(m, table(), grid(), 1.0);
  CHECK(b1.trace_ratio > 0.0);

  const SchattenBounds b2 = schatten_bounds_check(m, table(), grid(), 2.0);
  CHECK(b2.c_meas > 0.0);

  // zero operator: both sides vanish
  const ToeplitzMatrix mz = assemble(make_zero_measure(0.95), table(), 32);
  const SchattenBounds bz = schatten_bounds_check(mz, table(), grid(), 1.0);
  CHECK(bz.schatten_side == 0.0);
  CHECK(bz.integral_side == 0.0);
}

TEST_CASE("assemble dimension contract") {
  const Measure mu = make_atomic({{cplx(0.1, 0.0), 1.0}}, 0.95);
  CHECK_THROWS_AS(assemble(mu, table(), 0), ContractError);
  CHECK_THROWS_AS(assemble(mu, table(), table().n_basis + 1), ContractError);
}
