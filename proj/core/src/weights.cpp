#include "bergman/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bergman/errors.hpp"
#include "bergman/rng.hpp"

namespace bergman {

double WeightModel::phi_radial(double r) const {
  switch (family) {
    case WeightFamily::Exp: {
      const double t = 1.0 - r * r;
      return amplitude * std::pow(t, -exponent);
    }
    case WeightFamily::Flat:
    case WeightFamily::ConstRho:
      return 0.0;
  }
  return 0.0;
}

double WeightModel::laplacian_radial(double r) const {
  switch (family) {
    case WeightFamily::Exp: {
      const double t = r * r;
      return 4.0 * amplitude * exponent * (1.0 + exponent * t) *
             std::pow(1.0 - t, -exponent - 2.0);
    }
    case WeightFamily::Flat:
    case WeightFamily::ConstRho:
      return 0.0;  // phi == 0; rho is an override, not (lap phi)^(-1/2)
  }
  return 0.0;
}

double WeightModel::rho_radial(double r) const {
  switch (family) {
    case WeightFamily::Exp:
      return 1.0 / std::sqrt(laplacian_radial(r));
    case WeightFamily::Flat:
      return 1.0;
    case WeightFamily::ConstRho:
      return const_rho;
  }
  return 1.0;
}

std::string WeightModel::family_name() const {
  switch (family) {
    case WeightFamily::Exp:
      return "exp";
    case WeightFamily::Flat:
      return "flat";
    case WeightFamily::ConstRho:
      return "const-rho";
  }
  return "?";
}

WeightModel make_weight(const std::string& family, double amplitude, double exponent,
                        double r_max) {
  if (family == "exp") {
    if (amplitude <= 0.0 || exponent <= 0.0)
      throw ParameterError("make_weight: amplitude and exponent must be positive");
    if (!(r_max > 0.0 && r_max < 1.0))
      throw DomainError("make_weight: r_max must lie in (0, 1)");
    WeightModel w;
    w.family = WeightFamily::Exp;
    w.amplitude = amplitude;
    w.exponent = exponent;
    w.r_max = r_max;
    return w;
  }
  if (family == "flat") return make_flat_oracle(r_max);
  if (family == "const-rho") return make_const_rho_oracle(amplitude, r_max);
  throw ParameterError("make_weight: unknown family '" + family + "'");
}

WeightModel make_flat_oracle(double r_max) {
  // The flat oracle admits r_max = 1: its moment integrals stay finite and
  // the closed-form kernel check needs the full disc.
  if (!(r_max > 0.0 && r_max <= 1.0))
    throw DomainError("make_flat_oracle: r_max must lie in (0, 1]");
  WeightModel w;
  w.family = WeightFamily::Flat;
  w.r_max = r_max;
  return w;
}

WeightModel make_const_rho_oracle(double rho, double r_max) {
  if (rho <= 0.0) throw ParameterError("make_const_rho_oracle: rho must be positive");
  if (!(r_max > 0.0 && r_max <= 1.0))
    throw DomainError("make_const_rho_oracle: r_max must lie in (0, 1]");
  WeightModel w;
  w.family = WeightFamily::ConstRho;
  w.const_rho = rho;
  w.r_max = r_max;
  return w;
}

MembershipReport check_membership(const WeightModel& w, int n_samples, std::uint64_t seed) {
  if (n_samples < 100) throw ContractError("check_membership: n_samples must be >= 100");

  MembershipReport rep;
  Rng rng(seed);

  rep.min_laplacian = std::numeric_limits<double>::infinity();
  rep.rho_over_one_minus_mod = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const cplx z = rng.disc_point(w.r_max);
    const double r = std::abs(z);
    rep.min_laplacian = std::min(rep.min_laplacian, w.laplacian_radial(r));
    rep.rho_over_one_minus_mod = std::max(rep.rho_over_one_minus_mod, w.rho_radial(r) / (1.0 - r));
  }

  // Lipschitz quotients over a pair sample shared by every threshold, so
  // the decay table is non-increasing by construction.
  struct PairQ {
    double min_mod;
    double quotient;
  };
  std::vector<PairQ> pairs;
  pairs.reserve(static_cast<std::size_t>(n_samples));
  Rng prng = rng.fork(1);
  for (int i = 0; i < n_samples; ++i) {
    const cplx z = prng.disc_point(w.r_max);
    const cplx u = prng.disc_point(w.r_max);
    const double d = std::abs(z - u);
    if (d < 1e-12) continue;
    const double q = std::fabs(w.rho(z) - w.rho(u)) / d;
    pairs.push_back({std::min(std::abs(z), std::abs(u)), q});
  }
  // Short-range pairs probe the gradient; long-range pairs alone
  // underestimate the Lipschitz constant.
  Rng srng = rng.fork(2);
  for (int i = 0; i < n_samples; ++i) {
    const cplx z = srng.disc_point(w.r_max);
    const double eps = 1e-4 * (1.0 + std::abs(z));
    const double ang = srng.uniform(0.0, 2.0 * std::numbers::pi);
    const cplx u = z + cplx(eps * std::cos(ang), eps * std::sin(ang));
    if (std::abs(u) > w.r_max) continue;
    const double q = std::fabs(w.rho(z) - w.rho(u)) / std::abs(z - u);
    pairs.push_back({std::min(std::abs(z), std::abs(u)), q});
  }

  rep.lipschitz_estimate = 0.0;
  for (const auto& p : pairs) rep.lipschitz_estimate = std::max(rep.lipschitz_estimate, p.quotient);

  for (int k = 0; k <= 9; ++k) {
    const double t = 0.1 * k;
    double sup = 0.0;
    for (const auto& p : pairs)
      if (p.min_mod >= t) sup = std::max(sup, p.quotient);
    rep.l0_decay.emplace_back(t, sup);
  }
  return rep;
}

}  // namespace bergman
