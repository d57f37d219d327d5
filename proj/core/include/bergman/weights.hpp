#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace bergman {

using cplx = std::complex<double>;

enum class WeightFamily {
  Exp,       // phi(z) = A (1 - |z|^2)^(-alpha); the production family
  Flat,      // oracle: phi = 0, rho = 1, closed-form kernel on r_max = 1
  ConstRho,  // oracle: phi = 0, rho = const; geometry oracle only
};

/// A radial weight phi together with its analytic Laplacian and the radius
/// function rho = (laplacian phi)^(-1/2).  Immutable after construction;
/// all evaluations are pure.
struct WeightModel {
  WeightFamily family = WeightFamily::Exp;
  double amplitude = 1.0;  // A
  double exponent = 1.0;   // alpha
  double const_rho = 1.0;  // rho value for the ConstRho oracle
  double r_max = 0.95;

  double phi_radial(double r) const;
  double phi(cplx z) const { return phi_radial(std::abs(z)); }

  double laplacian_radial(double r) const;
  double laplacian_phi(cplx z) const { return laplacian_radial(std::abs(z)); }

  double rho_radial(double r) const;
  double rho(cplx z) const { return rho_radial(std::abs(z)); }

  /// true for weight families whose kernel expansion in monomials is valid.
  bool radial() const { return true; }

  /// Oracle families are excluded from assertions that require membership
  /// in the production weight class.
  bool oracle() const { return family != WeightFamily::Exp; }

  std::string family_name() const;
};

/// Builds a weight model.  Families: "exp" (requires r_max in (0,1)),
/// "flat" and "const-rho" (oracles, r_max in (0,1]).
/// For "exp": phi(z) = A (1-|z|^2)^(-alpha) with
/// laplacian 4 A alpha (1 + alpha |z|^2) (1-|z|^2)^(-alpha-2).
WeightModel make_weight(const std::string& family, double amplitude, double exponent,
                        double r_max);

WeightModel make_flat_oracle(double r_max = 1.0);
WeightModel make_const_rho_oracle(double rho, double r_max);

/// Diagnostics for membership of the weight in the production class:
/// positive Laplacian, Lipschitz radius function with vanishing boundary
/// Lipschitz constant, and rho(z) <= s (1 - |z|).
struct MembershipReport {
  double min_laplacian = 0.0;
  double lipschitz_estimate = 0.0;
  // (threshold t, sup of |rho(z)-rho(w)|/|z-w| over sampled pairs with
  // |z|,|w| >= t); thresholds 0.0, 0.1, ..., 0.9.
  std::vector<std::pair<double, double>> l0_decay;
  double rho_over_one_minus_mod = 0.0;  // reported s
};

/// Samples the truncated disc; deterministic for a fixed seed.
/// Violations are reported, never thrown.
MembershipReport check_membership(const WeightModel& w, int n_samples, std::uint64_t seed);

}  // namespace bergman
