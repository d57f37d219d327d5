#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "bergman/quadrature.hpp"
#include "bergman/weights.hpp"

namespace bergman {

struct MetricGrid;  // geometry.hpp

struct QuadSpec {
  int nodes_per_panel = 32;
  int initial_levels = 6;
  int max_levels = 40;
  double refine_rel_tol = 1e-12;  // convergence of log h_n between levels
};

/// Monomial moments of the weight on the truncated disc:
///   h_n = 2 * integral_0^r_max  r^(2n+1) exp(-2 phi(r)) dr,
/// stored as log h_n.  e_n(z) = z^n / sqrt(h_n) is then an orthonormal
/// basis and K(z, w) = sum_n (z conj(w))^n / h_n the reproducing kernel of
/// the truncated model space.
struct MomentTable {
  WeightModel weight;
  int n_basis = 0;                // highest monomial degree
  std::vector<double> log_h;      // size n_basis + 1
  RadialRule rule;                // converged radial rule
  QuadSpec quad;

  double h(int n) const;
};

/// Composite Gauss-Legendre quadrature with panels halving toward r_max,
/// integrand handled in log domain.  Throws PrecisionError when the panel
/// refinement fails to converge and ConsistencyError if the moment
/// invariants (positivity, log-convexity, strict decrease) fail.
MomentTable compute_moments(const WeightModel& w, int n_basis, const QuadSpec& spec = {});

/// Weighted orthonormal basis u_n(z) = e_n(z) exp(-phi(z)), computed in
/// log domain so no intermediate touches exp(phi).  kappa(z, w) =
/// K(z, w) exp(-phi(z) - phi(w)) = <u(z), u(w)>.
std::vector<cplx> weighted_basis(const MomentTable& t, cplx z);

/// kappa(z, z) = sum_n |u_n(z)|^2, always positive.
double kernel_diag(const MomentTable& t, cplx z);

struct KernelValue {
  cplx kappa;       // K(z,w) exp(-phi(z)-phi(w))
  double tail_rel;  // truncation tail estimate relative to the series peak
};

/// Evaluates kappa(z, w) with a geometric tail bound; throws
/// TruncationError when the tail exceeds 1e-10 of the leading magnitude.
KernelValue kernel_eval(const MomentTable& t, cplx z, cplx w);

/// Largest radius at which the diagonal truncation tail stays below
/// tail_tol; kernel-based fields are sampled inside this radius.
double kernel_valid_radius(const MomentTable& t, double tail_tol = 1e-10);

/// A positive quantity carried as its logarithm (norms of K_z overflow
/// doubles for strong weights).
struct LogValue {
  double log_value = 0.0;
  double value() const;
};

/// ||K_z||_{A^p} via 2-D polar quadrature of |kappa(z,.)|^p, returned in
/// log domain:  log ||K_z|| = phi(z) + (1/p) log integral |kappa|^p dA.
LogValue norm_Kz(const MomentTable& t, const PolarGrid& grid, cplx z, double p);

/// The A^p-normalized kernel k_{p,z} = K_z / ||K_z||_{A^p}, exposed through
/// its weighted evaluations  k_{p,z}(w) exp(-phi(w))  which are plain
/// doubles for every w in the truncated disc.
struct NormalizedKernel {
  cplx z;
  double p = 2.0;
  std::vector<cplx> u;      // weighted basis at z
  double log_scale = 0.0;   // phi(z) - log ||K_z||_p

  /// k_{p,z}(w) exp(-phi(w))
  cplx weighted_eval(const MomentTable& t, cplx w) const;
};

NormalizedKernel normalized_kernel(const MomentTable& t, const PolarGrid& grid, cplx z, double p);

/// |quadrature of integral f(w) K(z,w) exp(-2 phi(w)) dA(w) - f(z)| for a
/// polynomial f given by coefficients (degree <= n_basis - 2).
double reproducing_residual(const MomentTable& t, const PolarGrid& grid,
                            std::span<const cplx> f_coeffs, cplx z);

/// Least-squares envelope fit of log(|kappa(z,w)| rho(z) rho(w)) against
/// -sigma d_rho(z,w) + C over random pairs.
struct DecayFit {
  double sigma = 0.0;
  double c_tilde = 0.0;
  double rms_residual = 0.0;
  bool weight_in_scope = true;  // false for oracle weights outside the class
  int n_pairs_used = 0;
};

DecayFit fit_decay_sigma(const MomentTable& t, const MetricGrid& grid, int n_pairs,
                         std::uint64_t seed);

/// Evaluate kappa(z, r exp(i theta_j)) for all n_theta equispaced angles at
/// once (one FFT); n_theta must be a power of two >= n_basis + 1.
std::vector<cplx> kernel_ring_values(const MomentTable& t, const std::vector<cplx>& u_z,
                                     double r, int n_theta);

/// Weighted basis magnitudes a_n(r) = r^n exp(-phi(r)) / sqrt(h_n).
std::vector<double> weighted_basis_radial(const MomentTable& t, double r);

}  // namespace bergman
