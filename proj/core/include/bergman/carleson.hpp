#pragma once

#include <cstdint>
#include <vector>

#include "bergman/equivalence.hpp"
#include "bergman/geometry.hpp"
#include "bergman/kernel.hpp"
#include "bergman/measures.hpp"

namespace bergman {

struct CarlesonOptions {
  double ratio_window = 100.0;
  int net_cap = 128;        // lattice points kept in the test net
  int net_extra = 64;       // additional radial-angular net points
  double vanish_tol = 1e-6; // fraction of the profile peak
};

/// Embedding checker for p <= q: the sup-type quantities
///   (i) sup mu~ rho^(2-2q/p), (ii) sup mu_hat_delta rho^(2-2q/p),
///   (iii) sup_k mu_hat_r(a_k) rho(a_k)^(2-2q/p),
///   (iv) lower bound L = sup over the test net of ||k_{p,w}||_{L^q_mu}^q,
/// plus ratio matrix and scaling drift.
EquivalenceReport carleson_check(const Measure& mu, const WeightModel& w, const MomentTable& t,
                                 const PolarGrid& grid, const Lattice& lat, double p, double q,
                                 double delta, const CarlesonOptions& options = {});

struct VanishingReport {
  std::vector<double> thresholds;
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> profiles;
  bool vanishing_consistent = false;
  double vanish_tol = 1e-6;
};

/// Decay profiles of the boundedness quantities; vanishing-consistent when
/// every profile falls below vanish_tol * peak before the last threshold.
VanishingReport vanishing_check(const Measure& mu, const WeightModel& w, const MomentTable& t,
                                const PolarGrid& grid, const Lattice& lat, double p, double q,
                                double delta, const std::vector<double>& thresholds,
                                const CarlesonOptions& options = {});

/// Embedding checker for q < p through L^{p/(p-q)} norms of mu~ and
/// mu_hat_delta (both against dA) and the lattice sequence with exponent
/// 2 - 2q/p in l^{p/(p-q)}.
EquivalenceReport carleson_qlp_check(const Measure& mu, const WeightModel& w,
                                     const MomentTable& t, const PolarGrid& grid,
                                     const Lattice& lat, double p, double q, double delta,
                                     const CarlesonOptions& options = {});

/// F = sum_k c_k k_{p, w_k}; evaluations are the weighted form
/// F(z) exp(-phi(z)).
struct AtomicFunction {
  std::vector<cplx> coeff_profile;  // W_n = sum_k c_k e^{scale_k} conj(u_n(w_k))
  double p = 2.0;

  cplx weighted_eval(const MomentTable& t, cplx z) const;
  /// weighted values on a full ring of the grid (one FFT)
  std::vector<cplx> weighted_ring(const MomentTable& t, double r, int n_theta) const;
};

struct AtomicFunctionReport {
  AtomicFunction f;
  double norm_Ap = 0.0;
  double coeff_lp = 0.0;
  double ratio = 0.0;  // norm / ||c||_lp
};

/// Builds F from coefficients over the first lattice points (at most 500
/// non-zeros) and reports the quadrature norm against ||c||_{l^p}.
AtomicFunctionReport build_atomic_function(const Lattice& lat, const std::vector<cplx>& coeffs,
                                           double p, const MomentTable& t,
                                           const PolarGrid& grid);

struct KhinchineProbe {
  double mc_mean = 0.0;  // E_eps || sum eps_k c_k k_{p,w_k} ||_{L^q_mu}^q
  double rhs = 0.0;      // sum_k |c_k|^q integral_{D^r(w_k)} |k_{p,w_k} e^{-phi}|^q dmu
  double ratio = 0.0;
};

/// Monte Carlo probe of the random-signs lower bound; deterministic for a
/// fixed seed.
KhinchineProbe khinchine_probe(const Measure& mu, const WeightModel& w, const Lattice& lat,
                               const std::vector<cplx>& coeffs, double p, double q, int trials,
                               std::uint64_t seed, const MomentTable& t, const PolarGrid& grid);

}  // namespace bergman
