#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "bergman/equivalence.hpp"
#include "bergman/kernel.hpp"
#include "bergman/measures.hpp"

namespace bergman {

/// Hermitian PSD compression of T_mu onto span{e_0, ..., e_{dim-1}} with
/// (m, n) entry  integral e_n(w) conj(e_m(w)) exp(-2 phi(w)) dmu(w).
/// Point masses additionally keep their rank-one factors so Berezin
/// transforms of the operator evaluate in O(dim) per point.
struct ToeplitzMatrix {
  int dim = 0;
  Eigen::MatrixXcd entries;
  std::vector<double> diag_part;  // radial-density component (empty if none)
  std::vector<std::pair<Eigen::VectorXcd, double>> rank_one;  // atom factors u(w_j), mass
  bool structured = false;  // true when diag_part + rank_one describe the matrix exactly
};

struct AssembleOptions {
  double atom_tail_tol = 1e-6;  // compression tail allowed per atom
};

/// Exact sums for point masses (per-atom log-magnitude factoring),
/// diagonal 1-D quadrature for radial densities, lag sums for grid cells.
/// Throws TruncationError when an atom sits too close to r_max for the
/// requested dim.
ToeplitzMatrix assemble(const Measure& mu, const MomentTable& t, int dim,
                        const AssembleOptions& options = {});

/// Matrix action on basis coefficients (length <= dim, zero padded).
std::vector<cplx> apply(const ToeplitzMatrix& m, const std::vector<cplx>& f_coeffs);

/// Berezin transform of the matrix:  <M c, c>  on the normalized
/// coefficient vector of k_z, c_n = conj(e_n(z))/||.||; non-negative.
double operator_berezin(const ToeplitzMatrix& m, const MomentTable& t, cplx z);

/// Berezin transform sampled over a field layout (FFT-accelerated for
/// structured matrices).
TransformField operator_berezin_field(const ToeplitzMatrix& m, const MomentTable& t,
                                      const SampleSpec& where);

struct SpectralReport {
  std::vector<double> eigenvalues;  // descending, clipped at zero
  std::vector<std::pair<double, double>> schatten;  // (p, S_p)
  double operator_norm = 0.0;
  double trace = 0.0;
  double tail_ratio = 0.0;  // smallest eigenvalue / largest
  bool tail_warning = false;

  double schatten_at(double p) const;
};

/// Deterministic full Hermitian eigendecomposition; eigenvalues within
/// -1e-10 * lambda_max of zero are clipped, larger violations throw
/// ConsistencyError.  S_p = (sum lambda^p)^(1/p).
SpectralReport spectrum(const ToeplitzMatrix& m, const std::vector<double>& p_list);

struct SchattenReportOptions {
  int dim = 200;
  double ratio_window = 100.0;
};

/// Schatten-membership equivalence: for each p the quantities
///   (i) S_p, (ii) lattice sum of mu_hat_r(w_k), (iii) Lp(lambda_rho) norm
///   of mu_hat_delta, (iv) Lp(lambda_rho) norm of the operator Berezin
/// transform, with the ratio matrix and the mu -> 10 mu scaling drift.
std::vector<EquivalenceReport> schatten_report(const Measure& mu, const WeightModel& w,
                                               const MomentTable& t, const PolarGrid& grid,
                                               const Lattice& lat, double delta,
                                               const std::vector<double>& p_list,
                                               const SchattenReportOptions& options = {});

/// (R, ||T_mu - T_mu_R||_op) over the sweep; the difference of a positive
/// measure pair is PSD, so the operator norm is its largest eigenvalue.
std::vector<std::pair<double, double>> compact_tail(const Measure& mu, const MomentTable& t,
                                                    int dim, const std::vector<double>& r_sweep);

struct SchattenBounds {
  double p = 1.0;
  double schatten_side = 0.0;   // S_p
  double integral_side = 0.0;   // (integral T~^p d lambda_rho)^(1/p)
  double c_meas = 0.0;          // measured constant of the asserted direction
  bool ordering_holds = false;
  double trace_ratio = 0.0;     // integral T~ d lambda_rho / trace (p = 1 only)
};

/// Measured constants for the one-sided Schatten bounds through the
/// Berezin transform: p <= 1 gives S_p <= C (integral T~^p)^{1/p};
/// p >= 1 gives the reverse direction.
SchattenBounds schatten_bounds_check(const ToeplitzMatrix& m, const MomentTable& t,
                                     const PolarGrid& grid, double p);

}  // namespace bergman
