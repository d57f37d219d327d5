#pragma once

#include <complex>
#include <string>
#include <vector>

#include "bergman/geometry.hpp"
#include "bergman/kernel.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/weights.hpp"

namespace bergman {

struct Atom {
  cplx pos;
  double mass;
};

/// Named non-negative radial density g(r); family "none" means absent.
struct RadialDensitySpec {
  std::string family = "none";
  double scale = 1.0;
  double support_radius = 0.0;

  bool present() const { return family != "none"; }
  double evaluate(double r) const;
};

/// A finite positive Borel measure on the truncated disc, stored as the
/// sum of point masses, an optional radial density, and optional
/// quadrature-cell masses (the grid-density variant).  Pure variants use
/// one component; mixed measures use several.  Immutable by convention.
struct Measure {
  std::vector<Atom> atoms;
  RadialDensitySpec density;
  std::vector<Atom> cells;  // grid density realized on quadrature cells
  double domain_r_max = 0.95;
  double support_radius = 0.0;
  std::string label;

  bool is_zero() const;
  bool purely_atomic() const { return !density.present() && cells.empty(); }
  bool radial() const { return atoms.empty() && cells.empty(); }
};

Measure make_zero_measure(double domain_r_max);
Measure make_atomic(std::vector<Atom> atoms, double domain_r_max);
Measure make_radial_density(const std::string& family, double scale, double support_radius,
                            double domain_r_max);
/// Grid density: non-negative node values on a polar grid, realized as
/// quadrature-cell masses value * w_i r_i * 2/n_theta.
Measure make_grid_density(const std::vector<double>& values, const PolarGrid& grid,
                          double domain_r_max);

Measure scale_measure(const Measure& mu, double c);
Measure add_measures(const Measure& a, const Measure& b);

/// mu_R(E) = mu(E intersect closed D(0,R)).
Measure restrict_measure(const Measure& mu, double R);

double total_mass(const Measure& mu, const RadialRule& rule);

/// mu(D(center, radius) intersect {|w| <= domain_r_max}); exact sums for
/// point masses, chord-arc quadrature for radial densities.
double disc_mass(const Measure& mu, cplx center, double radius);

/// d_n = (2/h_n) integral r^{2n+1} g(r) exp(-2 phi) dr for n = 0..n_max;
/// the diagonal of T_{g dA} in the orthonormal monomial basis.
std::vector<double> density_diagonal(const RadialDensitySpec& g, const MomentTable& t, int n_max);

// ---------------------------------------------------------------------------
// Transform fields

enum class FieldKind { Avg, Berezin, Custom };
enum class FieldLayout { PolarGrid, Radial, Custom };

/// Values of a transform sampled over points.  PolarGrid layout keeps the
/// first n_r radial nodes of the generating grid times all angles, so Lp
/// norms against dA or d lambda_rho are direct quadratures.
struct TransformField {
  FieldKind kind = FieldKind::Custom;
  FieldLayout layout = FieldLayout::Custom;
  double param = 0.0;  // r or delta where applicable
  int n_r = 0;
  int n_theta = 0;
  std::vector<cplx> points;
  std::vector<double> values;

  double max_value() const;
};

/// Where a transform is sampled.
struct SampleSpec {
  enum class Mode { PolarGrid, Radial, Points } mode = Mode::PolarGrid;
  const PolarGrid* grid = nullptr;
  double radius_cutoff = -1.0;  // <0: all radial nodes
  std::vector<cplx> points;     // Mode::Points

  static SampleSpec polar(const PolarGrid& g, double cutoff = -1.0);
  static SampleSpec radial(const PolarGrid& g, double cutoff = -1.0);
  static SampleSpec at(std::vector<cplx> pts);
};

/// Empty field over the sample points of `where`.
TransformField make_field(FieldKind kind, const SampleSpec& where);

/// Averaging function  mu_hat_r(z) = mu(D^r(z)) / rho(z)^2.
TransformField avg_function(const Measure& mu, const WeightModel& w, double r,
                            const SampleSpec& where);

/// Berezin transform  mu~(z) = integral |kappa(w,z)|^2 / kappa(z,z) dmu(w),
/// computed inside the truncated model space (exact sums for point masses,
/// the diagonal monomial route for radial densities).
TransformField berezin_measure(const Measure& mu, const MomentTable& t, const SampleSpec& where);

/// Berezin transform of a non-negative function: berezin_measure of f dA.
TransformField berezin_function(const RadialDensitySpec& f, const MomentTable& t,
                                const SampleSpec& where);
TransformField berezin_function(const TransformField& f, const MomentTable& t,
                                const PolarGrid& grid, const SampleSpec& where);

enum class BaseMeasure { LebesgueDA, LambdaRho };

/// L^p norm of a grid-sampled field against dA or d lambda_rho = dA/rho^2.
double lp_norm(const TransformField& field, double p, BaseMeasure base, const PolarGrid& grid,
               const WeightModel& w);

/// Sampled supremum of the field (a lower bound for the true sup).
double sampled_sup(const TransformField& field);

/// ( sum_k [ mu_hat_r(w_k) rho(w_k)^t_exp ]^p )^{1/p} over the lattice,
/// with r = lat.params.r.
double lattice_sum(const Measure& mu, const WeightModel& w, const Lattice& lat, double p,
                   double t_exp);

/// Per-point values mu_hat_r(w_k) over the lattice.
std::vector<double> avg_at_lattice(const Measure& mu, const WeightModel& w, const Lattice& lat,
                                   double r);

/// (t, sup over sampled |z| > t of field) for each threshold.
std::vector<std::pair<double, double>> decay_profile(const TransformField& field,
                                                     const std::vector<double>& thresholds);

// ---------------------------------------------------------------------------
// Canonical test measures

std::vector<std::string> canonical_measure_names();
std::vector<std::string> density_family_names();

/// The five canonical test measures; "lattice-atoms" and "mixed" need a
/// lattice for atom placement.
Measure make_canonical_measure(const std::string& name, const WeightModel& w,
                               const Lattice* lat = nullptr);

}  // namespace bergman
