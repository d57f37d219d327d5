#include "bergman/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "bergman/errors.hpp"
#include "bergman/fft.hpp"

namespace bergman {

namespace {

Eigen::VectorXcd truncated_basis(const MomentTable& t, cplx z, int dim) {
  const std::vector<cplx> u = weighted_basis(t, z);
  Eigen::VectorXcd v(dim);
  for (int n = 0; n < dim; ++n) v[n] = u[static_cast<std::size_t>(n)];
  return v;
}

// Fraction of kappa(w, w) carried by basis directions beyond dim; atoms
// close to r_max concentrate there and poison the compression.
double compression_tail(const MomentTable& t, cplx w, int dim) {
  const std::vector<double> a = weighted_basis_radial(t, std::abs(w));
  double head = 0.0, full = 0.0;
  for (int n = 0; n < static_cast<int>(a.size()); ++n) {
    const double term = a[static_cast<std::size_t>(n)] * a[static_cast<std::size_t>(n)];
    full += term;
    if (n < dim) head += term;
  }
  return full > 0.0 ? (full - head) / full : 0.0;
}

void add_ring_cells(Eigen::MatrixXcd& m, const MomentTable& t, double radius,
                    const std::vector<std::pair<double, double>>& angle_mass, int dim) {
  // Lag sums S_k = sum_j mass_j e^{i k theta_j}; the ring contributes
  // a_m a_n S_{n - m}.
  std::vector<cplx> lag(static_cast<std::size_t>(dim), {0.0, 0.0});
  for (const auto& [theta, mass] : angle_mass) {
    const cplx step(std::cos(theta), std::sin(theta));
    cplx ph(1.0, 0.0);
    for (int k = 0; k < dim; ++k) {
      lag[static_cast<std::size_t>(k)] += mass * ph;
      ph *= step;
    }
  }
  const std::vector<double> a = weighted_basis_radial(t, radius);
  for (int mrow = 0; mrow < dim; ++mrow)
    for (int n = 0; n < dim; ++n) {
      const int k = n - mrow;
      const cplx s = k >= 0 ? lag[static_cast<std::size_t>(k)]
                            : std::conj(lag[static_cast<std::size_t>(-k)]);
      m(mrow, n) += a[static_cast<std::size_t>(mrow)] * a[static_cast<std::size_t>(n)] * s;
    }
}

}  // namespace

ToeplitzMatrix assemble(const Measure& mu, const MomentTable& t, int dim,
                        const AssembleOptions& options) {
  if (dim < 1 || dim > t.n_basis)
    throw ContractError("assemble: dim must lie in [1, n_basis]");

  ToeplitzMatrix m;
  m.dim = dim;
  m.entries = Eigen::MatrixXcd::Zero(dim, dim);
  m.structured = mu.cells.empty();

  for (const Atom& a : mu.atoms) {
    if (compression_tail(t, a.pos, dim) > options.atom_tail_tol)
      throw TruncationError(
          "assemble: atom too close to r_max for this truncation; increase dim");
    Eigen::VectorXcd v = truncated_basis(t, a.pos, dim);
    m.entries.noalias() += a.mass * (v.conjugate() * v.transpose());
    m.rank_one.emplace_back(std::move(v), a.mass);
  }

  if (!mu.cells.empty()) {
    // Group cells by ring radius; cells from make_grid_density share radii.
    // No tail check here: cells are quadrature artifacts of a density and
    // every entry is an exact integral however close the ring sits to the
    // rim, unlike genuine point masses.
    std::map<double, std::vector<std::pair<double, double>>> rings;
    for (const Atom& a : mu.cells) rings[std::abs(a.pos)].emplace_back(std::arg(a.pos), a.mass);
    for (const auto& [radius, angle_mass] : rings)
      add_ring_cells(m.entries, t, radius, angle_mass, dim);
  }

  if (mu.density.present()) {
    m.diag_part.resize(static_cast<std::size_t>(dim));
    const std::vector<double> d = density_diagonal(mu.density, t, dim - 1);
    for (int n = 0; n < dim; ++n) {
      m.diag_part[static_cast<std::size_t>(n)] = d[static_cast<std::size_t>(n)];
      m.entries(n, n) += d[static_cast<std::size_t>(n)];
    }
  }

  m.entries = 0.5 * (m.entries + m.entries.adjoint()).eval();
  return m;
}

std::vector<cplx> apply(const ToeplitzMatrix& m, const std::vector<cplx>& f_coeffs) {
  if (static_cast<int>(f_coeffs.size()) > m.dim)
    throw ContractError("apply: coefficient vector longer than the matrix dimension");
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(m.dim);
  for (std::size_t n = 0; n < f_coeffs.size(); ++n) x[static_cast<Eigen::Index>(n)] = f_coeffs[n];
  const Eigen::VectorXcd y = m.entries * x;
  std::vector<cplx> out(static_cast<std::size_t>(m.dim));
  for (int n = 0; n < m.dim; ++n) out[static_cast<std::size_t>(n)] = y[n];
  return out;
}

double operator_berezin(const ToeplitzMatrix& m, const MomentTable& t, cplx z) {
  if (std::abs(z) > t.weight.r_max + 1e-12)
    throw DomainError("operator_berezin: point outside the truncated disc");
  const Eigen::VectorXcd u = truncated_basis(t, z, m.dim);
  const double norm2 = u.squaredNorm();
  if (norm2 <= 0.0) return 0.0;

  double acc = 0.0;
  if (m.structured) {
    for (int n = 0; n < m.dim && n < static_cast<int>(m.diag_part.size()); ++n)
      acc += m.diag_part[static_cast<std::size_t>(n)] * std::norm(u[n]);
    for (const auto& [v, mass] : m.rank_one) {
      cplx dot(0.0, 0.0);
      for (int n = 0; n < m.dim; ++n) dot += v[n] * std::conj(u[n]);
      acc += mass * std::norm(dot);
    }
  } else {
    const Eigen::VectorXcd c = u.conjugate();
    acc = std::real(cplx(c.adjoint() * (m.entries * c)));
  }
  return std::max(0.0, acc / norm2);
}

TransformField operator_berezin_field(const ToeplitzMatrix& m, const MomentTable& t,
                                      const SampleSpec& where) {
  // Structured matrices evaluate per ring with one FFT per rank-one factor;
  // dense matrices fall back to the pointwise quadratic form.
  TransformField f = make_field(FieldKind::Berezin, where);

  if (!m.structured || where.mode == SampleSpec::Mode::Points) {
    for (std::size_t i = 0; i < f.points.size(); ++i)
      f.values[i] = operator_berezin(m, t, f.points[i]);
    return f;
  }

  // ring-wise evaluation over the grid layout
  const int n_theta = f.n_theta;
  std::size_t idx = 0;
  for (int i = 0; i < f.n_r; ++i) {
    const double r = where.grid->radial.nodes[static_cast<std::size_t>(i)];
    const std::vector<double> a = weighted_basis_radial(t, r);
    double norm2 = 0.0;
    for (int n = 0; n < m.dim; ++n)
      norm2 += a[static_cast<std::size_t>(n)] * a[static_cast<std::size_t>(n)];

    std::vector<double> ring(static_cast<std::size_t>(n_theta), 0.0);
    if (!m.diag_part.empty()) {
      double dacc = 0.0;
      for (int n = 0; n < m.dim && n < static_cast<int>(m.diag_part.size()); ++n)
        dacc += m.diag_part[static_cast<std::size_t>(n)] * a[static_cast<std::size_t>(n)] *
                a[static_cast<std::size_t>(n)];
      for (double& v : ring) v = dacc;
    }
    for (const auto& [v, mass] : m.rank_one) {
      // dot(z) = sum_n v_n conj(u_n(z)) = sum_n (v_n a_n(r)) e^{-i n theta}
      std::vector<cplx> b(static_cast<std::size_t>(m.dim));
      for (int n = 0; n < m.dim; ++n) b[static_cast<std::size_t>(n)] = v[n] * a[static_cast<std::size_t>(n)];
      if (n_theta >= m.dim && (n_theta & (n_theta - 1)) == 0) {
        const std::vector<cplx> dots = eval_trig_poly(b, n_theta);
        for (int j = 0; j < n_theta; ++j)
          ring[static_cast<std::size_t>(j)] += mass * std::norm(dots[static_cast<std::size_t>(j)]);
      } else {
        for (int j = 0; j < n_theta; ++j) {
          const double th = where.grid->theta(j) * (f.layout == FieldLayout::Radial ? 0.0 : 1.0);
          const cplx step(std::cos(-th), std::sin(-th));
          cplx ph(1.0, 0.0), dot(0.0, 0.0);
          for (int n = 0; n < m.dim; ++n) {
            dot += b[static_cast<std::size_t>(n)] * ph;
            ph *= step;
          }
          ring[static_cast<std::size_t>(j)] += mass * std::norm(dot);
        }
      }
    }
    for (int j = 0; j < n_theta; ++j)
      f.values[idx++] = norm2 > 0.0 ? std::max(0.0, ring[static_cast<std::size_t>(j)] / norm2) : 0.0;
  }
  return f;
}

double SpectralReport::schatten_at(double p) const {
  for (const auto& [pp, s] : schatten)
    if (pp == p) return s;
  throw ContractError("SpectralReport: p not in the requested list");
}

SpectralReport spectrum(const ToeplitzMatrix& m, const std::vector<double>& p_list) {
  const double herm = (m.entries - m.entries.adjoint()).cwiseAbs().maxCoeff();
  const double scale = std::max(1e-300, m.entries.cwiseAbs().maxCoeff());
  if (herm > 1e-12 * scale)
    throw ConsistencyError("spectrum: matrix is not Hermitian within tolerance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m.entries, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw ConsistencyError("spectrum: eigendecomposition failed");

  SpectralReport rep;
  const Eigen::VectorXd ev = solver.eigenvalues();
  const double lmax = std::max(0.0, ev.maxCoeff());
  if (ev.minCoeff() < -1e-10 * std::max(lmax, 1e-300))
    throw ConsistencyError("spectrum: matrix is not PSD within tolerance");

  // noise floor: eigenvalues below 1e-12 * lambda_max are numerically
  // indistinguishable from zero (exact low-rank inputs produce O(eps)
  // junk that small-p Schatten sums would amplify)
  const double floor = 1e-12 * lmax;
  rep.eigenvalues.resize(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double l = ev[i];
    rep.eigenvalues[static_cast<std::size_t>(ev.size() - 1 - i)] = l > floor ? l : 0.0;
  }
  rep.operator_norm = lmax;
  rep.trace = std::real(m.entries.trace());

  double esum = 0.0;
  for (double l : rep.eigenvalues) esum += l;
  if (std::fabs(esum - rep.trace) > 1e-8 * std::max(1.0, std::fabs(rep.trace)))
    throw ConsistencyError("spectrum: trace does not match the eigenvalue sum");

  for (double p : p_list) {
    if (!(p > 0.0)) throw ParameterError("spectrum: Schatten exponents must be positive");
    double acc = 0.0;
    for (double l : rep.eigenvalues)
      if (l > 0.0) acc += std::pow(l, p);
    rep.schatten.emplace_back(p, acc > 0.0 ? std::pow(acc, 1.0 / p) : 0.0);
  }
  if (!rep.eigenvalues.empty() && lmax > 0.0) {
    rep.tail_ratio = rep.eigenvalues.back() / lmax;
    rep.tail_warning = rep.tail_ratio > 1e-8;
  }
  return rep;
}

std::vector<EquivalenceReport> schatten_report(const Measure& mu, const WeightModel& w,
                                               const MomentTable& t, const PolarGrid& grid,
                                               const Lattice& lat, double delta,
                                               const std::vector<double>& p_list,
                                               const SchattenReportOptions& options) {
  auto quantities_for = [&](const Measure& m_in) {
    const ToeplitzMatrix tm = assemble(m_in, t, options.dim);
    const SpectralReport spec = spectrum(tm, p_list);

    const SampleSpec avg_where = m_in.radial() ? SampleSpec::radial(grid) : SampleSpec::polar(grid);
    const TransformField avg_field = avg_function(m_in, w, delta, avg_where);
    const TransformField ber_field = operator_berezin_field(tm, t, avg_where);

    std::vector<std::vector<Quantity>> per_p;
    for (double p : p_list) {
      std::vector<Quantity> qs;
      qs.push_back({"schatten_Sp", spec.schatten_at(p), "operator side"});
      qs.push_back({"lattice_lp", lattice_sum(m_in, w, lat, p, 0.0), "lattice sequence"});
      qs.push_back({"avg_Lp_lambda", lp_norm(avg_field, p, BaseMeasure::LambdaRho, grid, w),
                    "averaging function"});
      qs.push_back({"berezin_Lp_lambda", lp_norm(ber_field, p, BaseMeasure::LambdaRho, grid, w),
                    "operator Berezin transform"});
      per_p.push_back(std::move(qs));
    }
    return per_p;
  };

  const auto base = quantities_for(mu);
  const auto scaled = quantities_for(scale_measure(mu, 10.0));

  std::vector<EquivalenceReport> out;
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    EquivalenceReport rep;
    rep.quantities = base[i];
    finalize_ratios(rep);

    EquivalenceReport srep;
    srep.quantities = scaled[i];
    finalize_ratios(srep);
    rep.scaling_drift = ratio_drift(rep, srep);

    const bool within = rep.ratio_spread <= options.ratio_window;
    rep.verdicts.emplace_back("schatten_equivalence",
                              within ? "within ratio window" : "outside ratio window");
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<std::pair<double, double>> compact_tail(const Measure& mu, const MomentTable& t,
                                                    int dim,
                                                    const std::vector<double>& r_sweep) {
  for (std::size_t i = 1; i < r_sweep.size(); ++i)
    if (!(r_sweep[i] > r_sweep[i - 1]))
      throw ContractError("compact_tail: sweep radii must be increasing");

  const ToeplitzMatrix full = assemble(mu, t, dim);
  std::vector<std::pair<double, double>> out;
  for (double r : r_sweep) {
    const ToeplitzMatrix restricted = assemble(restrict_measure(mu, r), t, dim);
    ToeplitzMatrix diff;
    diff.dim = dim;
    diff.entries = full.entries - restricted.entries;
    diff.structured = false;
    const SpectralReport spec = spectrum(diff, {});
    out.emplace_back(r, spec.operator_norm);
  }
  return out;
}

SchattenBounds schatten_bounds_check(const ToeplitzMatrix& m, const MomentTable& t,
                                     const PolarGrid& grid, double p) {
  if (!(p > 0.0)) throw ParameterError("schatten_bounds_check: p must be positive");
  SchattenBounds b;
  b.p = p;
  const SpectralReport spec = spectrum(m, {p});
  b.schatten_side = spec.schatten_at(p);

  const SampleSpec where =
      (m.rank_one.empty() && m.structured) ? SampleSpec::radial(grid) : SampleSpec::polar(grid);
  const TransformField field = operator_berezin_field(m, t, where);
  b.integral_side = lp_norm(field, p, BaseMeasure::LambdaRho, grid, t.weight);

  if (p <= 1.0) {
    b.c_meas = b.integral_side > 0.0 ? b.schatten_side / b.integral_side : 0.0;
  } else {
    b.c_meas = b.schatten_side > 0.0 ? b.integral_side / b.schatten_side : 0.0;
  }
  b.ordering_holds = b.schatten_side >= 0.0 && b.integral_side >= 0.0;

  if (p == 1.0) {
    const double integral_first = lp_norm(field, 1.0, BaseMeasure::LambdaRho, grid, t.weight);
    b.trace_ratio = spec.trace > 0.0 ? integral_first / spec.trace : 0.0;
  }
  return b;
}

}  // namespace bergman
