#include "bergman/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bergman/errors.hpp"
#include "bergman/fft.hpp"
#include "bergman/geometry.hpp"
#include "bergman/rng.hpp"

namespace bergman {

namespace {

// log h_n for every n on the given rule, each accumulated as
// max-factored exp sums so that strong weights cannot underflow the
// whole integral away.
std::vector<double> log_moments_on_rule(const WeightModel& w, int n_basis,
                                        const RadialRule& rule) {
  const std::size_t m = rule.size();
  std::vector<double> log_r(m), phi2(m);
  for (std::size_t i = 0; i < m; ++i) {
    log_r[i] = std::log(rule.nodes[i]);
    phi2[i] = 2.0 * w.phi_radial(rule.nodes[i]);
  }
  std::vector<double> out(static_cast<std::size_t>(n_basis) + 1);
  std::vector<double> expo(m);
  for (int n = 0; n <= n_basis; ++n) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      expo[i] = (2.0 * n + 1.0) * log_r[i] - phi2[i];
      peak = std::max(peak, expo[i]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += rule.weights[i] * std::exp(expo[i] - peak);
    out[static_cast<std::size_t>(n)] = std::log(2.0 * acc) + peak;
  }
  return out;
}

}  // namespace

double MomentTable::h(int n) const {
  return std::exp(log_h.at(static_cast<std::size_t>(n)));
}

MomentTable compute_moments(const WeightModel& w, int n_basis, const QuadSpec& spec) {
  if (n_basis < 8) throw ContractError("compute_moments: n_basis must be >= 8");
  if (!w.radial()) throw ContractError("compute_moments: weight must be radial");

  int levels = spec.initial_levels;
  RadialRule rule = make_radial_rule(w.r_max, levels, spec.nodes_per_panel);
  std::vector<double> log_h = log_moments_on_rule(w, n_basis, rule);

  bool converged = false;
  while (levels < spec.max_levels) {
    RadialRule next = make_radial_rule(w.r_max, levels + 1, spec.nodes_per_panel);
    std::vector<double> refined = log_moments_on_rule(w, n_basis, next);
    double max_change = 0.0;
    for (std::size_t n = 0; n < log_h.size(); ++n)
      max_change = std::max(max_change, std::fabs(refined[n] - log_h[n]));
    rule = std::move(next);
    log_h = std::move(refined);
    ++levels;
    if (max_change < spec.refine_rel_tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw PrecisionError("compute_moments: panel refinement did not reach tolerance");

  for (double lh : log_h)
    if (!std::isfinite(lh))
      throw ConsistencyError("compute_moments: non-finite moment");
  for (std::size_t n = 0; n + 1 < log_h.size(); ++n)
    if (!(log_h[n + 1] < log_h[n]))
      throw ConsistencyError("compute_moments: moments not strictly decreasing");
  for (std::size_t n = 0; n + 2 < log_h.size(); ++n)
    if (log_h[n] + log_h[n + 2] - 2.0 * log_h[n + 1] < -1e-10)
      throw ConsistencyError("compute_moments: moment log-convexity violated");

  MomentTable t;
  t.weight = w;
  t.n_basis = n_basis;
  t.log_h = std::move(log_h);
  t.rule = std::move(rule);
  t.quad = spec;
  return t;
}

std::vector<cplx> weighted_basis(const MomentTable& t, cplx z) {
  const int nb = t.n_basis;
  std::vector<cplx> u(static_cast<std::size_t>(nb) + 1);
  const double r = std::abs(z);
  const double phi = t.weight.phi_radial(r);
  if (r == 0.0) {
    u[0] = std::exp(-phi - 0.5 * t.log_h[0]);
    return u;
  }
  const double log_r = std::log(r);
  const cplx dir = z / r;
  cplx phase(1.0, 0.0);
  for (int n = 0; n <= nb; ++n) {
    const double mag = std::exp(n * log_r - phi - 0.5 * t.log_h[static_cast<std::size_t>(n)]);
    u[static_cast<std::size_t>(n)] = mag * phase;
    phase *= dir;
  }
  return u;
}

std::vector<double> weighted_basis_radial(const MomentTable& t, double r) {
  const int nb = t.n_basis;
  std::vector<double> a(static_cast<std::size_t>(nb) + 1);
  const double phi = t.weight.phi_radial(r);
  if (r == 0.0) {
    a[0] = std::exp(-phi - 0.5 * t.log_h[0]);
    return a;
  }
  const double log_r = std::log(r);
  for (int n = 0; n <= nb; ++n)
    a[static_cast<std::size_t>(n)] = std::exp(n * log_r - phi - 0.5 * t.log_h[static_cast<std::size_t>(n)]);
  return a;
}

double kernel_diag(const MomentTable& t, cplx z) {
  const std::vector<double> a = weighted_basis_radial(t, std::abs(z));
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return acc;
}

namespace {

// Geometric estimate of the dropped tail of sum_n x^n / h_n relative to
// its largest retained term, with x = |z w|.
double tail_estimate(const MomentTable& t, double x) {
  if (x == 0.0) return 0.0;
  const std::size_t nb = t.log_h.size() - 1;
  const double log_x = std::log(x);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n <= nb; ++n)
    peak = std::max(peak, n * log_x - t.log_h[n]);
  const double last = nb * log_x - t.log_h[nb];
  // ratio of consecutive terms near the truncation edge
  const double g = std::exp(log_x + t.log_h[nb - 1] - t.log_h[nb]);
  if (g >= 1.0) return std::numeric_limits<double>::infinity();
  return std::exp(last - peak) * g / (1.0 - g);
}

}  // namespace

KernelValue kernel_eval(const MomentTable& t, cplx z, cplx w) {
  const double rm = t.weight.r_max;
  if (std::abs(z) > rm + 1e-12 || std::abs(w) > rm + 1e-12)
    throw DomainError("kernel_eval: point outside the truncated disc");

  KernelValue kv;
  kv.tail_rel = tail_estimate(t, std::abs(z) * std::abs(w));
  if (!(kv.tail_rel <= 1e-10))
    throw TruncationError(
        "kernel_eval: truncation tail above 1e-10 of leading magnitude; "
        "increase n_basis");

  const std::vector<cplx> uz = weighted_basis(t, z);
  const std::vector<cplx> uw = weighted_basis(t, w);
  cplx acc(0.0, 0.0);
  for (std::size_t n = 0; n < uz.size(); ++n) acc += uz[n] * std::conj(uw[n]);
  kv.kappa = acc;
  return kv;
}

double kernel_valid_radius(const MomentTable& t, double tail_tol) {
  double lo = 0.0, hi = t.weight.r_max;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (tail_estimate(t, mid * mid) <= tail_tol)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double LogValue::value() const { return std::exp(log_value); }

std::vector<cplx> kernel_ring_values(const MomentTable& t, const std::vector<cplx>& u_z,
                                     double r, int n_theta) {
  const std::vector<double> a = weighted_basis_radial(t, r);
  std::vector<cplx> b(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) b[n] = u_z[n] * a[n];
  // kappa(z, r e^{i th}) = sum_n b_n e^{-i n th}
  return eval_trig_poly(b, n_theta);
}

LogValue norm_Kz(const MomentTable& t, const PolarGrid& grid, cplx z, double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw ContractError("norm_Kz: p must lie in (0, inf)");
  const std::vector<cplx> uz = weighted_basis(t, z);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.radial.size(); ++i) {
    const std::vector<cplx> ring = kernel_ring_values(t, uz, grid.radial.nodes[i], grid.n_theta);
    double ring_sum = 0.0;
    for (const cplx& v : ring) ring_sum += std::pow(std::abs(v), p);
    acc += grid.radial.weights[i] * grid.radial.nodes[i] * ring_sum;
  }
  acc *= 2.0 / static_cast<double>(grid.n_theta);
  if (!(acc > 0.0)) throw PrecisionError("norm_Kz: quadrature produced a non-positive value");
  LogValue out;
  out.log_value = t.weight.phi(z) + std::log(acc) / p;
  return out;
}

cplx NormalizedKernel::weighted_eval(const MomentTable& t, cplx w) const {
  const std::vector<cplx> uw = weighted_basis(t, w);
  cplx acc(0.0, 0.0);
  for (std::size_t n = 0; n < u.size(); ++n) acc += u[n] * std::conj(uw[n]);
  return acc * std::exp(log_scale);
}

NormalizedKernel normalized_kernel(const MomentTable& t, const PolarGrid& grid, cplx z,
                                   double p) {
  NormalizedKernel k;
  k.z = z;
  k.p = p;
  k.u = weighted_basis(t, z);
  k.log_scale = t.weight.phi(z) - norm_Kz(t, grid, z, p).log_value;
  return k;
}

double reproducing_residual(const MomentTable& t, const PolarGrid& grid,
                            std::span<const cplx> f_coeffs, cplx z) {
  if (static_cast<int>(f_coeffs.size()) - 1 > t.n_basis - 2)
    throw ContractError("reproducing_residual: polynomial degree must be <= n_basis - 2");

  // integral f(w) K(z,w) e^{-2 phi(w)} dA(w)
  //   = e^{phi(z)} integral [f(w) e^{-phi(w)}] conj(kappa(w,z)) dA(w);
  // kappa(w, z) = conj(kappa(z, w)), so the integrand is f_w * kappa(z,w)
  // up to the weight factor.
  const std::vector<cplx> uz = weighted_basis(t, z);
  cplx acc(0.0, 0.0);
  for (std::size_t i = 0; i < grid.radial.size(); ++i) {
    const double r = grid.radial.nodes[i];
    const std::vector<cplx> ring = kernel_ring_values(t, uz, r, grid.n_theta);
    const double ephi = std::exp(-t.weight.phi_radial(r));
    cplx ring_acc(0.0, 0.0);
    for (int j = 0; j < grid.n_theta; ++j) {
      const double th = grid.theta(j);
      const cplx w(r * std::cos(th), r * std::sin(th));
      cplx fw(0.0, 0.0);
      for (std::size_t c = f_coeffs.size(); c-- > 0;) fw = fw * w + f_coeffs[c];
      ring_acc += fw * ephi * ring[j];
    }
    acc += grid.radial.weights[i] * r * ring_acc;
  }
  acc *= 2.0 / static_cast<double>(grid.n_theta);
  acc *= std::exp(t.weight.phi(z));

  cplx fz(0.0, 0.0);
  for (std::size_t c = f_coeffs.size(); c-- > 0;) fz = fz * z + f_coeffs[c];
  return std::abs(acc - fz);
}

DecayFit fit_decay_sigma(const MomentTable& t, const MetricGrid& grid, int n_pairs,
                         std::uint64_t seed) {
  if (n_pairs < 100) throw ContractError("fit_decay_sigma: n_pairs must be >= 100");

  DecayFit fit;
  fit.weight_in_scope = !t.weight.oracle();

  const double r_valid = std::min(kernel_valid_radius(t), 0.9 * t.weight.r_max);
  Rng rng(seed);

  // A handful of sources keeps the Dijkstra count manageable; targets vary
  // freely.
  const int n_sources = std::max(8, n_pairs / 32);
  std::vector<cplx> sources;
  for (int i = 0; i < n_sources; ++i) sources.push_back(rng.disc_point(r_valid));

  std::vector<double> xs, ys;
  xs.reserve(static_cast<std::size_t>(n_pairs));
  ys.reserve(xs.capacity());
  for (const cplx& src : sources) {
    const DistanceField field = distances_from(grid, src);
    const int per_source = n_pairs / n_sources + 1;
    for (int i = 0; i < per_source; ++i) {
      const cplx dst = rng.disc_point(r_valid);
      const double d = field.distance_to(dst);
      if (d < 1e-9 || !std::isfinite(d)) continue;
      const KernelValue kv = kernel_eval(t, src, dst);
      const double mag = std::abs(kv.kappa) * t.weight.rho(src) * t.weight.rho(dst);
      if (mag <= 0.0) continue;
      xs.push_back(d);
      ys.push_back(std::log(mag));
    }
  }
  fit.n_pairs_used = static_cast<int>(xs.size());
  if (xs.size() < 2) throw PrecisionError("fit_decay_sigma: not enough usable pairs");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.sigma = -slope;

  // Raise the intercept until the line majorizes every sample, including
  // the diagonal values at d = 0.
  double c = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) c = std::max(c, ys[i] + fit.sigma * xs[i]);
  Rng drng = rng.fork(3);
  for (int i = 0; i < 32; ++i) {
    const cplx z = drng.disc_point(r_valid);
    const double rho = t.weight.rho(z);
    c = std::max(c, std::log(kernel_diag(t, z) * rho * rho));
  }
  fit.c_tilde = c;

  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dev = fit.c_tilde - fit.sigma * xs[i] - ys[i];
    ss += dev * dev;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace bergman
