#include "bergman/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bergman/errors.hpp"
#include "bergman/fft.hpp"

namespace bergman {

namespace {
constexpr double kPi = std::numbers::pi;
}

double RadialDensitySpec::evaluate(double r) const {
  if (!present() || r > support_radius) return 0.0;
  if (family == "uniform") return scale;
  if (family == "boundary-inv-sqrt") return scale / std::sqrt(std::max(1e-300, 1.0 - r));
  if (family == "quadratic") return scale * r * r;
  if (family == "one-minus-r2") return scale * (1.0 - r * r);
  if (family == "core-indicator") return r <= 0.5 ? scale : 0.0;
  throw ParameterError("RadialDensitySpec: unknown family '" + family + "'");
}

bool Measure::is_zero() const {
  return atoms.empty() && cells.empty() && !density.present();
}

namespace {

void check_atoms(const std::vector<Atom>& atoms, double r_max, const char* who) {
  for (const Atom& a : atoms) {
    if (!(a.mass > 0.0)) throw ParameterError(std::string(who) + ": atom masses must be positive");
    if (std::abs(a.pos) > r_max + 1e-12)
      throw DomainError(std::string(who) + ": atom outside the truncated disc");
  }
}

double atoms_support(const std::vector<Atom>& atoms) {
  double s = 0.0;
  for (const Atom& a : atoms) s = std::max(s, std::abs(a.pos));
  return s;
}

}  // namespace

Measure make_zero_measure(double domain_r_max) {
  Measure mu;
  mu.domain_r_max = domain_r_max;
  mu.label = "zero";
  return mu;
}

Measure make_atomic(std::vector<Atom> atoms, double domain_r_max) {
  check_atoms(atoms, domain_r_max, "make_atomic");
  Measure mu;
  mu.atoms = std::move(atoms);
  mu.domain_r_max = domain_r_max;
  mu.support_radius = atoms_support(mu.atoms);
  return mu;
}

Measure make_radial_density(const std::string& family, double scale, double support_radius,
                            double domain_r_max) {
  if (!(scale > 0.0)) throw ParameterError("make_radial_density: scale must be positive");
  if (!(support_radius > 0.0 && support_radius <= domain_r_max))
    throw DomainError("make_radial_density: support must lie in (0, r_max]");
  Measure mu;
  mu.density.family = family;
  mu.density.scale = scale;
  mu.density.support_radius = support_radius;
  mu.density.evaluate(0.0);  // validates the family name
  mu.domain_r_max = domain_r_max;
  mu.support_radius = support_radius;
  return mu;
}

Measure make_grid_density(const std::vector<double>& values, const PolarGrid& grid,
                          double domain_r_max) {
  if (values.size() != grid.node_count())
    throw ContractError("make_grid_density: value count does not match the grid");
  Measure mu;
  mu.domain_r_max = domain_r_max;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < grid.radial.size(); ++i) {
    const double r = grid.radial.nodes[i];
    const double base = grid.radial.weights[i] * r * 2.0 / grid.n_theta;
    for (int j = 0; j < grid.n_theta; ++j, ++idx) {
      const double v = values[idx];
      if (v < 0.0) throw ParameterError("make_grid_density: values must be non-negative");
      if (v == 0.0) continue;
      const double th = grid.theta(j);
      mu.cells.push_back({cplx(r * std::cos(th), r * std::sin(th)), v * base});
      mu.support_radius = std::max(mu.support_radius, r);
    }
  }
  return mu;
}

Measure scale_measure(const Measure& mu, double c) {
  if (!(c > 0.0)) throw ParameterError("scale_measure: factor must be positive");
  Measure out = mu;
  for (Atom& a : out.atoms) a.mass *= c;
  for (Atom& a : out.cells) a.mass *= c;
  if (out.density.present()) out.density.scale *= c;
  return out;
}

Measure add_measures(const Measure& a, const Measure& b) {
  if (a.density.present() && b.density.present())
    throw ContractError("add_measures: at most one radial density component");
  Measure out = a;
  out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
  out.cells.insert(out.cells.end(), b.cells.begin(), b.cells.end());
  if (b.density.present()) out.density = b.density;
  out.domain_r_max = std::max(a.domain_r_max, b.domain_r_max);
  out.support_radius = std::max(a.support_radius, b.support_radius);
  out.label = a.label.empty() ? b.label : a.label;
  return out;
}

Measure restrict_measure(const Measure& mu, double R) {
  if (!(R > 0.0 && R < 1.0)) throw ParameterError("restrict_measure: R must lie in (0, 1)");
  Measure out;
  out.domain_r_max = mu.domain_r_max;
  out.label = mu.label;
  for (const Atom& a : mu.atoms)
    if (std::abs(a.pos) <= R) out.atoms.push_back(a);
  for (const Atom& a : mu.cells)
    if (std::abs(a.pos) <= R) out.cells.push_back(a);
  if (mu.density.present()) {
    out.density = mu.density;
    out.density.support_radius = std::min(mu.density.support_radius, R);
  }
  out.support_radius = std::max(
      {atoms_support(out.atoms), atoms_support(out.cells),
       out.density.present() ? out.density.support_radius : 0.0});
  return out;
}

double total_mass(const Measure& mu, const RadialRule& rule) {
  double m = 0.0;
  for (const Atom& a : mu.atoms) m += a.mass;
  for (const Atom& a : mu.cells) m += a.mass;
  if (mu.density.present()) {
    // integrate on the support interval itself, so truncated densities do
    // not leave a jump inside a quadrature panel
    const double sup = mu.density.support_radius;
    const RadialRule* r = &rule;
    RadialRule own;
    if (sup < rule.r_max * (1.0 - 1e-12)) {
      own = make_radial_rule(sup, std::max(4, rule.levels), rule.nodes_per_panel);
      r = &own;
    }
    m += 2.0 * r->integrate([&](double rr) { return mu.density.evaluate(rr) * rr; });
  }
  return m;
}

namespace {

/// Chord-arc reduction of the density mass of D(c, R): integrate the
/// density along circles, weighting by the angular width of the
/// intersection with the disc.
double density_disc_mass(const RadialDensitySpec& g, double sup, cplx c, double R) {
  const double rc = std::abs(c);
  const double lo = std::max(0.0, rc - R);
  const double hi = std::min(sup, rc + R);
  if (hi <= lo) return 0.0;
  const GaussRule& gl = gauss_legendre(96);
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double s = 0.5 * (hi + lo) + 0.5 * (hi - lo) * gl.nodes[i];
    double half_angle;
    if (rc < 1e-14 || s + rc <= R) {
      half_angle = kPi;
    } else {
      const double cosv = (s * s + rc * rc - R * R) / (2.0 * s * rc);
      half_angle = std::acos(std::clamp(cosv, -1.0, 1.0));
    }
    acc += 0.5 * (hi - lo) * gl.weights[i] * g.evaluate(s) * s * 2.0 * half_angle;
  }
  return acc / kPi;
}

}  // namespace

double disc_mass(const Measure& mu, cplx center, double radius) {
  double m = 0.0;
  for (const Atom& a : mu.atoms)
    if (std::abs(a.pos - center) < radius) m += a.mass;
  for (const Atom& a : mu.cells)
    if (std::abs(a.pos - center) < radius) m += a.mass;
  if (mu.density.present())
    m += density_disc_mass(mu.density, mu.density.support_radius, center, radius);
  return m;
}

// ---------------------------------------------------------------------------
// Sample specs and fields

SampleSpec SampleSpec::polar(const PolarGrid& g, double cutoff) {
  SampleSpec s;
  s.mode = Mode::PolarGrid;
  s.grid = &g;
  s.radius_cutoff = cutoff;
  return s;
}

SampleSpec SampleSpec::radial(const PolarGrid& g, double cutoff) {
  SampleSpec s;
  s.mode = Mode::Radial;
  s.grid = &g;
  s.radius_cutoff = cutoff;
  return s;
}

SampleSpec SampleSpec::at(std::vector<cplx> pts) {
  SampleSpec s;
  s.mode = Mode::Points;
  s.points = std::move(pts);
  return s;
}

double TransformField::max_value() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

namespace {

int radial_prefix(const PolarGrid& grid, double cutoff) {
  if (cutoff < 0.0) return static_cast<int>(grid.radial.size());
  int n = 0;
  while (n < static_cast<int>(grid.radial.size()) && grid.radial.nodes[static_cast<std::size_t>(n)] <= cutoff)
    ++n;
  return n;
}

}  // namespace

TransformField make_field(FieldKind kind, const SampleSpec& where) {
  TransformField f;
  f.kind = kind;
  switch (where.mode) {
    case SampleSpec::Mode::PolarGrid: {
      f.layout = FieldLayout::PolarGrid;
      f.n_r = radial_prefix(*where.grid, where.radius_cutoff);
      f.n_theta = where.grid->n_theta;
      f.points.reserve(static_cast<std::size_t>(f.n_r) * f.n_theta);
      for (int i = 0; i < f.n_r; ++i) {
        const double r = where.grid->radial.nodes[static_cast<std::size_t>(i)];
        for (int j = 0; j < f.n_theta; ++j) {
          const double th = where.grid->theta(j);
          f.points.emplace_back(r * std::cos(th), r * std::sin(th));
        }
      }
      break;
    }
    case SampleSpec::Mode::Radial: {
      f.layout = FieldLayout::Radial;
      f.n_r = radial_prefix(*where.grid, where.radius_cutoff);
      f.n_theta = 1;
      for (int i = 0; i < f.n_r; ++i)
        f.points.emplace_back(where.grid->radial.nodes[static_cast<std::size_t>(i)], 0.0);
      break;
    }
    case SampleSpec::Mode::Points:
      f.layout = FieldLayout::Custom;
      f.points = where.points;
      break;
  }
  f.values.assign(f.points.size(), 0.0);
  return f;
}

TransformField avg_function(const Measure& mu, const WeightModel& w, double r,
                            const SampleSpec& where) {
  if (!(r > 0.0)) throw ParameterError("avg_function: r must be positive");
  TransformField f = make_field(FieldKind::Avg, where);
  f.param = r;
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    const cplx z = f.points[i];
    const double rho = w.rho(z);
    f.values[i] = disc_mass(mu, z, r * rho) / (rho * rho);
  }
  return f;
}

std::vector<double> density_diagonal(const RadialDensitySpec& g, const MomentTable& t,
                                     int n_max) {
  const RadialRule& rule = t.rule;
  std::vector<double> diag(static_cast<std::size_t>(n_max) + 1, 0.0);
  const std::size_t m = rule.size();
  std::vector<double> log_r(m), expo(m), gv(m);
  for (std::size_t i = 0; i < m; ++i) {
    log_r[i] = std::log(rule.nodes[i]);
    gv[i] = g.evaluate(rule.nodes[i]);
  }
  for (int n = 0; n <= n_max; ++n) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      expo[i] = (2.0 * n + 1.0) * log_r[i] - 2.0 * t.weight.phi_radial(rule.nodes[i]);
      peak = std::max(peak, expo[i]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      acc += rule.weights[i] * gv[i] * std::exp(expo[i] - peak);
    diag[static_cast<std::size_t>(n)] =
        std::exp(std::log(2.0 * std::max(acc, 0.0)) + peak - t.log_h[static_cast<std::size_t>(n)]);
    if (acc <= 0.0) diag[static_cast<std::size_t>(n)] = 0.0;
  }
  return diag;
}

namespace {

// Propagates the kernel truncation contract: the worst atom/sample radius
// product must stay inside the tail tolerance.
void check_atom_tails(const Measure& mu, const MomentTable& t, double max_sample_radius) {
  double worst = 0.0;
  for (const Atom& a : mu.atoms) worst = std::max(worst, std::abs(a.pos));
  for (const Atom& a : mu.cells) worst = std::max(worst, std::abs(a.pos));
  if (worst == 0.0) return;
  (void)kernel_eval(t, cplx(worst, 0.0), cplx(max_sample_radius, 0.0));
}

}  // namespace

TransformField berezin_measure(const Measure& mu, const MomentTable& t, const SampleSpec& where) {
  TransformField f = make_field(FieldKind::Berezin, where);

  double max_radius = 0.0;
  for (const cplx& z : f.points) max_radius = std::max(max_radius, std::abs(z));
  if (!mu.is_zero()) check_atom_tails(mu, t, max_radius);

  const bool has_points = !mu.atoms.empty() || !mu.cells.empty();
  std::vector<std::vector<cplx>> atom_u;
  std::vector<double> atom_mass;
  if (has_points) {
    for (const Atom& a : mu.atoms) {
      atom_u.push_back(weighted_basis(t, a.pos));
      atom_mass.push_back(a.mass);
    }
    for (const Atom& a : mu.cells) {
      atom_u.push_back(weighted_basis(t, a.pos));
      atom_mass.push_back(a.mass);
    }
  }
  std::vector<double> diag;
  if (mu.density.present()) diag = density_diagonal(mu.density, t, t.n_basis);

  // Ring path for grid layouts: one FFT per (atom, radius) replaces a dot
  // product per node.  Falls back to pointwise sums for explicit points or
  // very many point masses.
  const bool grid_layout = (f.layout == FieldLayout::PolarGrid || f.layout == FieldLayout::Radial);
  if (grid_layout && atom_u.size() <= 512) {
    const int n_theta = f.n_theta;
    std::size_t idx = 0;
    std::vector<cplx> b(static_cast<std::size_t>(t.n_basis) + 1);
    for (int i = 0; i < f.n_r; ++i) {
      const double r = where.grid->radial.nodes[static_cast<std::size_t>(i)];
      const std::vector<double> a = weighted_basis_radial(t, r);
      double norm2 = 0.0;
      for (double v : a) norm2 += v * v;
      std::vector<double> ring(static_cast<std::size_t>(n_theta), 0.0);
      if (!diag.empty()) {
        double dacc = 0.0;
        for (std::size_t n = 0; n < a.size(); ++n) dacc += diag[n] * a[n] * a[n];
        for (double& v : ring) v = dacc;
      }
      for (std::size_t j = 0; j < atom_u.size(); ++j) {
        for (std::size_t n = 0; n < b.size(); ++n) b[n] = atom_u[j][n] * a[n];
        if (n_theta >= static_cast<int>(b.size()) && (n_theta & (n_theta - 1)) == 0) {
          const std::vector<cplx> dots = eval_trig_poly(b, n_theta);
          for (int jt = 0; jt < n_theta; ++jt)
            ring[static_cast<std::size_t>(jt)] += atom_mass[j] * std::norm(dots[static_cast<std::size_t>(jt)]);
        } else {
          for (int jt = 0; jt < n_theta; ++jt) {
            const double th = 2.0 * std::numbers::pi * jt / n_theta;
            const cplx step(std::cos(-th), std::sin(-th));
            cplx ph(1.0, 0.0), dot(0.0, 0.0);
            for (const cplx& v : b) {
              dot += v * ph;
              ph *= step;
            }
            ring[static_cast<std::size_t>(jt)] += atom_mass[j] * std::norm(dot);
          }
        }
      }
      for (int jt = 0; jt < n_theta; ++jt)
        f.values[idx++] = norm2 > 0.0 ? ring[static_cast<std::size_t>(jt)] / norm2 : 0.0;
    }
    return f;
  }

  for (std::size_t i = 0; i < f.points.size(); ++i) {
    const cplx z = f.points[i];
    const std::vector<cplx> uz = weighted_basis(t, z);
    double norm2 = 0.0;  // kappa(z, z)
    for (const cplx& v : uz) norm2 += std::norm(v);
    if (norm2 <= 0.0) continue;
    // integral |kappa(w,z)|^2 dmu(w): exact sums over point masses plus the
    // diagonal monomial route for the radial density.
    double acc = 0.0;
    for (std::size_t j = 0; j < atom_u.size(); ++j) {
      cplx dot(0.0, 0.0);
      const std::vector<cplx>& uw = atom_u[j];
      for (std::size_t n = 0; n < uz.size(); ++n) dot += uw[n] * std::conj(uz[n]);
      acc += atom_mass[j] * std::norm(dot);
    }
    if (!diag.empty())
      for (std::size_t n = 0; n < uz.size(); ++n) acc += diag[n] * std::norm(uz[n]);
    f.values[i] = acc / norm2;
  }
  return f;
}

TransformField berezin_function(const RadialDensitySpec& fdens, const MomentTable& t,
                                const SampleSpec& where) {
  Measure mu;
  mu.density = fdens;
  mu.domain_r_max = t.weight.r_max;
  mu.support_radius = fdens.support_radius;
  return berezin_measure(mu, t, where);
}

TransformField berezin_function(const TransformField& f, const MomentTable& t,
                                const PolarGrid& grid, const SampleSpec& where) {
  if (f.layout != FieldLayout::PolarGrid)
    throw ContractError("berezin_function: field must live on the polar grid");
  std::vector<double> values(grid.node_count(), 0.0);
  std::copy(f.values.begin(), f.values.end(), values.begin());
  const Measure mu = make_grid_density(values, grid, t.weight.r_max);
  return berezin_measure(mu, t, where);
}

double lp_norm(const TransformField& field, double p, BaseMeasure base, const PolarGrid& grid,
               const WeightModel& w) {
  if (!(p > 0.0)) throw ParameterError("lp_norm: p must be positive");
  if (field.layout == FieldLayout::Custom)
    throw ContractError("lp_norm: field must be sampled on the quadrature grid");

  double acc = 0.0;
  if (field.layout == FieldLayout::PolarGrid) {
    std::size_t idx = 0;
    for (int i = 0; i < field.n_r; ++i) {
      const double r = grid.radial.nodes[static_cast<std::size_t>(i)];
      const double rho = w.rho_radial(r);
      const double scale = base == BaseMeasure::LambdaRho ? 1.0 / (rho * rho) : 1.0;
      double ring = 0.0;
      for (int j = 0; j < field.n_theta; ++j) ring += std::pow(field.values[idx++], p);
      acc += grid.radial.weights[static_cast<std::size_t>(i)] * r * ring * scale;
    }
    acc *= 2.0 / static_cast<double>(field.n_theta);
  } else {  // Radial
    for (int i = 0; i < field.n_r; ++i) {
      const double r = grid.radial.nodes[static_cast<std::size_t>(i)];
      const double rho = w.rho_radial(r);
      const double scale = base == BaseMeasure::LambdaRho ? 1.0 / (rho * rho) : 1.0;
      acc += 2.0 * grid.radial.weights[static_cast<std::size_t>(i)] * r *
             std::pow(field.values[static_cast<std::size_t>(i)], p) * scale;
    }
  }
  return std::pow(acc, 1.0 / p);
}

double sampled_sup(const TransformField& field) { return field.max_value(); }

std::vector<double> avg_at_lattice(const Measure& mu, const WeightModel& w, const Lattice& lat,
                                   double r) {
  std::vector<double> out(lat.points.size());
  for (std::size_t k = 0; k < lat.points.size(); ++k) {
    const double rho = lat.rho_at[k];
    out[k] = disc_mass(mu, lat.points[k], r * rho) / (rho * rho);
  }
  return out;
}

double lattice_sum(const Measure& mu, const WeightModel& w, const Lattice& lat, double p,
                   double t_exp) {
  if (!(p > 0.0)) throw ParameterError("lattice_sum: p must be positive");
  const std::vector<double> avg = avg_at_lattice(mu, w, lat, lat.params.r);
  double acc = 0.0;
  for (std::size_t k = 0; k < avg.size(); ++k) {
    if (avg[k] == 0.0) continue;
    acc += std::pow(avg[k] * std::pow(lat.rho_at[k], t_exp), p);
  }
  return std::pow(acc, 1.0 / p);
}

std::vector<std::pair<double, double>> decay_profile(const TransformField& field,
                                                     const std::vector<double>& thresholds) {
  std::vector<std::pair<double, double>> out;
  for (double t : thresholds) {
    double sup = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < field.points.size(); ++i) {
      if (std::abs(field.points[i]) > t) {
        sup = std::max(sup, field.values[i]);
        any = true;
      }
    }
    if (!any) throw DomainError("decay_profile: no samples beyond threshold");
    out.emplace_back(t, sup);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical measures

std::vector<std::string> canonical_measure_names() {
  return {"atom-cluster", "uniform", "boundary-concentrated", "lattice-atoms", "mixed"};
}

std::vector<std::string> density_family_names() {
  return {"uniform", "boundary-inv-sqrt", "quadratic", "one-minus-r2", "core-indicator"};
}

namespace {

Measure atom_cluster(const WeightModel& w) {
  // Fixed cluster well inside the kernel-safe region (|a| <= 0.8 r_max).
  const double rm = w.r_max;
  const double radii[] = {0.0, 0.2, 0.35, 0.35, 0.5, 0.6, 0.7};
  const double angles[] = {0.0, 1.1, 2.7, 4.0, 5.2, 0.7, 3.3};
  const double masses[] = {1.0, 0.8, 0.6, 0.7, 0.5, 0.9, 0.4};
  std::vector<Atom> atoms;
  for (int i = 0; i < 7; ++i) {
    const double r = radii[i] * rm;
    atoms.push_back({cplx(r * std::cos(angles[i]), r * std::sin(angles[i])), masses[i]});
  }
  Measure mu = make_atomic(std::move(atoms), rm);
  mu.label = "atom-cluster";
  return mu;
}

Measure lattice_atoms(const WeightModel& w, const Lattice& lat) {
  std::vector<std::size_t> eligible;
  for (std::size_t k = 0; k < lat.points.size(); ++k)
    if (std::abs(lat.points[k]) <= 0.8 * w.r_max) eligible.push_back(k);
  if (eligible.size() < 50)
    throw ContractError("lattice-atoms: lattice too small for 50 interior atoms");
  std::vector<Atom> atoms;
  const std::size_t stride = eligible.size() / 50;
  for (std::size_t i = 0; i < 50; ++i) {
    const std::size_t k = eligible[i * stride];
    atoms.push_back({lat.points[k], lat.rho_at[k] * lat.rho_at[k]});
  }
  Measure mu = make_atomic(std::move(atoms), w.r_max);
  mu.label = "lattice-atoms";
  return mu;
}

}  // namespace

Measure make_canonical_measure(const std::string& name, const WeightModel& w,
                               const Lattice* lat) {
  if (name == "atom-cluster") return atom_cluster(w);
  if (name == "uniform") {
    Measure mu = make_radial_density("uniform", 1.0, w.r_max, w.r_max);
    mu.label = "uniform";
    return mu;
  }
  if (name == "boundary-concentrated") {
    Measure mu = make_radial_density("boundary-inv-sqrt", 1.0, w.r_max, w.r_max);
    mu.label = "boundary-concentrated";
    return mu;
  }
  if (name == "lattice-atoms") {
    if (lat == nullptr) throw ContractError("lattice-atoms requires a lattice");
    return lattice_atoms(w, *lat);
  }
  if (name == "mixed") {
    if (lat == nullptr) throw ContractError("mixed requires a lattice");
    Measure a = scale_measure(atom_cluster(w), 0.5);
    Measure b = make_radial_density("uniform", 0.5, w.r_max, w.r_max);
    Measure mu = add_measures(a, b);
    mu.label = "mixed";
    return mu;
  }
  throw ParameterError("make_canonical_measure: unknown name '" + name + "'");
}

}  // namespace bergman
