#include "bergman/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "bergman/carleson.hpp"
#include "bergman/csv.hpp"
#include "bergman/errors.hpp"
#include "bergman/rng.hpp"
#include "bergman/toeplitz.hpp"

namespace bergman {

using json = nlohmann::ordered_json;

WeightModel weight_from_config(const RunConfig& cfg) {
  return make_weight(cfg.weight_family, cfg.amplitude, cfg.exponent, cfg.r_max);
}

MomentTable table_from_config(const RunConfig& cfg, const WeightModel& w) {
  return compute_moments(w, cfg.n_basis);
}

Lattice lattice_from_config(const RunConfig& cfg, const WeightModel& w) {
  LatticeParams params;
  params.r = cfg.lattice_r;
  params.s = cfg.lattice_s;
  params.r_max = cfg.r_max;
  params.alpha_cap = cfg.alpha_cap;
  LatticeBuildOptions options;
  options.point_budget = cfg.point_budget;
  options.covering_samples = cfg.covering_samples;
  return build_lattice(w, params, cfg.seed, options);
}

Measure measure_from_config(const MeasureConfig& mc, const WeightModel& w, const Lattice* lat) {
  Measure mu;
  if (mc.kind == "zero") {
    mu = make_zero_measure(w.r_max);
  } else if (mc.kind == "atomic") {
    std::vector<Atom> atoms;
    for (const auto& [re, im, mass] : mc.atoms) atoms.push_back({cplx(re, im), mass});
    if (!mc.csv_path.empty())
      for (const auto& row : csv::read(mc.csv_path)) {
        if (row.size() != 3)
          throw ParameterError("measure '" + mc.name + "': atom CSV rows need re,im,mass");
        atoms.push_back({cplx(row[0], row[1]), row[2]});
      }
    mu = make_atomic(std::move(atoms), w.r_max);
    if (mc.scale != 1.0) mu = scale_measure(mu, mc.scale);
  } else if (mc.kind == "radial") {
    const double support = mc.support > 0.0 ? mc.support : w.r_max;
    mu = make_radial_density(mc.family, mc.scale, support, w.r_max);
  } else if (mc.kind == "canonical") {
    mu = make_canonical_measure(mc.family, w, lat);
    if (mc.scale != 1.0) mu = scale_measure(mu, mc.scale);
  } else {
    throw ParameterError("measure '" + mc.name + "': unknown kind '" + mc.kind + "'");
  }
  mu.label = mc.name;
  return mu;
}

namespace {

struct RunContext {
  const RunConfig& cfg;
  WeightModel weight;
  std::optional<MomentTable> table_;
  std::optional<PolarGrid> grid_;
  std::optional<Lattice> lattice_;
  std::vector<std::pair<std::string, Measure>> measures_;
  bool measures_built = false;

  explicit RunContext(const RunConfig& c) : cfg(c), weight(weight_from_config(c)) {}

  const MomentTable& table() {
    if (!table_) table_ = table_from_config(cfg, weight);
    return *table_;
  }
  const PolarGrid& grid() {
    if (!grid_) grid_ = make_polar_grid(table().rule, cfg.n_theta);
    return *grid_;
  }
  const Lattice& lattice() {
    if (!lattice_) lattice_ = lattice_from_config(cfg, weight);
    return *lattice_;
  }
  const std::vector<std::pair<std::string, Measure>>& measures() {
    if (!measures_built) {
      const bool needs_lattice = std::any_of(
          cfg.measures.begin(), cfg.measures.end(), [](const MeasureConfig& mc) {
            return mc.kind == "canonical" &&
                   (mc.family == "lattice-atoms" || mc.family == "mixed");
          });
      const Lattice* lat = needs_lattice ? &lattice() : nullptr;
      for (const MeasureConfig& mc : cfg.measures)
        measures_.emplace_back(mc.name, measure_from_config(mc, weight, lat));
      measures_built = true;
    }
    return measures_;
  }
};

void add_assertion(RunReport& report, json& task_json, const std::string& name,
                   const std::string& invariant, bool passed, double measured, double bound) {
  report.assertions.push_back({name, invariant, passed, measured, bound});
  report.all_passed = report.all_passed && passed;
  task_json["assertions"].push_back(
      {{"name", name}, {"invariant", invariant}, {"passed", passed}, {"measured", measured},
       {"bound", bound}});
}

json equivalence_to_json(const EquivalenceReport& rep) {
  json j;
  for (const Quantity& q : rep.quantities)
    j["quantities"].push_back({{"name", q.name}, {"value", q.value}, {"provenance", q.provenance}});
  j["pairwise_ratios"] = rep.pairwise_ratios;
  j["ratio_spread"] = rep.ratio_spread;
  j["scaling_drift"] = rep.scaling_drift;
  for (const auto& [k, v] : rep.verdicts) j["verdicts"][k] = v;
  return j;
}

std::filesystem::path artifact_path(const RunConfig& cfg, const std::string& name) {
  return std::filesystem::path(cfg.output_dir) / name;
}

// --------------------------------------------------------------------------
// Task handlers

json run_membership(RunContext& ctx, RunReport& report) {
  const MembershipReport rep = check_membership(ctx.weight, 4000, ctx.cfg.seed);
  json j;
  j["min_laplacian"] = rep.min_laplacian;
  j["lipschitz_estimate"] = rep.lipschitz_estimate;
  j["rho_over_one_minus_mod"] = rep.rho_over_one_minus_mod;
  for (const auto& [t, sup] : rep.l0_decay) j["l0_decay"].push_back({{"t", t}, {"sup", sup}});

  if (!ctx.weight.oracle()) {
    add_assertion(report, j, "membership_laplacian_positive", "laplacian_phi(z) > 0",
                  rep.min_laplacian > 0.0, rep.min_laplacian, 0.0);
    double worst_increase = 0.0;
    for (std::size_t i = 0; i + 1 < rep.l0_decay.size(); ++i)
      if (rep.l0_decay[i].first >= 0.5)
        worst_increase =
            std::max(worst_increase, rep.l0_decay[i + 1].second - rep.l0_decay[i].second);
    add_assertion(report, j, "membership_l0_decay", "l0_decay non-increasing beyond t = 0.5",
                  worst_increase <= 0.0, worst_increase, 0.0);
    add_assertion(report, j, "membership_rho_bound", "rho(z) <= s (1 - |z|) with finite s",
                  std::isfinite(rep.rho_over_one_minus_mod), rep.rho_over_one_minus_mod, 0.0);
  }
  return j;
}

json run_lattice(RunContext& ctx, RunReport& report) {
  const Lattice& lat = ctx.lattice();
  json j;
  j["points"] = lat.points.size();
  j["multiplicity"] = lat.multiplicity;
  j["r"] = lat.params.r;
  j["s"] = lat.params.s;

  add_assertion(report, j, "lattice_separation",
                "|w_k - w_j| >= s r min(rho_k, rho_j) for k != j",
                verify_separation(ctx.weight, lat), 0.0, 0.0);
  const CoverCheck check = verify_covering(ctx.weight, lat, ctx.cfg.covering_samples);
  add_assertion(report, j, "lattice_covering", "every sampled z lies in some D^r(w_k)",
                check.covered, check.covered ? 0.0 : 1.0, 0.0);
  add_assertion(report, j, "lattice_multiplicity_finite", "covering multiplicity N finite",
                check.multiplicity > 0, static_cast<double>(check.multiplicity), 0.0);

  if (ctx.cfg.write_csv) {
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < lat.points.size(); ++k)
      rows.push_back({lat.points[k].real(), lat.points[k].imag(), lat.rho_at[k]});
    csv::write(artifact_path(ctx.cfg, "lattice.csv").string(), "re,im,rho", rows);
    report.artifacts.push_back("lattice.csv");
  }
  return j;
}

json run_kernel_verify(RunContext& ctx, RunReport& report) {
  const MomentTable& t = ctx.table();
  const PolarGrid& grid = ctx.grid();
  json j;
  j["n_basis"] = t.n_basis;
  j["radial_nodes"] = t.rule.size();
  j["kernel_valid_radius"] = kernel_valid_radius(t);

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 2 < t.log_h.size(); ++n)
    min_gap = std::min(min_gap, t.log_h[n] + t.log_h[n + 2] - 2.0 * t.log_h[n + 1]);
  add_assertion(report, j, "moment_log_convexity", "log h_n + log h_{n+2} >= 2 log h_{n+1}",
                min_gap >= -1e-10, min_gap, -1e-10);

  if (!ctx.weight.oracle()) {
    Rng rng(ctx.cfg.seed ^ 0x6b65726eull);
    double worst_unit = 0.0;
    for (int i = 0; i < 64; ++i) {
      const cplx z = rng.disc_point(ctx.weight.r_max);
      const double rho = ctx.weight.rho(z);
      worst_unit = std::max(worst_unit,
                            std::fabs(rho * rho * ctx.weight.laplacian_phi(z) - 1.0));
    }
    add_assertion(report, j, "rho_laplacian_unit", "rho^2 laplacian_phi = 1",
                  worst_unit <= 1e-12, worst_unit, 1e-12);
  }

  const double valid = std::min(kernel_valid_radius(t), 0.9 * ctx.weight.r_max);
  Rng rng(ctx.cfg.seed ^ 0x726b6873ull);
  double worst_rkhs = 0.0;
  for (int i = 0; i < 25; ++i) {
    const cplx z = rng.disc_point(valid);
    const double lhs = 2.0 * norm_Kz(t, grid, z, 2.0).log_value;
    const double rhs = std::log(kernel_diag(t, z)) + 2.0 * ctx.weight.phi(z);
    worst_rkhs = std::max(worst_rkhs, std::fabs(lhs - rhs));
  }
  add_assertion(report, j, "rkhs_identity", "||K_z||_2^2 = K(z,z)", worst_rkhs <= 1e-8,
                worst_rkhs, 1e-8);

  double worst_res = 0.0;
  Rng rng2(ctx.cfg.seed ^ 0x72657072ull);
  for (int deg = 0; deg <= 6; ++deg) {
    std::vector<cplx> coeffs(static_cast<std::size_t>(deg) + 1, cplx(0.0, 0.0));
    coeffs.back() = cplx(1.0, 0.0);
    const cplx z = rng2.disc_point(0.8 * valid);
    worst_res = std::max(worst_res, reproducing_residual(t, grid, coeffs, z));
  }
  add_assertion(report, j, "reproducing_property", "f(z) = <f, K_z> for polynomials",
                worst_res <= 1e-8, worst_res, 1e-8);

  if (ctx.weight.family == WeightFamily::Flat) {
    Rng frng(ctx.cfg.seed ^ 0x666c6174ull);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const cplx z = frng.disc_point(0.9);
      const cplx w = frng.disc_point(0.9);
      const cplx exact = 1.0 / std::pow(1.0 - z * std::conj(w), 2.0);
      const cplx got = kernel_eval(t, z, w).kappa;  // phi = 0: kappa = K
      worst = std::max(worst, std::abs(got - exact) / std::abs(exact));
    }
    add_assertion(report, j, "flat_closed_form", "K(z,w) = (1 - z conj(w))^-2", worst <= 1e-10,
                  worst, 1e-10);
  }

  if (ctx.cfg.decay_fit && !ctx.weight.oracle()) {
    const MetricGrid mgrid =
        make_metric_grid(ctx.weight, ctx.cfg.metric_n_r, ctx.cfg.metric_n_theta);
    const DecayFit fit = fit_decay_sigma(t, mgrid, 256, ctx.cfg.seed);
    j["decay_fit"] = {{"sigma", fit.sigma},
                      {"c_tilde", fit.c_tilde},
                      {"rms_residual", fit.rms_residual},
                      {"pairs", fit.n_pairs_used}};
    add_assertion(report, j, "kernel_decay_sigma", "fitted exponential decay rate positive",
                  fit.sigma > 0.0, fit.sigma, 0.0);
  }

  if (ctx.cfg.write_csv) {
    std::vector<std::vector<double>> rows;
    for (std::size_t n = 0; n < t.log_h.size(); ++n)
      rows.push_back({static_cast<double>(n), t.log_h[n]});
    csv::write(artifact_path(ctx.cfg, "moments.csv").string(), "n,log_h", rows);
    report.artifacts.push_back("moments.csv");
  }
  return j;
}

json run_carleson(RunContext& ctx, RunReport& report) {
  if (!(ctx.cfg.p <= ctx.cfg.q))
    throw ParameterError("carleson task requires p <= q in [params]");
  CarlesonOptions options;
  options.ratio_window = ctx.cfg.ratio_window;
  options.vanish_tol = ctx.cfg.vanish_tol;
  json j;
  for (const auto& [name, mu] : ctx.measures()) {
    const EquivalenceReport rep = carleson_check(mu, ctx.weight, ctx.table(), ctx.grid(),
                                                 ctx.lattice(), ctx.cfg.p, ctx.cfg.q,
                                                 ctx.cfg.delta, options);
    j[name] = equivalence_to_json(rep);
    if (!mu.is_zero()) {
      add_assertion(report, j[name], "carleson_scaling_invariance",
                    "ratio matrix invariant under mu -> 10 mu", rep.scaling_drift <= 1e-6,
                    rep.scaling_drift, 1e-6);
      double min_sup = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i + 1 < rep.quantities.size(); ++i)
        if (rep.quantities[i].value > 0.0) min_sup = std::min(min_sup, rep.quantities[i].value);
      const double lower = rep.quantities.back().value;
      add_assertion(report, j[name], "embedding_lower_bound_valid",
                    "L <= ratio_window * min of the sup quantities",
                    lower <= ctx.cfg.ratio_window * min_sup, lower / min_sup,
                    ctx.cfg.ratio_window);
    }
  }
  return j;
}

json run_vanishing(RunContext& ctx, RunReport& report) {
  if (!(ctx.cfg.p <= ctx.cfg.q))
    throw ParameterError("vanishing task requires p <= q in [params]");
  CarlesonOptions options;
  options.vanish_tol = ctx.cfg.vanish_tol;
  const double rm = ctx.cfg.r_max;
  std::vector<double> thresholds;
  for (double f : {0.3, 0.45, 0.6, 0.75, 0.85}) thresholds.push_back(f * rm);

  json j;
  for (const auto& [name, mu] : ctx.measures()) {
    const VanishingReport rep =
        vanishing_check(mu, ctx.weight, ctx.table(), ctx.grid(), ctx.lattice(), ctx.cfg.p,
                        ctx.cfg.q, ctx.cfg.delta, thresholds, options);
    json jm;
    jm["vanishing_consistent"] = rep.vanishing_consistent;
    for (const auto& [pname, profile] : rep.profiles) {
      json jp;
      for (const auto& [tv, sup] : profile) jp.push_back({{"t", tv}, {"sup", sup}});
      jm["profiles"][pname] = jp;
    }
    j[name] = jm;
    if (!mu.is_zero() && mu.support_radius <= 0.5 * thresholds.back())
      add_assertion(report, j[name], "compact_support_vanishing",
                    "compactly supported measures are vanishing-consistent",
                    rep.vanishing_consistent, rep.vanishing_consistent ? 1.0 : 0.0, 1.0);
  }
  return j;
}

json run_qlp(RunContext& ctx, RunReport& report) {
  const double p = std::max(ctx.cfg.p, ctx.cfg.q);
  const double q = std::min(ctx.cfg.p, ctx.cfg.q);
  if (!(q < p)) throw ParameterError("qlp task requires distinct p and q in [params]");
  CarlesonOptions options;
  options.ratio_window = ctx.cfg.ratio_window;
  json j;
  for (const auto& [name, mu] : ctx.measures()) {
    if (mu.is_zero()) {
      j[name]["note"] = "zero measure: all quantities vanish";
      continue;
    }
    const EquivalenceReport rep = carleson_qlp_check(mu, ctx.weight, ctx.table(), ctx.grid(),
                                                     ctx.lattice(), p, q, ctx.cfg.delta, options);
    j[name] = equivalence_to_json(rep);
    add_assertion(report, j[name], "qlp_scaling_invariance",
                  "ratio matrix invariant under mu -> 10 mu", rep.scaling_drift <= 1e-6,
                  rep.scaling_drift, 1e-6);
  }
  return j;
}

json run_toeplitz(RunContext& ctx, RunReport& report) {
  const MomentTable& t = ctx.table();
  json j;
  for (const auto& [name, mu] : ctx.measures()) {
    const ToeplitzMatrix tm = assemble(mu, t, ctx.cfg.n_t);
    const SpectralReport spec = spectrum(tm, ctx.cfg.p_list);
    json jm;
    jm["dim"] = tm.dim;
    jm["operator_norm"] = spec.operator_norm;
    jm["trace"] = spec.trace;
    jm["tail_ratio"] = spec.tail_ratio;
    jm["tail_warning"] = spec.tail_warning;
    for (const auto& [p, s] : spec.schatten) jm["schatten"].push_back({{"p", p}, {"value", s}});

    if (!mu.is_zero()) {
      const double scale = std::max(spec.operator_norm, 1e-300);
      double sum = 0.0;
      for (double l : spec.eigenvalues) sum += l;
      add_assertion(report, jm, "trace_consistency", "trace = sum of eigenvalues",
                    std::fabs(sum - spec.trace) <= 1e-8 * std::max(1.0, spec.trace),
                    std::fabs(sum - spec.trace), 1e-8);

      const double valid = std::min(kernel_valid_radius(t), 0.9 * ctx.weight.r_max);
      Rng rng(ctx.cfg.seed ^ 0x62657265ull);
      std::vector<cplx> pts;
      for (int i = 0; i < 40; ++i) pts.push_back(rng.disc_point(valid));
      const TransformField mu_field = berezin_measure(mu, t, SampleSpec::at(pts));
      double worst = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double ob = operator_berezin(tm, t, pts[i]);
        const double mb = mu_field.values[i];
        if (mb > 0.0) worst = std::max(worst, std::fabs(ob - mb) / mb);
      }
      add_assertion(report, jm, "berezin_consistency",
                    "operator Berezin transform matches measure Berezin transform",
                    worst <= 1e-6, worst, 1e-6);

      if (mu.radial()) {
        double offdiag = 0.0;
        for (int a = 0; a < tm.dim; ++a)
          for (int b = 0; b < tm.dim; ++b)
            if (a != b) offdiag = std::max(offdiag, std::abs(tm.entries(a, b)));
        add_assertion(report, jm, "radial_diagonality",
                      "radial symbols give diagonal matrices", offdiag <= 1e-10 * scale,
                      offdiag, 1e-10 * scale);
      }
    }
    if (ctx.cfg.write_csv) {
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i)
        rows.push_back({static_cast<double>(i), spec.eigenvalues[i]});
      const std::string fname = "eigenvalues_" + name + ".csv";
      csv::write(artifact_path(ctx.cfg, fname).string(), "index,lambda", rows);
      report.artifacts.push_back(fname);
    }
    j[name] = jm;
  }
  return j;
}

json run_schatten(RunContext& ctx, RunReport& report) {
  SchattenReportOptions options;
  options.dim = ctx.cfg.n_t;
  options.ratio_window = ctx.cfg.ratio_window;
  json j;
  for (const auto& [name, mu] : ctx.measures()) {
    if (mu.is_zero()) {
      j[name]["note"] = "zero measure: all quantities vanish";
      continue;
    }
    const std::vector<EquivalenceReport> reps =
        schatten_report(mu, ctx.weight, ctx.table(), ctx.grid(), ctx.lattice(), ctx.cfg.delta,
                        ctx.cfg.p_list, options);
    json jm;
    for (std::size_t i = 0; i < reps.size(); ++i) {
      json jp = equivalence_to_json(reps[i]);
      jp["p"] = ctx.cfg.p_list[i];
      add_assertion(report, jp, "schatten_scaling_invariance",
                    "ratio matrix invariant under mu -> 10 mu", reps[i].scaling_drift <= 1e-6,
                    reps[i].scaling_drift, 1e-6);
      jm.push_back(jp);
    }
    j[name] = jm;
  }
  return j;
}

json run_tail(RunContext& ctx, RunReport& report) {
  json j;
  for (const auto& [name, mu] : ctx.measures()) {
    const auto sweep = compact_tail(mu, ctx.table(), ctx.cfg.n_t, ctx.cfg.r_sweep);
    json jm;
    for (const auto& [r, norm] : sweep) jm["sweep"].push_back({{"R", r}, {"norm", norm}});

    double max_norm = 0.0;
    for (const auto& [r, norm] : sweep) max_norm = std::max(max_norm, norm);
    double worst_increase = 0.0;
    for (std::size_t i = 1; i < sweep.size(); ++i)
      worst_increase = std::max(worst_increase, sweep[i].second - sweep[i - 1].second);
    add_assertion(report, jm, "tail_monotone", "||T_mu - T_mu_R|| non-increasing in R",
                  worst_increase <= 1e-10 * std::max(max_norm, 1e-300), worst_increase,
                  1e-10 * max_norm);

    for (const auto& [r, norm] : sweep)
      if (r >= mu.support_radius) {
        add_assertion(report, jm, "tail_zero_beyond_support",
                      "restriction beyond the support changes nothing", norm == 0.0, norm, 0.0);
        break;
      }
    j[name] = jm;
  }
  return j;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return buf;
}

}  // namespace

RunReport run(const RunConfig& cfg) {
  RunReport report;
  RunContext ctx(cfg);

  std::filesystem::create_directories(cfg.output_dir);

  json root;
  root["version"] = kVersion;
  root["config_hash"] = fnv1a_hex(cfg.raw_text);
  if (cfg.timestamp) root["generated_at"] = iso_timestamp();
  root["seed"] = cfg.seed;
  root["weight"] = {{"family", ctx.weight.family_name()},
                    {"amplitude", ctx.weight.amplitude},
                    {"exponent", ctx.weight.exponent},
                    {"r_max", ctx.weight.r_max}};

  json tasks = json::object();
  // canonical dependency order regardless of declaration order
  for (const std::string& task : known_tasks()) {
    if (std::find(cfg.tasks.begin(), cfg.tasks.end(), task) == cfg.tasks.end()) continue;
    if (task == "membership") tasks[task] = run_membership(ctx, report);
    else if (task == "lattice") tasks[task] = run_lattice(ctx, report);
    else if (task == "kernel-verify") tasks[task] = run_kernel_verify(ctx, report);
    else if (task == "carleson") tasks[task] = run_carleson(ctx, report);
    else if (task == "vanishing") tasks[task] = run_vanishing(ctx, report);
    else if (task == "qlp") tasks[task] = run_qlp(ctx, report);
    else if (task == "toeplitz") tasks[task] = run_toeplitz(ctx, report);
    else if (task == "schatten") tasks[task] = run_schatten(ctx, report);
    else if (task == "tail") tasks[task] = run_tail(ctx, report);
  }
  root["tasks"] = tasks;

  json asserts = json::array();
  for (const Assertion& a : report.assertions)
    asserts.push_back({{"name", a.name}, {"invariant", a.invariant}, {"passed", a.passed},
                       {"measured", a.measured}, {"bound", a.bound}});
  root["assertions"] = asserts;
  root["artifacts"] = report.artifacts;
  root["all_passed"] = report.all_passed;

  report.json_text = root.dump(2) + "\n";
  report.exit_code = report.all_passed ? 0 : 1;

  std::ofstream out(artifact_path(cfg, "report.json"));
  out << report.json_text;
  return report;
}

FamilyCatalog list_families() {
  FamilyCatalog cat;
  cat.weight_families = {"exp", "flat", "const-rho"};
  cat.density_families = density_family_names();
  cat.canonical_measures = canonical_measure_names();
  cat.tasks = known_tasks();
  return cat;
}

}  // namespace bergman
