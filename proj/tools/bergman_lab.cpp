// Command-line front end: config-driven experiment runs, family listings,
// and CSV exports of lattices and kernel heatmaps.
//
// Exit codes: 0 all assertions pass, 1 assertion failure, 2 config error,
// 3 numerical error.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bergman/csv.hpp"
#include "bergman/errors.hpp"
#include "bergman/kernel.hpp"
#include "bergman/runner.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override) {
  bergman::RunConfig cfg = bergman::load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (const char* env = std::getenv("BERGMAN_LAB_OUT"); env != nullptr && *env != '\0')
    cfg.output_dir = env;

  const bergman::RunReport report = bergman::run(cfg);
  std::cout << report.json_text;
  std::cerr << (report.all_passed ? "all assertions passed" : "ASSERTION FAILURES") << " ("
            << report.assertions.size() << " checks)\n";
  return report.exit_code;
}

int cmd_list() {
  const bergman::FamilyCatalog cat = bergman::list_families();
  std::cout << "weight families:\n";
  for (const auto& s : cat.weight_families) std::cout << "  " << s << "\n";
  std::cout << "density families:\n";
  for (const auto& s : cat.density_families) std::cout << "  " << s << "\n";
  std::cout << "canonical measures:\n";
  for (const auto& s : cat.canonical_measures) std::cout << "  " << s << "\n";
  std::cout << "tasks:\n";
  for (const auto& s : cat.tasks) std::cout << "  " << s << "\n";
  return 0;
}

int cmd_export_lattice(const std::string& config_path, const std::string& out_path) {
  const bergman::RunConfig cfg = bergman::load_config(config_path);
  const bergman::WeightModel w = bergman::weight_from_config(cfg);
  const bergman::Lattice lat = bergman::lattice_from_config(cfg, w);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < lat.points.size(); ++k)
    rows.push_back({lat.points[k].real(), lat.points[k].imag(), lat.rho_at[k]});
  bergman::csv::write(out_path, "re,im,rho", rows);
  std::cerr << "wrote " << rows.size() << " lattice points to " << out_path << "\n";
  return 0;
}

int cmd_export_kernel(const std::string& config_path, const std::string& out_path, double re,
                      double im) {
  const bergman::RunConfig cfg = bergman::load_config(config_path);
  const bergman::WeightModel w = bergman::weight_from_config(cfg);
  const bergman::MomentTable table = bergman::table_from_config(cfg, w);
  const bergman::cplx z(re, im);

  // |kappa(z, .)| over a plot-friendly polar grid
  const bergman::RadialRule rule = bergman::make_radial_rule(w.r_max, 8, 16);
  const int n_theta = 128;
  const std::vector<bergman::cplx> u = bergman::weighted_basis(table, z);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto ring = bergman::kernel_ring_values(table, u, rule.nodes[i], n_theta);
    for (int j = 0; j < n_theta; ++j) {
      const double th = 2.0 * 3.14159265358979323846 * j / n_theta;
      rows.push_back({rule.nodes[i] * std::cos(th), rule.nodes[i] * std::sin(th),
                      std::abs(ring[static_cast<std::size_t>(j)])});
    }
  }
  bergman::csv::write(out_path, "re,im,abs_kappa", rows);
  std::cerr << "wrote kernel heatmap to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bergman-lab: numerical experiments on Bergman spaces with exponential weights"};
  app.require_subcommand(1);

  std::string config_path, out_path, out_dir;
  double z_re = 0.3, z_im = 0.0;

  auto* run_cmd = app.add_subcommand("run", "execute the tasks of a config file");
  run_cmd->add_option("config", config_path, "run-config file")->required();
  run_cmd->add_option("--output-dir", out_dir, "override the [output] directory");

  auto* list_cmd = app.add_subcommand("list", "list weight families, measures and tasks");

  auto* exl_cmd = app.add_subcommand("export-lattice", "build and export the lattice as CSV");
  exl_cmd->add_option("config", config_path, "run-config file")->required();
  exl_cmd->add_option("--out", out_path, "output CSV path")->required();

  auto* exk_cmd = app.add_subcommand("export-kernel", "export a kernel heatmap as CSV");
  exk_cmd->add_option("config", config_path, "run-config file")->required();
  exk_cmd->add_option("--out", out_path, "output CSV path")->required();
  exk_cmd->add_option("--re", z_re, "kernel base point, real part");
  exk_cmd->add_option("--im", z_im, "kernel base point, imaginary part");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, out_dir);
    if (list_cmd->parsed()) return cmd_list();
    if (exl_cmd->parsed()) return cmd_export_lattice(config_path, out_path);
    if (exk_cmd->parsed()) return cmd_export_kernel(config_path, out_path, z_re, z_im);
  } catch (const bergman::ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const bergman::ContractError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const bergman::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
