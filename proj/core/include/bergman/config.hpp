#pragma once

#include <cstdint>
#include <array>
#include <map>
#include <string>
#include <vector>

namespace bergman {

/// One measure declaration from the config file.
struct MeasureConfig {
  std::string name;
  std::string kind;    // "atomic" | "radial" | "canonical"
  std::string family;  // density family or canonical name
  double scale = 1.0;
  double support = -1.0;  // radial: support radius (defaults to r_max)
  std::vector<std::array<double, 3>> atoms;  // (re, im, mass)
  std::string csv_path;                      // alternative atom source
};

/// Parsed experiment configuration.  Sections: [weight], [kernel],
/// [lattice], [metric], [measure <name>], [tasks], [params], [tolerances],
/// [run], [output].
struct RunConfig {
  // weight
  std::string weight_family = "exp";
  double amplitude = 1.0;
  double exponent = 1.0;
  double r_max = 0.95;

  // kernel
  int n_basis = 256;
  int n_theta = 512;
  bool decay_fit = false;

  // lattice
  double lattice_r = 0.4;
  double lattice_s = 0.5;
  double alpha_cap = 0.5;
  std::size_t point_budget = 50000;
  std::size_t covering_samples = 100000;

  // metric grid
  int metric_n_r = 192;
  int metric_n_theta = 384;

  // measures (declaration order preserved)
  std::vector<MeasureConfig> measures;

  // tasks
  std::vector<std::string> tasks;

  // params
  double p = 2.0;
  double q = 2.0;
  double delta = -1.0;  // defaults to lattice_r
  std::vector<double> p_list = {0.5, 1.0, 2.0};
  int n_t = 200;
  std::vector<double> r_sweep;

  // tolerances
  double ratio_window = 100.0;
  double vanish_tol = 1e-6;

  // run
  std::uint64_t seed = 42;

  // output
  std::string output_dir = "out";
  bool write_csv = true;
  bool timestamp = true;

  std::string raw_text;  // original file contents, hashed for provenance
};

/// Parses and validates; throws ParameterError naming the offending
/// line/field.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Known task names, in canonical execution order.
const std::vector<std::string>& known_tasks();

/// FNV-1a 64 hash as fixed-width hex, used for report provenance.
std::string fnv1a_hex(const std::string& text);

}  // namespace bergman
