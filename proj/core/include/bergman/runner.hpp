#pragma once

#include <string>
#include <vector>

#include "bergman/config.hpp"
#include "bergman/geometry.hpp"
#include "bergman/kernel.hpp"
#include "bergman/measures.hpp"
#include "bergman/report.hpp"
#include "bergman/weights.hpp"

namespace bergman {

inline constexpr const char* kVersion = "0.1.0";

WeightModel weight_from_config(const RunConfig& cfg);
MomentTable table_from_config(const RunConfig& cfg, const WeightModel& w);
Lattice lattice_from_config(const RunConfig& cfg, const WeightModel& w);
Measure measure_from_config(const MeasureConfig& mc, const WeightModel& w, const Lattice* lat);

/// Executes the configured tasks in dependency order and assembles the
/// JSON report; CSV artifacts go to cfg.output_dir when enabled.  The
/// report is byte-identical across runs with the same config and seed
/// (timestamp field aside).
RunReport run(const RunConfig& cfg);

struct FamilyCatalog {
  std::vector<std::string> weight_families;
  std::vector<std::string> density_families;
  std::vector<std::string> canonical_measures;
  std::vector<std::string> tasks;
};

FamilyCatalog list_families();

}  // namespace bergman
