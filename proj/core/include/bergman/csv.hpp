#pragma once

#include <string>
#include <vector>

namespace bergman::csv {

/// Writes rows with a header line; doubles are printed with 17 significant
/// digits so files round-trip bit-exactly.
void write(const std::string& path, const std::string& header,
           const std::vector<std::vector<double>>& rows);

/// Reads a numeric CSV, skipping the header line when non-numeric.
std::vector<std::vector<double>> read(const std::string& path);

std::string format_double(double v);

}  // namespace bergman::csv
