#pragma once

#include <string>
#include <vector>

namespace bergman {

struct Quantity {
  std::string name;
  double value = 0.0;
  std::string provenance;  // which theorem item the quantity instantiates
};

/// Ratio comparison of theorem-equivalent quantities.  All quantities are
/// normalized to first power in the measure, so the ratio matrix is
/// invariant under mu -> c mu up to arithmetic noise.
struct EquivalenceReport {
  std::vector<Quantity> quantities;
  std::vector<std::vector<double>> pairwise_ratios;
  double ratio_spread = 0.0;   // max/min over positive quantities
  double scaling_drift = 0.0;  // relative ratio change under mu -> 10 mu
  std::vector<std::pair<std::string, std::string>> verdicts;
};

/// Fills ratios and spread from the quantity values (zeros are skipped).
void finalize_ratios(EquivalenceReport& rep);

/// Largest relative change between the ratio matrices of two reports with
/// identical quantity lists.
double ratio_drift(const EquivalenceReport& base, const EquivalenceReport& scaled);

}  // namespace bergman
