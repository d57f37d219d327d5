#pragma once

#include <string>
#include <vector>

namespace bergman {

/// One checked invariant with its measured value.
struct Assertion {
  std::string name;
  std::string invariant;  // module invariant the check instantiates
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
};

struct RunReport {
  std::string json_text;
  std::vector<Assertion> assertions;
  std::vector<std::string> artifacts;  // files written under the output dir
  bool all_passed = true;
  int exit_code = 0;
};

}  // namespace bergman
