#include "bergman/config.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw ParameterError("config line " + std::to_string(line) + ": expected a number, got '" +
                         v + "'");
  }
}

long parse_int(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw ParameterError("config line " + std::to_string(line) + ": expected an integer, got '" +
                         v + "'");
  }
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParameterError("config line " + std::to_string(line) + ": expected a boolean, got '" + v +
                       "'");
}

std::vector<double> parse_list(const std::string& v, int line) {
  std::vector<double> out;
  for (const std::string& item : split(v, ',')) out.push_back(parse_double(item, line));
  return out;
}

}  // namespace

const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> tasks = {
      "membership", "lattice", "kernel-verify", "carleson", "vanishing",
      "qlp",        "toeplitz", "schatten",     "tail"};
  return tasks;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  cfg.raw_text = text;

  std::istringstream in(text);
  std::string line;
  std::string section;
  std::string section_arg;
  MeasureConfig* current_measure = nullptr;
  int lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;

    if (s.front() == '[') {
      if (s.back() != ']')
        throw ParameterError("config line " + std::to_string(lineno) + ": unterminated section");
      const std::string inner = trim(s.substr(1, s.size() - 2));
      const auto space = inner.find(' ');
      section = space == std::string::npos ? inner : inner.substr(0, space);
      section_arg = space == std::string::npos ? "" : trim(inner.substr(space + 1));
      current_measure = nullptr;
      if (section == "measure") {
        if (section_arg.empty())
          throw ParameterError("config line " + std::to_string(lineno) +
                               ": [measure] needs a name");
        cfg.measures.push_back({});
        current_measure = &cfg.measures.back();
        current_measure->name = section_arg;
      }
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));

    if (section == "weight") {
      if (key == "family") cfg.weight_family = value;
      else if (key == "amplitude") cfg.amplitude = parse_double(value, lineno);
      else if (key == "exponent") cfg.exponent = parse_double(value, lineno);
      else if (key == "r_max") cfg.r_max = parse_double(value, lineno);
      else throw ParameterError("config line " + std::to_string(lineno) + ": unknown weight key '" + key + "'");
    } else if (section == "kernel") {
      if (key == "n_basis") cfg.n_basis = static_cast<int>(parse_int(value, lineno));
      else if (key == "n_theta") cfg.n_theta = static_cast<int>(parse_int(value, lineno));
      else if (key == "decay_fit") cfg.decay_fit = parse_bool(value, lineno);
      else throw ParameterError("config line " + std::to_string(lineno) + ": unknown kernel key '" + key + "'");
    } else if (section == "lattice") {
      if (key == "r") cfg.lattice_r = parse_double(value, lineno);
      else if (key == "s") cfg.lattice_s = parse_double(value, lineno);
      else if (key == "alpha_cap") cfg.alpha_cap = parse_double(value, lineno);
      else if (key == "point_budget") cfg.point_budget = static_cast<std::size_t>(parse_int(value, lineno));
      else if (key == "covering_samples") cfg.covering_samples = static_cast<std::size_t>(parse_int(value, lineno));
      else throw ParameterError("config line " + std::to_string(lineno) + ": unknown lattice key '" + key + "'");
    } else if (section == "metric") {
      if (key == "n_r") cfg.metric_n_r = static_cast<int>(parse_int(value, lineno));
      else if (key == "n_theta") cfg.metric_n_theta = static_cast<int>(parse_int(value, lineno));
      else throw ParameterError("config line " + std::to_string(lineno) + ": unknown metric key '" + key + "'");
    } else if (section == "measure") {
      if (current_measure == nullptr)
        throw ParameterError("config line " + std::to_string(lineno) + ": key outside [measure]");
      if (key == "kind") current_measure->kind = value;
      else if (key == "family" || key == "name") current_measure->family = value;
      else if (key == "scale") current_measure->scale = parse_double(value, lineno);
      else if (key == "support") current_measure->support = parse_double(value, lineno);
      else if (key == "csv") current_measure->csv_path = value;
      else if (key == "atoms") {
        for (const std::string& triple : split(value, ';')) {
          const std::vector<double> nums = parse_list(triple, lineno);
          if (nums.size() != 3)
            throw ParameterError("config line " + std::to_string(lineno) +
                                 ": atoms need re,im,mass triples");
          current_measure->atoms.push_back({nums[0], nums[1], nums[2]});
        }
      } else {
        throw ParameterError("config line " + std::to_string(lineno) + ": unknown measure key '" + key + "'");
      }
    } else if (section == "tasks") {
      if (key == "list") cfg.tasks = split(value, ',');
      else throw ParameterError("config line " + std::to_string(lineno) + ": unknown tasks key '" + key + "'");
    } else if (section == "params") {
      if (key == "p") cfg.p = parse_double(value, lineno);
      else if (key == "q") cfg.q = parse_double(value, lineno);
      else if (key == "delta") cfg.delta = parse_double(value, lineno);
      else if (key == "p_list") cfg.p_list = parse_list(value, lineno);
      else if (key == "n_t") cfg.n_t = static_cast<int>(parse_int(value, lineno));
      else if (key == "r_sweep") cfg.r_sweep = parse_list(value, lineno);
      else throw ParameterError("config line " + std::to_string(lineno) + ": unknown params key '" + key + "'");
    } else if (section == "tolerances") {
      if (key == "ratio_window") cfg.ratio_window = parse_double(value, lineno);
      else if (key == "vanish_tol") cfg.vanish_tol = parse_double(value, lineno);
      else throw ParameterError("config line " + std::to_string(lineno) + ": unknown tolerances key '" + key + "'");
    } else if (section == "run") {
      if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(value, lineno));
      else throw ParameterError("config line " + std::to_string(lineno) + ": unknown run key '" + key + "'");
    } else if (section == "output") {
      if (key == "directory") cfg.output_dir = value;
      else if (key == "csv") cfg.write_csv = parse_bool(value, lineno);
      else if (key == "timestamp") cfg.timestamp = parse_bool(value, lineno);
      else throw ParameterError("config line " + std::to_string(lineno) + ": unknown output key '" + key + "'");
    } else if (section.empty()) {
      throw ParameterError("config line " + std::to_string(lineno) + ": key before any section");
    } else {
      throw ParameterError("config line " + std::to_string(lineno) + ": unknown section '" +
                           section + "'");
    }
  }

  // validation
  for (const std::string& task : cfg.tasks) {
    const auto& known = known_tasks();
    if (std::find(known.begin(), known.end(), task) == known.end())
      throw ParameterError("config: unknown task '" + task + "'");
  }
  if (cfg.ratio_window <= 0.0 || cfg.vanish_tol <= 0.0)
    throw ParameterError("config: tolerances must be positive");
  if (cfg.delta < 0.0) cfg.delta = cfg.lattice_r;
  if (cfg.r_sweep.empty())
    cfg.r_sweep = {0.3 * cfg.r_max, 0.5 * cfg.r_max, 0.7 * cfg.r_max, 0.9 * cfg.r_max, cfg.r_max};
  for (const MeasureConfig& mc : cfg.measures) {
    if (mc.kind != "atomic" && mc.kind != "radial" && mc.kind != "canonical" && mc.kind != "zero")
      throw ParameterError("config: measure '" + mc.name + "' has unknown kind '" + mc.kind + "'");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("load_config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace bergman
