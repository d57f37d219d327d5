#include "bergman/quadrature.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Initial guess for the i-th root of P_n, refined by Newton's method
    // on the three-term recurrence.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = -p1 / pp;
      z += dz;
      if (std::fabs(dz) < 2.0 * std::numeric_limits<double>::epsilon()) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw ParameterError("gauss_legendre: order must be positive");
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

RadialRule make_radial_rule(double r_max, int levels, int nodes_per_panel) {
  if (r_max <= 0.0) throw ParameterError("make_radial_rule: r_max must be positive");
  if (levels < 1) throw ParameterError("make_radial_rule: levels must be >= 1");
  const GaussRule& gl = gauss_legendre(nodes_per_panel);

  RadialRule rule;
  rule.r_max = r_max;
  rule.levels = levels;
  rule.nodes_per_panel = nodes_per_panel;
  rule.nodes.reserve(static_cast<std::size_t>(levels + 1) * nodes_per_panel);
  rule.weights.reserve(rule.nodes.capacity());

  double lo = 0.0;
  for (int level = 0; level <= levels; ++level) {
    const double hi = (level == levels) ? r_max : r_max * (1.0 - std::ldexp(1.0, -(level + 1)));
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (int i = 0; i < nodes_per_panel; ++i) {
      rule.nodes.push_back(mid + half * gl.nodes[i]);
      rule.weights.push_back(half * gl.weights[i]);
    }
    lo = hi;
  }
  return rule;
}

double PolarGrid::theta(int j) const {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_theta);
}

double PolarGrid::integrate_values(const std::vector<double>& values) const {
  if (values.size() != node_count())
    throw ContractError("PolarGrid::integrate_values: field size does not match grid");
  double acc = 0.0;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < radial.size(); ++i) {
    double ring = 0.0;
    for (int j = 0; j < n_theta; ++j) ring += values[idx++];
    acc += radial.weights[i] * radial.nodes[i] * ring;
  }
  return acc * 2.0 / static_cast<double>(n_theta);
}

PolarGrid make_polar_grid(const RadialRule& radial, int n_theta) {
  if (n_theta < 1) throw ParameterError("make_polar_grid: n_theta must be positive");
  return PolarGrid{radial, n_theta};
}

DiscRule make_disc_rule(std::complex<double> center, double radius, int n_radial, int n_angular) {
  if (radius <= 0.0) throw ParameterError("make_disc_rule: radius must be positive");
  const GaussRule& gl = gauss_legendre(n_radial);
  DiscRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(n_radial) * n_angular);
  rule.weights.reserve(rule.nodes.capacity());
  for (int i = 0; i < n_radial; ++i) {
    const double s = 0.5 * radius * (gl.nodes[i] + 1.0);
    const double ws = 0.5 * radius * gl.weights[i];
    for (int j = 0; j < n_angular; ++j) {
      const double t = 2.0 * std::numbers::pi * j / n_angular;
      rule.nodes.push_back(center + std::complex<double>(s * std::cos(t), s * std::sin(t)));
      // dA = (1/pi) s ds dt  ->  weight = ws * s * (2pi/n)/pi = 2 ws s / n
      rule.weights.push_back(2.0 * ws * s / n_angular);
    }
  }
  return rule;
}

}  // namespace bergman
