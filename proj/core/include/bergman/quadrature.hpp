#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace bergman {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Computes (and caches) the n-point Gauss-Legendre rule via Newton
/// iteration on the Legendre polynomial.
const GaussRule& gauss_legendre(int n);

/// Composite 1-D rule on [0, r_max] whose panels halve in width toward
/// r_max.  With `levels` = L the panel breakpoints are
///   0, r_max/2, 3 r_max/4, ..., r_max (1 - 2^-L), r_max,
/// i.e. L+1 panels, each carrying a fixed-order Gauss-Legendre rule.
struct RadialRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double r_max = 0.0;
  int levels = 0;
  int nodes_per_panel = 0;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

RadialRule make_radial_rule(double r_max, int levels, int nodes_per_panel = 32);

/// Tensor polar grid over the truncated disc: the radial rule times
/// n_theta equispaced angles.  Normalized area element
/// dA = dx dy / pi, so  integral f dA = (2/n_theta) sum_i sum_j w_i r_i f_ij.
struct PolarGrid {
  RadialRule radial;
  int n_theta = 0;

  std::size_t node_count() const { return radial.size() * static_cast<std::size_t>(n_theta); }
  double theta(int j) const;

  /// Integrates a field given as values[i * n_theta + j] against dA.
  double integrate_values(const std::vector<double>& values) const;

  /// Integrate f(r_i, theta_j) against dA without materializing values.
  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < radial.size(); ++i) {
      double ring = 0.0;
      for (int j = 0; j < n_theta; ++j) ring += f(radial.nodes[i], theta(j));
      acc += radial.weights[i] * radial.nodes[i] * ring;
    }
    return acc * 2.0 / static_cast<double>(n_theta);
  }
};

PolarGrid make_polar_grid(const RadialRule& radial, int n_theta);

/// Quadrature rule over a Euclidean disc D(center, radius), in local polar
/// coordinates; exposes nodes with normalized-area weights.
struct DiscRule {
  std::vector<std::complex<double>> nodes;
  std::vector<double> weights;  // against dA = dx dy / pi
};

DiscRule make_disc_rule(std::complex<double> center, double radius,
                        int n_radial = 24, int n_angular = 48);

}  // namespace bergman
