#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "bergman/weights.hpp"

namespace bergman {

/// D^r(z) = D(z, r rho(z)).
struct DiscSpec {
  cplx center;
  double radius;
};

DiscSpec disc(cplx z, double r, const WeightModel& w);

struct LatticeParams {
  double r = 0.4;          // lattice scale, multiple of rho
  double s = 0.5;          // separation fraction in (0, 1)
  double r_max = 0.95;     // truncation radius
  double alpha_cap = 0.5;  // admissible upper bound for r
};

/// A (rho, r)-lattice: points whose discs D^r(w_k) cover the truncated
/// disc while D(w_k, s r rho) stay disjoint.  Built once, then immutable.
/// The seed enters as a global rotation of the scan frame, so lattices
/// from different seeds are isometric and share their multiplicity.
struct Lattice {
  std::vector<cplx> points;
  std::vector<double> rho_at;
  LatticeParams params;
  double frame_rotation = 0.0;
  int multiplicity = -1;  // measured N of the covering {D^{2r}(w_k)}; -1 unmeasured
};

struct LatticeBuildOptions {
  std::size_t point_budget = 50000;   // scan candidates
  double scan_fraction = 0.7;         // scan spacing as a fraction of the coverage slack
  std::size_t covering_samples = 100000;
  bool verify = true;
};

/// Greedy maximal s*r-separated set over a deterministic spiral scan of
/// rho-adapted rings.  Deterministic for fixed (weight, params, seed).
/// Throws CapacityError (naming an uncovered witness) when the point
/// budget cannot sustain a covering scan.
Lattice build_lattice(const WeightModel& w, const LatticeParams& params, std::uint64_t seed,
                      const LatticeBuildOptions& options = {});

struct CoverCheck {
  bool covered = false;
  cplx witness{0.0, 0.0};  // an uncovered sample when covered == false
  int multiplicity = 0;    // max sampled count of covering discs D^{2r}
};

/// Checks the covering and measures the multiplicity on low-discrepancy
/// samples of the truncated disc.
CoverCheck verify_covering(const WeightModel& w, const Lattice& lat, std::size_t n_samples);

/// Exact pairwise separation check |w_i - w_j| >= s r min(rho_i, rho_j),
/// accelerated by a spatial index; returns false on the first violation.
bool verify_separation(const WeightModel& w, const Lattice& lat);

/// Splits the lattice into M subsequences, each 2^k r min(rho)-separated,
/// by repeated maximal-subsequence extraction in index order.  The outputs
/// partition the input; they are separated subsets, not covering lattices.
std::vector<Lattice> split_lattice(const WeightModel& w, const Lattice& lat, int k);

/// Polar grid graph approximating the metric  d_rho(z,w) =
/// inf over curves of integral |dz| / rho.  Shortest paths converge to
/// d_rho from above as the grid refines.
struct MetricGrid {
  WeightModel weight;
  int n_r = 256;
  int n_theta = 512;

  std::size_t node_count() const;
  cplx node_pos(std::size_t id) const;
  std::size_t nearest_node(cplx z) const;
};

MetricGrid make_metric_grid(const WeightModel& w, int n_r, int n_theta);

struct DistanceField {
  const MetricGrid* grid = nullptr;
  std::size_t source = 0;
  std::vector<double> dist;

  double distance_to(cplx z) const;
};

/// Single-source shortest paths (Dijkstra) over the grid graph.
DistanceField distances_from(const MetricGrid& grid, cplx source);

/// Shortest-path distance between the nodes nearest to z and w.
/// Symmetric by construction of the edge set.
double approx_distance(const MetricGrid& grid, cplx z, cplx w);

/// Spatial index over a fixed point set with rho-adapted radial bins.
class PointIndex {
 public:
  PointIndex(const WeightModel& w, double r_max, double bin_scale);

  void insert(cplx p, std::size_t id);
  /// Ids of stored points within distance radius of z (superset pre-filter,
  /// exact distance check included).
  void query(cplx z, double radius, std::vector<std::size_t>& out) const;

 private:
  struct Bin {
    double r_lo, r_hi;
    int n_cells;
    std::vector<std::vector<std::pair<cplx, std::size_t>>> cells;
  };
  std::vector<double> edges_;
  std::vector<Bin> bins_;
  std::size_t bin_of(double r) const;
};

}  // namespace bergman
