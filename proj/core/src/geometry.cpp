#include "bergman/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <sstream>

#include "bergman/errors.hpp"
#include "bergman/rng.hpp"

namespace bergman {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  return t < 0.0 ? t + kTwoPi : t;
}

/// Numerical bound for |d rho / d r| over [0, r_max].
double radial_lipschitz(const WeightModel& w) {
  const int n = 4096;
  double lip = 0.0;
  double prev = w.rho_radial(0.0);
  for (int i = 1; i <= n; ++i) {
    const double r = w.r_max * i / n;
    const double cur = w.rho_radial(r);
    lip = std::max(lip, std::fabs(cur - prev) * n / w.r_max);
    prev = cur;
  }
  return lip;
}

}  // namespace

DiscSpec disc(cplx z, double r, const WeightModel& w) {
  if (std::abs(z) >= 1.0) throw DomainError("disc: center must lie in the unit disc");
  return DiscSpec{z, r * w.rho(z)};
}

// ---------------------------------------------------------------------------
// PointIndex

PointIndex::PointIndex(const WeightModel& w, double r_max, double bin_scale) {
  edges_.push_back(0.0);
  double r = 0.0;
  while (r < r_max) {
    const double step = std::max(1e-4 * r_max, bin_scale * w.rho_radial(std::min(r, r_max)));
    r += step;
    edges_.push_back(std::min(r, r_max));
  }
  bins_.resize(edges_.size() - 1);
  for (std::size_t b = 0; b < bins_.size(); ++b) {
    Bin& bin = bins_[b];
    bin.r_lo = edges_[b];
    bin.r_hi = edges_[b + 1];
    const double mid = 0.5 * (bin.r_lo + bin.r_hi);
    const double width = bin.r_hi - bin.r_lo;
    bin.n_cells = std::max(1, static_cast<int>(kTwoPi * mid / width));
    bin.cells.resize(static_cast<std::size_t>(bin.n_cells));
  }
}

std::size_t PointIndex::bin_of(double r) const {
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), r);
  const std::size_t b = static_cast<std::size_t>(std::distance(edges_.begin(), it));
  return std::min(b == 0 ? 0 : b - 1, bins_.size() - 1);
}

void PointIndex::insert(cplx p, std::size_t id) {
  Bin& bin = bins_[bin_of(std::abs(p))];
  const int cell = static_cast<int>(wrap_angle(std::arg(p)) / kTwoPi * bin.n_cells) % bin.n_cells;
  bin.cells[static_cast<std::size_t>(cell)].emplace_back(p, id);
}

void PointIndex::query(cplx z, double radius, std::vector<std::size_t>& out) const {
  out.clear();
  const double rz = std::abs(z);
  const double theta = wrap_angle(std::arg(z));
  const std::size_t b_lo = bin_of(std::max(0.0, rz - radius));
  const std::size_t b_hi = bin_of(rz + radius);
  for (std::size_t b = b_lo; b <= b_hi && b < bins_.size(); ++b) {
    const Bin& bin = bins_[b];
    const double r_near = std::max(bin.r_lo, 1e-12);
    // Angular window: |z - p| <= radius forces 2 sqrt(rz r_p) sin(dtheta/2) <= radius.
    int c_lo = 0, c_hi = bin.n_cells - 1;
    const double denom = 2.0 * std::sqrt(std::max(1e-12, rz * r_near));
    if (radius < denom) {
      const double half = 2.0 * std::asin(radius / denom);
      const double cell_ang = kTwoPi / bin.n_cells;
      c_lo = static_cast<int>(std::floor((theta - half) / cell_ang));
      c_hi = static_cast<int>(std::floor((theta + half) / cell_ang));
      if (c_hi - c_lo + 1 >= bin.n_cells) {
        c_lo = 0;
        c_hi = bin.n_cells - 1;
      }
    }
    for (int c = c_lo; c <= c_hi; ++c) {
      const int cc = ((c % bin.n_cells) + bin.n_cells) % bin.n_cells;
      for (const auto& [p, id] : bin.cells[static_cast<std::size_t>(cc)])
        if (std::abs(p - z) <= radius) out.push_back(id);
    }
  }
}

// ---------------------------------------------------------------------------
// Lattice construction

namespace {

/// rho-adapted ring scan: radii stepping by spacing * rho(r), each ring
/// carrying ceil(2 pi r / (spacing * rho)) equispaced points with a seeded
/// golden-angle offset.  Points are emitted in spiral order (radius
/// ascending, angle ascending within a ring).
struct RingScan {
  std::vector<double> ring_radii;
  std::vector<cplx> points;
};

RingScan make_ring_scan(const WeightModel& w, double r_max, double spacing_of_rho,
                        double rotation, std::size_t budget, bool throw_on_budget) {
  RingScan scan;
  const double golden = 0.618033988749894848;
  double offset = 0.5;

  scan.points.push_back({0.0, 0.0});
  scan.ring_radii.push_back(0.0);
  double r = 0.0;
  while (true) {
    const double step = spacing_of_rho * w.rho_radial(std::min(r, r_max));
    r += step;
    if (r > r_max) break;
    const double circumference = kTwoPi * r;
    const int n = std::max(6, static_cast<int>(std::ceil(circumference / step)));
    if (scan.points.size() + static_cast<std::size_t>(n) > budget) {
      if (throw_on_budget) {
        std::ostringstream msg;
        msg << "build_lattice: point budget " << budget
            << " exhausted before the scan reached the boundary; uncovered witness near ("
            << r << ", 0)";
        throw CapacityError(msg.str());
      }
      break;
    }
    offset = std::fmod(offset + golden, 1.0);
    scan.ring_radii.push_back(r);
    for (int j = 0; j < n; ++j) {
      const double t = kTwoPi * (j + offset) / n + rotation;
      scan.points.push_back({r * std::cos(t), r * std::sin(t)});
    }
  }
  return scan;
}

}  // namespace

Lattice build_lattice(const WeightModel& w, const LatticeParams& params, std::uint64_t seed,
                      const LatticeBuildOptions& options) {
  if (!(params.r > 0.0 && params.r <= params.alpha_cap))
    throw ParameterError("build_lattice: r must lie in (0, alpha_cap]");
  if (!(params.s > 0.0 && params.s < 1.0))
    throw ParameterError("build_lattice: s must lie in (0, 1)");
  if (!(params.r_max > 0.0 && params.r_max <= w.r_max))
    throw ParameterError("build_lattice: r_max must lie in (0, weight r_max]");

  // Scan spacing keyed to the coverage slack (1-s) r rho: every rejected
  // candidate sits within s r rho of an accepted point, so a scan of this
  // density leaves no uncovered hole at scale r.
  const double spacing = options.scan_fraction * (1.0 - params.s) * params.r;
  const double rotation = kTwoPi * Rng(seed).uniform();
  const RingScan scan =
      make_ring_scan(w, params.r_max, spacing, rotation, options.point_budget, true);

  Lattice lat;
  lat.params = params;
  lat.frame_rotation = rotation;
  PointIndex index(w, params.r_max, params.s * params.r);
  std::vector<std::size_t> hits;
  for (const cplx& c : scan.points) {
    const double rho_c = w.rho(c);
    const double radius = params.s * params.r * rho_c;
    index.query(c, radius, hits);
    bool ok = true;
    for (std::size_t id : hits) {
      const double sep = params.s * params.r * std::min(rho_c, lat.rho_at[id]);
      if (std::abs(c - lat.points[id]) < sep) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    index.insert(c, lat.points.size());
    lat.points.push_back(c);
    lat.rho_at.push_back(rho_c);
  }

  if (options.verify) {
    const CoverCheck check = verify_covering(w, lat, options.covering_samples);
    if (!check.covered) {
      std::ostringstream msg;
      msg << "build_lattice: covering failed; uncovered witness at (" << check.witness.real()
          << ", " << check.witness.imag() << ")";
      throw CapacityError(msg.str());
    }
    lat.multiplicity = check.multiplicity;
  }
  return lat;
}

CoverCheck verify_covering(const WeightModel& w, const Lattice& lat, std::size_t n_samples) {
  CoverCheck check;
  if (lat.points.empty()) return check;

  PointIndex index(w, lat.params.r_max, std::max(lat.params.r, lat.params.s * lat.params.r));
  for (std::size_t i = 0; i < lat.points.size(); ++i) index.insert(lat.points[i], i);

  const double lip = radial_lipschitz(w);
  const double r = lat.params.r;
  auto query_radius = [&](double rho_z, double scale) {
    const double shrink = 1.0 - scale * lip;
    return shrink > 0.05 ? scale * rho_z / shrink : scale * w.rho_radial(0.0);
  };

  check.covered = true;
  // samples rotated into the lattice frame: the measured multiplicity then
  // agrees exactly across seeds (rotations are isometries)
  const cplx frame(std::cos(lat.frame_rotation), std::sin(lat.frame_rotation));
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const cplx z = frame * halton_disc_point(i, lat.params.r_max);
    const double rho_z = w.rho(z);

    index.query(z, query_radius(rho_z, r), hits);
    bool covered = false;
    for (std::size_t id : hits)
      if (std::abs(z - lat.points[id]) <= r * lat.rho_at[id]) {
        covered = true;
        break;
      }
    if (!covered) {
      check.covered = false;
      check.witness = z;
      return check;
    }

    index.query(z, query_radius(rho_z, 2.0 * r), hits);
    int count = 0;
    for (std::size_t id : hits)
      if (std::abs(z - lat.points[id]) <= 2.0 * r * lat.rho_at[id]) ++count;
    check.multiplicity = std::max(check.multiplicity, count);
  }
  return check;
}

bool verify_separation(const WeightModel& w, const Lattice& lat) {
  PointIndex index(w, lat.params.r_max, lat.params.s * lat.params.r);
  for (std::size_t i = 0; i < lat.points.size(); ++i) index.insert(lat.points[i], i);
  const double sr = lat.params.s * lat.params.r;
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < lat.points.size(); ++i) {
    index.query(lat.points[i], sr * lat.rho_at[i], hits);
    for (std::size_t id : hits) {
      if (id == i) continue;
      const double sep = sr * std::min(lat.rho_at[i], lat.rho_at[id]);
      if (std::abs(lat.points[i] - lat.points[id]) < sep) return false;
    }
  }
  return true;
}

std::vector<Lattice> split_lattice(const WeightModel& w, const Lattice& lat, int k) {
  if (k < 0) throw ParameterError("split_lattice: k must be non-negative");
  const double scale = std::ldexp(1.0, k) * lat.params.r;  // 2^k r

  std::vector<std::size_t> remaining(lat.points.size());
  std::iota(remaining.begin(), remaining.end(), 0);

  std::vector<Lattice> out;
  std::vector<std::size_t> hits;
  while (!remaining.empty()) {
    Lattice sub;
    sub.params = lat.params;
    PointIndex index(w, lat.params.r_max, scale);
    std::vector<std::size_t> rest;
    for (std::size_t id : remaining) {
      const cplx c = lat.points[id];
      const double rho_c = lat.rho_at[id];
      index.query(c, scale * rho_c, hits);
      bool ok = true;
      for (std::size_t j : hits) {
        const double sep = scale * std::min(rho_c, sub.rho_at[j]);
        if (std::abs(c - sub.points[j]) < sep) {
          ok = false;
          break;
        }
      }
      if (ok) {
        index.insert(c, sub.points.size());
        sub.points.push_back(c);
        sub.rho_at.push_back(rho_c);
      } else {
        rest.push_back(id);
      }
    }
    out.push_back(std::move(sub));
    remaining = std::move(rest);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metric grid

namespace {

/// Primitive step directions up to (4,4); enough angular resolution that
/// grid geodesics overshoot straight lines by under two percent on
/// moderate-aspect cells.
const std::vector<std::pair<int, int>>& grid_moves() {
  static const std::vector<std::pair<int, int>> moves = [] {
    std::vector<std::pair<int, int>> m;
    for (int a = -4; a <= 4; ++a)
      for (int b = -4; b <= 4; ++b) {
        if (a == 0 && b == 0) continue;
        if (std::gcd(std::abs(a), std::abs(b)) != 1) continue;
        m.emplace_back(a, b);
      }
    return m;
  }();
  return moves;
}

}  // namespace

std::size_t MetricGrid::node_count() const {
  return static_cast<std::size_t>(n_r) * n_theta + 1;  // +1 center node
}

cplx MetricGrid::node_pos(std::size_t id) const {
  if (id == static_cast<std::size_t>(n_r) * n_theta) return {0.0, 0.0};
  const int i = static_cast<int>(id) / n_theta;
  const int j = static_cast<int>(id) % n_theta;
  const double r = weight.r_max * (i + 0.5) / n_r;
  const double t = kTwoPi * j / n_theta;
  return {r * std::cos(t), r * std::sin(t)};
}

std::size_t MetricGrid::nearest_node(cplx z) const {
  const double r = std::abs(z);
  if (r < 0.25 * weight.r_max / n_r) return static_cast<std::size_t>(n_r) * n_theta;
  int i = static_cast<int>(std::lround(r / weight.r_max * n_r - 0.5));
  i = std::clamp(i, 0, n_r - 1);
  int j = static_cast<int>(std::lround(wrap_angle(std::arg(z)) / kTwoPi * n_theta)) % n_theta;
  return static_cast<std::size_t>(i) * n_theta + j;
}

MetricGrid make_metric_grid(const WeightModel& w, int n_r, int n_theta) {
  if (n_r < 8 || n_theta < 8) throw ParameterError("make_metric_grid: grid too coarse");
  MetricGrid g;
  g.weight = w;
  g.n_r = n_r;
  g.n_theta = n_theta;
  return g;
}

DistanceField distances_from(const MetricGrid& grid, cplx source) {
  if (std::abs(source) > grid.weight.r_max + 1e-12)
    throw DomainError("distances_from: source outside the truncated domain");

  const std::size_t n = grid.node_count();
  const std::size_t center = static_cast<std::size_t>(grid.n_r) * grid.n_theta;
  DistanceField field;
  field.grid = &grid;
  field.source = grid.nearest_node(source);
  field.dist.assign(n, std::numeric_limits<double>::infinity());

  std::vector<cplx> pos(n);
  for (std::size_t id = 0; id < n; ++id) pos[id] = grid.node_pos(id);

  auto edge_len = [&](std::size_t a, std::size_t b) {
    const cplx mid = 0.5 * (pos[a] + pos[b]);
    return std::abs(pos[a] - pos[b]) / grid.weight.rho(mid);
  };

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  field.dist[field.source] = 0.0;
  heap.push({0.0, field.source});
  const auto& moves = grid_moves();

  while (!heap.empty()) {
    const auto [d, id] = heap.top();
    heap.pop();
    if (d > field.dist[id]) continue;

    auto relax = [&](std::size_t nb) {
      const double nd = d + edge_len(id, nb);
      if (nd < field.dist[nb]) {
        field.dist[nb] = nd;
        heap.push({nd, nb});
      }
    };

    if (id == center) {
      for (int j = 0; j < grid.n_theta; ++j) relax(static_cast<std::size_t>(j));
      continue;
    }
    const int i = static_cast<int>(id) / grid.n_theta;
    const int j = static_cast<int>(id) % grid.n_theta;
    if (i == 0) relax(center);
    for (const auto& [da, dj] : moves) {
      const int ni = i + da;
      if (ni < 0 || ni >= grid.n_r) continue;
      const int nj = ((j + dj) % grid.n_theta + grid.n_theta) % grid.n_theta;
      relax(static_cast<std::size_t>(ni) * grid.n_theta + nj);
    }
  }
  return field;
}

double DistanceField::distance_to(cplx z) const {
  if (std::abs(z) > grid->weight.r_max + 1e-12)
    throw DomainError("DistanceField: query outside the truncated domain");
  return dist[grid->nearest_node(z)];
}

double approx_distance(const MetricGrid& grid, cplx z, cplx w) {
  const DistanceField field = distances_from(grid, z);
  return field.distance_to(w);
}

}  // namespace bergman
