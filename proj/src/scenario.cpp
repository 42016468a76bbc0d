#include "sfcplan/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "sfcplan/astar.hpp"
#include "sfcplan/corridor.hpp"
#include "sfcplan/errors.hpp"
#include "sfcplan/polyline.hpp"
#include "sfcplan/rng.hpp"

namespace sfcplan {
namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

void carveWindow(OccupancyGrid& grid, int jy, double cx, double cz, double w,
                 double h) {
  const auto& dims = grid.dims();
  for (int z = 0; z < dims.z(); ++z)
    for (int x = 0; x < dims.x(); ++x) {
      const Eigen::Vector3d c = grid.voxelToWorld({x, jy, z});
      if (std::abs(c.x() - cx) <= w / 2 && std::abs(c.z() - cz) <= h / 2)
        grid.setOccupied({x, jy, z}, false);
    }
}

void buildWalls(OccupancyGrid& grid, const ScenarioSpec& spec,
                const Eigen::Vector3d& start, const Eigen::Vector3d& goal,
                std::mt19937_64& rng, std::vector<double>& wall_y) {
  const double lo = start.y() + spec.clear_zone;
  const double hi = goal.y() - spec.clear_zone;
  wall_y.clear();
  double y = lo;
  while (true) {
    const double f = std::clamp((y - lo) / std::max(hi - lo, 1e-9), 0.0, 1.0);
    const double spacing = spec.spacing_near + (spec.spacing_far - spec.spacing_near) * f;
    y += spacing;
    if (y > hi) break;
    wall_y.push_back(y);
  }

  const auto& dims = grid.dims();
  for (double wy : wall_y) {
    const int jy = grid.worldToVoxel(Eigen::Vector3d(0, wy, 0)).y();
    if (jy < 0 || jy >= dims.y()) continue;
    for (int z = 0; z < dims.z(); ++z)
      for (int x = 0; x < dims.x(); ++x) grid.setOccupied({x, jy, z}, true);

    const int gaps = std::uniform_int_distribution<int>(1, spec.max_gaps)(rng);
    const double band_lo = std::max(spec.flight_z_min, grid.origin().z());
    const double band_hi = std::min(spec.flight_z_max, spec.extent_max.z());
    for (int g = 0; g < gaps; ++g) {
      const double w = uniform(rng, spec.gap_min, spec.gap_max);
      double h = uniform(rng, spec.gap_min, spec.gap_max);
      h = std::min(h, band_hi - band_lo);
      const double cx = uniform(rng, spec.extent_min.x() + w / 2 + 0.5,
                                spec.extent_max.x() - w / 2 - 0.5);
      const double cz = uniform(rng, band_lo + h / 2, band_hi - h / 2);
      carveWindow(grid, jy, cx, cz, w, h);
    }
  }
}

void stampColumn(OccupancyGrid& grid, double cx, double cy, double r_in,
                 double r_out) {
  const double res = grid.resolution();
  const auto lo = grid.worldToVoxel(Eigen::Vector3d(cx - r_out - res, cy - r_out - res, 0));
  const auto hi = grid.worldToVoxel(Eigen::Vector3d(cx + r_out + res, cy + r_out + res, 0));
  const auto& dims = grid.dims();
  for (int y = std::max(0, lo.y()); y <= std::min(dims.y() - 1, hi.y()); ++y)
    for (int x = std::max(0, lo.x()); x <= std::min(dims.x() - 1, hi.x()); ++x) {
      const Eigen::Vector3d c = grid.voxelToWorld({x, y, 0});
      const double d = std::hypot(c.x() - cx, c.y() - cy);
      if (d < r_in || d > r_out) continue;
      for (int z = 0; z < dims.z(); ++z) grid.setOccupied({x, y, z}, true);
    }
}

int buildForest(OccupancyGrid& grid, const ScenarioSpec& spec,
                const Eigen::Vector3d& start, const Eigen::Vector3d& goal,
                std::mt19937_64& rng) {
  int placed = 0;
  for (int k = 0; k < spec.obstacle_count; ++k) {
    for (int tries = 0; tries < 256; ++tries) {
      const bool ring = uniform(rng, 0.0, 1.0) < 0.5;
      double r_in = 0.0, r_out;
      if (ring) {
        r_in = uniform(rng, spec.ring_r_min, spec.ring_r_max);
        r_out = r_in + uniform(rng, spec.ring_thickness_min, spec.ring_thickness_max);
      } else {
        r_out = uniform(rng, spec.cylinder_r_min, spec.cylinder_r_max);
      }
      const double cx = uniform(rng, spec.extent_min.x() + 0.3, spec.extent_max.x() - 0.3);
      const double cy = uniform(rng, spec.extent_min.y() + 0.3, spec.extent_max.y() - 0.3);
      const double ds = std::hypot(cx - start.x(), cy - start.y());
      const double dg = std::hypot(cx - goal.x(), cy - goal.y());
      if (ds < spec.clearance + r_out || dg < spec.clearance + r_out) continue;
      stampColumn(grid, cx, cy, r_in, r_out);
      ++placed;
      break;
    }
  }
  return placed;
}

}  // namespace

ScenarioSpec ScenarioSpec::curriculumWalls(std::uint64_t seed) {
  ScenarioSpec s;
  s.kind = ScenarioKind::Walls;
  s.spacing_near = 4.5;
  s.spacing_far = 2.75;
  s.seed = seed;
  return s;
}

ScenarioSpec ScenarioSpec::sparseWalls(std::uint64_t seed) {
  ScenarioSpec s;
  s.kind = ScenarioKind::Walls;
  s.spacing_near = 5.0;
  s.spacing_far = 3.5;
  s.seed = seed;
  return s;
}

ScenarioSpec ScenarioSpec::denseWalls(std::uint64_t seed) {
  ScenarioSpec s;
  s.kind = ScenarioKind::Walls;
  s.spacing_near = 4.0;
  s.spacing_far = 2.0;
  s.seed = seed;
  return s;
}

ScenarioSpec ScenarioSpec::forest(std::uint64_t seed) {
  ScenarioSpec s;
  s.kind = ScenarioKind::Forest;
  s.obstacle_count = 200;
  s.seed = seed;
  return s;
}

Scenario generateScenario(const ScenarioSpec& spec) {
  const Eigen::Vector3d span = spec.extent_max - spec.extent_min;
  Eigen::Vector3i dims;
  for (int i = 0; i < 3; ++i)
    dims[i] = std::max(1, static_cast<int>(std::ceil(span[i] / spec.resolution - 1e-9)));

  const double cx = 0.5 * (spec.extent_min.x() + spec.extent_max.x());
  Scenario out;
  out.start = {cx, spec.extent_min.y() + spec.endpoint_inset, spec.start_z};
  out.goal = {cx, spec.extent_max.y() - spec.endpoint_inset, spec.start_z};

  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    const std::uint64_t seed = mixSeed(spec.seed, static_cast<std::uint64_t>(attempt));
    std::mt19937_64 rng(seed);
    auto grid = std::make_shared<OccupancyGrid>(spec.extent_min, spec.resolution, dims);

    out.wall_y.clear();
    out.obstacles_placed = 0;
    if (spec.kind == ScenarioKind::Walls)
      buildWalls(*grid, spec, out.start, out.goal, rng, out.wall_y);
    else
      out.obstacles_placed = buildForest(*grid, spec, out.start, out.goal, rng);

    AstarOptions opts;
    opts.z_min = spec.flight_z_min;
    opts.z_max = spec.flight_z_max;
    try {
      // Mirror the planner's full pipeline, not just the search: a reachable
      // course whose path admits no corridor is as unusable as a blocked one.
      const OccupancyGrid inflated = grid->inflated(spec.check_inflation);
      VoxelPath path = astar3d(inflated, out.start, out.goal, opts);
      path.waypoints.front() = out.start;
      path.waypoints.back() = out.goal;
      if (path.waypoints.size() == 1) path.waypoints.push_back(out.goal);
      ReferencePolyline poly = simplifyPolyline(inflated, path);
      poly = splitLongSegments(poly, spec.max_segment_len);
      CorridorConfig ccfg;
      ccfg.z_min = spec.flight_z_min;
      ccfg.z_max = spec.flight_z_max;
      SafeFlightCorridor::build(inflated, poly, ccfg);
    } catch (const PlanningError&) {
      continue;  // blocked or corridor-hostile course, roll a new one
    }
    out.grid = std::move(grid);
    out.seed_used = seed;
    out.attempts = attempt + 1;
    return out;
  }
  throw ScenarioError("no traversable course after retry budget");
}

}  // namespace sfcplan
