#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "sfcplan/occupancy_grid.hpp"

namespace sfcplan {

struct VoxelPath {
  std::vector<Eigen::Vector3d> waypoints;  // voxel centers, start to goal
  double cost = 0.0;                       // metric length of the voxel path
  // Same length in exact arithmetic: sum of ceil(sqrt(k)*1e6) per step over
  // k moved axes, in voxel units. Lets tests compare optimality exactly.
  std::int64_t scaled_cost = 0;
};

struct AstarOptions {
  // Traversable voxels must have their center z inside this band; endpoints
  // outside it are rejected. Defaults leave the band unrestricted.
  double z_min = -std::numeric_limits<double>::infinity();
  double z_max = std::numeric_limits<double>::infinity();
};

// 26-connected A* over free voxels with Euclidean step costs and a Euclidean
// heuristic. Moves that change layer while also moving sideways additionally
// require the two corner voxels they cut past (sideways at the old layer,
// straight up or down at the old column) to be free; a path may only slip
// under or over an obstacle where a corridor of positive width fits around
// it, which the later corridor stage depends on. Step weights are carried as
// scaled integers internally (ceil(sqrt(k) * 1e6) per axis count k) so that
// path costs compare exactly and the expansion order is fully deterministic:
// ties on f break on lower h, then on lexicographic (x, y, z). Throws
// InvalidEndpointError if an endpoint voxel is blocked or out of band,
// NoPathError if the goal is unreachable.
VoxelPath astar3d(const OccupancyGrid& map, const Eigen::Vector3d& start,
                  const Eigen::Vector3d& goal, const AstarOptions& opts = {});

}  // namespace sfcplan
