#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sfcplan/astar.hpp"
#include "sfcplan/occupancy_grid.hpp"

namespace sfcplan {

// Piecewise-linear reference path with cached segment lengths.
class ReferencePolyline {
 public:
  ReferencePolyline() = default;
  explicit ReferencePolyline(std::vector<Eigen::Vector3d> vertices);

  int numVertices() const { return static_cast<int>(vertices_.size()); }
  int numSegments() const { return std::max(0, numVertices() - 1); }
  const Eigen::Vector3d& vertex(int i) const { return vertices_.at(i); }
  const std::vector<Eigen::Vector3d>& vertices() const { return vertices_; }

  double segmentLength3d(int i) const { return len3d_.at(i); }
  double segmentLength2d(int i) const { return len2d_.at(i); }
  double totalLength3d() const;

 private:
  std::vector<Eigen::Vector3d> vertices_;
  std::vector<double> len3d_;
  std::vector<double> len2d_;
};

// Visits every voxel the segment a->b passes through, in order, stepping
// across faces exactly (simultaneous steps on boundary ties, so grazing a
// corner does not drag in the voxels diagonally adjacent to it).
void traverseSegmentVoxels(const OccupancyGrid& map, const Eigen::Vector3d& a,
                           const Eigen::Vector3d& b,
                           const std::function<bool(const Eigen::Vector3i&)>& visit);

// True iff the straight segment a->b passes through any occupied voxel.
// Leaving the stored volume counts as occupied.
bool segmentCollision(const OccupancyGrid& map, const Eigen::Vector3d& a,
                      const Eigen::Vector3d& b);

// True iff any voxel is occupied in the swath of a->b: the columns the xy
// projection of the segment crosses, over every layer whose center lies
// within half a voxel of the segment's z-range. A swath-free segment admits
// a corridor of positive width around itself; a merely collision-free one
// may not, because it can pass under or over blocked columns. Swath-free
// implies collision-free.
bool swathCollision(const OccupancyGrid& map, const Eigen::Vector3d& a,
                    const Eigen::Vector3d& b);

// Greedy shortcutting of a voxel path. Walking the waypoints once, probe the
// straight segment from the current local start to each waypoint in turn; when
// a probe first fails the swath test, the waypoint before it is kept as a
// vertex and becomes the new local start. First and last waypoints are always
// kept. On paths whose single steps are themselves swath-free (the search
// guarantees this), every output segment leaves room for a corridor.
ReferencePolyline simplifyPolyline(const OccupancyGrid& map, const VoxelPath& path);

// Splits every segment longer than max_len into equal collinear pieces.
ReferencePolyline splitLongSegments(const ReferencePolyline& poly, double max_len);

}  // namespace sfcplan
