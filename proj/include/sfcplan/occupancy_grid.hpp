#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace sfcplan {

// Axis-aligned voxel grid with binary occupancy. World coordinates map to
// voxels by flooring against the origin; queries outside the stored volume
// report occupied so that everything beyond the map acts as a wall.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(const Eigen::Vector3d& origin, double resolution,
                const Eigen::Vector3i& dims);

  const Eigen::Vector3d& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const Eigen::Vector3i& dims() const { return dims_; }
  std::size_t numCells() const { return cells_.size(); }

  bool inBounds(const Eigen::Vector3i& v) const {
    return v.x() >= 0 && v.y() >= 0 && v.z() >= 0 && v.x() < dims_.x() &&
           v.y() < dims_.y() && v.z() < dims_.z();
  }

  // Flattened cell index, x fastest.
  std::size_t index(const Eigen::Vector3i& v) const {
    return static_cast<std::size_t>(v.x()) +
           static_cast<std::size_t>(dims_.x()) *
               (static_cast<std::size_t>(v.y()) +
                static_cast<std::size_t>(dims_.y()) *
                    static_cast<std::size_t>(v.z()));
  }

  Eigen::Vector3i worldToVoxel(const Eigen::Vector3d& p) const;
  // Center of the voxel.
  Eigen::Vector3d voxelToWorld(const Eigen::Vector3i& v) const;

  bool isOccupied(const Eigen::Vector3i& v) const {
    if (!inBounds(v)) return true;
    return cells_[index(v)] != 0;
  }
  bool isOccupied(const Eigen::Vector3d& p) const {
    return isOccupied(worldToVoxel(p));
  }

  void setOccupied(const Eigen::Vector3i& v, bool occ = true);
  void fill(bool occ);

  // Chebyshev dilation: a voxel becomes occupied if any voxel within
  // `voxels` steps along each axis (26-neighborhood for 1) is occupied.
  OccupancyGrid inflated(int voxels) const;

  std::size_t occupiedCount() const;

  const std::vector<std::uint8_t>& cells() const { return cells_; }
  std::vector<std::uint8_t>& cells() { return cells_; }

 private:
  Eigen::Vector3d origin_{0, 0, 0};
  double resolution_ = 0.1;
  Eigen::Vector3i dims_{0, 0, 0};
  std::vector<std::uint8_t> cells_;
};

}  // namespace sfcplan
