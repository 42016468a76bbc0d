#include "sfcplan/occupancy_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace sfcplan {

OccupancyGrid::OccupancyGrid(const Eigen::Vector3d& origin, double resolution,
                             const Eigen::Vector3i& dims)
    : origin_(origin), resolution_(resolution), dims_(dims) {
  if (resolution <= 0.0) throw std::invalid_argument("grid resolution must be positive");
  if ((dims.array() < 0).any()) throw std::invalid_argument("grid dims must be non-negative");
  cells_.assign(static_cast<std::size_t>(dims.x()) * dims.y() * dims.z(), 0);
}

Eigen::Vector3i OccupancyGrid::worldToVoxel(const Eigen::Vector3d& p) const {
  Eigen::Vector3i v;
  for (int i = 0; i < 3; ++i)
    v[i] = static_cast<int>(std::floor((p[i] - origin_[i]) / resolution_));
  return v;
}

Eigen::Vector3d OccupancyGrid::voxelToWorld(const Eigen::Vector3i& v) const {
  return origin_ + resolution_ * (v.cast<double>() + Eigen::Vector3d::Constant(0.5));
}

void OccupancyGrid::setOccupied(const Eigen::Vector3i& v, bool occ) {
  if (!inBounds(v)) throw std::out_of_range("setOccupied outside grid");
  cells_[index(v)] = occ ? 1 : 0;
}

void OccupancyGrid::fill(bool occ) {
  std::fill(cells_.begin(), cells_.end(), occ ? 1 : 0);
}

OccupancyGrid OccupancyGrid::inflated(int voxels) const {
  if (voxels <= 0) return *this;
  OccupancyGrid out(origin_, resolution_, dims_);
  for (int z = 0; z < dims_.z(); ++z)
    for (int y = 0; y < dims_.y(); ++y)
      for (int x = 0; x < dims_.x(); ++x) {
        if (cells_[index({x, y, z})] == 0) continue;
        const int x0 = std::max(0, x - voxels), x1 = std::min(dims_.x() - 1, x + voxels);
        const int y0 = std::max(0, y - voxels), y1 = std::min(dims_.y() - 1, y + voxels);
        const int z0 = std::max(0, z - voxels), z1 = std::min(dims_.z() - 1, z + voxels);
        for (int zz = z0; zz <= z1; ++zz)
          for (int yy = y0; yy <= y1; ++yy)
            for (int xx = x0; xx <= x1; ++xx) out.cells_[index({xx, yy, zz})] = 1;
      }
  return out;
}

std::size_t OccupancyGrid::occupiedCount() const {
  std::size_t n = 0;
  for (auto c : cells_) n += (c != 0);
  return n;
}

}  // namespace sfcplan
