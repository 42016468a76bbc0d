#include "sfcplan/polyline.hpp"

#include <cmath>
#include <limits>

namespace sfcplan {

ReferencePolyline::ReferencePolyline(std::vector<Eigen::Vector3d> vertices)
    : vertices_(std::move(vertices)) {
  const int s = numSegments();
  len3d_.resize(s);
  len2d_.resize(s);
  for (int i = 0; i < s; ++i) {
    const Eigen::Vector3d d = vertices_[i + 1] - vertices_[i];
    len3d_[i] = d.norm();
    len2d_[i] = d.head<2>().norm();
  }
}

double ReferencePolyline::totalLength3d() const {
  double s = 0;
  for (double l : len3d_) s += l;
  return s;
}

void traverseSegmentVoxels(const OccupancyGrid& map, const Eigen::Vector3d& a,
                           const Eigen::Vector3d& b,
                           const std::function<bool(const Eigen::Vector3i&)>& visit) {
  const double res = map.resolution();
  Eigen::Vector3i cur = map.worldToVoxel(a);
  const Eigen::Vector3i end = map.worldToVoxel(b);
  if (!visit(cur)) return;
  if (cur == end) return;

  const Eigen::Vector3d d = b - a;
  Eigen::Vector3i step;
  Eigen::Vector3d tMax, tDelta;
  for (int i = 0; i < 3; ++i) {
    if (d[i] > 0) {
      step[i] = 1;
      const double boundary = map.origin()[i] + (cur[i] + 1) * res;
      tMax[i] = (boundary - a[i]) / d[i];
      tDelta[i] = res / d[i];
    } else if (d[i] < 0) {
      step[i] = -1;
      const double boundary = map.origin()[i] + cur[i] * res;
      tMax[i] = (boundary - a[i]) / d[i];
      tDelta[i] = -res / d[i];
    } else {
      step[i] = 0;
      tMax[i] = std::numeric_limits<double>::infinity();
      tDelta[i] = std::numeric_limits<double>::infinity();
    }
  }

  const long maxSteps = (end - cur).cwiseAbs().sum() * 3 + 16;
  for (long n = 0; n < maxSteps && cur != end; ++n) {
    const double tMin = tMax.minCoeff();
    if (tMin > 1.0 + 1e-12) break;  // numeric drift; finish at the end voxel
    // Step every axis whose boundary is hit at tMin, within a tolerance that
    // absorbs rounding in the center coordinates. Grazing an edge or corner
    // then moves diagonally instead of visiting the voxels that share only
    // that corner with the segment; the tolerance covers slivers shorter
    // than a nanometer of any real crossing, which no map resolves.
    for (int i = 0; i < 3; ++i) {
      if (tMax[i] <= tMin + 1e-9) {
        cur[i] += step[i];
        tMax[i] += tDelta[i];
      }
    }
    if (!visit(cur)) return;
  }
  if (cur != end) visit(end);
}

bool segmentCollision(const OccupancyGrid& map, const Eigen::Vector3d& a,
                      const Eigen::Vector3d& b) {
  bool hit = false;
  traverseSegmentVoxels(map, a, b, [&](const Eigen::Vector3i& v) {
    if (map.isOccupied(v)) {
      hit = true;
      return false;
    }
    return true;
  });
  return hit;
}

bool swathCollision(const OccupancyGrid& map, const Eigen::Vector3d& a,
                    const Eigen::Vector3d& b) {
  // Vertical slab a minimum-width corridor around a->b would occupy: half a
  // voxel beyond the segment's own z-range. Any voxel whose center lies
  // inside the slab and whose column the xy projection crosses would sit
  // inside that corridor, so all of them have to be free.
  const double res = map.resolution();
  const double z_lo = std::min(a.z(), b.z()) - 0.5 * res;
  const double z_hi = std::max(a.z(), b.z()) + 0.5 * res;
  const double oz = map.origin().z();
  // Layers whose centers fall inside (z_lo, z_hi); the slack keeps a center
  // sitting exactly on a slab face counted as inside.
  const int l_lo = static_cast<int>(std::ceil((z_lo - oz) / res - 0.5 - 1e-9));
  const int l_hi = static_cast<int>(std::floor((z_hi - oz) / res - 0.5 + 1e-9));

  // Walk the xy projection by flattening the segment onto one layer, so the
  // column selection shares the exact face-crossing tolerance of the 3D walk.
  const double z_flat = oz + 0.5 * res;
  const Eigen::Vector3d af(a.x(), a.y(), z_flat);
  const Eigen::Vector3d bf(b.x(), b.y(), z_flat);
  bool hit = false;
  traverseSegmentVoxels(map, af, bf, [&](const Eigen::Vector3i& v) {
    for (int l = l_lo; l <= l_hi; ++l) {
      if (map.isOccupied(Eigen::Vector3i(v.x(), v.y(), l))) {
        hit = true;
        return false;
      }
    }
    return true;
  });
  return hit;
}

ReferencePolyline simplifyPolyline(const OccupancyGrid& map, const VoxelPath& path) {
  const auto& wp = path.waypoints;
  std::vector<Eigen::Vector3d> keep;
  if (wp.empty()) return ReferencePolyline(keep);
  keep.push_back(wp.front());
  const int n = static_cast<int>(wp.size());
  int start = 0;
  for (int i = 1; i < n; ++i) {
    // Probe with the swath test, not the plain segment test: a shortcut is
    // only worth taking if a corridor can actually be built around it.
    if (swathCollision(map, wp[start], wp[i])) {
      // First blocked probe: the waypoint before it becomes a vertex and the
      // new local start. The probe from there to wp[i] is between adjacent
      // path voxels, whose swath the search already kept free.
      keep.push_back(wp[i - 1]);
      start = i - 1;
    }
  }
  if (n > 1) keep.push_back(wp[n - 1]);
  return ReferencePolyline(std::move(keep));
}

ReferencePolyline splitLongSegments(const ReferencePolyline& poly, double max_len) {
  std::vector<Eigen::Vector3d> out;
  if (poly.numVertices() == 0) return ReferencePolyline(out);
  out.push_back(poly.vertex(0));
  for (int i = 0; i < poly.numSegments(); ++i) {
    const Eigen::Vector3d& a = poly.vertex(i);
    const Eigen::Vector3d& b = poly.vertex(i + 1);
    const double len = poly.segmentLength3d(i);
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / max_len - 1e-12)));
    for (int k = 1; k <= pieces; ++k)
      out.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
  }
  return ReferencePolyline(std::move(out));
}

}  // namespace sfcplan
