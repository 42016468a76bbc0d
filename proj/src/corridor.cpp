#include "sfcplan/corridor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfcplan/errors.hpp"

namespace sfcplan {
namespace {

constexpr double kDegenerate = 1e-9;

double distPointSeg2d(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                      const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < kDegenerate * kDegenerate) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

int orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
           const Eigen::Vector2d& c) {
  const double v = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool onSegment(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
               const Eigen::Vector2d& p) {
  return p.x() >= std::min(a.x(), b.x()) && p.x() <= std::max(a.x(), b.x()) &&
         p.y() >= std::min(a.y(), b.y()) && p.y() <= std::max(a.y(), b.y());
}

bool segmentsIntersect2d(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                         const Eigen::Vector2d& q1, const Eigen::Vector2d& q2) {
  const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && onSegment(p1, p2, q1)) return true;
  if (o2 == 0 && onSegment(p1, p2, q2)) return true;
  if (o3 == 0 && onSegment(q1, q2, p1)) return true;
  if (o4 == 0 && onSegment(q1, q2, p2)) return true;
  return false;
}

double distSegSeg2d(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                    const Eigen::Vector2d& q1, const Eigen::Vector2d& q2) {
  if (segmentsIntersect2d(p1, p2, q1, q2)) return 0.0;
  double d = distPointSeg2d(q1, p1, p2);
  d = std::min(d, distPointSeg2d(q2, p1, p2));
  d = std::min(d, distPointSeg2d(p1, q1, q2));
  d = std::min(d, distPointSeg2d(p2, q1, q2));
  return d;
}

// Exact xy distance from the spine segment to a voxel's footprint square.
double distSegSquare2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                       const Eigen::Vector2d& c, double half) {
  const Eigen::Vector2d c00(c.x() - half, c.y() - half);
  const Eigen::Vector2d c10(c.x() + half, c.y() - half);
  const Eigen::Vector2d c11(c.x() + half, c.y() + half);
  const Eigen::Vector2d c01(c.x() - half, c.y() + half);
  // Segment endpoint inside the square means distance zero.
  auto inside = [&](const Eigen::Vector2d& p) {
    return std::abs(p.x() - c.x()) <= half && std::abs(p.y() - c.y()) <= half;
  };
  if (inside(a) || inside(b)) return 0.0;
  double d = distSegSeg2d(a, b, c00, c10);
  d = std::min(d, distSegSeg2d(a, b, c10, c11));
  d = std::min(d, distSegSeg2d(a, b, c11, c01));
  d = std::min(d, distSegSeg2d(a, b, c01, c00));
  return d;
}

struct ScanObstacle {
  double dist;    // xy distance from spine segment to footprint square
  double lat_lo;  // footprint extent along the left normal, relative to `a`
  double lat_hi;
  double z_lo;
  double z_hi;
  Eigen::Vector3d center;  // voxel center, the lattice point soundness is judged on
};

// Occupied voxels near the segment, with precomputed lateral extents. The
// scan must cover every band the caller may consider, so the vertical range
// [z_lo, z_hi] is passed in rather than derived from the segment.
std::vector<ScanObstacle> scanObstacles(const OccupancyGrid& map,
                                        const Eigen::Vector3d& a,
                                        const Eigen::Vector3d& b,
                                        const Eigen::Vector3d& normal,
                                        double reach, double z_lo, double z_hi) {
  const double res = map.resolution();
  const double half = res / 2.0;
  const Eigen::Vector2d a2 = a.head<2>(), b2 = b.head<2>(), n2 = normal.head<2>();

  Eigen::Vector3d lo = a.cwiseMin(b) - Eigen::Vector3d(reach, reach, 0.0);
  Eigen::Vector3d hi = a.cwiseMax(b) + Eigen::Vector3d(reach, reach, 0.0);
  lo.z() = std::min(lo.z(), z_lo);
  hi.z() = std::max(hi.z(), z_hi);
  Eigen::Vector3i vlo = map.worldToVoxel(lo);
  Eigen::Vector3i vhi = map.worldToVoxel(hi);
  const auto& dims = map.dims();
  vlo = vlo.cwiseMax(Eigen::Vector3i::Zero());
  vhi = vhi.cwiseMin(dims - Eigen::Vector3i::Ones());

  std::vector<ScanObstacle> out;
  for (int z = vlo.z(); z <= vhi.z(); ++z)
    for (int y = vlo.y(); y <= vhi.y(); ++y)
      for (int x = vlo.x(); x <= vhi.x(); ++x) {
        if (!map.isOccupied(Eigen::Vector3i(x, y, z))) continue;
        const Eigen::Vector3d c = map.voxelToWorld({x, y, z});
        const double dist = distSegSquare2d(a2, b2, c.head<2>(), half);
        if (dist >= reach) continue;
        const double lat_c = n2.dot(c.head<2>() - a2);
        const double lat_pad = half * (std::abs(n2.x()) + std::abs(n2.y()));
        out.push_back({dist, lat_c - lat_pad, lat_c + lat_pad, c.z() - half,
                       c.z() + half, c});
      }
  return out;
}

struct BandWidths {
  double left, right;
};

BandWidths widthsForBand(const std::vector<ScanObstacle>& obs, double z_inf,
                         double z_sup, double cap) {
  BandWidths w{cap, cap};
  for (const auto& o : obs) {
    if (o.z_hi <= z_inf || o.z_lo >= z_sup) continue;  // no overlap with band
    if (o.lat_hi > 0.0) w.left = std::min(w.left, o.dist);
    if (o.lat_lo < 0.0) w.right = std::min(w.right, o.dist);
  }
  return w;
}

}  // namespace

bool SubCorridor::contains(const Eigen::Vector3d& p) const {
  if (!(p.z() > z_inf && p.z() < z_sup)) return false;
  const double dist = distPointSeg2d(p.head<2>(), a.head<2>(), b.head<2>());
  const double side = normal.head<2>().dot((p - b).head<2>());
  return dist < (side >= 0.0 ? width_left : width_right);
}

Eigen::Vector3d segmentNormal(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector2d d = (b - a).head<2>();
  const double len = d.norm();
  if (len <= kDegenerate)
    throw DegenerateSegmentError("segment has no horizontal extent");
  return Eigen::Vector3d(-d.y() / len, d.x() / len, 0.0);
}

std::optional<SubCorridor> buildSubCorridor(const OccupancyGrid& map,
                                            const Eigen::Vector3d& a,
                                            const Eigen::Vector3d& b,
                                            const Eigen::Vector3d& normal,
                                            const CorridorConfig& cfg) {
  const double reach = cfg.width_cap + map.resolution();
  const auto obstacles =
      scanObstacles(map, a, b, normal, reach, cfg.z_min, cfg.z_max);

  const double seg_lo = std::min(a.z(), b.z());
  const double seg_hi = std::max(a.z(), b.z());

  SubCorridor best;
  double best_score = -1.0;
  auto consider = [&](double z_inf, double z_sup) {
    if (!(z_inf < seg_lo && z_sup > seg_hi)) return;
    const BandWidths w = widthsForBand(obstacles, z_inf, z_sup, cfg.width_cap);
    if (!(w.left > 0.0 && w.right > 0.0)) return;  // touching obstacle: invalid
    const double score = (z_sup - z_inf) * (w.left + w.right);
    if (score > best_score) {
      best_score = score;
      best.width_left = w.left;
      best.width_right = w.right;
      best.z_inf = z_inf;
      best.z_sup = z_sup;
    }
  };
  for (double h : cfg.band_heights)
    for (double z0 = cfg.z_min; z0 + h <= cfg.z_max + 1e-9; z0 += cfg.band_step)
      consider(z0, std::min(z0 + h, cfg.z_max));
  consider(cfg.z_min, cfg.z_max);

  if (best_score < 0.0) return std::nullopt;
  best.a = a;
  best.b = b;
  best.normal = normal;
  return best;
}

SafeFlightCorridor SafeFlightCorridor::build(const OccupancyGrid& map,
                                             const ReferencePolyline& poly,
                                             const CorridorConfig& cfg) {
  SafeFlightCorridor sfc;
  sfc.poly_ = poly;
  Eigen::Vector3d prev_normal(0.0, 1.0, 0.0);
  for (int i = 0; i < poly.numSegments(); ++i) {
    const Eigen::Vector3d& a = poly.vertex(i);
    const Eigen::Vector3d& b = poly.vertex(i + 1);
    Eigen::Vector3d n;
    try {
      n = segmentNormal(a, b);
    } catch (const DegenerateSegmentError&) {
      n = prev_normal;  // vertical hop keeps the previous heading's normal
    }
    prev_normal = n;

    auto sub = buildSubCorridor(map, a, b, n, cfg);
    if (!sub) {
      // Degraded mode: hug the segment with a band just covering its own
      // z-extent and whatever lateral room the scan reports there.
      SubCorridor fb;
      fb.a = a;
      fb.b = b;
      fb.normal = n;
      fb.z_inf = std::min(a.z(), b.z()) - map.resolution() / 2.0;
      fb.z_sup = std::max(a.z(), b.z()) + map.resolution() / 2.0;
      const auto obstacles = scanObstacles(map, a, b, n,
                                           cfg.width_cap + map.resolution(),
                                           fb.z_inf, fb.z_sup);
      const BandWidths w = widthsForBand(obstacles, fb.z_inf, fb.z_sup, cfg.width_cap);
      fb.width_left = std::max(w.left, 1e-3);
      fb.width_right = std::max(w.right, 1e-3);
      fb.fallback = true;
      // The width floor keeps the piece usable when an obstacle face merely
      // touches the spine, but it must never swallow occupied space. A voxel
      // center inside the floored capsule means the segment dives through a
      // column that is blocked within the band (a 3D-collision-free shortcut
      // can still do this), and then no free corridor around this segment
      // exists at any positive width.
      for (const auto& o : obstacles)
        if (fb.contains(o.center))
          throw CorridorError("segment admits no obstacle-free corridor");
      sfc.subs_.push_back(fb);
      continue;
    }
    sfc.subs_.push_back(*sub);
  }
  return sfc;
}

std::optional<int> SafeFlightCorridor::locate(const Eigen::Vector3d& p) const {
  for (int i = size() - 1; i >= 0; --i)
    if (subs_[i].contains(p)) return i;
  return std::nullopt;
}

std::vector<double> SafeFlightCorridor::flatten() const {
  std::vector<double> out;
  out.reserve(2 * poly_.numVertices() + 4 * size());
  for (int i = 0; i < poly_.numVertices(); ++i) {
    out.push_back(poly_.vertex(i).x());
    out.push_back(poly_.vertex(i).y());
  }
  for (const auto& s : subs_) {
    out.push_back(s.width_left);
    out.push_back(s.width_right);
    out.push_back(s.z_sup);
    out.push_back(s.z_inf);
  }
  return out;
}

std::vector<double> SafeFlightCorridor::observationWindow(
    int first, int horizon, const Eigen::Vector3d& ego) const {
  std::vector<double> out;
  out.reserve(6 * horizon + 2);
  const int last_vertex = poly_.numVertices() - 1;
  for (int j = 0; j <= horizon; ++j) {
    const int v = std::min(first + j, last_vertex);
    out.push_back(poly_.vertex(v).x() - ego.x());
    out.push_back(poly_.vertex(v).y() - ego.y());
  }
  const int last_sub = size() - 1;
  for (int j = 0; j < horizon; ++j) {
    const auto& s = subs_[std::min(first + j, last_sub)];
    out.push_back(s.width_left);
    out.push_back(s.width_right);
    out.push_back(s.z_sup - ego.z());
    out.push_back(s.z_inf - ego.z());
  }
  return out;
}

}  // namespace sfcplan
