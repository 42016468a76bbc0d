#include "sfcplan/astar.hpp"

#include <cmath>
#include <cstdint>
#include <queue>

#include "sfcplan/errors.hpp"

namespace sfcplan {
namespace {

// Integer step weights: ceil(sqrt(k) * 1e6) for k moved axes. Keeping the
// weights integral makes equal-cost paths compare exactly equal, and the
// ceil keeps the Euclidean heuristic admissible.
constexpr std::int64_t kScale = 1000000;
constexpr std::int64_t kStepWeight[4] = {0, 1000000, 1414214, 1732051};

struct Neighbor {
  int dx, dy, dz;
  std::int64_t w;
};

std::vector<Neighbor> buildNeighbors() {
  std::vector<Neighbor> out;
  out.reserve(26);
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int k = std::abs(dx) + std::abs(dy) + std::abs(dz);
        if (k == 0) continue;
        out.push_back({dx, dy, dz, kStepWeight[k]});
      }
  return out;
}

struct OpenNode {
  std::int64_t f;
  std::int64_t h;
  std::int64_t lex;
  std::int32_t idx;
};

struct OpenNodeOrder {
  bool operator()(const OpenNode& a, const OpenNode& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    return a.lex > b.lex;
  }
};

}  // namespace

VoxelPath astar3d(const OccupancyGrid& map, const Eigen::Vector3d& start,
                  const Eigen::Vector3d& goal, const AstarOptions& opts) {
  const Eigen::Vector3i sv = map.worldToVoxel(start);
  const Eigen::Vector3i gv = map.worldToVoxel(goal);
  auto traversable = [&](const Eigen::Vector3i& v) {
    if (map.isOccupied(v)) return false;
    const double zc = map.voxelToWorld(v).z();
    return zc >= opts.z_min && zc <= opts.z_max;
  };
  if (!map.inBounds(sv) || !traversable(sv))
    throw InvalidEndpointError("start voxel blocked or outside height band");
  if (!map.inBounds(gv) || !traversable(gv))
    throw InvalidEndpointError("goal voxel blocked or outside height band");

  const auto& dims = map.dims();
  const std::size_t ncells = map.numCells();
  auto flat = [&](const Eigen::Vector3i& v) {
    return static_cast<std::int32_t>(map.index(v));
  };
  auto unflat = [&](std::int32_t i) {
    const int x = i % dims.x();
    const int y = (i / dims.x()) % dims.y();
    const int z = i / (dims.x() * dims.y());
    return Eigen::Vector3i(x, y, z);
  };
  auto lexKey = [&](const Eigen::Vector3i& v) {
    return (static_cast<std::int64_t>(v.x()) * dims.y() + v.y()) * dims.z() + v.z();
  };
  auto heuristic = [&](const Eigen::Vector3i& v) {
    const double d = (v - gv).cast<double>().norm();
    return static_cast<std::int64_t>(std::floor(d * kScale));
  };

  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> g(ncells, kInf);
  std::vector<std::int32_t> parent(ncells, -1);
  std::vector<std::uint8_t> closed(ncells, 0);
  static const std::vector<Neighbor> neighbors = buildNeighbors();

  std::priority_queue<OpenNode, std::vector<OpenNode>, OpenNodeOrder> open;
  const std::int32_t sidx = flat(sv), gidx = flat(gv);
  g[sidx] = 0;
  open.push({heuristic(sv), heuristic(sv), lexKey(sv), sidx});

  bool found = (sidx == gidx);
  while (!found && !open.empty()) {
    const OpenNode top = open.top();
    open.pop();
    if (closed[top.idx]) continue;
    closed[top.idx] = 1;
    if (top.idx == gidx) {
      found = true;
      break;
    }
    const Eigen::Vector3i v = unflat(top.idx);
    for (const auto& nb : neighbors) {
      const Eigen::Vector3i u(v.x() + nb.dx, v.y() + nb.dy, v.z() + nb.dz);
      if (!map.inBounds(u) || !traversable(u)) continue;
      // A layer change combined with sideways motion cuts past two corner
      // voxels. Block the move when either is occupied: the step itself
      // would be collision-free, but it would dive under or climb over a
      // blocked column, where no corridor of positive width exists.
      if (nb.dz != 0 && (nb.dx != 0 || nb.dy != 0)) {
        if (map.isOccupied(Eigen::Vector3i(u.x(), u.y(), v.z())) ||
            map.isOccupied(Eigen::Vector3i(v.x(), v.y(), u.z())))
          continue;
      }
      const std::int32_t uidx = flat(u);
      if (closed[uidx]) continue;
      const std::int64_t cand = g[top.idx] + nb.w;
      if (cand < g[uidx]) {
        g[uidx] = cand;
        parent[uidx] = top.idx;
        const std::int64_t h = heuristic(u);
        open.push({cand + h, h, lexKey(u), uidx});
      }
    }
  }
  if (!found) throw NoPathError("no voxel path between start and goal");

  std::vector<Eigen::Vector3i> chain;
  for (std::int32_t i = gidx; i != -1; i = parent[i]) chain.push_back(unflat(i));
  std::reverse(chain.begin(), chain.end());

  VoxelPath path;
  path.waypoints.reserve(chain.size());
  long stepCount[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < chain.size(); ++i) {
    path.waypoints.push_back(map.voxelToWorld(chain[i]));
    if (i > 0) {
      const Eigen::Vector3i d = chain[i] - chain[i - 1];
      ++stepCount[std::abs(d.x()) + std::abs(d.y()) + std::abs(d.z())];
    }
  }
  path.cost = map.resolution() * (static_cast<double>(stepCount[1]) +
                                  std::sqrt(2.0) * static_cast<double>(stepCount[2]) +
                                  std::sqrt(3.0) * static_cast<double>(stepCount[3]));
  path.scaled_cost = g[gidx];
  return path;
}

}  // namespace sfcplan
