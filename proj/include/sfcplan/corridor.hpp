#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sfcplan/occupancy_grid.hpp"
#include "sfcplan/polyline.hpp"

namespace sfcplan {

struct CorridorConfig {
  // Height band available for flight and the candidate sub-band heights that
  // are slid across it when picking each segment's vertical extent.
  double z_min = 0.2;
  double z_max = 3.0;
  std::vector<double> band_heights{1.0, 1.5, 2.0};
  double band_step = 0.25;
  // Lateral widths are capped here; beyond it free space brings no benefit.
  double width_cap = 4.0;
};

// One piece of the corridor around the spine segment a->b. Membership is a
// horizontal capsule: the xy distance to the segment must stay strictly
// below width_left on the left of the spine (side taken against the b
// vertex, the dividing plane itself counting as left) or width_right on the
// right, with z strictly inside (z_inf, z_sup). Segments with no horizontal
// extent degrade to a disk cross-section around a.
struct SubCorridor {
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitY();  // horizontal, unit
  double width_left = 0.0;
  double width_right = 0.0;
  double z_inf = 0.0;
  double z_sup = 0.0;
  bool fallback = false;

  bool contains(const Eigen::Vector3d& p) const;
  double length3d() const { return (b - a).norm(); }
};

// Horizontal unit left normal of the segment direction (90 degrees counter-
// clockwise in the xy plane). Throws DegenerateSegmentError if the segment
// has no horizontal extent.
Eigen::Vector3d segmentNormal(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

// Largest-width box around one spine segment. Lateral clearances are exact
// distances from the segment to the occupied voxel footprints whose vertical
// extent overlaps the band (for an axis-aligned obstacle this equals the
// center distance minus half a voxel). The band is chosen among the sliding
// candidates plus the full flight band, maximized by
// (z_sup - z_inf) * (width_left + width_right); candidates must strictly
// contain the segment's own z-extent and keep both widths positive. Returns
// nullopt when no candidate qualifies.
std::optional<SubCorridor> buildSubCorridor(const OccupancyGrid& map,
                                            const Eigen::Vector3d& a,
                                            const Eigen::Vector3d& b,
                                            const Eigen::Vector3d& normal,
                                            const CorridorConfig& cfg);

// Sequence of sub-corridors along a reference polyline, one per segment.
class SafeFlightCorridor {
 public:
  static SafeFlightCorridor build(const OccupancyGrid& map,
                                  const ReferencePolyline& poly,
                                  const CorridorConfig& cfg);

  int size() const { return static_cast<int>(subs_.size()); }
  const SubCorridor& sub(int i) const { return subs_.at(i); }
  const ReferencePolyline& polyline() const { return poly_; }
  double segmentLength3d(int i) const { return poly_.segmentLength3d(i); }

  // Index of the sub-corridor containing p; overlap regions resolve to the
  // largest index so progress along the corridor is monotone.
  std::optional<int> locate(const Eigen::Vector3d& p) const;

  // Full feature serialization: every vertex (x, y) followed by
  // (width_left, width_right, z_sup, z_inf) per sub-corridor. For k vertices
  // this is 6k - 4 values.
  std::vector<double> flatten() const;

  // Egocentric window of length `horizon` starting at sub-corridor `first`:
  // horizon+1 vertices (x, y) relative to ego, then per segment
  // (width_left, width_right, z_sup - ego_z, z_inf - ego_z). Past the last
  // sub-corridor the window pads by collapsing onto the final vertex with the
  // final widths and band. Returns 6*horizon + 2 values.
  std::vector<double> observationWindow(int first, int horizon,
                                        const Eigen::Vector3d& ego) const;

 private:
  std::vector<SubCorridor> subs_;
  ReferencePolyline poly_;
};

}  // namespace sfcplan
