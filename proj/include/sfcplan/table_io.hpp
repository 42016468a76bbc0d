#pragma once

#include <string>
#include <vector>

#include "sfcplan/bspline.hpp"
#include "sfcplan/corridor.hpp"
#include "sfcplan/planner_env.hpp"

namespace sfcplan {

// Text exports for inspection and downstream plotting. Every file starts
// with '#'-prefixed header lines naming the columns.

// Control points: "# i x y z" rows plus the knot interval in the header.
void writeTrajectoryFile(const std::string& path, const BsplineTrajectory& traj);

// Curve resampled every sample_dt: "tau x y z vx vy vz ax ay az".
void writeSampledTrajectoryFile(const std::string& path,
                                const BsplineTrajectory& traj, double sample_dt);

// Polyline vertices: "i x y z".
void writePolylineFile(const std::string& path, const ReferencePolyline& poly);

// Sub-corridor geometry: endpoints, normal, widths, band, fallback flag.
void writeCorridorFile(const std::string& path, const SafeFlightCorridor& sfc);

// Per-step episode log: action, reward terms, knot position, corridor index.
void writeEpisodeFile(const std::string& path, const EpisodeResult& episode);

const char* episodeEndName(EpisodeEnd cause);

}  // namespace sfcplan
