#pragma once

#include <stdexcept>
#include <string>

namespace sfcplan {

// Failures of the geometric pipeline (search, corridor construction).
struct PlanningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A* could not connect start and goal.
struct NoPathError : PlanningError {
  using PlanningError::PlanningError;
};

// Start or goal voxel is occupied, outside the map, or outside the height band.
struct InvalidEndpointError : PlanningError {
  using PlanningError::PlanningError;
};

// Corridor geometry on a segment with no horizontal extent and no usable
// predecessor normal.
struct DegenerateSegmentError : PlanningError {
  using PlanningError::PlanningError;
};

// No obstacle-free corridor exists around a polyline segment: even the
// minimum-width fallback would enclose occupied space.
struct CorridorError : PlanningError {
  using PlanningError::PlanningError;
};

struct MapIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario generation exhausted its retry budget without a traversable map.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sfcplan
