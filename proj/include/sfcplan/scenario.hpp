#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "sfcplan/occupancy_grid.hpp"

namespace sfcplan {

enum class ScenarioKind { Walls, Forest };

// Parameters for random course generation. Walls courses place full slabs
// perpendicular to +y with rectangular windows carved out; spacing between
// consecutive walls interpolates linearly from spacing_near at the start side
// to spacing_far at the goal side. Forest courses scatter a fixed number of
// full-height cylinders and rings.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::Walls;
  Eigen::Vector3d extent_min{-10.0, -32.4, 0.0};
  Eigen::Vector3d extent_max{10.0, 32.4, 3.0};
  double resolution = 0.15;
  double start_z = 1.0;
  double endpoint_inset = 0.4;  // start/goal distance from the y faces
  double clear_zone = 2.0;      // obstacle-free depth in front of start/goal

  // Walls
  double spacing_near = 4.5;
  double spacing_far = 2.75;
  double gap_min = 0.8;
  double gap_max = 1.6;
  int max_gaps = 3;

  // Forest
  int obstacle_count = 200;
  double cylinder_r_min = 0.3, cylinder_r_max = 0.8;
  double ring_r_min = 0.6, ring_r_max = 1.0;
  double ring_thickness_min = 0.15, ring_thickness_max = 0.3;
  double clearance = 1.0;  // min footprint distance from start and goal

  // Traversability check used to accept a generated course
  int check_inflation = 1;
  double flight_z_min = 0.2;
  double flight_z_max = 3.0;
  double max_segment_len = 3.0;  // matches the planner's polyline split length
  int max_attempts = 32;

  std::uint64_t seed = 1;

  static ScenarioSpec curriculumWalls(std::uint64_t seed);
  static ScenarioSpec sparseWalls(std::uint64_t seed);
  static ScenarioSpec denseWalls(std::uint64_t seed);
  static ScenarioSpec forest(std::uint64_t seed);
};

struct Scenario {
  std::shared_ptr<const OccupancyGrid> grid;
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();
  std::vector<double> wall_y;  // wall positions, increasing (walls courses)
  int obstacles_placed = 0;    // footprints stamped (forest courses)
  std::uint64_t seed_used = 0;
  int attempts = 1;
};

// Builds a course and verifies on the inflated map that start and goal
// connect inside the flight band AND that a safe corridor can be built along
// the found path; on failure the map is regenerated from a derived seed.
// Throws ScenarioError when max_attempts is exhausted.
Scenario generateScenario(const ScenarioSpec& spec);

}  // namespace sfcplan
