#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sfcplan/astar.hpp"
#include "sfcplan/rng.hpp"
#include "sfcplan/scenario.hpp"

using namespace sfcplan;

namespace {

// Occupied voxels in one y-row, split into total and flight-band-free counts.
struct RowStats {
  int occupied = 0;
  int band_free = 0;
};

RowStats rowStats(const OccupancyGrid& g, int jy, double z_min, double z_max) {
  RowStats st;
  for (int z = 0; z < g.dims().z(); ++z)
    for (int x = 0; x < g.dims().x(); ++x) {
      const bool occ = g.isOccupied(Eigen::Vector3i{x, jy, z});
      st.occupied += occ ? 1 : 0;
      const double cz = g.voxelToWorld({x, jy, z}).z();
      if (!occ && cz > z_min && cz < z_max) ++st.band_free;
    }
  return st;
}

}  // namespace

TEST_CASE("course geometry is pinned by the spec defaults") {
  const Scenario sc = generateScenario(ScenarioSpec::curriculumWalls(3));
  CHECK((sc.grid->origin() - Eigen::Vector3d(-10.0, -32.4, 0.0)).norm() == 0.0);
  CHECK(sc.grid->resolution() == 0.15);
  CHECK(sc.grid->dims() == Eigen::Vector3i(134, 432, 20));
  CHECK((sc.start - Eigen::Vector3d(0.0, -32.0, 1.0)).norm() < 1e-12);
  CHECK((sc.goal - Eigen::Vector3d(0.0, 32.0, 1.0)).norm() < 1e-12);
}

TEST_CASE("generation is a pure function of the spec") {
  const ScenarioSpec spec = ScenarioSpec::denseWalls(11);
  const Scenario a = generateScenario(spec);
  const Scenario b = generateScenario(spec);
  CHECK(a.seed_used == b.seed_used);
  CHECK(a.attempts == b.attempts);
  CHECK(a.wall_y == b.wall_y);
  CHECK((a.start - b.start).norm() == 0.0);
  CHECK(a.grid->cells() == b.grid->cells());

  const Scenario c = generateScenario(ScenarioSpec::denseWalls(12));
  CHECK(a.grid->cells() != c.grid->cells());
}

TEST_CASE("wall courses tighten toward the goal") {
  for (std::uint64_t seed : {1ull, 7ull, 23ull}) {
    const ScenarioSpec spec = ScenarioSpec::curriculumWalls(seed);
    const Scenario sc = generateScenario(spec);
    REQUIRE(sc.wall_y.size() >= 10);
    CHECK(sc.wall_y.size() <= 25);

    // First wall sits one near-spacing past the start clear zone.
    const double lo = sc.start.y() + spec.clear_zone;
    CHECK(sc.wall_y.front() == doctest::Approx(lo + spec.spacing_near).epsilon(1e-12));
    CHECK(sc.wall_y.back() <= sc.goal.y() - spec.clear_zone + 1e-12);
    CHECK(std::is_sorted(sc.wall_y.begin(), sc.wall_y.end()));

    for (std::size_t i = 0; i + 2 < sc.wall_y.size(); ++i) {
      const double d0 = sc.wall_y[i + 1] - sc.wall_y[i];
      const double d1 = sc.wall_y[i + 2] - sc.wall_y[i + 1];
      CHECK(d1 <= d0 + 1e-9);
      CHECK(d0 <= spec.spacing_near + 1e-9);
      CHECK(d1 >= spec.spacing_far - 1e-9);
    }
  }
}

TEST_CASE("every wall is solid except for carved windows") {
  const ScenarioSpec spec = ScenarioSpec::sparseWalls(19);
  const Scenario sc = generateScenario(spec);
  const int row_cells = sc.grid->dims().x() * sc.grid->dims().z();
  for (double wy : sc.wall_y) {
    const int jy = sc.grid->worldToVoxel(Eigen::Vector3d(0, wy, 0)).y();
    const RowStats st =
        rowStats(*sc.grid, jy, spec.flight_z_min, spec.flight_z_max);
    CHECK(st.occupied >= static_cast<int>(0.75 * row_cells));
    CHECK(st.band_free >= 20);  // at least one 0.8 m window in the band
  }
}

TEST_CASE("obstacles keep out of the endpoint clear zones") {
  SUBCASE("walls") {
    const ScenarioSpec spec = ScenarioSpec::denseWalls(5);
    const Scenario sc = generateScenario(spec);
    const auto& g = *sc.grid;
    double min_y = 1e9, max_y = -1e9;
    for (int z = 0; z < g.dims().z(); ++z)
      for (int y = 0; y < g.dims().y(); ++y)
        for (int x = 0; x < g.dims().x(); ++x)
          if (g.isOccupied(Eigen::Vector3i{x, y, z})) {
            const double cy = g.voxelToWorld({x, y, z}).y();
            min_y = std::min(min_y, cy);
            max_y = std::max(max_y, cy);
          }
    CHECK(min_y >= sc.start.y() + spec.clear_zone - g.resolution());
    CHECK(max_y <= sc.goal.y() - spec.clear_zone + g.resolution());
  }
  SUBCASE("forest") {
    const ScenarioSpec spec = ScenarioSpec::forest(5);
    const Scenario sc = generateScenario(spec);
    const auto& g = *sc.grid;
    for (int y = 0; y < g.dims().y(); ++y)
      for (int x = 0; x < g.dims().x(); ++x)
        if (g.isOccupied(Eigen::Vector3i{x, y, 0})) {
          const Eigen::Vector3d c = g.voxelToWorld({x, y, 0});
          CHECK(std::hypot(c.x() - sc.start.x(), c.y() - sc.start.y()) >=
                spec.clearance - 1e-9);
          CHECK(std::hypot(c.x() - sc.goal.x(), c.y() - sc.goal.y()) >=
                spec.clearance - 1e-9);
        }
  }
}

TEST_CASE("forests place the full obstacle budget as full-height columns") {
  const Scenario sc = generateScenario(ScenarioSpec::forest(2));
  CHECK(sc.obstacles_placed == 200);
  CHECK(sc.wall_y.empty());
  const auto& g = *sc.grid;
  CHECK(g.occupiedCount() > 0);
  const int top = g.dims().z() - 1;
  for (int y = 0; y < g.dims().y(); ++y)
    for (int x = 0; x < g.dims().x(); ++x) {
      const bool base = g.isOccupied(Eigen::Vector3i{x, y, 0});
      CHECK(g.isOccupied(Eigen::Vector3i{x, y, top}) == base);
    }
}

TEST_CASE("accepted courses are traversable after inflation") {
  for (std::uint64_t seed : {2ull, 9ull}) {
    for (const ScenarioSpec& spec :
         {ScenarioSpec::denseWalls(seed), ScenarioSpec::forest(seed)}) {
      const Scenario sc = generateScenario(spec);
      AstarOptions opts;
      opts.z_min = spec.flight_z_min;
      opts.z_max = spec.flight_z_max;
      const VoxelPath path =
          astar3d(sc.grid->inflated(spec.check_inflation), sc.start, sc.goal, opts);
      CHECK(path.cost >= (sc.goal - sc.start).norm() - 1.0);
      CHECK(sc.attempts >= 1);
      CHECK(sc.seed_used ==
            mixSeed(spec.seed, static_cast<std::uint64_t>(sc.attempts - 1)));
    }
  }
}

TEST_CASE("factory presets carry their tuned spacings") {
  CHECK(ScenarioSpec::curriculumWalls(1).spacing_near == 4.5);
  CHECK(ScenarioSpec::curriculumWalls(1).spacing_far == 2.75);
  CHECK(ScenarioSpec::sparseWalls(1).spacing_near == 5.0);
  CHECK(ScenarioSpec::sparseWalls(1).spacing_far == 3.5);
  CHECK(ScenarioSpec::denseWalls(1).spacing_near == 4.0);
  CHECK(ScenarioSpec::denseWalls(1).spacing_far == 2.0);
  CHECK(ScenarioSpec::forest(1).kind == ScenarioKind::Forest);
  CHECK(ScenarioSpec::forest(1).obstacle_count == 200);
  CHECK(ScenarioSpec::sparseWalls(77).seed == 77);
}
