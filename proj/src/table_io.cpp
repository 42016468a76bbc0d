#include "sfcplan/table_io.hpp"

#include <fstream>
#include <iomanip>

#include "sfcplan/errors.hpp"

namespace sfcplan {
namespace {

std::ofstream openOut(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw MapIoError("cannot open output file: " + path);
  os << std::setprecision(12);
  return os;
}

}  // namespace

void writeTrajectoryFile(const std::string& path, const BsplineTrajectory& traj) {
  auto os = openOut(path);
  os << "# control points of a uniform cubic spline\n";
  os << "# knot_interval " << traj.knotInterval() << "\n";
  os << "# i x y z\n";
  for (int i = 0; i < traj.numPoints(); ++i) {
    const auto& p = traj.controlPoint(i);
    os << i << " " << p.x() << " " << p.y() << " " << p.z() << "\n";
  }
}

void writeSampledTrajectoryFile(const std::string& path,
                                const BsplineTrajectory& traj, double sample_dt) {
  auto os = openOut(path);
  os << "# sampled trajectory\n";
  os << "# tau x y z vx vy vz ax ay az\n";
  for (double tau = traj.minTau(); tau <= traj.maxTau() + 1e-12; tau += sample_dt) {
    const double t = std::min(tau, traj.maxTau());
    const auto p = traj.evalPosition(t);
    const auto v = traj.evalVelocity(t);
    const auto a = traj.evalAcceleration(t);
    os << t << " " << p.x() << " " << p.y() << " " << p.z() << " " << v.x() << " "
       << v.y() << " " << v.z() << " " << a.x() << " " << a.y() << " " << a.z()
       << "\n";
  }
}

void writePolylineFile(const std::string& path, const ReferencePolyline& poly) {
  auto os = openOut(path);
  os << "# reference polyline vertices\n";
  os << "# i x y z\n";
  for (int i = 0; i < poly.numVertices(); ++i) {
    const auto& v = poly.vertex(i);
    os << i << " " << v.x() << " " << v.y() << " " << v.z() << "\n";
  }
}

void writeCorridorFile(const std::string& path, const SafeFlightCorridor& sfc) {
  auto os = openOut(path);
  os << "# corridor boxes along the reference polyline\n";
  os << "# i ax ay az bx by bz nx ny width_left width_right z_inf z_sup fallback\n";
  for (int i = 0; i < sfc.size(); ++i) {
    const auto& s = sfc.sub(i);
    os << i << " " << s.a.x() << " " << s.a.y() << " " << s.a.z() << " " << s.b.x()
       << " " << s.b.y() << " " << s.b.z() << " " << s.normal.x() << " "
       << s.normal.y() << " " << s.width_left << " " << s.width_right << " "
       << s.z_inf << " " << s.z_sup << " " << (s.fallback ? 1 : 0) << "\n";
  }
}

void writeEpisodeFile(const std::string& path, const EpisodeResult& episode) {
  auto os = openOut(path);
  os << "# episode log\n";
  os << "# outcome " << episodeEndName(episode.cause) << "\n";
  os << "# steps " << episode.steps << " time_s " << episode.episode_time
     << " total_reward " << episode.total_reward << " peak_speed "
     << episode.peak_speed << "\n";
  os << "# t ax ay az reward r_p r_f r_s jerk knot_x knot_y knot_z corridor\n";
  for (const auto& r : episode.rows) {
    os << r.t << " " << r.alpha.x() << " " << r.alpha.y() << " " << r.alpha.z()
       << " " << r.reward << " " << r.diag.r_p << " " << r.diag.r_f << " "
       << r.diag.r_s << " " << r.diag.jerk << " " << r.knot.x() << " "
       << r.knot.y() << " " << r.knot.z() << " " << r.corridor_index << "\n";
  }
}

const char* episodeEndName(EpisodeEnd cause) {
  switch (cause) {
    case EpisodeEnd::Success:
      return "success";
    case EpisodeEnd::Collision:
      return "collision";
    case EpisodeEnd::JerkViolation:
      return "jerk";
    case EpisodeEnd::Horizon:
      return "horizon";
  }
  return "unknown";
}

}  // namespace sfcplan
