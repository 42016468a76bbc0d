#include "sfcplan/bspline.hpp"

#include <cmath>
#include <stdexcept>

namespace sfcplan {

BsplineTrajectory::BsplineTrajectory(std::vector<Eigen::Vector3d> points,
                                     double knot_interval)
    : points_(std::move(points)), dt_(knot_interval) {
  if (dt_ <= 0.0) throw std::invalid_argument("knot interval must be positive");
}

BsplineTrajectory BsplineTrajectory::fromInitialState(const KinematicState& state,
                                                      double knot_interval) {
  const double dt = knot_interval;
  const Eigen::Vector3d& p = state.position;
  const Eigen::Vector3d& v = state.velocity;
  const Eigen::Vector3d& a = state.acceleration;
  // Solves p(2dt)=p, v(2dt)=v, a(2dt)=a for the first three points.
  std::vector<Eigen::Vector3d> q(3);
  q[0] = p + dt * dt * a / 3.0 - dt * v;
  q[1] = p - dt * dt * a / 6.0;
  q[2] = p + dt * dt * a / 3.0 + dt * v;
  return BsplineTrajectory(std::move(q), dt);
}

Eigen::Vector3d BsplineTrajectory::segmentPoint(const Eigen::Vector3d& q0,
                                                const Eigen::Vector3d& q1,
                                                const Eigen::Vector3d& q2,
                                                const Eigen::Vector3d& q3,
                                                double s) {
  const double s2 = s * s, s3 = s2 * s;
  const double b0 = (1.0 - 3.0 * s + 3.0 * s2 - s3) / 6.0;
  const double b1 = (4.0 - 6.0 * s2 + 3.0 * s3) / 6.0;
  const double b2 = (1.0 + 3.0 * s + 3.0 * s2 - 3.0 * s3) / 6.0;
  const double b3 = s3 / 6.0;
  return b0 * q0 + b1 * q1 + b2 * q2 + b3 * q3;
}

int BsplineTrajectory::segmentOf(double tau, double& s) const {
  const int n = numPoints() - 1;
  if (n < 3) throw std::out_of_range("spline evaluation needs at least four control points");
  const double u = tau / dt_;
  constexpr double kSlack = 1e-9;
  if (u < 2.0 - kSlack || u > static_cast<double>(n) + kSlack)
    throw std::out_of_range("parameter outside spline span");
  int t = static_cast<int>(std::floor(u));
  if (t < 2) t = 2;
  if (t > n - 1) t = n - 1;
  s = u - t;
  return t;
}

Eigen::Vector3d BsplineTrajectory::evalPosition(double tau) const {
  double s;
  const int t = segmentOf(tau, s);
  return segmentPoint(points_[t - 2], points_[t - 1], points_[t], points_[t + 1], s);
}

Eigen::Vector3d BsplineTrajectory::evalVelocity(double tau) const {
  double s;
  const int t = segmentOf(tau, s);
  const Eigen::Vector3d v0 = (points_[t - 1] - points_[t - 2]) / dt_;
  const Eigen::Vector3d v1 = (points_[t] - points_[t - 1]) / dt_;
  const Eigen::Vector3d v2 = (points_[t + 1] - points_[t]) / dt_;
  const double c0 = 0.5 * (1.0 - s) * (1.0 - s);
  const double c1 = 0.5 * (-2.0 * s * s + 2.0 * s + 1.0);
  const double c2 = 0.5 * s * s;
  return c0 * v0 + c1 * v1 + c2 * v2;
}

Eigen::Vector3d BsplineTrajectory::evalAcceleration(double tau) const {
  double s;
  const int t = segmentOf(tau, s);
  const Eigen::Vector3d a0 =
      (points_[t] - 2.0 * points_[t - 1] + points_[t - 2]) / (dt_ * dt_);
  const Eigen::Vector3d a1 =
      (points_[t + 1] - 2.0 * points_[t] + points_[t - 1]) / (dt_ * dt_);
  return (1.0 - s) * a0 + s * a1;
}

Eigen::Vector3d BsplineTrajectory::knotPosition(int t) const {
  if (t < 2 || t > numPoints() - 1) throw std::out_of_range("knot index outside span");
  return (points_[t - 2] + 4.0 * points_[t - 1] + points_[t]) / 6.0;
}

Eigen::Vector3d BsplineTrajectory::knotVelocity(int t) const {
  if (t < 2 || t > numPoints() - 1) throw std::out_of_range("knot index outside span");
  return (points_[t] - points_[t - 2]) / (2.0 * dt_);
}

Eigen::Vector3d BsplineTrajectory::knotAcceleration(int t) const {
  if (t < 2 || t > numPoints() - 1) throw std::out_of_range("knot index outside span");
  return (points_[t] - 2.0 * points_[t - 1] + points_[t - 2]) / (dt_ * dt_);
}

Eigen::Vector3d BsplineTrajectory::segmentJerk(int t) const {
  if (t < 2 || t > numPoints() - 2)
    throw std::out_of_range("segment index outside span");
  return (-points_[t - 2] + 3.0 * points_[t - 1] - 3.0 * points_[t] +
          points_[t + 1]) /
         (dt_ * dt_ * dt_);
}

std::vector<Eigen::Vector3d> BsplineTrajectory::derivativePoints(
    const std::vector<Eigen::Vector3d>& points, double dt) {
  std::vector<Eigen::Vector3d> out;
  if (points.size() < 2) return out;
  out.reserve(points.size() - 1);
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    out.push_back((points[i + 1] - points[i]) / dt);
  return out;
}

}  // namespace sfcplan
