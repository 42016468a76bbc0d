#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace sfcplan {

struct KinematicState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d acceleration = Eigen::Vector3d::Zero();
};

// Clamped-free uniform cubic B-spline over control points q_0..q_n with knot
// spacing dt. The curve is evaluable on [2*dt, n*dt]; the piece on
// [t*dt, (t+1)*dt] is controlled by q_{t-2}..q_{t+1}. Derivatives are handled
// through the standard reduced-order control points
//   v_j = (q_{j+1} - q_j)/dt,  a_j = (v_{j+1} - v_j)/dt,
// so velocity is a quadratic spline over the v_j and acceleration a linear
// spline over the a_j.
class BsplineTrajectory {
 public:
  BsplineTrajectory() = default;
  BsplineTrajectory(std::vector<Eigen::Vector3d> points, double knot_interval);

  // Places the first three control points so the curve starts at `state`:
  // position, velocity and acceleration at parameter 2*dt match exactly.
  static BsplineTrajectory fromInitialState(const KinematicState& state,
                                            double knot_interval);

  int numPoints() const { return static_cast<int>(points_.size()); }
  const Eigen::Vector3d& controlPoint(int i) const { return points_.at(i); }
  const std::vector<Eigen::Vector3d>& controlPoints() const { return points_; }
  double knotInterval() const { return dt_; }

  void appendPoint(const Eigen::Vector3d& p) { points_.push_back(p); }

  double minTau() const { return 2.0 * dt_; }
  double maxTau() const { return (numPoints() - 1) * dt_; }

  Eigen::Vector3d evalPosition(double tau) const;
  Eigen::Vector3d evalVelocity(double tau) const;
  Eigen::Vector3d evalAcceleration(double tau) const;

  // Curve state at knot t*dt, t in [2, n]: closed forms
  //   p = (q_{t-2} + 4 q_{t-1} + q_t)/6,  v = (v_{t-2} + v_{t-1})/2,
  //   a = a_{t-2}.
  Eigen::Vector3d knotPosition(int t) const;
  Eigen::Vector3d knotVelocity(int t) const;
  Eigen::Vector3d knotAcceleration(int t) const;

  // Jerk is constant on each piece; for [t*dt, (t+1)*dt], t in [2, n-1]:
  //   (-q_{t-2} + 3 q_{t-1} - 3 q_t + q_{t+1}) / dt^3.
  Eigen::Vector3d segmentJerk(int t) const;
  double maxJerkBetweenKnots(int t) const { return segmentJerk(t).norm(); }

  static std::vector<Eigen::Vector3d> derivativePoints(
      const std::vector<Eigen::Vector3d>& points, double dt);

  // Single cubic piece through four consecutive control points, s in [0, 1].
  static Eigen::Vector3d segmentPoint(const Eigen::Vector3d& q0,
                                      const Eigen::Vector3d& q1,
                                      const Eigen::Vector3d& q2,
                                      const Eigen::Vector3d& q3, double s);

 private:
  int segmentOf(double tau, double& s) const;

  std::vector<Eigen::Vector3d> points_;
  double dt_ = 0.1;
};

}  // namespace sfcplan
