#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "uavmap/geometry.hpp"
#include "uavmap/trajectory.hpp"

namespace uavmap {

inline const Eigen::Vector3d kGravity(0.0, 0.0, -9.81);

// Full navigation state. The filter itself runs on the 15-dim error state
// (dp, dv, dtheta, dba, dbg); attitude corrections are applied
// multiplicatively so the quaternion stays on the unit sphere.
struct NavState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Quaterniond attitude = Eigen::Quaterniond::Identity();  // Body -> World
  Eigen::Vector3d accel_bias = Eigen::Vector3d::Zero();
  Eigen::Vector3d gyro_bias = Eigen::Vector3d::Zero();
};

using StateCovariance = Eigen::Matrix<double, 15, 15>;

struct ImuSample {
  double t = 0.0;
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();  // specific force, body frame
  Eigen::Vector3d gyro = Eigen::Vector3d::Zero();   // rad/s, body frame
};

struct GpsFix {
  double t = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();      // local ENU meters
  Eigen::Matrix3d noise = Eigen::Matrix3d::Identity();     // measurement covariance
};

// Continuous-time noise densities; discretized as density^2 * dt per step.
struct ProcessNoise {
  double accel_density = 0.02;    // m/s^2/sqrt(Hz)
  double gyro_density = 0.002;    // rad/s/sqrt(Hz)
  double accel_bias_walk = 1e-4;  // m/s^3/sqrt(Hz)
  double gyro_bias_walk = 1e-5;   // rad/s^2/sqrt(Hz)
};

// One IMU propagation step. Throws DataError when dt <= 0.
std::pair<NavState, StateCovariance> ekf_predict(const NavState& state,
                                                 const StateCovariance& cov,
                                                 const ImuSample& imu, double dt,
                                                 const ProcessNoise& q);

// GPS position update, H = [I3 0]. Throws NumericError when the innovation
// covariance is singular (condition number above 1e12) and DataError when
// the measurement covariance is not symmetric PSD.
std::pair<NavState, StateCovariance> ekf_update(const NavState& state,
                                                const StateCovariance& cov,
                                                const GpsFix& gps);

// T_B^W from the state.
RigidTransform body_pose(const NavState& state);

// T_S^W = T_B^W * T_S^B.
RigidTransform sensor_pose(const RigidTransform& body, const RigidTransform& extrinsic);

struct TimedNavState {
  double t = 0.0;
  NavState state;
  StateCovariance cov = StateCovariance::Zero();
};

// Runs the predict-update cycle over time-sorted streams: one predict per
// IMU interval, GPS fixes merged by timestamp, one output per IMU sample.
// Throws DataError on out-of-order timestamps or an empty IMU stream.
std::vector<TimedNavState> run_filter(const std::vector<ImuSample>& imu,
                                      const std::vector<GpsFix>& gps,
                                      const NavState& initial,
                                      const StateCovariance& cov0,
                                      const ProcessNoise& q);

// Body poses of a filter run as a trajectory.
Trajectory to_trajectory(const std::vector<TimedNavState>& states);

}  // namespace uavmap
