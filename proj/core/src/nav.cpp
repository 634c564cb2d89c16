#include "uavmap/nav.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace uavmap {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

// exp of a rotation vector as a quaternion; exact identity at zero.
Eigen::Quaterniond exp_quat(const Eigen::Vector3d& v) {
  const double angle = v.norm();
  if (angle < 1e-12) {
    return Eigen::Quaterniond(1.0, 0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z());
  }
  const double half = 0.5 * angle;
  const double s = std::sin(half) / angle;
  return Eigen::Quaterniond(std::cos(half), s * v.x(), s * v.y(), s * v.z());
}

void symmetrize(StateCovariance& p) { p = 0.5 * (p + p.transpose()).eval(); }

}  // namespace

std::pair<NavState, StateCovariance> ekf_predict(const NavState& state,
                                                 const StateCovariance& cov,
                                                 const ImuSample& imu, double dt,
                                                 const ProcessNoise& q) {
  if (!(dt > 0.0)) {
    throw DataError("ekf_predict: dt must be positive");
  }

  const Eigen::Vector3d accel_body = imu.accel - state.accel_bias;
  const Eigen::Vector3d omega = imu.gyro - state.gyro_bias;
  const Eigen::Matrix3d r = state.attitude.toRotationMatrix();
  const Eigen::Vector3d accel_world = r * accel_body + kGravity;

  NavState next = state;
  next.position = state.position + state.velocity * dt + 0.5 * accel_world * dt * dt;
  next.velocity = state.velocity + accel_world * dt;
  next.attitude = (state.attitude * exp_quat(omega * dt)).normalized();

  // Error-state transition (dp, dv, dtheta, dba, dbg), body-frame attitude error.
  StateCovariance f = StateCovariance::Identity();
  f.block<3, 3>(0, 3) = Eigen::Matrix3d::Identity() * dt;
  f.block<3, 3>(3, 6) = -r * skew(accel_body) * dt;
  f.block<3, 3>(3, 9) = -r * dt;
  f.block<3, 3>(6, 6) = exp_quat(omega * dt).toRotationMatrix().transpose();
  f.block<3, 3>(6, 12) = -Eigen::Matrix3d::Identity() * dt;

  StateCovariance qd = StateCovariance::Zero();
  qd.block<3, 3>(3, 3) = Eigen::Matrix3d::Identity() * (q.accel_density * q.accel_density * dt);
  qd.block<3, 3>(6, 6) = Eigen::Matrix3d::Identity() * (q.gyro_density * q.gyro_density * dt);
  qd.block<3, 3>(9, 9) =
      Eigen::Matrix3d::Identity() * (q.accel_bias_walk * q.accel_bias_walk * dt);
  qd.block<3, 3>(12, 12) =
      Eigen::Matrix3d::Identity() * (q.gyro_bias_walk * q.gyro_bias_walk * dt);

  StateCovariance next_cov = f * cov * f.transpose() + qd;
  symmetrize(next_cov);
  return {next, next_cov};
}

std::pair<NavState, StateCovariance> ekf_update(const NavState& state,
                                                const StateCovariance& cov,
                                                const GpsFix& gps) {
  if ((gps.noise - gps.noise.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw DataError("ekf_update: measurement covariance not symmetric");
  }
  {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(gps.noise);
    if (es.eigenvalues().minCoeff() < -1e-12) {
      throw DataError("ekf_update: measurement covariance not PSD");
    }
  }

  // H = [I3 0]; innovation covariance is the position block plus R.
  const Eigen::Matrix3d s = cov.topLeftCorner<3, 3>() + gps.noise;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(s);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (lmin <= 0.0 || lmax / lmin > 1e12) {
    throw NumericError("ekf_update: singular innovation covariance");
  }

  const Eigen::Matrix<double, 15, 3> k = cov.leftCols<3>() * s.inverse();
  const Eigen::Vector3d innovation = gps.position - state.position;
  const Eigen::Matrix<double, 15, 1> dx = k * innovation;

  NavState next = state;
  next.position += dx.segment<3>(0);
  next.velocity += dx.segment<3>(3);
  next.attitude = (state.attitude * exp_quat(dx.segment<3>(6))).normalized();
  next.accel_bias += dx.segment<3>(9);
  next.gyro_bias += dx.segment<3>(12);

  StateCovariance ikh = StateCovariance::Identity();
  ikh.leftCols<3>() -= k;
  StateCovariance next_cov = ikh * cov;
  symmetrize(next_cov);
  return {next, next_cov};
}

RigidTransform body_pose(const NavState& state) {
  return RigidTransform(state.attitude, state.position, Frame::Body, Frame::World);
}

RigidTransform sensor_pose(const RigidTransform& body, const RigidTransform& extrinsic) {
  return compose(body, extrinsic);
}

std::vector<TimedNavState> run_filter(const std::vector<ImuSample>& imu,
                                      const std::vector<GpsFix>& gps,
                                      const NavState& initial,
                                      const StateCovariance& cov0,
                                      const ProcessNoise& q) {
  if (imu.empty()) {
    throw DataError("run_filter: empty IMU stream");
  }
  for (size_t i = 1; i < imu.size(); ++i) {
    if (!(imu[i].t > imu[i - 1].t)) {
      throw DataError("run_filter: IMU timestamps not strictly increasing");
    }
  }
  for (size_t i = 1; i < gps.size(); ++i) {
    if (!(gps[i].t > gps[i - 1].t)) {
      throw DataError("run_filter: GPS timestamps not strictly increasing");
    }
  }

  std::vector<TimedNavState> out;
  out.reserve(imu.size());

  NavState state = initial;
  StateCovariance cov = cov0;
  size_t gi = 0;

  auto apply_gps_up_to = [&](double t) {
    while (gi < gps.size() && gps[gi].t <= t + 1e-12) {
      std::tie(state, cov) = ekf_update(state, cov, gps[gi]);
      ++gi;
    }
  };

  apply_gps_up_to(imu[0].t);
  out.push_back({imu[0].t, state, cov});

  for (size_t i = 1; i < imu.size(); ++i) {
    const double dt = imu[i].t - imu[i - 1].t;
    // The sample at the interval start is held over [t_{i-1}, t_i].
    std::tie(state, cov) = ekf_predict(state, cov, imu[i - 1], dt, q);
    apply_gps_up_to(imu[i].t);
    out.push_back({imu[i].t, state, cov});
  }
  return out;
}

Trajectory to_trajectory(const std::vector<TimedNavState>& states) {
  Trajectory traj;
  traj.reserve(states.size());
  for (const TimedNavState& s : states) {
    traj.push_back({s.t, body_pose(s.state)});
  }
  return traj;
}

}  // namespace uavmap
