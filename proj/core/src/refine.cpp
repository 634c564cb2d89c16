#include <cmath>
#include <vector>

#include <Eigen/Cholesky>

#include "uavmap/matching.hpp"

namespace uavmap {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

struct Residuals {
  double sum_sq = 0.0;
  int used = 0;
};

Residuals evaluate(const std::vector<Eigen::Vector3d>& world,
                   const std::vector<PixelPoint>& observed, const CameraIntrinsics& k,
                   const RigidTransform& pose_b) {
  Residuals r;
  const Eigen::Quaterniond q_inv = pose_b.rotation.conjugate();
  for (size_t i = 0; i < world.size(); ++i) {
    const Eigen::Vector3d pc = q_inv * (world[i] - pose_b.translation);
    if (pc.z() <= 1e-6) {
      continue;
    }
    const PixelPoint proj(k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy);
    r.sum_sq += (proj - observed[i]).squaredNorm();
    r.used += 1;
  }
  return r;
}

}  // namespace

RefineResult refine_pose(const std::vector<MatchPair>& matches, const FeatureSet& features_a,
                         const FeatureSet& features_b, const TerrainGrid& grid,
                         const CameraIntrinsics& k, const RigidTransform& pose_a,
                         const RigidTransform& initial_pose_b, double huber_px) {
  if (matches.size() < 6) {
    throw DataError("refine_pose: need at least 6 matches");
  }
  if (pose_a.from_frame != Frame::Camera || pose_a.to_frame != Frame::World ||
      initial_pose_b.from_frame != Frame::Camera || initial_pose_b.to_frame != Frame::World) {
    throw DataError("refine_pose: poses must map Camera->World");
  }

  // Lift the A-side keypoints onto the terrain.
  std::vector<Eigen::Vector3d> world;
  std::vector<PixelPoint> observed;
  world.reserve(matches.size());
  observed.reserve(matches.size());
  for (const MatchPair& m : matches) {
    const Eigen::Vector3d dir =
        pose_a.rotation * back_project(k, features_a.keypoints[m.index_a].position, 1.0);
    world.push_back(intersect_ray_terrain(pose_a.translation, dir, grid));
    observed.push_back(features_b.keypoints[m.index_b].position);
  }

  RigidTransform pose = initial_pose_b;
  Residuals current = evaluate(world, observed, k, pose);
  if (current.used < 6) {
    throw NumericError("refine_pose: too few points in front of camera B");
  }

  int consecutive_failures = 0;
  int iter = 0;
  for (; iter < 20; ++iter) {
    const Eigen::Matrix3d r_inv = pose.rotation.conjugate().toRotationMatrix();
    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    for (size_t i = 0; i < world.size(); ++i) {
      const Eigen::Vector3d pc = r_inv * (world[i] - pose.translation);
      if (pc.z() <= 1e-6) {
        continue;
      }
      const double z = pc.z();
      const PixelPoint proj(k.fx * pc.x() / z + k.cx, k.fy * pc.y() / z + k.cy);
      const Eigen::Vector2d res = proj - observed[i];

      Eigen::Matrix<double, 2, 3> d_proj;
      d_proj << k.fx / z, 0, -k.fx * pc.x() / (z * z), 0, k.fy / z, -k.fy * pc.y() / (z * z);
      // pose parametrized as t += dt (world), R <- R * Exp(dtheta):
      // d pc / d t = -R^T, d pc / d theta = [pc]x.
      Eigen::Matrix<double, 3, 6> d_pc;
      d_pc.leftCols<3>() = -r_inv;
      d_pc.rightCols<3>() = skew(pc);
      const Eigen::Matrix<double, 2, 6> jac = d_proj * d_pc;

      const double norm = res.norm();
      const double weight = norm <= huber_px ? 1.0 : huber_px / norm;
      h += weight * jac.transpose() * jac;
      g += weight * jac.transpose() * res;
    }

    const Eigen::LDLT<Eigen::Matrix<double, 6, 6>> ldlt(h);
    if (ldlt.info() != Eigen::Success) {
      throw NumericError("refine_pose: normal equations not solvable");
    }
    Eigen::Matrix<double, 6, 1> step = ldlt.solve(-g);
    if (step.norm() < 1e-8) {
      break;
    }

    // Backtracking acceptance: the reported residual never increases.
    bool accepted = false;
    for (int half = 0; half < 8; ++half) {
      RigidTransform trial(
          pose.rotation * Eigen::Quaterniond(
                              Eigen::AngleAxisd(step.tail<3>().norm() * std::pow(0.5, half),
                                                step.tail<3>().norm() > 1e-15
                                                    ? step.tail<3>().normalized()
                                                    : Eigen::Vector3d::UnitZ())),
          pose.translation + step.head<3>() * std::pow(0.5, half), Frame::Camera, Frame::World);
      const Residuals trial_res = evaluate(world, observed, k, trial);
      if (trial_res.used >= 6 && trial_res.sum_sq <= current.sum_sq) {
        pose = trial;
        current = trial_res;
        accepted = true;
        break;
      }
    }
    if (accepted) {
      consecutive_failures = 0;
    } else {
      if (++consecutive_failures >= 3) {
        throw NumericError("refine_pose: diverging (residual increased 3 times)");
      }
    }
  }

  RefineResult out;
  out.pose = pose;
  out.rms = std::sqrt(current.sum_sq / std::max(current.used, 1));
  out.iterations = iter;
  return out;
}

}  // namespace uavmap
