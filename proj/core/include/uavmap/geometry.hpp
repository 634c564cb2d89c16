#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "uavmap/errors.hpp"

namespace uavmap {

// Coordinate frames chained by the extrinsic calibration:
// Radar/Camera are rigidly mounted on Body; Body moves in World.
enum class Frame { World, Body, Camera, Radar };

const char* frame_name(Frame f);

using WorldPoint = Eigen::Vector3d;
using CameraPoint = Eigen::Vector3d;
using PixelPoint = Eigen::Vector2d;

// Rigid SE(3) map x_to = R * x_from + t, tagged with the frames it links.
// The quaternion is kept unit-norm by every constructor and operation.
struct RigidTransform {
  Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d translation{0.0, 0.0, 0.0};
  Frame from_frame = Frame::World;
  Frame to_frame = Frame::World;

  RigidTransform() = default;
  RigidTransform(const Eigen::Quaterniond& q, const Eigen::Vector3d& t,
                 Frame from, Frame to);

  static RigidTransform identity(Frame from, Frame to);
  static RigidTransform identity(Frame f) { return identity(f, f); }

  // Maps a point expressed in from_frame into to_frame.
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  // 4x4 homogeneous form.
  Eigen::Matrix4d matrix() const;
};

// a after b: maps b.from_frame -> a.to_frame. Throws DataError when the
// inner frame tags do not chain.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

// Inverse map with swapped frame tags.
RigidTransform invert(const RigidTransform& t);

// Rotation matrix from a quaternion, renormalized internally.
// Throws NumericError on a (near-)zero quaternion.
Eigen::Matrix3d quaternion_to_rotation(const Eigen::Quaterniond& q);

// Ideal pinhole camera, no distortion.
struct CameraIntrinsics {
  double fx = 0.0, fy = 0.0;
  double cx = 0.0, cy = 0.0;
  int width = 0, height = 0;

  CameraIntrinsics() = default;
  CameraIntrinsics(double fx, double fy, double cx, double cy, int width, int height);

  Eigen::Matrix3d matrix() const;
};

// depth * K^-1 * [u v 1]^T. The z component equals depth exactly.
// Throws NumericError for depth <= 0.
CameraPoint back_project(const CameraIntrinsics& k, const PixelPoint& p, double depth);

// (K * p / p.z) truncated to (u, v). Throws NumericError when p.z <= 0.
PixelPoint project_to_pixel(const CameraIntrinsics& k, const CameraPoint& p);

// Transfers a pixel of camera A into camera B assuming depth `depth_zw`
// along A's optical axis: project(K, T_b^-1 * T_a * backproject(K, p, depth)).
// Both poses must be Camera->World. The result may lie outside B's bounds;
// callers clip. Throws NumericError when the point falls behind camera B.
PixelPoint transfer_pixel(const PixelPoint& pa, const CameraIntrinsics& k,
                          const RigidTransform& pose_a, const RigidTransform& pose_b,
                          double depth_zw);

}  // namespace uavmap
