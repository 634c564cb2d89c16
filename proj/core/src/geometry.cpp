#include "uavmap/geometry.hpp"

#include <cmath>
#include <string>

namespace uavmap {

namespace {

std::string chain_error(const RigidTransform& a, const RigidTransform& b) {
  return std::string("frame mismatch: cannot compose ") + frame_name(a.from_frame) +
         "->" + frame_name(a.to_frame) + " with " + frame_name(b.from_frame) + "->" +
         frame_name(b.to_frame);
}

}  // namespace

const char* frame_name(Frame f) {
  switch (f) {
    case Frame::World: return "World";
    case Frame::Body: return "Body";
    case Frame::Camera: return "Camera";
    case Frame::Radar: return "Radar";
  }
  return "?";
}

RigidTransform::RigidTransform(const Eigen::Quaterniond& q, const Eigen::Vector3d& t,
                               Frame from, Frame to)
    : rotation(q), translation(t), from_frame(from), to_frame(to) {
  const double n = rotation.norm();
  if (n < 1e-12) {
    throw NumericError("RigidTransform: zero-norm quaternion");
  }
  rotation.coeffs() /= n;
}

RigidTransform RigidTransform::identity(Frame from, Frame to) {
  RigidTransform t;
  t.from_frame = from;
  t.to_frame = to;
  return t;
}

Eigen::Matrix4d RigidTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation.toRotationMatrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  if (a.from_frame != b.to_frame) {
    throw DataError(chain_error(a, b));
  }
  Eigen::Quaterniond q = a.rotation * b.rotation;
  q.normalize();
  return RigidTransform(q, a.rotation * b.translation + a.translation,
                        b.from_frame, a.to_frame);
}

RigidTransform invert(const RigidTransform& t) {
  const Eigen::Quaterniond qi = t.rotation.conjugate();
  return RigidTransform(qi, -(qi * t.translation), t.to_frame, t.from_frame);
}

Eigen::Matrix3d quaternion_to_rotation(const Eigen::Quaterniond& q) {
  const double n = q.norm();
  if (n < 1e-12) {
    throw NumericError("quaternion_to_rotation: zero-norm quaternion");
  }
  Eigen::Quaterniond qn = q;
  qn.coeffs() /= n;
  return qn.toRotationMatrix();
}

CameraIntrinsics::CameraIntrinsics(double fx_, double fy_, double cx_, double cy_,
                                   int width_, int height_)
    : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(width_), height(height_) {
  if (fx <= 0.0 || fy <= 0.0) {
    throw ConfigError("CameraIntrinsics: focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw ConfigError("CameraIntrinsics: image size must be positive");
  }
  if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height) {
    throw ConfigError("CameraIntrinsics: principal point outside image");
  }
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = fx;
  k(1, 1) = fy;
  k(0, 2) = cx;
  k(1, 2) = cy;
  return k;
}

CameraPoint back_project(const CameraIntrinsics& k, const PixelPoint& p, double depth) {
  if (!(depth > 0.0)) {
    throw NumericError("back_project: depth must be positive");
  }
  return CameraPoint((p.x() - k.cx) / k.fx * depth, (p.y() - k.cy) / k.fy * depth, depth);
}

PixelPoint project_to_pixel(const CameraIntrinsics& k, const CameraPoint& p) {
  if (!(p.z() > 0.0)) {
    throw NumericError("project_to_pixel: point behind camera (z <= 0)");
  }
  return PixelPoint(k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy);
}

PixelPoint transfer_pixel(const PixelPoint& pa, const CameraIntrinsics& k,
                          const RigidTransform& pose_a, const RigidTransform& pose_b,
                          double depth_zw) {
  if (pose_a.from_frame != Frame::Camera || pose_a.to_frame != Frame::World ||
      pose_b.from_frame != Frame::Camera || pose_b.to_frame != Frame::World) {
    throw DataError("transfer_pixel: poses must map Camera->World");
  }
  const CameraPoint pc_a = back_project(k, pa, depth_zw);
  const WorldPoint pw = pose_a.apply(pc_a);
  const CameraPoint pc_b = invert(pose_b).apply(pw);
  return project_to_pixel(k, pc_b);
}

}  // namespace uavmap
