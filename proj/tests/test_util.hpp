#pragma once

#include <functional>
#include <random>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "uavmap/geometry.hpp"
#include "uavmap/terrain.hpp"

namespace testutil {

inline std::mt19937_64 rng(unsigned long long seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline double gauss(std::mt19937_64& g, double sigma = 1.0) {
  return std::normal_distribution<double>(0.0, sigma)(g);
}

inline Eigen::Quaterniond random_unit_quaternion(std::mt19937_64& g) {
  Eigen::Quaterniond q(gauss(g), gauss(g), gauss(g), gauss(g));
  while (q.norm() < 1e-6) {
    q = Eigen::Quaterniond(gauss(g), gauss(g), gauss(g), gauss(g));
  }
  q.normalize();
  return q;
}

inline Eigen::Vector3d random_vec(std::mt19937_64& g, double range) {
  return Eigen::Vector3d(uniform(g, -range, range), uniform(g, -range, range),
                         uniform(g, -range, range));
}

inline uavmap::RigidTransform random_transform(std::mt19937_64& g, uavmap::Frame from,
                                               uavmap::Frame to, double range = 10.0) {
  return uavmap::RigidTransform(random_unit_quaternion(g), random_vec(g, range), from, to);
}

// Camera->World pose of a camera looking straight down (camera +Z along world -Z),
// optionally yawed about world Z.
inline uavmap::RigidTransform nadir_camera_pose(const Eigen::Vector3d& position,
                                                double yaw_rad = 0.0) {
  Eigen::Quaterniond q = Eigen::Quaterniond(Eigen::AngleAxisd(yaw_rad, Eigen::Vector3d::UnitZ())) *
                         Eigen::Quaterniond(Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitX()));
  return uavmap::RigidTransform(q, position, uavmap::Frame::Camera, uavmap::Frame::World);
}

// Fully valid grid with control points sampled from an analytic surface.
inline uavmap::TerrainGrid analytic_grid(double x0, double y0, int cols, int rows, double cell,
                                         const std::function<double(double, double)>& f) {
  uavmap::TerrainGrid g;
  g.origin = Eigen::Vector2d(x0, y0);
  g.cell_size = cell;
  g.cols = cols;
  g.rows = rows;
  g.heights.resize(static_cast<size_t>(cols) * rows);
  g.valid.assign(g.heights.size(), 1);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Eigen::Vector2d p = g.cell_center(c, r);
      g.heights[g.index(c, r)] = f(p.x(), p.y());
    }
  }
  return g;
}

}  // namespace testutil
