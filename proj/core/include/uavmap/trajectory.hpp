#pragma once

#include <vector>

#include "uavmap/geometry.hpp"

namespace uavmap {

struct TimedPose {
  double t = 0.0;
  RigidTransform pose;
};

// Timestamped poses, strictly increasing in t.
using Trajectory = std::vector<TimedPose>;

// Pose at time t by linear position interpolation and quaternion slerp
// between the bracketing samples; t is clamped to the trajectory span.
// Throws DataError on an empty trajectory.
RigidTransform interpolate_pose(const Trajectory& traj, double t);

// Throws DataError unless timestamps are strictly increasing.
void check_time_sorted(const Trajectory& traj, const char* what);

}  // namespace uavmap
