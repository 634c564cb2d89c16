#include "uavmap/trajectory.hpp"

#include <algorithm>
#include <string>

namespace uavmap {

void check_time_sorted(const Trajectory& traj, const char* what) {
  for (size_t i = 1; i < traj.size(); ++i) {
    if (!(traj[i].t > traj[i - 1].t)) {
      throw DataError(std::string(what) + ": timestamps not strictly increasing at index " +
                      std::to_string(i));
    }
  }
}

RigidTransform interpolate_pose(const Trajectory& traj, double t) {
  if (traj.empty()) {
    throw DataError("interpolate_pose: empty trajectory");
  }
  if (t <= traj.front().t) {
    return traj.front().pose;
  }
  if (t >= traj.back().t) {
    return traj.back().pose;
  }
  const auto it = std::lower_bound(traj.begin(), traj.end(), t,
                                   [](const TimedPose& p, double v) { return p.t < v; });
  const TimedPose& hi = *it;
  const TimedPose& lo = *(it - 1);
  const double alpha = (t - lo.t) / (hi.t - lo.t);
  const Eigen::Quaterniond q = lo.pose.rotation.slerp(alpha, hi.pose.rotation);
  const Eigen::Vector3d p =
      (1.0 - alpha) * lo.pose.translation + alpha * hi.pose.translation;
  return RigidTransform(q, p, lo.pose.from_frame, lo.pose.to_frame);
}

}  // namespace uavmap
