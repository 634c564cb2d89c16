#include "uavmap/terrain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "spatial_kdtree.hpp"

namespace uavmap {

namespace {

struct VoxelKey {
  long long x, y, z;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  size_t operator()(const VoxelKey& k) const {
    size_t h = std::hash<long long>()(k.x);
    h ^= std::hash<long long>()(k.y) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<long long>()(k.z) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

long long floor_div(double v, double cell) {
  return static_cast<long long>(std::floor(v / cell));
}

}  // namespace

bool TerrainGrid::all_valid() const {
  return std::all_of(valid.begin(), valid.end(), [](std::uint8_t v) { return v != 0; });
}

PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& pose) {
  if (pose.from_frame != cloud.frame) {
    throw DataError("transform_cloud: cloud frame does not match pose from-frame");
  }
  PointCloud out;
  out.frame = pose.to_frame;
  out.intensities = cloud.intensities;
  out.points.reserve(cloud.points.size());
  for (const Eigen::Vector3d& p : cloud.points) {
    out.points.push_back(pose.apply(p));
  }
  return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0.0)) {
    throw ConfigError("voxel_downsample: voxel size must be positive");
  }
  std::unordered_map<VoxelKey, std::pair<Eigen::Vector3d, int>, VoxelKeyHash> buckets;
  std::vector<VoxelKey> order;  // first-seen voxel order keeps output deterministic
  buckets.reserve(cloud.points.size());
  for (const Eigen::Vector3d& p : cloud.points) {
    const VoxelKey key{floor_div(p.x(), voxel), floor_div(p.y(), voxel),
                       floor_div(p.z(), voxel)};
    auto [it, inserted] = buckets.try_emplace(key, Eigen::Vector3d::Zero(), 0);
    if (inserted) {
      order.push_back(key);
    }
    it->second.first += p;
    it->second.second += 1;
  }
  PointCloud out;
  out.frame = cloud.frame;
  out.points.reserve(order.size());
  for (const VoxelKey& key : order) {
    const auto& [sum, count] = buckets.at(key);
    out.points.push_back(sum / count);
  }
  return out;
}

PointCloud remove_outliers(const PointCloud& cloud, int k, double std_ratio) {
  if (k < 1) {
    throw ConfigError("remove_outliers: k must be >= 1");
  }
  const int n = static_cast<int>(cloud.points.size());
  if (n <= k) {
    throw DataError("remove_outliers: cloud too small for k neighbors");
  }

  detail::SpatialKdTree tree(cloud.points);
  std::vector<double> mean_dist(n);
  for (int i = 0; i < n; ++i) {
    const auto nn = tree.knn(cloud.points[i], k, i);
    double sum = 0.0;
    for (const auto& nb : nn) {
      sum += std::sqrt(nb.dist2);
    }
    mean_dist[i] = sum / static_cast<double>(nn.size());
  }

  double mean = 0.0;
  for (double d : mean_dist) mean += d;
  mean /= n;
  double var = 0.0;
  for (double d : mean_dist) var += (d - mean) * (d - mean);
  const double stddev = std::sqrt(var / n);
  const double cutoff = mean + std_ratio * stddev;

  PointCloud out;
  out.frame = cloud.frame;
  const bool has_intensity = cloud.intensities.size() == cloud.points.size();
  for (int i = 0; i < n; ++i) {
    if (mean_dist[i] <= cutoff) {
      out.points.push_back(cloud.points[i]);
      if (has_intensity) {
        out.intensities.push_back(cloud.intensities[i]);
      }
    }
  }
  return out;
}

TerrainGrid build_grid(const PointCloud& cloud, double cell_size, double percentile) {
  if (!(cell_size > 0.0)) {
    throw ConfigError("build_grid: cell size must be positive");
  }
  if (percentile < 0.0 || percentile > 1.0) {
    throw ConfigError("build_grid: percentile must lie in [0, 1]");
  }
  if (cloud.points.empty()) {
    throw DataError("build_grid: empty cloud");
  }

  Eigen::Vector2d lo(cloud.points[0].x(), cloud.points[0].y());
  Eigen::Vector2d hi = lo;
  for (const Eigen::Vector3d& p : cloud.points) {
    lo = lo.cwiseMin(p.head<2>());
    hi = hi.cwiseMax(p.head<2>());
  }

  TerrainGrid grid;
  grid.origin = lo;
  grid.cell_size = cell_size;
  grid.percentile = percentile;
  grid.cols = static_cast<int>(std::floor((hi.x() - lo.x()) / cell_size)) + 1;
  grid.rows = static_cast<int>(std::floor((hi.y() - lo.y()) / cell_size)) + 1;
  grid.heights.assign(static_cast<size_t>(grid.cols) * grid.rows, 0.0);
  grid.valid.assign(grid.heights.size(), 0);

  std::vector<std::vector<double>> members(grid.heights.size());
  for (const Eigen::Vector3d& p : cloud.points) {
    const int col = std::min(static_cast<int>(std::floor((p.x() - lo.x()) / cell_size)),
                             grid.cols - 1);
    const int row = std::min(static_cast<int>(std::floor((p.y() - lo.y()) / cell_size)),
                             grid.rows - 1);
    members[grid.index(col, row)].push_back(p.z());
  }

  for (size_t i = 0; i < members.size(); ++i) {
    auto& m = members[i];
    if (m.empty()) {
      continue;  // stays invalid
    }
    std::sort(m.begin(), m.end());
    const size_t idx = static_cast<size_t>(std::floor(percentile * (m.size() - 1)));
    grid.heights[i] = m[idx];
    grid.valid[i] = 1;
  }
  return grid;
}

TerrainGrid fill_invalid(const TerrainGrid& grid, int k_neighbors) {
  if (k_neighbors < 1) {
    throw ConfigError("fill_invalid: k_neighbors must be >= 1");
  }
  std::vector<Eigen::Vector3d> valid_centers;
  std::vector<double> valid_heights;
  for (int row = 0; row < grid.rows; ++row) {
    for (int col = 0; col < grid.cols; ++col) {
      if (grid.valid_at(col, row)) {
        const Eigen::Vector2d c = grid.cell_center(col, row);
        valid_centers.emplace_back(c.x(), c.y(), 0.0);
        valid_heights.push_back(grid.height_at(col, row));
      }
    }
  }
  if (valid_centers.empty()) {
    throw DataError("fill_invalid: grid has no valid cells");
  }

  TerrainGrid out = grid;
  detail::SpatialKdTree tree(valid_centers);
  const int k = std::min<int>(k_neighbors, static_cast<int>(valid_centers.size()));
  for (int row = 0; row < grid.rows; ++row) {
    for (int col = 0; col < grid.cols; ++col) {
      if (grid.valid_at(col, row)) {
        continue;
      }
      const Eigen::Vector2d c = grid.cell_center(col, row);
      const auto nn = tree.knn(Eigen::Vector3d(c.x(), c.y(), 0.0), k);
      double wsum = 0.0, hsum = 0.0;
      bool exact = false;
      for (const auto& nb : nn) {
        if (nb.dist2 < 1e-24) {  // cannot happen for distinct cell centers; safety
          out.heights[out.index(col, row)] = valid_heights[nb.index];
          exact = true;
          break;
        }
        const double w = 1.0 / nb.dist2;  // inverse distance, power 2
        wsum += w;
        hsum += w * valid_heights[nb.index];
      }
      if (!exact) {
        out.heights[out.index(col, row)] = hsum / wsum;
      }
      out.valid[out.index(col, row)] = 1;
    }
  }
  return out;
}

double query_height(const TerrainGrid& grid, double x, double y) {
  if (grid.cols <= 0 || grid.rows <= 0) {
    throw DataError("query_height: empty grid");
  }
  if (!grid.all_valid()) {
    throw DataError("query_height: grid has invalid cells; run fill_invalid first");
  }
  const double margin = grid.cell_size;
  if (x < grid.origin.x() - margin || x > grid.origin.x() + grid.width() + margin ||
      y < grid.origin.y() - margin || y > grid.origin.y() + grid.height() + margin) {
    throw DataError("query_height: query more than one cell outside the grid");
  }
  // Cell-center coordinates, clamped to the control-point hull.
  double u = (x - grid.origin.x()) / grid.cell_size - 0.5;
  double v = (y - grid.origin.y()) / grid.cell_size - 0.5;
  u = std::clamp(u, 0.0, static_cast<double>(grid.cols - 1));
  v = std::clamp(v, 0.0, static_cast<double>(grid.rows - 1));
  const int c0 = std::min(static_cast<int>(u), grid.cols - 1);
  const int r0 = std::min(static_cast<int>(v), grid.rows - 1);
  const int c1 = std::min(c0 + 1, grid.cols - 1);
  const int r1 = std::min(r0 + 1, grid.rows - 1);
  const double fu = u - c0;
  const double fv = v - r0;
  const double h00 = grid.height_at(c0, r0);
  const double h10 = grid.height_at(c1, r0);
  const double h01 = grid.height_at(c0, r1);
  const double h11 = grid.height_at(c1, r1);
  return (1 - fv) * ((1 - fu) * h00 + fu * h10) + fv * ((1 - fu) * h01 + fu * h11);
}

double query_height_clamped(const TerrainGrid& grid, double x, double y) {
  x = std::clamp(x, grid.origin.x(), grid.origin.x() + grid.width());
  y = std::clamp(y, grid.origin.y(), grid.origin.y() + grid.height());
  return query_height(grid, x, y);
}

double altitude_above_ground(const RigidTransform& cam_pose, const TerrainGrid& grid) {
  const Eigen::Vector3d& c = cam_pose.translation;
  const double ground = query_height(grid, c.x(), c.y());
  const double altitude = c.z() - ground;
  if (!(altitude > 0.0)) {
    throw NumericError("altitude_above_ground: camera on or below terrain");
  }
  return altitude;
}

Eigen::Vector3d intersect_ray_terrain(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                                      const TerrainGrid& grid, int iterations) {
  if (dir.z() >= -1e-9) {
    throw NumericError("intersect_ray_terrain: ray does not descend");
  }
  double z = query_height_clamped(grid, origin.x(), origin.y());
  double s = 0.0;
  for (int i = 0; i < iterations; ++i) {
    s = (z - origin.z()) / dir.z();
    if (s <= 0.0) {
      throw NumericError("intersect_ray_terrain: terrain above ray origin");
    }
    const Eigen::Vector3d p = origin + s * dir;
    z = query_height_clamped(grid, p.x(), p.y());
  }
  s = (z - origin.z()) / dir.z();
  return origin + s * dir;
}

}  // namespace uavmap
