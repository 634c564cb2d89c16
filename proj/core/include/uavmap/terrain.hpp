#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "uavmap/geometry.hpp"

namespace uavmap {

struct PointCloud {
  Frame frame = Frame::Radar;
  std::vector<Eigen::Vector3d> points;
  std::vector<float> intensities;  // empty, or one value per point

  size_t size() const { return points.size(); }
};

// Raster of control-point heights, one per cell, cell (0, 0) anchored at
// `origin` (the min-x/min-y corner). Control points sit at cell centers.
struct TerrainGrid {
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  double cell_size = 1.0;
  int cols = 0;
  int rows = 0;
  std::vector<double> heights;       // row-major, row 0 at min y
  std::vector<std::uint8_t> valid;
  double percentile = 0.25;

  size_t index(int col, int row) const { return static_cast<size_t>(row) * cols + col; }
  double height_at(int col, int row) const { return heights[index(col, row)]; }
  bool valid_at(int col, int row) const { return valid[index(col, row)] != 0; }
  bool all_valid() const;
  Eigen::Vector2d cell_center(int col, int row) const {
    return origin + Eigen::Vector2d((col + 0.5) * cell_size, (row + 0.5) * cell_size);
  }
  double width() const { return cols * cell_size; }
  double height() const { return rows * cell_size; }
};

// Applies pose to every point; frame tags must match. Count preserved.
PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& pose);

// One centroid per occupied voxel. Throws ConfigError for voxel <= 0.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);

// Statistical outlier removal: a point is kept iff its mean distance to its
// k nearest neighbors is within global_mean + std_ratio * global_std of that
// statistic. Throws DataError when the cloud has fewer than k+1 points.
PointCloud remove_outliers(const PointCloud& cloud, int k, double std_ratio);

// Percentile control point per cell: the member at sorted-height index
// floor(percentile * (m - 1)). Empty cells are invalid. Throws on an empty
// cloud (DataError) or bad parameters (ConfigError).
TerrainGrid build_grid(const PointCloud& cloud, double cell_size, double percentile);

// Fills every invalid cell with the inverse-distance-weighted (power 2) mean
// of the k nearest valid control points. Throws DataError when no cell is valid.
TerrainGrid fill_invalid(const TerrainGrid& grid, int k_neighbors);

// Bilinear interpolation of the four surrounding control points. Queries up
// to one cell outside the grid clamp to the edge; farther ones throw DataError.
// The grid must be fully valid (run fill_invalid first).
double query_height(const TerrainGrid& grid, double x, double y);

// query_height with (x, y) clamped into the covered area first; never throws
// for out-of-range coordinates. Used when probing beyond radar coverage.
double query_height_clamped(const TerrainGrid& grid, double x, double y);

// Camera height above the terrain directly underneath. Throws NumericError
// when the camera is on or below the terrain.
double altitude_above_ground(const RigidTransform& cam_pose, const TerrainGrid& grid);

// Ground point hit by a descending ray: fixed-point iteration of the height
// query (clamped at the grid edge) against the ray. Throws NumericError for
// rays that do not descend or leave the terrain behind them.
Eigen::Vector3d intersect_ray_terrain(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                                      const TerrainGrid& grid, int iterations = 5);

}  // namespace uavmap
