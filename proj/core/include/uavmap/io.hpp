#pragma once

#include <string>
#include <vector>

#include "uavmap/image.hpp"
#include "uavmap/matching.hpp"
#include "uavmap/nav.hpp"
#include "uavmap/terrain.hpp"
#include "uavmap/trajectory.hpp"

namespace uavmap {

// ----- PNG (8-bit gray / RGB / RGBA) -----
ImageU8 read_png(const std::string& path);
void write_png(const std::string& path, const ImageU8& image);

// ----- Sensor streams, CSV -----
// IMU: t,ax,ay,az,gx,gy,gz   GPS: t,x,y,z,sxx,syy,szz (variances, m^2)
std::vector<ImuSample> read_imu_csv(const std::string& path);
void write_imu_csv(const std::string& path, const std::vector<ImuSample>& samples);
std::vector<GpsFix> read_gps_csv(const std::string& path);
void write_gps_csv(const std::string& path, const std::vector<GpsFix>& fixes);

// ----- Trajectories, TUM format: t x y z qx qy qz qw -----
Trajectory read_tum(const std::string& path, Frame from = Frame::Body, Frame to = Frame::World);
void write_tum(const std::string& path, const Trajectory& traj);

// ----- Point clouds -----
// CSV: x,y,z[,intensity]. Binary: magic "RPC1", u64 count, 3 x f64 per point.
PointCloud read_cloud_csv(const std::string& path, Frame frame = Frame::Radar);
void write_cloud_csv(const std::string& path, const PointCloud& cloud);
PointCloud read_cloud_rpc1(const std::string& path, Frame frame = Frame::Radar);
void write_cloud_rpc1(const std::string& path, const PointCloud& cloud);

// ----- Terrain grid, ESRI ASCII grid (NODATA_value -9999) -----
TerrainGrid read_esri_grid(const std::string& path);
void write_esri_grid(const std::string& path, const TerrainGrid& grid);

// ----- Feature sets -----
// One text header line:
//   UFS1 <image_id> <count> <descriptor_length> <L2|HAM> <width> <height>
// followed by little-endian records (f64 x, f64 y, f32 response,
// descriptor_length x f32).
FeatureSet read_features(const std::string& path);
void write_features(const std::string& path, const FeatureSet& set);

// ----- Matches, CSV idx_a,idx_b,distance -----
std::vector<MatchPair> read_matches_csv(const std::string& path);
void write_matches_csv(const std::string& path, const std::vector<MatchPair>& matches);

// ----- ESRI world file (6 ASCII lines) -----
void write_world_file(const std::string& path, double gsd, double top_left_center_x,
                      double top_left_center_y);

}  // namespace uavmap
