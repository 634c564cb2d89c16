#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "uavmap/matching.hpp"
#include "uavmap/nav.hpp"
#include "uavmap/ortho.hpp"
#include "uavmap/terrain.hpp"

namespace uavmap {

struct TerrainSpec {
  enum class Type { Flat, Ramp, Hill };
  Type type = Type::Flat;
  double height = 10.0;                    // flat: z = height
  double a = 0.0, b = 0.0, c = 10.0;       // ramp: z = a*x + b*y + c
  double amplitude = 6.0;                  // hill: smooth bump field around `base`
  double wavelength = 120.0;
  double base = 15.0;
};

// True terrain height of the analytic surface.
double terrain_height(const TerrainSpec& spec, double x, double y);

struct TextureSpec {
  enum class Type { Checker, Noise };
  Type type = Type::Checker;
  double period = 4.0;   // checker cell side, meters
  int octaves = 4;       // value-noise octaves
  double scale = 32.0;   // value-noise base wavelength, meters
};

// Lawnmower survey: `rows` straight legs of `row_length`, spaced
// `row_spacing` apart, flown at constant world z = altitude with cosine
// velocity blends in the turns. Frames are captured every frame_interval_m
// along each leg.
struct TrajectorySpec {
  int rows = 1;
  double row_length = 160.0;
  double row_spacing = 30.0;
  double speed = 10.0;
  double altitude = 70.0;
  double frame_interval_m = 8.0;
};

struct NoiseSpec {
  double gps_sigma = 1.0;          // m, per axis
  double accel_density = 0.02;     // m/s^2/sqrt(Hz)
  double gyro_density = 0.002;     // rad/s/sqrt(Hz)
  double radar_sigma = 0.05;       // m, height noise
  double radar_dropout = 0.1;      // fraction of returns dropped
  double descriptor_sigma = 0.05;  // synthetic descriptor perturbation
  double exposure_jitter = 0.15;   // per-frame multiplicative gain spread
};

struct FeatureSpec {
  int count = 2000;
  double distractor_fraction = 0.1;
  double pose_noise_m = 0.3;  // prior-pose translation noise for prediction tests
  int descriptor_length = 64;
};

struct SceneSpec {
  std::uint64_t seed = 42;
  std::string name = "scene";
  TerrainSpec terrain;
  TextureSpec texture;
  TrajectorySpec trajectory;
  NoiseSpec noise;
  FeatureSpec features;
  int image_width = 480;
  int image_height = 270;
  double hfov_deg = 55.0;
  double imu_rate = 100.0;
  double gps_rate = 1.0;
  double radar_rate = 10.0;
  int radar_points_per_epoch = 150;
  double radar_swath = 40.0;  // sampling disk radius under the platform
  int marker_count = 5;
  double marker_size = 2.5;
  bool render_frames = true;

  CameraIntrinsics intrinsics() const;

  // Short low-relief scene, 21 frames, rendered images.
  static SceneSpec road_like();
  // Longer high-relief scene, ~55 frames.
  static SceneSpec hill_like();
  // road_like trajectory at full 1920x1080 matching geometry, no rendered
  // images; used for matcher benchmarks with synthetic features.
  static SceneSpec bench_road();
};

struct TimedCloud {
  double t = 0.0;
  PointCloud cloud;  // radar frame
};

struct GroundTruth {
  Trajectory body_trajectory;    // at IMU timestamps
  Trajectory camera_trajectory;  // at frame timestamps (Camera -> World)
  std::vector<double> frame_times;
  RigidTransform t_camera_body;  // Camera -> Body
  RigidTransform t_radar_body;   // Radar -> Body
  std::vector<Eigen::Vector3d> markers;
};

struct SceneData {
  SceneSpec spec;
  GroundTruth gt;
  std::vector<FrameRecord> frames;  // true poses; images empty unless render_frames
  std::vector<TimedCloud> radar;
  std::vector<ImuSample> imu;
  std::vector<GpsFix> gps;
};

// Deterministic scene generation: every output is a pure function of the
// spec. Frames are rendered by per-pixel ray casting against the analytic
// terrain; radar returns sample the true surface plus noise; GPS/IMU are the
// true kinematics plus the spec'd noise. Throws DataError when the
// trajectory dips below the terrain.
SceneData gen_scene(const SceneSpec& spec);

// Texture (with markers stamped in) sampled at a ground point; used both by
// the frame renderer and by test oracles.
Eigen::Vector3d texture_color(const SceneSpec& spec, const std::vector<Eigen::Vector3d>& markers,
                              double x, double y);

struct FeatureTruth {
  std::vector<FeatureSet> sets;  // one per frame
  // (frame_i, frame_j) -> true (index in i, index in j) pairs
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> labels;
  std::vector<std::vector<int>> world_ids;  // per frame, world-point id per keypoint (-1 = distractor)
  int world_point_count = 0;
};

// Synthetic ground-truth features: world ground points sampled over the
// covered area get one keypoint per observing frame and a shared random unit
// descriptor perturbed per view; distractor keypoints carry independent
// descriptors. Labels list the true pairs for every overlapping frame pair.
FeatureTruth gen_feature_truth(const SceneData& scene, int n_features,
                               double descriptor_sigma, double distractor_fraction);

}  // namespace uavmap
