#pragma once

#include <string>
#include <vector>

#include "uavmap/eval.hpp"
#include "uavmap/nav.hpp"
#include "uavmap/synth.hpp"

namespace uavmap {

enum class MatchMode { BruteForce, BruteForceOpt, KdTree, KdTreeOpt };
enum class PoseSource { Fused, GroundTruth, NoisyGroundTruth };
enum class OrthoPoseSource { Refined, Fused, GroundTruth };

struct MatcherConfig {
  MatchMode mode = MatchMode::BruteForceOpt;
  int blocksize = 120;
  int padding = -1;  // < 0: blocksize / 4
  double ratio = 0.8;
  bool cross_check = true;
  double single_abs_threshold = 0.8;
  int checks = 256;
  int max_per_block = 4;
  bool homogenize = false;
  int overlap = 4;
  bool synthetic_features = true;  // false: detect from rendered frames
  PoseSource pose_source = PoseSource::Fused;

  int effective_padding() const { return padding < 0 ? blocksize / 4 : padding; }
};

struct TerrainConfig {
  double voxel = 0.5;
  double percentile = 0.25;
  double cell_size = 1.0;
  int fill_k = 5;
  int outlier_k = 10;
  double outlier_std_ratio = 2.0;
};

struct OrthoConfig {
  double gsd = 0.0;  // <= 0: auto
  double margin = 0.05;
  bool blur = true;
  bool illumination = true;
  bool transparent = true;
  OrthoPoseSource pose_source = OrthoPoseSource::Fused;
};

struct PipelineConfig {
  SceneSpec scene = SceneSpec::road_like();
  std::string output = "out";
  int threads = 1;
  MatcherConfig matcher;
  TerrainConfig terrain;
  OrthoConfig ortho;
  ProcessNoise ekf;

  // Parses the JSON config; unknown keys anywhere are a ConfigError.
  static PipelineConfig from_json_file(const std::string& path);
  static PipelineConfig from_json_text(const std::string& text);
};

// Every command works under cfg.output and returns the primary artifact path.
// simulate: frames/, imu.csv, gps.csv, radar/, gt trajectories, synthetic
// features + labels, manifest.json.
std::string cmd_simulate(const PipelineConfig& cfg);
// fuse: ekf_trajectory.tum from imu.csv + gps.csv.
std::string cmd_fuse(const PipelineConfig& cfg);
// terrain: terrain.asc from the radar epochs + fused (or ground-truth) poses.
std::string cmd_terrain(const PipelineConfig& cfg);

struct MatchStageResult {
  std::vector<BenchRow> rows;
  double precision = -1.0;  // -1: no labels available
  double recall = -1.0;
  long total_matches = 0;
  std::string benchmark_csv;
  std::string matches_dir;
};
// match: per-pair match CSVs and a benchmark CSV. With benchmark=true the
// full {BF, KD} x {None, Opt., Opt.+Hom.} matrix runs on identical features.
MatchStageResult cmd_match(const PipelineConfig& cfg, bool benchmark = false);

// ortho: orthoimage.png + .pgw + .json from frames, poses, terrain.
std::string cmd_ortho(const PipelineConfig& cfg);

// run_all: simulate -> fuse -> terrain -> match -> refine -> ortho -> eval;
// writes summary.json and returns its path. Aborts with the failing stage
// named in the exception message.
std::string cmd_run_all(const PipelineConfig& cfg);

}  // namespace uavmap
