#pragma once

#include <string>
#include <utility>
#include <vector>

#include "uavmap/matching.hpp"
#include "uavmap/trajectory.hpp"

namespace uavmap {

// Greedy nearest-timestamp association: candidate pairs within max_dt are
// accepted in order of ascending |dt| (ties by indices), each pose used at
// most once. Throws DataError when the time ranges do not overlap at all.
std::vector<std::pair<int, int>> associate(const Trajectory& a, const Trajectory& b,
                                           double max_dt);

struct AlignResult {
  RigidTransform transform;  // maps est into ref
  double scale = 1.0;
  double rms = 0.0;          // residual of the aligned points
};

// Closed-form least-squares SE(3) (optionally Sim(3)) alignment minimizing
// sum ||ref - T * est||^2. Throws DataError for fewer than 3 pairs or a
// degenerate (collinear/coincident) configuration.
AlignResult umeyama_align(const std::vector<Eigen::Vector3d>& est,
                          const std::vector<Eigen::Vector3d>& ref,
                          bool with_scale = false);

struct AteResult {
  double trans_rmse = 0.0, trans_mean = 0.0, trans_median = 0.0, trans_max = 0.0;  // m
  double rot_rmse_deg = 0.0, rot_mean_deg = 0.0, rot_max_deg = 0.0;                // deg
  RigidTransform alignment;
  int pairs = 0;
};

// Absolute trajectory error after Umeyama alignment of the associated
// positions; rotation errors are geodesic angles of the aligned attitudes.
AteResult compute_ate(const Trajectory& est, const Trajectory& gt, double max_dt = 0.02);

struct MatchEval {
  double precision = 1.0;
  double recall = 0.0;
  int correct = 0;
  int total_matches = 0;
  int total_labels = 0;
};

// Precision/recall of a match list against ground-truth pair labels. An
// empty match list reports precision 1.0 (with count 0) and recall 0.
// Throws DataError for empty labels.
MatchEval eval_matches(const std::vector<MatchPair>& matches,
                       const std::vector<std::pair<int, int>>& labels);

struct BenchRow {
  std::string scene;
  std::string matcher;  // BF | KD
  std::string variant;  // None | Opt. | Opt.+Hom.
  double extract_s = 0.0;
  double match_s = 0.0;
  double refine_s = 0.0;
  double total_s = 0.0;
  long matches = 0;
  long points3d = 0;
};

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);

}  // namespace uavmap
