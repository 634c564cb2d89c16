#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "uavmap/geometry.hpp"
#include "uavmap/image.hpp"
#include "uavmap/terrain.hpp"

namespace uavmap {

enum class DescriptorMetric { L2, Hamming };

struct Keypoint {
  PixelPoint position = PixelPoint::Zero();
  float response = 0.0f;
};

struct FeatureSet {
  std::string image_id;
  int width = 0;
  int height = 0;
  int descriptor_length = 0;
  DescriptorMetric metric = DescriptorMetric::L2;
  std::vector<Keypoint> keypoints;
  std::vector<float> descriptors;  // row-major, keypoints.size() x descriptor_length

  int size() const { return static_cast<int>(keypoints.size()); }
  const float* descriptor(int i) const {
    return descriptors.data() + static_cast<size_t>(i) * descriptor_length;
  }
  float* descriptor(int i) {
    return descriptors.data() + static_cast<size_t>(i) * descriptor_length;
  }
};

struct MatchPair {
  int index_a = -1;
  int index_b = -1;
  double distance = 0.0;
};

struct MatchParams {
  double ratio = 0.8;                 // Lowe ratio: keep if best < ratio * second
  bool cross_check = true;            // mutual-best filter
  double single_abs_threshold = 0.8;  // gate when only one candidate exists
};

double descriptor_distance(const FeatureSet& a, int i, const FeatureSet& b, int j);

// Harris-style corners with non-maximum suppression over a 5 px radius and
// 8x8 mean-subtracted, L2-normalized patch descriptors (length 64, metric L2).
// Deterministic. Throws DataError for images smaller than 16x16.
FeatureSet detect_and_describe(const ImageF& gray, int max_features);

// Predicted pixel of a keypoint of image A in image B via terrain depth z_w.
// May fall outside image B; callers clip.
PixelPoint predict_location(const Keypoint& kp, const CameraIntrinsics& k,
                            const RigidTransform& pose_a, const RigidTransform& pose_b,
                            double z_w);

struct PredictedPoint {
  int index = -1;           // index into the A feature set
  PixelPoint position = PixelPoint::Zero();  // predicted position in B pixels
};

// Partition of image B's pixel plane into blocksize^2 cells. A points are
// bucketed by predicted position, B points by their own position; candidate
// lookup covers every block intersecting the home block padded by `padding`
// on each side. A points predicted farther than `padding` outside image B
// are dropped.
class BlockGrid {
 public:
  BlockGrid(const std::vector<PredictedPoint>& predicted_a, const FeatureSet& features_b,
            int blocksize, int padding, int image_width, int image_height);

  bool kept(int index_a) const;
  // B indices whose home block intersects the padded window of index_a's
  // home block; empty for dropped A points. Sorted ascending.
  const std::vector<int>& candidates(int index_a) const;

  int blocksize() const { return blocksize_; }
  int padding() const { return padding_; }
  // A indices grouped by home block, for per-block search backends.
  const std::unordered_map<long long, std::vector<int>>& blocks_a() const { return a_blocks_; }
  const std::vector<int>& window_b(long long block_key) const;

 private:
  int blocksize_ = 0;
  int padding_ = 0;
  std::unordered_map<long long, std::vector<int>> b_blocks_;   // home block -> B indices
  std::unordered_map<long long, std::vector<int>> a_blocks_;   // home block -> kept A indices
  std::unordered_map<long long, std::vector<int>> windows_;    // home block -> B candidates
  std::vector<long long> a_home_;                              // A index -> block key (or kDropped)
  std::vector<int> a_index_map_;
  static const std::vector<int> kEmpty;

  friend long long block_key_of(const BlockGrid&, const PixelPoint&);
};

// Block-restricted matching: per A point, 2-NN among its window candidates,
// Lowe ratio + optional mutual-best cross-check, one-to-one output sorted by
// index_a. `checks` only applies to the kd-tree backend (<= 0 means exact).
enum class BlockSearch { BruteForce, KdTree };
std::vector<MatchPair> match_block(const FeatureSet& a, const FeatureSet& b,
                                   const BlockGrid& grid, const MatchParams& params = {},
                                   BlockSearch backend = BlockSearch::BruteForce,
                                   int checks = 0);

// Exhaustive baseline with the same selection policy as match_block.
std::vector<MatchPair> match_bf(const FeatureSet& a, const FeatureSet& b,
                                const MatchParams& params = {});

// Approximate 2-NN via a kd-tree over B descriptors with a best-bin-first
// search bounded by `checks` leaf visits (<= 0 searches exactly and then
// equals match_bf). Cross-check runs a reverse tree over A. L2 only; throws
// ConfigError for Hamming sets.
std::vector<MatchPair> match_kdtree(const FeatureSet& a, const FeatureSet& b,
                                    const MatchParams& params = {}, int checks = 0);

// Caps matches per A-side home block: keeps the max_per_block smallest
// distances (ties by lower index_a), preserving input order otherwise.
std::vector<MatchPair> homogenize(const std::vector<MatchPair>& matches,
                                  const FeatureSet& features_a, int blocksize,
                                  int max_per_block);

struct RefineResult {
  RigidTransform pose;
  double rms = 0.0;  // unweighted RMS reprojection residual, pixels
  int iterations = 0;
};

// Gauss-Newton refinement of camera B's pose: A keypoints are lifted to 3D
// by intersecting their rays with the terrain, then the 6-dof pose of B is
// optimized under a Huber loss (threshold huber_px). Up to 20 iterations or
// step norm < 1e-8; a step that fails to reduce the residual is retried with
// halved length, and three consecutive failed iterations raise NumericError.
// Throws DataError with fewer than 6 matches.
RefineResult refine_pose(const std::vector<MatchPair>& matches, const FeatureSet& features_a,
                         const FeatureSet& features_b, const TerrainGrid& grid,
                         const CameraIntrinsics& k, const RigidTransform& pose_a,
                         const RigidTransform& initial_pose_b, double huber_px = 2.0);

}  // namespace uavmap
