#include "uavmap/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "descriptor_kdtree.hpp"

namespace uavmap {

namespace {

constexpr long long kDropped = std::numeric_limits<long long>::min();
constexpr int kKeyOffset = 1 << 20;

long long pack_block(int bx, int by) {
  return ((static_cast<long long>(bx) + kKeyOffset) << 21) |
         (static_cast<long long>(by) + kKeyOffset);
}

int floor_block(double v, int blocksize) {
  return static_cast<int>(std::floor(v / blocksize));
}

void check_compatible(const FeatureSet& a, const FeatureSet& b) {
  if (a.descriptor_length != b.descriptor_length || a.metric != b.metric) {
    throw DataError("matching: feature sets have incompatible descriptors");
  }
}

double hamming(const float* a, const float* b, int dim) {
  int count = 0;
  for (int i = 0; i < dim; ++i) {
    count += (a[i] != b[i]) ? 1 : 0;
  }
  return static_cast<double>(count);
}

// Comparable distance: squared L2 or Hamming count.
double dist_comparable(const FeatureSet& a, int i, const FeatureSet& b, int j) {
  if (a.metric == DescriptorMetric::L2) {
    return detail::l2_sq(a.descriptor(i), b.descriptor(j), a.descriptor_length);
  }
  return hamming(a.descriptor(i), b.descriptor(j), a.descriptor_length);
}

double to_output_distance(DescriptorMetric metric, double comparable) {
  return metric == DescriptorMetric::L2 ? std::sqrt(comparable) : comparable;
}

struct ForwardResult {
  detail::TwoNn nn;
  bool searched = false;
};

bool passes_gate(const detail::TwoNn& nn, const MatchParams& p, DescriptorMetric metric) {
  if (nn.best < 0) {
    return false;
  }
  if (std::isinf(nn.d2)) {
    const double thresh = metric == DescriptorMetric::L2
                              ? p.single_abs_threshold * p.single_abs_threshold
                              : p.single_abs_threshold;
    return nn.d1 < thresh;
  }
  const double r = metric == DescriptorMetric::L2 ? p.ratio * p.ratio : p.ratio;
  return nn.d1 < r * nn.d2;
}

// Shared selection policy: Lowe gate, optional mutual-best cross-check,
// one-to-one output sorted by index_a.
std::vector<MatchPair> select_matches(const std::vector<ForwardResult>& fwd,
                                      const std::vector<detail::TwoNn>& rev,
                                      const MatchParams& params, DescriptorMetric metric) {
  std::vector<MatchPair> passing;
  for (int a = 0; a < static_cast<int>(fwd.size()); ++a) {
    if (!fwd[a].searched || !passes_gate(fwd[a].nn, params, metric)) {
      continue;
    }
    const int b = fwd[a].nn.best;
    if (params.cross_check && rev[b].best != a) {
      continue;
    }
    passing.push_back({a, b, fwd[a].nn.d1});
  }
  if (!params.cross_check) {
    // Greedy one-to-one by ascending distance, ties by index_a.
    std::sort(passing.begin(), passing.end(), [](const MatchPair& x, const MatchPair& y) {
      return x.distance != y.distance ? x.distance < y.distance : x.index_a < y.index_a;
    });
    std::vector<MatchPair> unique;
    std::vector<std::uint8_t> used;
    for (const MatchPair& m : passing) {
      if (m.index_b >= static_cast<int>(used.size())) {
        used.resize(m.index_b + 1, 0);
      }
      if (!used[m.index_b]) {
        used[m.index_b] = 1;
        unique.push_back(m);
      }
    }
    passing = std::move(unique);
  }
  std::sort(passing.begin(), passing.end(),
            [](const MatchPair& x, const MatchPair& y) { return x.index_a < y.index_a; });
  for (MatchPair& m : passing) {
    m.distance = to_output_distance(metric, m.distance);
  }
  return passing;
}

}  // namespace

double descriptor_distance(const FeatureSet& a, int i, const FeatureSet& b, int j) {
  check_compatible(a, b);
  return to_output_distance(a.metric, dist_comparable(a, i, b, j));
}

PixelPoint predict_location(const Keypoint& kp, const CameraIntrinsics& k,
                            const RigidTransform& pose_a, const RigidTransform& pose_b,
                            double z_w) {
  return transfer_pixel(kp.position, k, pose_a, pose_b, z_w);
}

const std::vector<int> BlockGrid::kEmpty;

BlockGrid::BlockGrid(const std::vector<PredictedPoint>& predicted_a,
                     const FeatureSet& features_b, int blocksize, int padding,
                     int image_width, int image_height) {
  if (blocksize < 1) {
    throw ConfigError("BlockGrid: blocksize must be >= 1");
  }
  if (padding < 0) {
    throw ConfigError("BlockGrid: padding must be >= 0");
  }
  blocksize_ = blocksize;
  padding_ = padding;

  for (int j = 0; j < features_b.size(); ++j) {
    const PixelPoint& p = features_b.keypoints[j].position;
    const long long key = pack_block(floor_block(p.x(), blocksize), floor_block(p.y(), blocksize));
    b_blocks_[key].push_back(j);
  }

  int max_index = -1;
  for (const PredictedPoint& p : predicted_a) {
    max_index = std::max(max_index, p.index);
  }
  a_home_.assign(max_index + 1, kDropped);

  for (const PredictedPoint& p : predicted_a) {
    const double x = p.position.x();
    const double y = p.position.y();
    if (x < -padding || x > image_width + padding || y < -padding || y > image_height + padding) {
      continue;  // predicted too far outside image B
    }
    const long long key = pack_block(floor_block(x, blocksize), floor_block(y, blocksize));
    a_home_[p.index] = key;
    a_blocks_[key].push_back(p.index);
  }
  for (auto& [key, indices] : a_blocks_) {
    std::sort(indices.begin(), indices.end());
  }

  // One candidate list per occupied A home block: all B points whose home
  // block intersects the (blocksize + 2*padding)^2 window.
  for (const auto& [key, indices] : a_blocks_) {
    const int bx = static_cast<int>((key >> 21) - kKeyOffset);
    const int by = static_cast<int>((key & ((1 << 21) - 1)) - kKeyOffset);
    const int x0 = floor_block(static_cast<double>(bx) * blocksize - padding, blocksize);
    const int x1 = floor_block(static_cast<double>(bx + 1) * blocksize - 1 + padding, blocksize);
    const int y0 = floor_block(static_cast<double>(by) * blocksize - padding, blocksize);
    const int y1 = floor_block(static_cast<double>(by + 1) * blocksize - 1 + padding, blocksize);
    std::vector<int>& window = windows_[key];
    for (int yy = y0; yy <= y1; ++yy) {
      for (int xx = x0; xx <= x1; ++xx) {
        const auto it = b_blocks_.find(pack_block(xx, yy));
        if (it != b_blocks_.end()) {
          window.insert(window.end(), it->second.begin(), it->second.end());
        }
      }
    }
    std::sort(window.begin(), window.end());
  }
}

bool BlockGrid::kept(int index_a) const {
  return index_a >= 0 && index_a < static_cast<int>(a_home_.size()) &&
         a_home_[index_a] != kDropped;
}

const std::vector<int>& BlockGrid::candidates(int index_a) const {
  if (!kept(index_a)) {
    return kEmpty;
  }
  const auto it = windows_.find(a_home_[index_a]);
  return it == windows_.end() ? kEmpty : it->second;
}

const std::vector<int>& BlockGrid::window_b(long long block_key) const {
  const auto it = windows_.find(block_key);
  return it == windows_.end() ? kEmpty : it->second;
}

namespace {

// Symmetric reverse window: kept A indices whose home-block window covers the
// given B home block. Used by the kd backend's cross-check pass.
std::vector<int> window_a_for_b_block(const BlockGrid& grid, int bx, int by) {
  const int bs = grid.blocksize();
  const int pad = grid.padding();
  const int x0 = floor_block(static_cast<double>(bx) * bs - pad, bs);
  const int x1 = floor_block(static_cast<double>(bx + 1) * bs - 1 + pad, bs);
  const int y0 = floor_block(static_cast<double>(by) * bs - pad, bs);
  const int y1 = floor_block(static_cast<double>(by + 1) * bs - 1 + pad, bs);
  std::vector<int> out;
  for (int yy = y0; yy <= y1; ++yy) {
    for (int xx = x0; xx <= x1; ++xx) {
      const auto it = grid.blocks_a().find(pack_block(xx, yy));
      if (it != grid.blocks_a().end()) {
        out.insert(out.end(), it->second.begin(), it->second.end());
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<float> gather_descriptors(const FeatureSet& set, const std::vector<int>& indices) {
  std::vector<float> buf(indices.size() * static_cast<size_t>(set.descriptor_length));
  for (size_t i = 0; i < indices.size(); ++i) {
    const float* src = set.descriptor(indices[i]);
    std::copy(src, src + set.descriptor_length,
              buf.begin() + i * static_cast<size_t>(set.descriptor_length));
  }
  return buf;
}

}  // namespace

std::vector<MatchPair> match_block(const FeatureSet& a, const FeatureSet& b,
                                   const BlockGrid& grid, const MatchParams& params,
                                   BlockSearch backend, int checks) {
  check_compatible(a, b);
  std::vector<ForwardResult> fwd(a.size());
  std::vector<detail::TwoNn> rev(b.size());

  if (backend == BlockSearch::BruteForce) {
    for (int i = 0; i < a.size(); ++i) {
      if (!grid.kept(i)) {
        continue;
      }
      fwd[i].searched = true;
      for (int j : grid.candidates(i)) {
        const double d = dist_comparable(a, i, b, j);
        fwd[i].nn.offer(d, j);
        rev[j].offer(d, i);
      }
    }
    return select_matches(fwd, rev, params, a.metric);
  }

  // kd backend: one tree per occupied home block over its window candidates.
  if (a.metric != DescriptorMetric::L2) {
    throw ConfigError("match_block: kd backend requires the L2 metric");
  }
  for (const auto& [key, a_indices] : grid.blocks_a()) {
    const std::vector<int>& window = grid.window_b(key);
    if (window.empty()) {
      for (int i : a_indices) {
        fwd[i].searched = true;
      }
      continue;
    }
    const std::vector<float> buf = gather_descriptors(b, window);
    const detail::DescriptorKdTree tree(buf.data(), static_cast<int>(window.size()),
                                        b.descriptor_length);
    for (int i : a_indices) {
      const detail::TwoNn local = tree.search(a.descriptor(i), checks);
      fwd[i].searched = true;
      if (local.best >= 0) {
        fwd[i].nn.offer(local.d1, window[local.best]);
        if (local.second >= 0) {
          fwd[i].nn.offer(local.d2, window[local.second]);
        }
      }
    }
  }
  if (params.cross_check) {
    // Reverse direction: per B home block, kd-tree over the symmetric A window.
    std::unordered_map<long long, std::vector<int>> b_by_block;
    for (int j = 0; j < b.size(); ++j) {
      const PixelPoint& p = b.keypoints[j].position;
      b_by_block[pack_block(floor_block(p.x(), grid.blocksize()),
                            floor_block(p.y(), grid.blocksize()))]
          .push_back(j);
    }
    for (const auto& [key, b_indices] : b_by_block) {
      const int bx = static_cast<int>((key >> 21) - kKeyOffset);
      const int by = static_cast<int>((key & ((1 << 21) - 1)) - kKeyOffset);
      const std::vector<int> window = window_a_for_b_block(grid, bx, by);
      if (window.empty()) {
        continue;
      }
      const std::vector<float> buf = gather_descriptors(a, window);
      const detail::DescriptorKdTree tree(buf.data(), static_cast<int>(window.size()),
                                          a.descriptor_length);
      for (int j : b_indices) {
        const detail::TwoNn local = tree.search(b.descriptor(j), checks);
        if (local.best >= 0) {
          rev[j].offer(local.d1, window[local.best]);
        }
      }
    }
  }
  return select_matches(fwd, rev, params, a.metric);
}

std::vector<MatchPair> match_bf(const FeatureSet& a, const FeatureSet& b,
                                const MatchParams& params) {
  check_compatible(a, b);
  std::vector<ForwardResult> fwd(a.size());
  std::vector<detail::TwoNn> rev(b.size());
  for (int i = 0; i < a.size(); ++i) {
    fwd[i].searched = true;
    for (int j = 0; j < b.size(); ++j) {
      const double d = dist_comparable(a, i, b, j);
      fwd[i].nn.offer(d, j);
      rev[j].offer(d, i);
    }
  }
  return select_matches(fwd, rev, params, a.metric);
}

std::vector<MatchPair> match_kdtree(const FeatureSet& a, const FeatureSet& b,
                                    const MatchParams& params, int checks) {
  check_compatible(a, b);
  if (a.metric != DescriptorMetric::L2) {
    throw ConfigError("match_kdtree: kd-tree search requires the L2 metric");
  }
  std::vector<ForwardResult> fwd(a.size());
  std::vector<detail::TwoNn> rev(b.size());
  if (b.size() > 0) {
    const detail::DescriptorKdTree tree(b.descriptors.data(), b.size(), b.descriptor_length);
    for (int i = 0; i < a.size(); ++i) {
      fwd[i].searched = true;
      fwd[i].nn = tree.search(a.descriptor(i), checks);
    }
  }
  if (params.cross_check && a.size() > 0) {
    const detail::DescriptorKdTree tree(a.descriptors.data(), a.size(), a.descriptor_length);
    for (int j = 0; j < b.size(); ++j) {
      rev[j] = tree.search(b.descriptor(j), checks);
    }
  }
  return select_matches(fwd, rev, params, a.metric);
}

std::vector<MatchPair> homogenize(const std::vector<MatchPair>& matches,
                                  const FeatureSet& features_a, int blocksize,
                                  int max_per_block) {
  if (max_per_block < 1) {
    throw ConfigError("homogenize: max_per_block must be >= 1");
  }
  if (blocksize < 1) {
    throw ConfigError("homogenize: blocksize must be >= 1");
  }
  std::unordered_map<long long, std::vector<int>> by_block;  // match indices
  for (size_t m = 0; m < matches.size(); ++m) {
    const PixelPoint& p = features_a.keypoints[matches[m].index_a].position;
    by_block[pack_block(floor_block(p.x(), blocksize), floor_block(p.y(), blocksize))]
        .push_back(static_cast<int>(m));
  }
  std::vector<std::uint8_t> keep(matches.size(), 1);
  for (auto& [key, idx] : by_block) {
    if (static_cast<int>(idx.size()) <= max_per_block) {
      continue;
    }
    std::sort(idx.begin(), idx.end(), [&](int x, int y) {
      const MatchPair& mx = matches[x];
      const MatchPair& my = matches[y];
      return mx.distance != my.distance ? mx.distance < my.distance
                                        : mx.index_a < my.index_a;
    });
    for (size_t i = max_per_block; i < idx.size(); ++i) {
      keep[idx[i]] = 0;
    }
  }
  std::vector<MatchPair> out;
  out.reserve(matches.size());
  for (size_t m = 0; m < matches.size(); ++m) {
    if (keep[m]) {
      out.push_back(matches[m]);
    }
  }
  return out;
}

}  // namespace uavmap
