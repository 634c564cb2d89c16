#include <algorithm>
#include <cmath>
#include <vector>

#include "uavmap/matching.hpp"

namespace uavmap {

namespace {

constexpr int kPatch = 8;       // descriptor patch side
constexpr int kNmsRadius = 5;   // non-maximum suppression radius
constexpr int kMargin = 8;      // keep-out border for gradients + patch
constexpr double kHarrisK = 0.04;
constexpr double kResponseFloor = 1e-6;

}  // namespace

FeatureSet detect_and_describe(const ImageF& gray, int max_features) {
  if (gray.channels != 1) {
    throw ConfigError("detect_and_describe: expects a single-channel image");
  }
  if (max_features < 1) {
    throw ConfigError("detect_and_describe: max_features must be >= 1");
  }
  const int w = gray.width;
  const int h = gray.height;
  if (w < 16 || h < 16) {
    throw DataError("detect_and_describe: image smaller than 16x16");
  }

  // Structure tensor with a [1 2 1] binomial window over central gradients.
  std::vector<float> ix(static_cast<size_t>(w) * h, 0.0f);
  std::vector<float> iy(static_cast<size_t>(w) * h, 0.0f);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      ix[y * w + x] = 0.5f * (gray.at(x + 1, y) - gray.at(x - 1, y));
      iy[y * w + x] = 0.5f * (gray.at(x, y + 1) - gray.at(x, y - 1));
    }
  }
  std::vector<double> response(static_cast<size_t>(w) * h, 0.0);
  static const double kWin[3] = {1.0, 2.0, 1.0};
  for (int y = 2; y < h - 2; ++y) {
    for (int x = 2; x < w - 2; ++x) {
      double sxx = 0, syy = 0, sxy = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const double wgt = kWin[dx + 1] * kWin[dy + 1] / 16.0;
          const double gx = ix[(y + dy) * w + (x + dx)];
          const double gy = iy[(y + dy) * w + (x + dx)];
          sxx += wgt * gx * gx;
          syy += wgt * gy * gy;
          sxy += wgt * gx * gy;
        }
      }
      const double det = sxx * syy - sxy * sxy;
      const double tr = sxx + syy;
      response[y * w + x] = det - kHarrisK * tr * tr;
    }
  }

  // NMS over a square radius; equal responses resolve to the first in scan order.
  struct Candidate {
    int x, y;
    double r;
  };
  std::vector<Candidate> candidates;
  for (int y = kMargin; y < h - kMargin; ++y) {
    for (int x = kMargin; x < w - kMargin; ++x) {
      const double r = response[y * w + x];
      if (r <= kResponseFloor) {
        continue;
      }
      bool is_max = true;
      for (int dy = -kNmsRadius; dy <= kNmsRadius && is_max; ++dy) {
        for (int dx = -kNmsRadius; dx <= kNmsRadius; ++dx) {
          if (dx == 0 && dy == 0) {
            continue;
          }
          const double rn = response[(y + dy) * w + (x + dx)];
          if (rn > r || (rn == r && (dy < 0 || (dy == 0 && dx < 0)))) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) {
        candidates.push_back({x, y, r});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.r != b.r) return a.r > b.r;
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  if (static_cast<int>(candidates.size()) > max_features) {
    candidates.resize(max_features);
  }

  FeatureSet set;
  set.width = w;
  set.height = h;
  set.descriptor_length = kPatch * kPatch;
  set.metric = DescriptorMetric::L2;
  set.keypoints.reserve(candidates.size());
  set.descriptors.reserve(candidates.size() * static_cast<size_t>(set.descriptor_length));

  for (const Candidate& c : candidates) {
    Keypoint kp;
    kp.position = PixelPoint(c.x, c.y);
    kp.response = static_cast<float>(c.r);
    set.keypoints.push_back(kp);

    // 8x8 patch at offsets [-4, 3], mean-subtracted, L2-normalized.
    std::array<double, kPatch * kPatch> patch{};
    double mean = 0.0;
    for (int dy = 0; dy < kPatch; ++dy) {
      for (int dx = 0; dx < kPatch; ++dx) {
        const double v = gray.at(c.x + dx - 4, c.y + dy - 4);
        patch[dy * kPatch + dx] = v;
        mean += v;
      }
    }
    mean /= patch.size();
    double norm_sq = 0.0;
    for (double& v : patch) {
      v -= mean;
      norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    for (double v : patch) {
      set.descriptors.push_back(norm > 1e-12 ? static_cast<float>(v / norm) : 0.0f);
    }
  }
  return set;
}

}  // namespace uavmap
