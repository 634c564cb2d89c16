#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "uavmap/matching.hpp"

using namespace uavmap;

namespace {

FeatureSet make_set(int width, int height, int descriptor_length = 64) {
  FeatureSet s;
  s.width = width;
  s.height = height;
  s.descriptor_length = descriptor_length;
  s.metric = DescriptorMetric::L2;
  return s;
}

void add_feature(FeatureSet& s, const PixelPoint& pos, const std::vector<float>& desc) {
  Keypoint kp;
  kp.position = pos;
  s.keypoints.push_back(kp);
  s.descriptors.insert(s.descriptors.end(), desc.begin(), desc.end());
}

std::vector<float> random_unit_descriptor(std::mt19937_64& g, int len) {
  std::vector<float> d(len);
  double norm = 0;
  for (float& v : d) {
    v = static_cast<float>(testutil::gauss(g));
    norm += static_cast<double>(v) * v;
  }
  norm = std::sqrt(norm);
  for (float& v : d) v = static_cast<float>(v / norm);
  return d;
}

std::vector<float> perturb_descriptor(std::mt19937_64& g, const std::vector<float>& d,
                                      double sigma) {
  std::vector<float> out(d.size());
  double norm = 0;
  for (size_t i = 0; i < d.size(); ++i) {
    out[i] = d[i] + static_cast<float>(testutil::gauss(g, sigma));
    norm += static_cast<double>(out[i]) * out[i];
  }
  norm = std::sqrt(norm);
  for (float& v : out) v = static_cast<float>(v / norm);
  return out;
}

std::vector<PredictedPoint> self_predictions(const FeatureSet& s) {
  std::vector<PredictedPoint> p;
  for (int i = 0; i < s.size(); ++i) {
    p.push_back({i, s.keypoints[i].position});
  }
  return p;
}

bool same_matches(const std::vector<MatchPair>& x, const std::vector<MatchPair>& y) {
  if (x.size() != y.size()) return false;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i].index_a != y[i].index_a || x[i].index_b != y[i].index_b ||
        x[i].distance != y[i].distance) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("detect_and_describe: constant image yields no features") {
  ImageF img(64, 64, 1, 128.0f);
  const FeatureSet s = detect_and_describe(img, 100);
  CHECK(s.size() == 0);
}

TEST_CASE("detect_and_describe: white square corners are detected") {
  ImageF img(128, 128, 1, 0.0f);
  for (int y = 40; y < 88; ++y) {
    for (int x = 40; x < 88; ++x) {
      img.at(x, y) = 255.0f;
    }
  }
  const FeatureSet s = detect_and_describe(img, 10);
  REQUIRE(s.size() >= 4);
  const PixelPoint corners[4] = {{40, 40}, {87, 40}, {40, 87}, {87, 87}};
  for (const PixelPoint& c : corners) {
    bool found = false;
    for (int i = 0; i < std::min(10, s.size()); ++i) {
      if ((s.keypoints[i].position - c).norm() <= 3.0) {
        found = true;
        break;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("detect_and_describe: deterministic, and descriptors are unit norm") {
  auto g = testutil::rng(50);
  ImageF img(96, 80, 1);
  for (float& v : img.data) v = static_cast<float>(testutil::uniform(g, 0, 255));
  const FeatureSet s1 = detect_and_describe(img, 200);
  const FeatureSet s2 = detect_and_describe(img, 200);
  REQUIRE(s1.size() == s2.size());
  CHECK(s1.descriptors == s2.descriptors);
  for (int i = 0; i < s1.size(); ++i) {
    CHECK(s1.keypoints[i].position == s2.keypoints[i].position);
    double norm = 0;
    for (int d = 0; d < s1.descriptor_length; ++d) {
      norm += static_cast<double>(s1.descriptor(i)[d]) * s1.descriptor(i)[d];
    }
    CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-5);
  }
  CHECK_THROWS_AS(detect_and_describe(ImageF(15, 15, 1), 10), DataError);
}

TEST_CASE("predict_location: identical poses and analytic nadir disparity") {
  const CameraIntrinsics k(460, 460, 240, 135, 480, 270);
  const RigidTransform pose = testutil::nadir_camera_pose(Eigen::Vector3d(5, 5, 60));
  Keypoint kp;
  kp.position = PixelPoint(100.5, 200.25);
  CHECK((predict_location(kp, k, pose, pose, 60.0) - kp.position).norm() < 1e-9);

  const RigidTransform pose_b = testutil::nadir_camera_pose(Eigen::Vector3d(5 + 6, 5, 60));
  const PixelPoint p = predict_location(kp, k, pose, pose_b, 60.0);
  CHECK(p.x() == doctest::Approx(kp.position.x() - 460.0 * 6 / 60).epsilon(1e-12));
  CHECK(p.y() == doctest::Approx(kp.position.y()).epsilon(1e-12));
}

TEST_CASE("BlockGrid: whole-image blocksize degenerates to all candidates") {
  auto g = testutil::rng(51);
  FeatureSet b = make_set(400, 300);
  for (int i = 0; i < 40; ++i) {
    add_feature(b, PixelPoint(testutil::uniform(g, 0, 399), testutil::uniform(g, 0, 299)),
                random_unit_descriptor(g, 64));
  }
  std::vector<PredictedPoint> preds;
  for (int i = 0; i < 10; ++i) {
    preds.push_back({i, PixelPoint(testutil::uniform(g, 0, 399), testutil::uniform(g, 0, 299))});
  }
  const BlockGrid grid(preds, b, 600, 0, 400, 300);
  for (int i = 0; i < 10; ++i) {
    CHECK(grid.candidates(i).size() == 40);
  }
}

TEST_CASE("BlockGrid: zero padding keeps candidates within the home block") {
  FeatureSet b = make_set(300, 300);
  // One B point per block center of a 3x3 block layout, blocksize 100.
  for (int by = 0; by < 3; ++by) {
    for (int bx = 0; bx < 3; ++bx) {
      add_feature(b, PixelPoint(bx * 100 + 50, by * 100 + 50), std::vector<float>(64, 0.1f));
    }
  }
  std::vector<PredictedPoint> preds{{0, PixelPoint(150, 150)}};  // center block
  const BlockGrid grid(preds, b, 100, 0, 300, 300);
  REQUIRE(grid.candidates(0).size() == 1);
  CHECK(grid.candidates(0)[0] == 4);
}

TEST_CASE("BlockGrid: window-membership oracle on a random layout") {
  auto g = testutil::rng(52);
  const int w = 400, h = 300, bs = 50, pad = 13;
  FeatureSet b = make_set(w, h);
  for (int i = 0; i < 200; ++i) {
    add_feature(b, PixelPoint(testutil::uniform(g, 0, w - 1e-6), testutil::uniform(g, 0, h - 1e-6)),
                random_unit_descriptor(g, 64));
  }
  std::vector<PredictedPoint> preds;
  for (int i = 0; i < 120; ++i) {
    preds.push_back({i, PixelPoint(testutil::uniform(g, -40, w + 40),
                                   testutil::uniform(g, -40, h + 40))});
  }
  const BlockGrid grid(preds, b, bs, pad, w, h);

  for (const PredictedPoint& p : preds) {
    const bool in_margin = p.position.x() >= -pad && p.position.x() <= w + pad &&
                           p.position.y() >= -pad && p.position.y() <= h + pad;
    CHECK(grid.kept(p.index) == in_margin);
    if (!in_margin) {
      CHECK(grid.candidates(p.index).empty());
      continue;
    }
    const int bx = static_cast<int>(std::floor(p.position.x() / bs));
    const int by = static_cast<int>(std::floor(p.position.y() / bs));
    const int x0 = static_cast<int>(std::floor((double(bx) * bs - pad) / bs));
    const int x1 = static_cast<int>(std::floor((double(bx + 1) * bs - 1 + pad) / bs));
    const int y0 = static_cast<int>(std::floor((double(by) * bs - pad) / bs));
    const int y1 = static_cast<int>(std::floor((double(by + 1) * bs - 1 + pad) / bs));
    std::vector<int> oracle;
    for (int j = 0; j < b.size(); ++j) {
      const int jbx = static_cast<int>(std::floor(b.keypoints[j].position.x() / bs));
      const int jby = static_cast<int>(std::floor(b.keypoints[j].position.y() / bs));
      if (jbx >= x0 && jbx <= x1 && jby >= y0 && jby <= y1) {
        oracle.push_back(j);
      }
    }
    CHECK(grid.candidates(p.index) == oracle);
  }
}

TEST_CASE("match_block: self-match is the identity with zero distance") {
  auto g = testutil::rng(53);
  FeatureSet a = make_set(640, 480);
  for (int i = 0; i < 60; ++i) {
    add_feature(a, PixelPoint(testutil::uniform(g, 0, 639), testutil::uniform(g, 0, 479)),
                random_unit_descriptor(g, 64));
  }
  MatchParams params;
  params.ratio = 1.0;
  params.cross_check = true;
  const BlockGrid grid(self_predictions(a), a, 120, 30, 640, 480);
  const auto matches = match_block(a, a, grid, params);
  REQUIRE(matches.size() == 60);
  for (const MatchPair& m : matches) {
    CHECK(m.index_a == m.index_b);
    CHECK(m.distance == 0.0);
  }
}

TEST_CASE("match_block: empty when no candidates exist") {
  auto g = testutil::rng(54);
  FeatureSet a = make_set(400, 300);
  FeatureSet b = make_set(400, 300);
  add_feature(a, PixelPoint(10, 10), random_unit_descriptor(g, 64));
  add_feature(b, PixelPoint(390, 290), random_unit_descriptor(g, 64));
  // Prediction far from the only B point, tiny window.
  const BlockGrid grid({{0, PixelPoint(10, 10)}}, b, 20, 0, 400, 300);
  CHECK(match_block(a, b, grid).empty());
}

TEST_CASE("match_bf: identity and one-hot permutation recovery") {
  auto g = testutil::rng(55);
  FeatureSet a = make_set(640, 480);
  for (int i = 0; i < 50; ++i) {
    std::vector<float> d(64, 0.0f);
    d[i] = 1.0f;
    add_feature(a, PixelPoint(i * 10 + 5, 100), d);
  }
  FeatureSet b = make_set(640, 480);
  std::vector<int> perm(50);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), g);
  for (int j = 0; j < 50; ++j) {
    std::vector<float> d(64, 0.0f);
    d[perm[j]] = 1.0f;
    add_feature(b, PixelPoint(j * 10 + 5, 100), d);
  }
  MatchParams params;
  params.ratio = 1.0;
  const auto matches = match_bf(a, b, params);
  REQUIRE(matches.size() == 50);
  for (const MatchPair& m : matches) {
    CHECK(perm[m.index_b] == m.index_a);
    CHECK(m.distance == 0.0);
  }
}

TEST_CASE("degenerate equivalence: whole-image block grid equals brute force") {
  auto g = testutil::rng(56);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 640, h = 480;
    FeatureSet a = make_set(w, h);
    FeatureSet b = make_set(w, h);
    const int na = 40 + trial * 3, nb = 35 + trial * 2;
    for (int i = 0; i < na; ++i) {
      add_feature(a, PixelPoint(testutil::uniform(g, 0, w - 1), testutil::uniform(g, 0, h - 1)),
                  random_unit_descriptor(g, 64));
    }
    for (int j = 0; j < nb; ++j) {
      add_feature(b, PixelPoint(testutil::uniform(g, 0, w - 1), testutil::uniform(g, 0, h - 1)),
                  random_unit_descriptor(g, 64));
    }
    std::vector<PredictedPoint> preds;
    for (int i = 0; i < na; ++i) {
      preds.push_back({i, PixelPoint(testutil::uniform(g, 0, w - 1), testutil::uniform(g, 0, h - 1))});
    }
    const BlockGrid grid(preds, b, 801 /* >= diagonal */, 0, w, h);
    MatchParams params;
    params.cross_check = (trial % 2 == 0);
    CHECK(same_matches(match_block(a, b, grid, params), match_bf(a, b, params)));
  }
}

TEST_CASE("match_kdtree: exact search equals brute force, distances included") {
  auto g = testutil::rng(57);
  FeatureSet a = make_set(640, 480);
  FeatureSet b = make_set(640, 480);
  for (int i = 0; i < 300; ++i) {
    add_feature(a, PixelPoint(1, 1), random_unit_descriptor(g, 64));
  }
  for (int j = 0; j < 280; ++j) {
    add_feature(b, PixelPoint(1, 1), random_unit_descriptor(g, 64));
  }
  for (bool cc : {true, false}) {
    MatchParams params;
    params.cross_check = cc;
    params.single_abs_threshold = 2.0;
    CHECK(same_matches(match_kdtree(a, b, params, 0), match_bf(a, b, params)));
  }
}

TEST_CASE("match_kdtree: single B point is returned for every query") {
  auto g = testutil::rng(58);
  FeatureSet a = make_set(100, 100);
  FeatureSet b = make_set(100, 100);
  for (int i = 0; i < 10; ++i) add_feature(a, PixelPoint(5, 5), random_unit_descriptor(g, 64));
  add_feature(b, PixelPoint(5, 5), random_unit_descriptor(g, 64));
  MatchParams params;
  params.cross_check = false;
  params.single_abs_threshold = 10.0;  // gate open: geometry-free sanity case
  const auto matches = match_kdtree(a, b, params, 0);
  // One-to-one output: the single B point pairs with its best A only.
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].index_b == 0);
}

TEST_CASE("match_kdtree: bounded checks still agrees with brute force mostly") {
  auto g = testutil::rng(59);
  FeatureSet a = make_set(640, 480);
  FeatureSet b = make_set(640, 480);
  std::vector<std::vector<float>> base;
  for (int i = 0; i < 400; ++i) {
    base.push_back(random_unit_descriptor(g, 64));
    add_feature(a, PixelPoint(1, 1), base.back());
  }
  for (int j = 0; j < 400; ++j) {
    add_feature(b, PixelPoint(1, 1), perturb_descriptor(g, base[j], 0.05));
  }
  MatchParams params;
  const auto exact = match_bf(a, b, params);
  const auto approx = match_kdtree(a, b, params, 64);
  REQUIRE(!exact.empty());
  std::set<std::pair<int, int>> exact_set, approx_set;
  for (const auto& m : exact) exact_set.insert({m.index_a, m.index_b});
  for (const auto& m : approx) approx_set.insert({m.index_a, m.index_b});
  int agree = 0;
  for (const auto& p : approx_set) {
    agree += exact_set.count(p);
  }
  CHECK(static_cast<double>(agree) >= 0.9 * static_cast<double>(exact_set.size()));
}

TEST_CASE("match_kdtree: Hamming metric rejected") {
  FeatureSet a = make_set(100, 100, 8);
  a.metric = DescriptorMetric::Hamming;
  FeatureSet b = a;
  CHECK_THROWS_AS(match_kdtree(a, b), ConfigError);
}

TEST_CASE("mini labeled scene: block matching is sound within the padding budget") {
  auto g = testutil::rng(60);
  const int w = 1000, h = 800, bs = 120, pad = 30;
  const int n_true = 300, n_distract = 30;
  FeatureSet a = make_set(w, h);
  FeatureSet b = make_set(w, h);
  std::vector<PredictedPoint> preds;

  for (int i = 0; i < n_true; ++i) {
    const auto d = random_unit_descriptor(g, 64);
    const PixelPoint pa(testutil::uniform(g, 20, w - 20), testutil::uniform(g, 20, h - 20));
    const PixelPoint pb = pa + PixelPoint(testutil::uniform(g, -15, 15), testutil::uniform(g, -15, 15));
    add_feature(a, pa, perturb_descriptor(g, d, 0.05));
    add_feature(b, pb, perturb_descriptor(g, d, 0.05));
    // Prediction error bounded well inside the padding budget.
    preds.push_back({i, pb + PixelPoint(testutil::uniform(g, -pad * 0.8, pad * 0.8),
                                        testutil::uniform(g, -pad * 0.8, pad * 0.8))});
  }
  for (int i = 0; i < n_distract; ++i) {
    add_feature(a, PixelPoint(testutil::uniform(g, 0, w - 1), testutil::uniform(g, 0, h - 1)),
                random_unit_descriptor(g, 64));
    add_feature(b, PixelPoint(testutil::uniform(g, 0, w - 1), testutil::uniform(g, 0, h - 1)),
                random_unit_descriptor(g, 64));
    preds.push_back({n_true + i, PixelPoint(testutil::uniform(g, 0, w - 1),
                                            testutil::uniform(g, 0, h - 1))});
  }

  const BlockGrid grid(preds, b, bs, pad, w, h);

  // Candidate soundness: every true pair with prediction error <= padding is
  // in the candidate set.
  for (int i = 0; i < n_true; ++i) {
    const double err = (preds[i].position - b.keypoints[i].position).cwiseAbs().maxCoeff();
    if (err <= pad) {
      const auto& c = grid.candidates(i);
      CHECK(std::binary_search(c.begin(), c.end(), i));
    }
  }

  // Work bound: total candidates within the uniform-density estimate.
  double total_candidates = 0;
  for (int i = 0; i < a.size(); ++i) {
    total_candidates += grid.candidates(i).size();
  }
  const double window = (bs + 2.0 * pad) * (bs + 2.0 * pad);
  // Whole blocks intersecting the window can stick out by up to a block on
  // each side; bound with the dilated window area plus the 1.5x slack.
  const double dilated = (bs + 2.0 * pad + 2.0 * bs) * (bs + 2.0 * pad + 2.0 * bs);
  CHECK(total_candidates <= a.size() * b.size() * (dilated / (double(w) * h)) * 1.5);
  CHECK(total_candidates < double(a.size()) * b.size());

  const auto bf = match_bf(a, b);
  const auto block = match_block(a, b, grid);

  auto precision_recall = [&](const std::vector<MatchPair>& ms) {
    int correct = 0;
    for (const auto& m : ms) {
      if (m.index_a == m.index_b && m.index_a < n_true) ++correct;
    }
    return std::make_pair(ms.empty() ? 1.0 : double(correct) / ms.size(),
                          double(correct) / n_true);
  };
  const auto [p_bf, r_bf] = precision_recall(bf);
  const auto [p_block, r_block] = precision_recall(block);
  CHECK(p_block >= p_bf);
  CHECK(r_block >= 0.85);
  MESSAGE("bf precision ", p_bf, " recall ", r_bf, "; block precision ", p_block, " recall ",
          r_block);

  // One-to-one invariant.
  std::set<int> seen_b;
  for (const auto& m : block) {
    CHECK(seen_b.insert(m.index_b).second);
  }

  // kd backend at exact checks equals the brute-force backend.
  CHECK(same_matches(match_block(a, b, grid, MatchParams{}, BlockSearch::KdTree, 0), block));
}

TEST_CASE("homogenize: under-limit input unchanged, oversized block truncated") {
  auto g = testutil::rng(61);
  FeatureSet a = make_set(640, 480);
  std::vector<MatchPair> matches;
  for (int i = 0; i < 10; ++i) {
    add_feature(a, PixelPoint(30 + i, 40), random_unit_descriptor(g, 64));  // one block
    matches.push_back({i, i, testutil::uniform(g, 0.1, 1.0)});
  }
  const auto kept = homogenize(matches, a, 120, 4);
  REQUIRE(kept.size() == 4);
  std::vector<double> dists;
  for (const auto& m : matches) dists.push_back(m.distance);
  std::sort(dists.begin(), dists.end());
  for (const auto& m : kept) {
    CHECK(m.distance <= dists[3]);
  }
  // Order preserved.
  for (size_t i = 1; i < kept.size(); ++i) {
    CHECK(kept[i].index_a > kept[i - 1].index_a);
  }

  CHECK(homogenize(matches, a, 120, 10).size() == 10);
}

TEST_CASE("homogenize: random input matches the sort-and-truncate oracle") {
  auto g = testutil::rng(62);
  FeatureSet a = make_set(640, 480);
  std::vector<MatchPair> matches;
  for (int i = 0; i < 400; ++i) {
    add_feature(a, PixelPoint(testutil::uniform(g, 0, 639), testutil::uniform(g, 0, 479)),
                random_unit_descriptor(g, 8));
    matches.push_back({i, i, testutil::uniform(g, 0.0, 2.0)});
  }
  const int bs = 120, cap = 4;
  const auto kept = homogenize(matches, a, bs, cap);

  // Oracle: group by block, sort by (distance, index_a), truncate.
  std::map<std::pair<int, int>, std::vector<int>> blocks;
  for (int i = 0; i < 400; ++i) {
    const auto& p = a.keypoints[i].position;
    blocks[{int(std::floor(p.x() / bs)), int(std::floor(p.y() / bs))}].push_back(i);
  }
  std::set<int> expected;
  for (auto& [key, idx] : blocks) {
    std::sort(idx.begin(), idx.end(), [&](int x, int y) {
      return matches[x].distance != matches[y].distance
                 ? matches[x].distance < matches[y].distance
                 : x < y;
    });
    for (size_t i = 0; i < std::min<size_t>(cap, idx.size()); ++i) {
      expected.insert(idx[i]);
    }
  }
  REQUIRE(kept.size() == expected.size());
  for (const auto& m : kept) {
    CHECK(expected.count(m.index_a) == 1);
  }
  // Per-block cap holds.
  std::map<std::pair<int, int>, int> counts;
  for (const auto& m : kept) {
    const auto& p = a.keypoints[m.index_a].position;
    CHECK(++counts[{int(std::floor(p.x() / bs)), int(std::floor(p.y() / bs))}] <= cap);
  }
}

TEST_CASE("refine_pose: exact matches converge and misuse is rejected") {
  auto g = testutil::rng(63);
  const CameraIntrinsics k(460, 460, 240, 135, 480, 270);

  TerrainGrid flat;
  flat.origin = Eigen::Vector2d(-100, -100);
  flat.cell_size = 2.0;
  flat.cols = 120;
  flat.rows = 120;
  flat.heights.assign(static_cast<size_t>(120) * 120, 5.0);
  flat.valid.assign(flat.heights.size(), 1);

  const RigidTransform pose_a = testutil::nadir_camera_pose(Eigen::Vector3d(20, 20, 65), 0.3);
  const RigidTransform pose_b = testutil::nadir_camera_pose(Eigen::Vector3d(27, 22, 63), 0.25);

  FeatureSet fa = make_set(480, 270, 8);
  FeatureSet fb = make_set(480, 270, 8);
  std::vector<MatchPair> matches;
  int idx = 0;
  while (idx < 40) {
    const Eigen::Vector3d ground(testutil::uniform(g, 0, 45), testutil::uniform(g, 0, 45), 5.0);
    PixelPoint pa, pb;
    try {
      pa = project_to_pixel(k, invert(pose_a).apply(ground));
      pb = project_to_pixel(k, invert(pose_b).apply(ground));
    } catch (const NumericError&) {
      continue;
    }
    if (pa.x() < 0 || pa.x() > 479 || pa.y() < 0 || pa.y() > 269) continue;
    add_feature(fa, pa, std::vector<float>(8, 0.5f));
    add_feature(fb, pb, std::vector<float>(8, 0.5f));
    matches.push_back({idx, idx, 0.0});
    ++idx;
  }

  // Start at the truth: nothing to do.
  const RefineResult at_truth = refine_pose(matches, fa, fb, flat, k, pose_a, pose_b);
  CHECK(at_truth.rms < 1e-9);
  CHECK((at_truth.pose.translation - pose_b.translation).norm() < 1e-9);

  // Perturbed start: recover within 0.05 m / 0.2 deg.
  const Eigen::Vector3d dt = testutil::random_vec(g, 1.0).normalized() * 0.5;
  const Eigen::Quaterniond dq(Eigen::AngleAxisd(2.0 * M_PI / 180.0,
                                                testutil::random_vec(g, 1.0).normalized()));
  const RigidTransform perturbed(pose_b.rotation * dq, pose_b.translation + dt,
                                 Frame::Camera, Frame::World);
  const RefineResult refined = refine_pose(matches, fa, fb, flat, k, pose_a, perturbed);
  CHECK((refined.pose.translation - pose_b.translation).norm() < 0.05);
  CHECK(refined.pose.rotation.angularDistance(pose_b.rotation) * 180.0 / M_PI < 0.2);
  CHECK(refined.rms < 1e-6);

  // Fewer than 6 matches rejected.
  std::vector<MatchPair> five(matches.begin(), matches.begin() + 5);
  CHECK_THROWS_AS(refine_pose(five, fa, fb, flat, k, pose_a, pose_b), DataError);
}
