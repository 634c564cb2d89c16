#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "uavmap/eval.hpp"

using namespace uavmap;

namespace {

Trajectory make_traj(const std::vector<double>& ts,
                     const std::vector<Eigen::Vector3d>& ps) {
  Trajectory t;
  for (size_t i = 0; i < ts.size(); ++i) {
    t.push_back({ts[i], RigidTransform(Eigen::Quaterniond::Identity(), ps[i],
                                       Frame::Body, Frame::World)});
  }
  return t;
}

Trajectory random_traj(std::mt19937_64& g, int n, double dt = 0.1) {
  Trajectory t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i * dt, RigidTransform(testutil::random_unit_quaternion(g),
                                        testutil::random_vec(g, 20.0), Frame::Body,
                                        Frame::World)});
  }
  return t;
}

}  // namespace

TEST_CASE("associate: identical stamps, disjoint ranges, jittered oracle") {
  auto g = testutil::rng(80);
  Trajectory a = random_traj(g, 50);
  const auto id_pairs = associate(a, a, 0.01);
  REQUIRE(id_pairs.size() == 50);
  for (int i = 0; i < 50; ++i) {
    CHECK(id_pairs[i] == std::make_pair(i, i));
  }

  Trajectory late = random_traj(g, 20);
  for (auto& p : late) p.t += 1000.0;
  CHECK_THROWS_AS(associate(a, late, 0.01), DataError);

  // Jittered timestamps: full pairing, equal to the O(n^2) greedy oracle.
  Trajectory b = a;
  for (auto& p : b) p.t += testutil::uniform(g, -0.02, 0.02);
  std::sort(b.begin(), b.end(), [](const TimedPose& x, const TimedPose& y) { return x.t < y.t; });
  const double max_dt = 0.06;
  const auto got = associate(a, b, max_dt);
  CHECK(got.size() == a.size());

  struct Cand {
    double adt;
    int i, j;
  };
  std::vector<Cand> cands;
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) {
      if (std::abs(a[i].t - b[j].t) <= max_dt) {
        cands.push_back({std::abs(a[i].t - b[j].t), int(i), int(j)});
      }
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.adt != y.adt) return x.adt < y.adt;
    if (x.i != y.i) return x.i < y.i;
    return x.j < y.j;
  });
  std::set<int> ua, ub;
  std::vector<std::pair<int, int>> oracle;
  for (const Cand& c : cands) {
    if (!ua.count(c.i) && !ub.count(c.j)) {
      ua.insert(c.i);
      ub.insert(c.j);
      oracle.emplace_back(c.i, c.j);
    }
  }
  std::sort(oracle.begin(), oracle.end());
  CHECK(got == oracle);
}

TEST_CASE("umeyama_align: exact recovery of a constructed transform") {
  auto g = testutil::rng(81);
  std::vector<Eigen::Vector3d> ref;
  for (int i = 0; i < 40; ++i) ref.push_back(testutil::random_vec(g, 10.0));

  const auto self = umeyama_align(ref, ref);
  CHECK(self.rms < 1e-12);
  CHECK(self.transform.translation.norm() < 1e-12);
  CHECK(self.transform.rotation.angularDistance(Eigen::Quaterniond::Identity()) < 1e-12);

  const Eigen::Quaterniond rot(Eigen::AngleAxisd(M_PI / 6, Eigen::Vector3d::UnitZ()));
  const Eigen::Vector3d t(4, -2, 7);
  std::vector<Eigen::Vector3d> est;
  for (const auto& p : ref) est.push_back(rot.conjugate() * (p - t));  // ref = rot*est + t
  const auto align = umeyama_align(est, ref);
  CHECK(align.rms < 1e-9);
  CHECK(align.transform.rotation.angularDistance(rot) < 1e-9);
  CHECK((align.transform.translation - t).norm() < 1e-9);
}

TEST_CASE("umeyama_align: residual is the global minimum (random-candidate bound)") {
  auto g = testutil::rng(82);
  std::vector<Eigen::Vector3d> est, ref;
  for (int i = 0; i < 30; ++i) {
    est.push_back(testutil::random_vec(g, 10.0));
    ref.push_back(testutil::random_vec(g, 10.0));
  }
  const auto best = umeyama_align(est, ref);
  for (int trial = 0; trial < 1000; ++trial) {
    const RigidTransform cand = testutil::random_transform(g, Frame::World, Frame::World, 15.0);
    double sq = 0;
    for (size_t i = 0; i < est.size(); ++i) {
      sq += (ref[i] - cand.apply(est[i])).squaredNorm();
    }
    CHECK(best.rms <= std::sqrt(sq / est.size()) + 1e-12);
  }
}

TEST_CASE("umeyama_align: degenerate and scaled configurations") {
  std::vector<Eigen::Vector3d> line, ref;
  for (int i = 0; i < 10; ++i) {
    line.push_back(Eigen::Vector3d(i, 2 * i, -i));
    ref.push_back(Eigen::Vector3d(i, 0, 0));
  }
  CHECK_THROWS_AS(umeyama_align(line, ref), DataError);
  CHECK_THROWS_AS(umeyama_align({{1, 1, 1}, {1, 1, 1}}, {{0, 0, 0}, {0, 0, 0}}), DataError);

  auto g = testutil::rng(83);
  std::vector<Eigen::Vector3d> est2, ref2;
  const double scale = 2.5;
  const Eigen::Quaterniond rot = testutil::random_unit_quaternion(g);
  const Eigen::Vector3d t(1, 2, 3);
  for (int i = 0; i < 25; ++i) {
    est2.push_back(testutil::random_vec(g, 5.0));
    ref2.push_back(scale * (rot * est2.back()) + t);
  }
  const auto sim = umeyama_align(est2, ref2, true);
  CHECK(sim.scale == doctest::Approx(scale).epsilon(1e-9));
  CHECK(sim.rms < 1e-9);
}

TEST_CASE("compute_ate: zero on self and invariant to global rigid motion") {
  auto g = testutil::rng(84);
  const Trajectory t = random_traj(g, 60);
  const AteResult self = compute_ate(t, t);
  CHECK(self.trans_rmse == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(self.rot_rmse_deg == doctest::Approx(0.0).scale(1).epsilon(1e-9));
  CHECK(self.pairs == 60);

  // Uniform offset (and any rigid transform) is absorbed by the alignment.
  const RigidTransform rigid = testutil::random_transform(g, Frame::World, Frame::World, 50.0);
  Trajectory moved = t;
  for (auto& p : moved) {
    p.pose = RigidTransform(rigid.rotation * p.pose.rotation, rigid.apply(p.pose.translation),
                            Frame::Body, Frame::World);
  }
  const AteResult inv = compute_ate(moved, t);
  CHECK(inv.trans_rmse < 1e-9);
  CHECK(inv.rot_rmse_deg < 1e-7);
}

TEST_CASE("compute_ate: noisy trajectory matches the direct-formula oracle") {
  auto g = testutil::rng(85);
  std::vector<double> ts;
  std::vector<Eigen::Vector3d> ps;
  for (int i = 0; i < 100; ++i) {
    ts.push_back(i * 0.1);
    ps.push_back(Eigen::Vector3d(i * 0.5, std::sin(i * 0.1) * 5, 10));
  }
  const Trajectory gt = make_traj(ts, ps);
  std::vector<Eigen::Vector3d> noisy = ps;
  for (auto& p : noisy) {
    p += Eigen::Vector3d(testutil::gauss(g, 0.1), testutil::gauss(g, 0.1), testutil::gauss(g, 0.1));
  }
  const Trajectory est = make_traj(ts, noisy);
  const AteResult ate = compute_ate(est, gt);
  CHECK(ate.trans_rmse > 0.05);
  CHECK(ate.trans_rmse < 0.2);

  // Direct recomputation from the reported alignment.
  double sq = 0, mx = 0, sum = 0;
  std::vector<double> errs;
  for (size_t i = 0; i < ts.size(); ++i) {
    const double e = (ps[i] - ate.alignment.apply(noisy[i])).norm();
    errs.push_back(e);
    sq += e * e;
    sum += e;
    mx = std::max(mx, e);
  }
  std::sort(errs.begin(), errs.end());
  CHECK(ate.trans_rmse == doctest::Approx(std::sqrt(sq / errs.size())).epsilon(1e-12));
  CHECK(ate.trans_mean == doctest::Approx(sum / errs.size()).epsilon(1e-12));
  CHECK(ate.trans_max == doctest::Approx(mx).epsilon(1e-12));
  CHECK(ate.trans_median ==
        doctest::Approx(0.5 * (errs[49] + errs[50])).epsilon(1e-12));
}

TEST_CASE("eval_matches: exact counting and conventions") {
  std::vector<std::pair<int, int>> labels;
  for (int i = 0; i < 50; ++i) labels.emplace_back(i, i + 1);

  std::vector<MatchPair> perfect;
  for (const auto& [a, b] : labels) perfect.push_back({a, b, 0.1});
  const MatchEval all = eval_matches(perfect, labels);
  CHECK(all.precision == 1.0);
  CHECK(all.recall == 1.0);

  const MatchEval empty = eval_matches({}, labels);
  CHECK(empty.precision == 1.0);
  CHECK(empty.total_matches == 0);
  CHECK(empty.recall == 0.0);

  // Random subset plus known false pairs: exact set arithmetic.
  auto g = testutil::rng(86);
  std::vector<MatchPair> mixed;
  int n_true = 0;
  for (int i = 0; i < 50; i += 2) {
    mixed.push_back({i, i + 1, 0.2});
    ++n_true;
  }
  for (int i = 0; i < 7; ++i) {
    mixed.push_back({i, 40 - i, 0.3});  // false pairs
  }
  const MatchEval m = eval_matches(mixed, labels);
  CHECK(m.correct == n_true);
  CHECK(m.precision == doctest::Approx(double(n_true) / mixed.size()));
  CHECK(m.recall == doctest::Approx(double(n_true) / labels.size()));

  CHECK_THROWS_AS(eval_matches(perfect, {}), DataError);
}

TEST_CASE("bench csv layout") {
  CHECK(bench_csv_header() ==
        "scene,matcher,variant,extract_s,match_s,refine_s,total_s,matches,points3d");
  BenchRow row;
  row.scene = "road";
  row.matcher = "BF";
  row.variant = "Opt.";
  row.extract_s = 1.0;
  row.match_s = 2.0;
  row.refine_s = 0.5;
  row.total_s = 3.5;
  row.matches = 100;
  row.points3d = 42;
  CHECK(bench_csv_row(row) == "road,BF,Opt.,1.000000,2.000000,0.500000,3.500000,100,42");
}
