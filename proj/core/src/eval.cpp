#include "uavmap/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/SVD>

namespace uavmap {

std::vector<std::pair<int, int>> associate(const Trajectory& a, const Trajectory& b,
                                           double max_dt) {
  if (!(max_dt > 0.0)) {
    throw ConfigError("associate: max_dt must be positive");
  }
  check_time_sorted(a, "associate: est");
  check_time_sorted(b, "associate: ref");

  struct Cand {
    double adt;
    int i, j;
  };
  std::vector<Cand> cands;
  size_t lo = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    while (lo < b.size() && b[lo].t < a[i].t - max_dt) {
      ++lo;
    }
    for (size_t j = lo; j < b.size() && b[j].t <= a[i].t + max_dt; ++j) {
      cands.push_back({std::abs(a[i].t - b[j].t), static_cast<int>(i), static_cast<int>(j)});
    }
  }
  if (cands.empty()) {
    throw DataError("associate: no timestamp pairs within max_dt (no overlap)");
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.adt != y.adt) return x.adt < y.adt;
    if (x.i != y.i) return x.i < y.i;
    return x.j < y.j;
  });
  std::vector<std::uint8_t> used_a(a.size(), 0), used_b(b.size(), 0);
  std::vector<std::pair<int, int>> pairs;
  for (const Cand& c : cands) {
    if (!used_a[c.i] && !used_b[c.j]) {
      used_a[c.i] = 1;
      used_b[c.j] = 1;
      pairs.emplace_back(c.i, c.j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

AlignResult umeyama_align(const std::vector<Eigen::Vector3d>& est,
                          const std::vector<Eigen::Vector3d>& ref, bool with_scale) {
  if (est.size() != ref.size()) {
    throw DataError("umeyama_align: point lists differ in size");
  }
  const int n = static_cast<int>(est.size());
  if (n < 3) {
    throw DataError("umeyama_align: need at least 3 pairs");
  }

  Eigen::Vector3d mu_e = Eigen::Vector3d::Zero(), mu_r = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) {
    mu_e += est[i];
    mu_r += ref[i];
  }
  mu_e /= n;
  mu_r /= n;

  Eigen::Matrix3d sigma = Eigen::Matrix3d::Zero();
  double var_e = 0.0;
  for (int i = 0; i < n; ++i) {
    sigma += (ref[i] - mu_r) * (est[i] - mu_e).transpose();
    var_e += (est[i] - mu_e).squaredNorm();
  }
  sigma /= n;
  var_e /= n;

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d d = svd.singularValues();
  // Rank < 2 (coincident or collinear points) leaves the rotation unconstrained.
  if (d(0) < 1e-12 || d(1) <= 1e-9 * d(0)) {
    throw DataError("umeyama_align: degenerate configuration (collinear or coincident)");
  }
  Eigen::Matrix3d s = Eigen::Matrix3d::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    s(2, 2) = -1.0;
  }
  const Eigen::Matrix3d r = svd.matrixU() * s * svd.matrixV().transpose();

  double scale = 1.0;
  if (with_scale) {
    if (var_e < 1e-12) {
      throw DataError("umeyama_align: zero variance, cannot estimate scale");
    }
    scale = (d.asDiagonal().toDenseMatrix() * s).trace() / var_e;
  }
  const Eigen::Vector3d t = mu_r - scale * (r * mu_e);

  AlignResult out;
  out.transform = RigidTransform(Eigen::Quaterniond(r), t, Frame::World, Frame::World);
  out.scale = scale;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    sq += (ref[i] - (scale * (r * est[i]) + t)).squaredNorm();
  }
  out.rms = std::sqrt(sq / n);
  return out;
}

AteResult compute_ate(const Trajectory& est, const Trajectory& gt, double max_dt) {
  const auto pairs = associate(est, gt, max_dt);
  std::vector<Eigen::Vector3d> pe, pg;
  pe.reserve(pairs.size());
  pg.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    pe.push_back(est[i].pose.translation);
    pg.push_back(gt[j].pose.translation);
  }
  const AlignResult align = umeyama_align(pe, pg, false);

  std::vector<double> terr, rerr;
  terr.reserve(pairs.size());
  rerr.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    terr.push_back((pg[terr.size()] - align.transform.apply(pe[terr.size()])).norm());
    const Eigen::Quaterniond q_aligned = align.transform.rotation * est[i].pose.rotation;
    rerr.push_back(q_aligned.angularDistance(gt[j].pose.rotation) * 180.0 / M_PI);
  }

  AteResult out;
  out.pairs = static_cast<int>(pairs.size());
  out.alignment = align.transform;
  double sq = 0, sum = 0, mx = 0;
  for (double e : terr) {
    sq += e * e;
    sum += e;
    mx = std::max(mx, e);
  }
  out.trans_rmse = std::sqrt(sq / terr.size());
  out.trans_mean = sum / terr.size();
  out.trans_max = mx;
  std::vector<double> sorted = terr;
  std::sort(sorted.begin(), sorted.end());
  out.trans_median = sorted.size() % 2 == 1
                         ? sorted[sorted.size() / 2]
                         : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  sq = sum = mx = 0;
  for (double e : rerr) {
    sq += e * e;
    sum += e;
    mx = std::max(mx, e);
  }
  out.rot_rmse_deg = std::sqrt(sq / rerr.size());
  out.rot_mean_deg = sum / rerr.size();
  out.rot_max_deg = mx;
  return out;
}

MatchEval eval_matches(const std::vector<MatchPair>& matches,
                       const std::vector<std::pair<int, int>>& labels) {
  if (labels.empty()) {
    throw DataError("eval_matches: empty label set");
  }
  std::set<std::pair<int, int>> truth(labels.begin(), labels.end());
  MatchEval out;
  out.total_matches = static_cast<int>(matches.size());
  out.total_labels = static_cast<int>(truth.size());
  for (const MatchPair& m : matches) {
    if (truth.count({m.index_a, m.index_b})) {
      ++out.correct;
    }
  }
  out.precision = matches.empty() ? 1.0 : static_cast<double>(out.correct) / matches.size();
  out.recall = static_cast<double>(out.correct) / out.total_labels;
  return out;
}

std::string bench_csv_header() {
  return "scene,matcher,variant,extract_s,match_s,refine_s,total_s,matches,points3d";
}

std::string bench_csv_row(const BenchRow& row) {
  std::ostringstream ss;
  ss.precision(6);
  ss << std::fixed;
  ss << row.scene << ',' << row.matcher << ',' << row.variant << ',' << row.extract_s << ','
     << row.match_s << ',' << row.refine_s << ',' << row.total_s << ',' << row.matches << ','
     << row.points3d;
  return ss.str();
}

}  // namespace uavmap
