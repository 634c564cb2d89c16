#include "uavmap/ortho.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "uavmap/io.hpp"

namespace uavmap {

long OrthoRaster::covered_count() const {
  long n = 0;
  for (std::uint8_t c : covered) {
    n += c ? 1 : 0;
  }
  return n;
}

std::vector<FrameRecord> normalize_illumination(const std::vector<FrameRecord>& frames) {
  if (frames.empty()) {
    throw DataError("normalize_illumination: no frames");
  }
  const int channels = frames[0].image.channels;
  std::vector<std::array<double, 3>> means(frames.size()), stds(frames.size());
  std::array<double, 3> ref_mean{}, ref_std{};

  for (size_t f = 0; f < frames.size(); ++f) {
    const ImageU8& img = frames[f].image;
    const size_t n = static_cast<size_t>(img.width) * img.height;
    for (int c = 0; c < channels; ++c) {
      double sum = 0.0, sum_sq = 0.0;
      for (size_t i = 0; i < n; ++i) {
        const double v = img.data[i * channels + c];
        sum += v;
        sum_sq += v * v;
      }
      const double mean = sum / n;
      means[f][c] = mean;
      stds[f][c] = std::sqrt(std::max(sum_sq / n - mean * mean, 0.0));
      ref_mean[c] += mean;
      ref_std[c] += stds[f][c];
    }
  }
  for (int c = 0; c < channels; ++c) {
    ref_mean[c] /= frames.size();
    ref_std[c] /= frames.size();
  }

  std::vector<FrameRecord> out = frames;
  for (size_t f = 0; f < frames.size(); ++f) {
    ImageU8& img = out[f].image;
    const size_t n = static_cast<size_t>(img.width) * img.height;
    for (int c = 0; c < channels; ++c) {
      const double gain = stds[f][c] > 1e-9 ? ref_std[c] / stds[f][c] : 1.0;
      const double bias = ref_mean[c] - gain * means[f][c];
      for (size_t i = 0; i < n; ++i) {
        const double v = gain * img.data[i * channels + c] + bias;
        img.data[i * channels + c] =
            static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

ImageF nyquist_blur(const ImageF& image, double gsd, double ground_px_size) {
  if (!(gsd > 0.0) || !(ground_px_size > 0.0)) {
    throw ConfigError("nyquist_blur: scales must be positive");
  }
  if (gsd <= ground_px_size) {
    return image;  // no downsampling, nothing to prefilter
  }
  return gaussian_blur(image, 0.5 * gsd / ground_px_size);
}

Eigen::AlignedBox2d frame_ground_bbox(const FrameRecord& frame, const TerrainGrid& grid) {
  const CameraIntrinsics& k = frame.intrinsics;
  const PixelPoint corners[4] = {{0.0, 0.0},
                                 {static_cast<double>(k.width - 1), 0.0},
                                 {static_cast<double>(k.width - 1), static_cast<double>(k.height - 1)},
                                 {0.0, static_cast<double>(k.height - 1)}};
  const Eigen::Vector3d& cam = frame.pose.translation;
  Eigen::AlignedBox2d box;
  for (const PixelPoint& px : corners) {
    const Eigen::Vector3d dir = frame.pose.rotation * back_project(k, px, 1.0);
    Eigen::Vector3d hit;
    bool ok = false;
    if (dir.z() < -1e-6) {
      try {
        hit = intersect_ray_terrain(cam, dir, grid);
        ok = true;
      } catch (const NumericError&) {
        ok = false;
      }
    }
    if (!ok) {
      // Near-horizontal corner ray: fall back to the plane at the terrain
      // height under the camera; an upward ray extends to the clip guard.
      const double z_plane = query_height_clamped(grid, cam.x(), cam.y());
      if (dir.z() < -1e-12) {
        hit = cam + (z_plane - cam.z()) / dir.z() * dir;
      } else {
        hit = cam + 1e6 * Eigen::Vector3d(dir.x(), dir.y(), 0.0);
      }
    }
    box.extend(Eigen::Vector2d(hit.x(), hit.y()));
  }
  // Clip guard: footprints are only meaningful near the terrain coverage.
  Eigen::AlignedBox2d guard(grid.origin, grid.origin + Eigen::Vector2d(grid.width(), grid.height()));
  const Eigen::Vector2d pad = 0.5 * guard.sizes() + Eigen::Vector2d(10 * grid.cell_size,
                                                                    10 * grid.cell_size);
  guard.min() -= pad;
  guard.max() += pad;
  return box.intersection(guard);
}

CellRange compute_footprint(const FrameRecord& frame, const TerrainGrid& grid,
                            const OrthoRaster& raster) {
  const Eigen::AlignedBox2d box = frame_ground_bbox(frame, grid);
  CellRange range;
  if (box.isEmpty()) {
    return range;
  }
  range.col0 = static_cast<int>(std::floor((box.min().x() - raster.origin.x()) / raster.gsd)) - 2;
  range.col1 = static_cast<int>(std::floor((box.max().x() - raster.origin.x()) / raster.gsd)) + 2;
  range.row0 = static_cast<int>(std::floor((box.min().y() - raster.origin.y()) / raster.gsd)) - 2;
  range.row1 = static_cast<int>(std::floor((box.max().y() - raster.origin.y()) / raster.gsd)) + 2;
  range.col0 = std::max(range.col0, 0);
  range.row0 = std::max(range.row0, 0);
  range.col1 = std::min(range.col1, raster.cols - 1);
  range.row1 = std::min(range.row1, raster.rows - 1);
  return range;
}

double compute_score(const WorldPoint& point, const WorldPoint& cam_center) {
  const double dist = (point - cam_center).norm();
  if (dist < 1e-12) {
    throw NumericError("compute_score: point coincides with the camera center");
  }
  // Nadir view scores +1: positive when the camera is above the point.
  return std::clamp((cam_center.z() - point.z()) / dist, -1.0, 1.0);
}

BlendResult blend_pixel(const Eigen::Vector3d& existing_rgb, double existing_score,
                        bool existing_covered, const Eigen::Vector3d& new_rgb,
                        double new_score, double margin) {
  if (!existing_covered || margin <= 0.0 || new_score - existing_score > margin) {
    return {new_rgb, new_score};
  }
  const double alpha = (new_score - existing_score + margin) / (2.0 * margin);
  return {alpha * new_rgb + (1.0 - alpha) * existing_rgb, new_score};
}

OrthoRaster render(const std::vector<FrameRecord>& frames, const TerrainGrid& grid,
                   const RenderOptions& options) {
  if (frames.empty()) {
    throw DataError("render: no frames");
  }

  // Ground pixel size per frame and the output GSD.
  std::vector<double> ground_px(frames.size());
  for (size_t f = 0; f < frames.size(); ++f) {
    ground_px[f] = altitude_above_ground(frames[f].pose, grid) / frames[f].intrinsics.fx;
  }
  double gsd = options.gsd;
  if (gsd <= 0.0) {
    std::vector<double> sorted = ground_px;
    std::sort(sorted.begin(), sorted.end());
    gsd = sorted[sorted.size() / 2];
  }

  // Raster extent: union of frame footprints, one cell of padding.
  Eigen::AlignedBox2d world;
  for (const FrameRecord& frame : frames) {
    world.extend(frame_ground_bbox(frame, grid));
  }
  if (world.isEmpty()) {
    throw DataError("render: no frame covers the terrain");
  }
  OrthoRaster raster;
  raster.gsd = gsd;
  raster.origin = world.min() - Eigen::Vector2d(gsd, gsd);
  raster.cols = static_cast<int>(std::ceil((world.max().x() - raster.origin.x()) / gsd)) + 1;
  raster.rows = static_cast<int>(std::ceil((world.max().y() - raster.origin.y()) / gsd)) + 1;
  raster.rgb.assign(static_cast<size_t>(raster.cols) * raster.rows * 3, 0);
  raster.score_layer.assign(static_cast<size_t>(raster.cols) * raster.rows,
                            OrthoRaster::kUncoveredScore);
  raster.covered.assign(static_cast<size_t>(raster.cols) * raster.rows, 0);

  std::vector<FrameRecord> prepared =
      options.illumination_normalization ? normalize_illumination(frames) : frames;

  for (size_t f = 0; f < prepared.size(); ++f) {
    const FrameRecord& frame = prepared[f];
    ImageF img = to_float(frame.image);
    if (options.nyquist_blur) {
      img = nyquist_blur(img, gsd, ground_px[f]);
    }
    const CellRange range = compute_footprint(frame, grid, raster);
    if (range.empty()) {
      continue;
    }
    const Eigen::Quaterniond q_inv = frame.pose.rotation.conjugate();
    const Eigen::Vector3d& cam = frame.pose.translation;
    const CameraIntrinsics& k = frame.intrinsics;

    for (int r = range.row0; r <= range.row1; ++r) {
      for (int c = range.col0; c <= range.col1; ++c) {
        const Eigen::Vector2d xy = raster.cell_center(c, r);
        const double z = query_height_clamped(grid, xy.x(), xy.y());
        const Eigen::Vector3d point(xy.x(), xy.y(), z);
        const size_t idx = raster.index(c, r);
        const double score = compute_score(point, cam);
        if (!(score > raster.score_layer[idx])) {
          continue;
        }
        const Eigen::Vector3d pc = q_inv * (point - cam);
        if (pc.z() <= 0.0) {
          continue;
        }
        const double u = k.fx * pc.x() / pc.z() + k.cx;
        const double v = k.fy * pc.y() / pc.z() + k.cy;
        if (u < 0.0 || u > k.width - 1.0 || v < 0.0 || v > k.height - 1.0) {
          continue;
        }
        const Eigen::Vector3d sample(bilinear_sample(img, u, v, 0), bilinear_sample(img, u, v, 1),
                                     bilinear_sample(img, u, v, 2));
        const Eigen::Vector3d existing(raster.rgb[idx * 3 + 0], raster.rgb[idx * 3 + 1],
                                       raster.rgb[idx * 3 + 2]);
        const BlendResult blended = blend_pixel(existing, raster.score_layer[idx],
                                                raster.covered[idx] != 0, sample, score,
                                                options.margin);
        for (int ch = 0; ch < 3; ++ch) {
          raster.rgb[idx * 3 + ch] =
              static_cast<std::uint8_t>(std::clamp(std::lround(blended.rgb[ch]), 0L, 255L));
        }
        raster.score_layer[idx] = static_cast<float>(blended.score);
        raster.covered[idx] = 1;
      }
    }
  }

  if (raster.covered_count() == 0) {
    throw DataError("render: no cell was covered by any frame");
  }
  return raster;
}

void write_orthoimage(const OrthoRaster& raster, const std::string& png_path,
                      bool transparent_uncovered) {
  if (raster.covered_count() == 0) {
    throw DataError("write_orthoimage: raster has no coverage");
  }
  const int channels = transparent_uncovered ? 4 : 3;
  ImageU8 img(raster.cols, raster.rows, channels);
  for (int r = 0; r < raster.rows; ++r) {
    const int png_row = raster.rows - 1 - r;  // north-up
    for (int c = 0; c < raster.cols; ++c) {
      const size_t idx = raster.index(c, r);
      for (int ch = 0; ch < 3; ++ch) {
        img.at(c, png_row, ch) = raster.covered[idx] ? raster.rgb[idx * 3 + ch] : 0;
      }
      if (channels == 4) {
        img.at(c, png_row, 3) = raster.covered[idx] ? 255 : 0;
      }
    }
  }
  write_png(png_path, img);

  const std::filesystem::path base(png_path);
  std::filesystem::path world_path = base;
  world_path.replace_extension(".pgw");
  write_world_file(world_path.string(), raster.gsd, raster.origin.x() + 0.5 * raster.gsd,
                   raster.origin.y() + (raster.rows - 0.5) * raster.gsd);

  double smin = 1.0, smax = -1.0, ssum = 0.0;
  long covered = 0;
  for (size_t i = 0; i < raster.score_layer.size(); ++i) {
    if (raster.covered[i]) {
      smin = std::min(smin, static_cast<double>(raster.score_layer[i]));
      smax = std::max(smax, static_cast<double>(raster.score_layer[i]));
      ssum += raster.score_layer[i];
      ++covered;
    }
  }
  nlohmann::json sidecar;
  sidecar["crs"] = "local ENU meters (world file maps pixel -> world)";
  sidecar["gsd"] = raster.gsd;
  sidecar["origin"] = {raster.origin.x(), raster.origin.y()};
  sidecar["size"] = {raster.cols, raster.rows};
  sidecar["covered_fraction"] =
      static_cast<double>(covered) / (static_cast<double>(raster.cols) * raster.rows);
  sidecar["score"] = {{"min", smin}, {"max", smax}, {"mean", covered ? ssum / covered : 0.0}};
  std::filesystem::path json_path = base;
  json_path.replace_extension(".json");
  std::ofstream out(json_path);
  if (!out) {
    throw DataError("write_orthoimage: cannot write sidecar " + json_path.string());
  }
  out << sidecar.dump(2) << "\n";
}

}  // namespace uavmap
