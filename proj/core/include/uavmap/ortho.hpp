#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "uavmap/geometry.hpp"
#include "uavmap/image.hpp"
#include "uavmap/terrain.hpp"

namespace uavmap {

struct FrameRecord {
  std::string id;
  double t = 0.0;
  ImageU8 image;             // RGB
  RigidTransform pose;       // Camera -> World
  CameraIntrinsics intrinsics;
};

// Georeferenced output raster. Row 0 sits at min y (north-up flipping happens
// at PNG/world-file write time). Cell (r, c) center is
// origin + ((c + 0.5) * gsd, (r + 0.5) * gsd).
struct OrthoRaster {
  static constexpr float kUncoveredScore = -4.0f;

  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  double gsd = 0.0;
  int cols = 0;
  int rows = 0;
  std::vector<std::uint8_t> rgb;      // rows*cols*3
  std::vector<float> score_layer;     // rows*cols, kUncoveredScore until written
  std::vector<std::uint8_t> covered;  // rows*cols

  size_t index(int col, int row) const { return static_cast<size_t>(row) * cols + col; }
  Eigen::Vector2d cell_center(int col, int row) const {
    return origin + Eigen::Vector2d((col + 0.5) * gsd, (row + 0.5) * gsd);
  }
  long covered_count() const;
};

struct RenderOptions {
  double gsd = 0.0;     // <= 0: median ground pixel size across frames
  double margin = 0.05; // score-gap crossfade width; 0 = pure replacement
  bool illumination_normalization = true;
  bool nyquist_blur = true;
};

// Per-channel gain/bias normalization toward the across-sequence reference
// (mean of per-frame means and stds). Constant frames pass through with
// gain 1. Throws DataError on an empty list.
std::vector<FrameRecord> normalize_illumination(const std::vector<FrameRecord>& frames);

// Anti-alias prefilter: identity when gsd <= ground_px_size, otherwise a
// Gaussian blur with sigma = 0.5 * gsd / ground_px_size (truncated at
// 3 sigma, mirrored borders).
ImageF nyquist_blur(const ImageF& image, double gsd, double ground_px_size);

struct CellRange {
  int col0 = 0, row0 = 0;
  int col1 = -1, row1 = -1;
  bool empty() const { return col1 < col0 || row1 < row0; }
};

// World-space bounding box of the frame's ground footprint: the four corner
// pixel rays intersected with the terrain (five fixed-point iterations of
// the height query). A near-horizontal corner ray falls back to the plane at
// the terrain height under the camera.
Eigen::AlignedBox2d frame_ground_bbox(const FrameRecord& frame, const TerrainGrid& grid);

// frame_ground_bbox converted to raster cells, dilated by 2 cells, clipped.
CellRange compute_footprint(const FrameRecord& frame, const TerrainGrid& grid,
                            const OrthoRaster& raster);

// Viewpoint score: cosine between the line of sight and vertical, +1 when the
// camera is straight above the point, 0 at horizontal sight. Always in [-1, 1].
// Throws NumericError for coincident points.
double compute_score(const WorldPoint& point, const WorldPoint& cam_center);

// Score-gap blend. Precondition (checked by the caller in the render loop):
// new_score > existing_score. Uncovered cells and score gaps above `margin`
// take the new pixel outright; within the margin the pixels crossfade with
// alpha = (gap + margin) / (2 * margin). The stored score is always new_score.
struct BlendResult {
  Eigen::Vector3d rgb;
  double score;
};
BlendResult blend_pixel(const Eigen::Vector3d& existing_rgb, double existing_score,
                        bool existing_covered, const Eigen::Vector3d& new_rgb,
                        double new_score, double margin);

// Backward-projection orthoimage generation over the terrain grid with
// per-cell best-view scoring. Throws DataError when no cell gets covered.
OrthoRaster render(const std::vector<FrameRecord>& frames, const TerrainGrid& grid,
                   const RenderOptions& options = {});

// Writes an 8-bit PNG (RGBA with transparent uncovered cells when
// `transparent_uncovered`, otherwise RGB with black), an ESRI world file
// (.pgw) and a JSON sidecar (.json) next to it.
void write_orthoimage(const OrthoRaster& raster, const std::string& png_path,
                      bool transparent_uncovered = true);

}  // namespace uavmap
