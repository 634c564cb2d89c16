#pragma once

#include <cstdint>
#include <vector>

#include "uavmap/errors.hpp"

namespace uavmap {

// Row-major interleaved raster. T is uint8_t for stored images and float for
// working buffers (float images keep the 0..255 intensity scale).
template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, int c, T fill = T(0))
      : width(w), height(h), channels(c),
        data(static_cast<size_t>(w) * h * c, fill) {
    if (w <= 0 || h <= 0 || c <= 0) {
      throw ConfigError("Image: nonpositive dimensions");
    }
  }

  bool empty() const { return data.empty(); }

  size_t index(int x, int y, int c = 0) const {
    return (static_cast<size_t>(y) * width + x) * channels + c;
  }
  T& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }
};

using ImageU8 = Image<std::uint8_t>;
using ImageF = Image<float>;

ImageF to_float(const ImageU8& img);
// Rounds to nearest and clamps to [0, 255].
ImageU8 to_u8(const ImageF& img);
// Channel mean.
ImageF to_gray(const ImageF& img);

// Bilinear sample of channel c at pixel coordinates (x, y), coordinates
// clamped to the valid [0, width-1] x [0, height-1] domain.
float bilinear_sample(const ImageF& img, double x, double y, int c = 0);

// Separable Gaussian blur, kernel truncated at 3 sigma, mirrored borders.
// sigma <= 0 returns the input unchanged.
ImageF gaussian_blur(const ImageF& img, double sigma);

}  // namespace uavmap
