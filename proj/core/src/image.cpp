#include "uavmap/image.hpp"

#include <algorithm>
#include <cmath>

namespace uavmap {

ImageF to_float(const ImageU8& img) {
  ImageF out;
  out.width = img.width;
  out.height = img.height;
  out.channels = img.channels;
  out.data.assign(img.data.begin(), img.data.end());
  return out;
}

ImageU8 to_u8(const ImageF& img) {
  ImageU8 out;
  out.width = img.width;
  out.height = img.height;
  out.channels = img.channels;
  out.data.resize(img.data.size());
  for (size_t i = 0; i < img.data.size(); ++i) {
    out.data[i] = static_cast<std::uint8_t>(
        std::clamp(std::lround(static_cast<double>(img.data[i])), 0L, 255L));
  }
  return out;
}

ImageF to_gray(const ImageF& img) {
  if (img.channels == 1) {
    return img;
  }
  ImageF out(img.width, img.height, 1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      float sum = 0.0f;
      for (int c = 0; c < img.channels; ++c) {
        sum += img.at(x, y, c);
      }
      out.at(x, y) = sum / static_cast<float>(img.channels);
    }
  }
  return out;
}

float bilinear_sample(const ImageF& img, double x, double y, int c) {
  x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  const int x0 = std::min(static_cast<int>(x), img.width - 1);
  const int y0 = std::min(static_cast<int>(y), img.height - 1);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double v00 = img.at(x0, y0, c);
  const double v10 = img.at(x1, y0, c);
  const double v01 = img.at(x0, y1, c);
  const double v11 = img.at(x1, y1, c);
  return static_cast<float>((1 - fy) * ((1 - fx) * v00 + fx * v10) +
                            fy * ((1 - fx) * v01 + fx * v11));
}

namespace {

// Mirror index about the border pixels (reflect-101): -1 -> 1, n -> n-2.
int reflect(int i, int n) {
  if (n == 1) {
    return 0;
  }
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) {
    v /= sum;
  }
  return k;
}

}  // namespace

ImageF gaussian_blur(const ImageF& img, double sigma) {
  if (sigma <= 0.0 || img.empty()) {
    return img;
  }
  const std::vector<double> k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);

  ImageF tmp(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          acc += k[i + radius] * img.at(reflect(x + i, img.width), y, c);
        }
        tmp.at(x, y, c) = static_cast<float>(acc);
      }
    }
  }
  ImageF out(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          acc += k[i + radius] * tmp.at(x, reflect(y + i, img.height), c);
        }
        out.at(x, y, c) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

}  // namespace uavmap
