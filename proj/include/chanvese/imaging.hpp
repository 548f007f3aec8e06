#pragma once

// In-memory image operations: ROI cropping, Gaussian blur, additive noise and
// the synthetic fixtures (two-level disk, thin-bar cross).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chanvese/grid.hpp"

namespace chanvese {

struct RoiRect {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
};

inline bool roi_fits(const RoiRect& roi, int width, int height) noexcept {
  return roi.x0 >= 0 && roi.y0 >= 0 && roi.width >= kMinGridExtent &&
         roi.height >= kMinGridExtent && roi.x0 + roi.width <= width &&
         roi.y0 + roi.height <= height;
}

inline ScalarField crop_roi(const ScalarField& img, const RoiRect& roi) {
  if (!roi_fits(roi, img.width(), img.height())) {
    throw ParameterError("roi " + std::to_string(roi.x0) + "," + std::to_string(roi.y0) + "," +
                         std::to_string(roi.width) + "," + std::to_string(roi.height) +
                         " is out of bounds for a " + std::to_string(img.width()) + "x" +
                         std::to_string(img.height()) + " image");
  }
  ScalarField out(roi.width, roi.height, img.spacing());
  for (int i = 0; i < roi.height; ++i) {
    for (int j = 0; j < roi.width; ++j) out(i, j) = img(roi.y0 + i, roi.x0 + j);
  }
  return out;
}

/// Normalized 1-D Gaussian taps for offsets -r..r, r = ceil(3 sigma).
inline std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian_blur: sigma must be > 0");
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int t = -r; t <= r; ++t) {
    k[t + r] = std::exp(-0.5 * (t * t) / (sigma * sigma));
    sum += k[t + r];
  }
  for (double& v : k) v /= sum;
  return k;
}

/// Separable Gaussian blur with replicate-clamped borders.
inline ScalarField gaussian_blur(const ScalarField& img, double sigma) {
  const std::vector<double> k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  ScalarField tmp(img.width(), img.height(), img.spacing());
  for (int i = 0; i < img.height(); ++i) {
    for (int j = 0; j < img.width(); ++j) {
      double acc = 0.0;
      for (int t = -r; t <= r; ++t) acc += k[t + r] * img.clamped(i, j + t);
      tmp(i, j) = acc;
    }
  }
  ScalarField out(img.width(), img.height(), img.spacing());
  for (int i = 0; i < img.height(); ++i) {
    for (int j = 0; j < img.width(); ++j) {
      double acc = 0.0;
      for (int t = -r; t <= r; ++t) acc += k[t + r] * tmp.clamped(i + t, j);
      out(i, j) = acc;
    }
  }
  return out;
}

/// Zero-mean Gaussian samples, one per pixel in row-major order, from a
/// seeded mt19937_64.
inline ScalarField gaussian_noise(int width, int height, double stddev, std::uint64_t seed,
                                  double spacing = 1.0) {
  ScalarField out(width, height, spacing);
  if (stddev == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& v : out.values()) v = dist(rng);
  return out;
}

/// img + noise, clamped to [0, 1].
inline ScalarField add_noise(const ScalarField& img, double stddev, std::uint64_t seed) {
  if (!(stddev >= 0.0)) throw ParameterError("add_noise: stddev must be >= 0");
  if (stddev == 0.0) return img;
  const ScalarField noise = gaussian_noise(img.width(), img.height(), stddev, seed, img.spacing());
  ScalarField out = img;
  auto dst = out.values();
  auto n = noise.values();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = std::clamp(dst[k] + n[k], 0.0, 1.0);
  return out;
}

struct SyntheticImage {
  ScalarField image;
  Mask truth;
};

/// Disk of intensity `fg` on `bg`. A pixel is inside when its centre lies
/// within `radius` of (cx, cy).
inline SyntheticImage synth_disk(int width, int height, double cx, double cy, double radius,
                                 double fg, double bg) {
  if (!(radius > 0.0)) throw ParameterError("synth_disk: radius must be > 0");
  SyntheticImage s{ScalarField(width, height, 1.0, bg), Mask(width, height)};
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      if (std::hypot(j - cx, i - cy) <= radius) {
        s.image(i, j) = fg;
        s.truth(i, j) = 1;
      }
    }
  }
  return s;
}

/// Cross of one horizontal and one vertical bar, each `thickness` pixels
/// wide, starting at row/column (extent - thickness) / 2.
inline SyntheticImage synth_thin_edges(int width, int height, int thickness, double fg,
                                       double bg) {
  if (thickness < 1 || thickness > std::min(width, height)) {
    throw ParameterError("synth_thin_edges: thickness must lie in [1, min(width, height)]");
  }
  SyntheticImage s{ScalarField(width, height, 1.0, bg), Mask(width, height)};
  const int row0 = (height - thickness) / 2;
  const int col0 = (width - thickness) / 2;
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      const bool bar = (i >= row0 && i < row0 + thickness) || (j >= col0 && j < col0 + thickness);
      if (bar) {
        s.image(i, j) = fg;
        s.truth(i, j) = 1;
      }
    }
  }
  return s;
}

}  // namespace chanvese
