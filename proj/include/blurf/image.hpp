// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace blurf {

/// Row-major dense image; values in [0,1] for color/mask data, world units
/// for depth and pixels for flow.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h, int c) : width(w), height(h), channels(c), data(std::size_t(w) * h * c, 0.0) {}

  double& at(int row, int col, int ch = 0) {
    return data[(std::size_t(row) * width + col) * channels + ch];
  }
  double at(int row, int col, int ch = 0) const {
    return data[(std::size_t(row) * width + col) * channels + ch];
  }
  std::size_t size() const { return data.size(); }
};

/// 8-bit PNG, grayscale or RGB.
void save_png(const std::string& path, const Image& img);
/// 1-bit grayscale PNG for masks; nonzero pixels become 1.
void save_png_mask(const std::string& path, const Image& img);
Image load_png(const std::string& path);

/// Little-endian float PFM ("Pf" for 1 channel, "PF" for 3). Two-channel
/// data is padded with a zero third channel on write.
void save_pfm(const std::string& path, const Image& img);
Image load_pfm(const std::string& path);

}  // namespace blurf
