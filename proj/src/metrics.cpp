// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "blurf/kernels.hpp"

namespace blurf {

double psnr(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw std::invalid_argument("psnr: shape mismatch");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    mse += d * d;
  }
  mse /= double(a.data.size());
  if (mse <= 0.0) return 99.0;
  const double v = 10.0 * std::log10(1.0 / mse);
  return std::min(v, 99.0);
}

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

std::vector<double> luma(const Image& img) {
  std::vector<double> out(std::size_t(img.width) * img.height);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      if (img.channels == 3) {
        out[std::size_t(r) * img.width + c] =
            0.299 * img.at(r, c, 0) + 0.587 * img.at(r, c, 1) + 0.114 * img.at(r, c, 2);
      } else {
        out[std::size_t(r) * img.width + c] = img.at(r, c, 0);
      }
    }
  return out;
}

}  // namespace

double ssim(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw std::invalid_argument("ssim: shape mismatch");
  if (a.width < kWin || a.height < kWin) throw std::invalid_argument("ssim: image smaller than window");

  std::vector<double> w(std::size_t(kWin) * kWin);
  {
    double sum = 0.0;
    const double c0 = (kWin - 1) / 2.0;
    for (int i = 0; i < kWin; ++i)
      for (int j = 0; j < kWin; ++j) {
        const double d2 = (i - c0) * (i - c0) + (j - c0) * (j - c0);
        w[std::size_t(i) * kWin + j] = std::exp(-d2 / (2.0 * kSigma * kSigma));
        sum += w[std::size_t(i) * kWin + j];
      }
    for (auto& v : w) v /= sum;
  }

  const std::vector<double> x = luma(a);
  const std::vector<double> y = luma(b);
  const double c1 = kK1 * kK1;
  const double c2 = kK2 * kK2;
  const int rows = a.height - kWin + 1;
  const int cols = a.width - kWin + 1;

  std::vector<double> row_acc(std::size_t(rows), 0.0);
#pragma omp parallel for schedule(static) if (kernels::parallel_enabled())
  for (int r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) {
      double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
      for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
          const double wv = w[std::size_t(i) * kWin + j];
          const double xv = x[std::size_t(r + i) * a.width + (c + j)];
          const double yv = y[std::size_t(r + i) * a.width + (c + j)];
          mx += wv * xv;
          my += wv * yv;
          mxx += wv * xv * xv;
          myy += wv * yv * yv;
          mxy += wv * xv * yv;
        }
      const double vx = mxx - mx * mx;
      const double vy = myy - my * my;
      const double cxy = mxy - mx * my;
      acc += ((2 * mx * my + c1) * (2 * cxy + c2)) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    row_acc[std::size_t(r)] = acc;
  }
  double total = 0.0;
  for (double v : row_acc) total += v;
  return total / (double(rows) * cols);
}

}  // namespace blurf
