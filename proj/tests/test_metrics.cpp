// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "blurf/image.hpp"
#include "blurf/metrics.hpp"
#include "blurf/util.hpp"

using namespace blurf;
namespace fs = std::filesystem;

namespace {

Image random_image(int w, int h, int c, std::uint64_t seed) {
  Image img(w, h, c);
  Rng rng(seed);
  for (auto& v : img.data) v = rng.uniform(0.0, 1.0);
  return img;
}

// straight-line reference: gaussian window accumulated with explicit loops
double ssim_reference(const Image& a, const Image& b) {
  const int win = 11;
  const double sigma = 1.5, k1 = 0.01, k2 = 0.03;
  std::vector<double> w(win * win);
  double wsum = 0.0;
  for (int i = 0; i < win; ++i)
    for (int j = 0; j < win; ++j) {
      const double d2 = (i - 5.0) * (i - 5.0) + (j - 5.0) * (j - 5.0);
      w[std::size_t(i) * win + j] = std::exp(-d2 / (2 * sigma * sigma));
      wsum += w[std::size_t(i) * win + j];
    }
  for (auto& v : w) v /= wsum;
  auto luma = [](const Image& img, int r, int c) {
    if (img.channels == 1) return img.at(r, c);
    return 0.299 * img.at(r, c, 0) + 0.587 * img.at(r, c, 1) + 0.114 * img.at(r, c, 2);
  };
  double total = 0.0;
  int count = 0;
  for (int r = 0; r + win <= a.height; ++r)
    for (int c = 0; c + win <= a.width; ++c) {
      double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
      for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) {
          const double wv = w[std::size_t(i) * win + j];
          const double x = luma(a, r + i, c + j);
          const double y = luma(b, r + i, c + j);
          mx += wv * x;
          my += wv * y;
          xx += wv * x * x;
          yy += wv * y * y;
          xy += wv * x * y;
        }
      const double vx = xx - mx * mx, vy = yy - my * my, cxy = xy - mx * my;
      total += ((2 * mx * my + k1 * k1) * (2 * cxy + k2 * k2)) /
               ((mx * mx + my * my + k1 * k1) * (vx + vy + k2 * k2));
      ++count;
    }
  return total / count;
}

}  // namespace

TEST_CASE("psnr: sentinel, uniform difference, symmetry") {
  Image a = random_image(24, 16, 3, 1);
  for (auto& v : a.data) v *= 0.9;  // leave headroom for the +0.1 shift
  CHECK(psnr(a, a) == 99.0);

  Image b = a;
  for (auto& v : b.data) v += 0.1;
  CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(psnr(a, b) == psnr(b, a));

  Image c(10, 10, 3);
  CHECK_THROWS_AS(psnr(a, c), std::invalid_argument);
}

TEST_CASE("ssim: identical images score one, inverted images score below") {
  const Image a = random_image(32, 20, 3, 2);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  Image inv = a;
  for (auto& v : inv.data) v = 1.0 - v;
  CHECK(ssim(a, inv) < 1.0);
}

TEST_CASE("ssim matches the double-loop reference") {
  const Image a = random_image(28, 18, 3, 3);
  const Image b = random_image(28, 18, 3, 4);
  CHECK(std::fabs(ssim(a, b) - ssim_reference(a, b)) < 1e-10);

  const Image g1 = random_image(20, 15, 1, 5);
  const Image g2 = random_image(20, 15, 1, 6);
  CHECK(std::fabs(ssim(g1, g2) - ssim_reference(g1, g2)) < 1e-10);
}

TEST_CASE("ssim rejects images smaller than the window") {
  const Image a = random_image(8, 8, 1, 7);
  CHECK_THROWS_AS(ssim(a, a), std::invalid_argument);
}

TEST_CASE("png round trip: color, gray, and 1-bit masks") {
  namespace fs = std::filesystem;
  const std::string dir = fs::temp_directory_path() / "blurf_png_test";
  fs::create_directories(dir);

  Image img = random_image(33, 21, 3, 8);
  save_png(dir + "/c.png", img);
  const Image back = load_png(dir + "/c.png");
  REQUIRE(back.width == img.width);
  REQUIRE(back.channels == 3);
  double err = 0.0;
  for (std::size_t i = 0; i < img.data.size(); ++i)
    err = std::max(err, std::fabs(img.data[i] - back.data[i]));
  CHECK(err <= 0.5 / 255.0 + 1e-9);

  Image mask(19, 11, 1);
  Rng rng(9);
  for (auto& v : mask.data) v = rng.uniform() < 0.4 ? 1.0 : 0.0;
  save_png_mask(dir + "/m.png", mask);
  const Image mback = load_png(dir + "/m.png");
  CHECK(mback.data == mask.data);

  fs::remove_all(dir);
}

TEST_CASE("pfm round trip: gray and padded two-channel flow") {
  namespace fs = std::filesystem;
  const std::string dir = fs::temp_directory_path() / "blurf_pfm_test";
  fs::create_directories(dir);

  Image depth = random_image(17, 9, 1, 10);
  for (auto& v : depth.data) v *= 8.0;
  save_pfm(dir + "/d.pfm", depth);
  const Image dback = load_pfm(dir + "/d.pfm");
  REQUIRE(dback.channels == 1);
  double err = 0.0;
  for (std::size_t i = 0; i < depth.data.size(); ++i)
    err = std::max(err, std::fabs(depth.data[i] - dback.data[i]));
  CHECK(err < 1e-6);

  Image flow(13, 7, 2);
  Rng rng(11);
  for (auto& v : flow.data) v = rng.uniform(-5.0, 5.0);
  save_pfm(dir + "/f.pfm", flow);
  const Image fback = load_pfm(dir + "/f.pfm");
  REQUIRE(fback.channels == 3);
  err = 0.0;
  for (int r = 0; r < flow.height; ++r)
    for (int c = 0; c < flow.width; ++c) {
      err = std::max(err, std::fabs(flow.at(r, c, 0) - fback.at(r, c, 0)));
      err = std::max(err, std::fabs(flow.at(r, c, 1) - fback.at(r, c, 1)));
      CHECK(fback.at(r, c, 2) == 0.0);
    }
  CHECK(err < 1e-6);
  fs::remove_all(dir);
}
