// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "blurf/image.hpp"

namespace blurf {

/// Values in [0,1]; identical images report the 99.0 dB sentinel so CSV
/// output stays finite.
double psnr(const Image& a, const Image& b);

/// Windowed SSIM on luma (0.299/0.587/0.114), 11x11 Gaussian window with
/// sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.
double ssim(const Image& a, const Image& b);

}  // namespace blurf
