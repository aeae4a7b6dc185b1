// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "blurf/tensor.hpp"

namespace blurf {

/// Output width of the sinusoidal embedding for `dims` input channels.
inline int encoding_dim(int dims, int num_freq, bool include_input = true) {
  return dims * (2 * num_freq + (include_input ? 1 : 0));
}

/// Frequency embedding: [x?, sin(2^0 pi x), cos(2^0 pi x), ..., cos(2^(L-1) pi x)]
/// interleaved per frequency, all channels together.
Tensor encode(Tensor x, int num_freq, bool include_input = true);

/// Plain-vector counterpart for constant inputs (e.g. timestamps).
std::vector<double> encode_plain(const std::vector<double>& x, int dims, int num_freq,
                                 bool include_input = true);

}  // namespace blurf
