// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "blurf/tensor.hpp"

namespace blurf::testing {

/// Builds a scalar graph from leaf values via `f` and compares the analytic
/// gradient of every input entry against central finite differences.
/// Returns the max relative error (denominator floored at `floor_abs`).
inline double fd_max_rel_err(
    const std::vector<std::vector<double>>& inputs, const std::vector<Shape>& shapes,
    const std::function<Tensor(Tape&, const std::vector<Tensor>&)>& f, double h = 1e-6,
    double floor_abs = 1e-6) {
  std::vector<std::vector<double>> vals = inputs;
  std::vector<std::vector<double>> grads;
  for (const auto& v : vals) grads.emplace_back(v.size(), 0.0);

  auto eval = [&](bool with_grad) {
    Tape tape;
    std::vector<Tensor> leaves;
    for (std::size_t k = 0; k < vals.size(); ++k)
      leaves.push_back(tape.leaf(shapes[k], vals[k].data(), grads[k].data()));
    Tensor out = f(tape, leaves);
    const double v = out.val()[0];
    if (with_grad) tape.backward(out);
    return v;
  };

  for (auto& g : grads) std::fill(g.begin(), g.end(), 0.0);
  eval(true);
  const auto analytic = grads;

  double max_rel = 0.0;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    for (std::size_t i = 0; i < vals[k].size(); ++i) {
      const double saved = vals[k][i];
      vals[k][i] = saved + h;
      const double fp = eval(false);
      vals[k][i] = saved - h;
      const double fm = eval(false);
      vals[k][i] = saved;
      const double fd = (fp - fm) / (2.0 * h);
      const double an = analytic[k][i];
      const double rel = std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), floor_abs});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace blurf::testing
