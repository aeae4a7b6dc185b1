// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "blurf/kernels.hpp"
#include "blurf/util.hpp"

using namespace blurf;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

}  // namespace

TEST_CASE("matmul parallel path is bitwise identical to the serial reference") {
  const int b = 67, i = 33, o = 29;
  const auto a = random_vec(std::size_t(b) * i, 1);
  const auto w = random_vec(std::size_t(i) * o, 2);
  std::vector<double> c_ser(std::size_t(b) * o), c_par(std::size_t(b) * o);
  kernels::matmul_serial(a.data(), w.data(), c_ser.data(), b, i, o);
  kernels::set_parallel(true);
  kernels::matmul(a.data(), w.data(), c_par.data(), b, i, o);
  CHECK(c_ser == c_par);

  // correctness against a plain triple loop
  double err = 0.0;
  for (int r = 0; r < b; ++r)
    for (int j = 0; j < o; ++j) {
      double acc = 0.0;
      for (int k = 0; k < i; ++k) acc += a[std::size_t(r) * i + k] * w[std::size_t(k) * o + j];
      err = std::max(err, std::fabs(acc - c_ser[std::size_t(r) * o + j]));
    }
  CHECK(err < 1e-12);
}

TEST_CASE("matmul gradient kernels match their serial references bitwise") {
  const int b = 41, i = 23, o = 17;
  const auto a = random_vec(std::size_t(b) * i, 3);
  const auto w = random_vec(std::size_t(i) * o, 4);
  const auto dc = random_vec(std::size_t(b) * o, 5);

  std::vector<double> da1(std::size_t(b) * i, 0.1), da2(std::size_t(b) * i, 0.1);
  kernels::matmul_grad_lhs_serial(dc.data(), w.data(), da1.data(), b, i, o);
  kernels::matmul_grad_lhs(dc.data(), w.data(), da2.data(), b, i, o);
  CHECK(da1 == da2);

  std::vector<double> dw1(std::size_t(i) * o, -0.2), dw2(std::size_t(i) * o, -0.2);
  kernels::matmul_grad_rhs_serial(a.data(), dc.data(), dw1.data(), b, i, o);
  kernels::matmul_grad_rhs(a.data(), dc.data(), dw2.data(), b, i, o);
  CHECK(dw1 == dw2);
}

TEST_CASE("block kernels: cumsum/suffix/sum/expand parallel == serial") {
  const int blocks = 37, m = 12, cols = 5;
  const int rows = blocks * m;
  const auto in = random_vec(std::size_t(rows) * cols, 6);

  std::vector<double> a(std::size_t(rows) * cols), b(std::size_t(rows) * cols);
  kernels::block_cumsum_exclusive_serial(in.data(), a.data(), rows, cols, m);
  kernels::block_cumsum_exclusive(in.data(), b.data(), rows, cols, m);
  CHECK(a == b);

  std::vector<double> s1(std::size_t(rows) * cols, 0.3), s2(std::size_t(rows) * cols, 0.3);
  kernels::block_suffix_sum_add_serial(in.data(), s1.data(), rows, cols, m);
  kernels::block_suffix_sum_add(in.data(), s2.data(), rows, cols, m);
  CHECK(s1 == s2);

  std::vector<double> t1(std::size_t(blocks) * cols), t2(std::size_t(blocks) * cols);
  kernels::block_sum_serial(in.data(), t1.data(), blocks, m, cols);
  kernels::block_sum(in.data(), t2.data(), blocks, m, cols);
  CHECK(t1 == t2);

  const auto small = random_vec(std::size_t(blocks) * cols, 7);
  std::vector<double> e1(std::size_t(rows) * cols), e2(std::size_t(rows) * cols);
  kernels::block_expand_serial(small.data(), e1.data(), blocks, m, cols);
  kernels::block_expand(small.data(), e2.data(), blocks, m, cols);
  CHECK(e1 == e2);
}

TEST_CASE("cumsum semantics: exclusive prefix per block") {
  const std::vector<double> in = {1, 2, 3, 4, 5, 6};
  std::vector<double> out(6);
  kernels::block_cumsum_exclusive_serial(in.data(), out.data(), 6, 1, 3);
  CHECK(out == std::vector<double>{0, 1, 3, 0, 4, 9});
}

TEST_CASE("disabling parallel mode forces the serial path") {
  kernels::set_parallel(false);
  CHECK_FALSE(kernels::parallel_enabled());
  kernels::set_parallel(true);
  CHECK(kernels::parallel_enabled());
}
