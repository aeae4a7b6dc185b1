// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <cmath>
#include <cstring>

#include "blurf/kernels.hpp"

namespace blurf {

namespace {
std::atomic<std::uint64_t> g_tape_epoch{1};
}

Tape::Tape(BufferPool* pool)
    : pool_(pool), epoch_(g_tape_epoch.fetch_add(1, std::memory_order_relaxed)) {}

Tape::~Tape() {
  if (!pool_) return;
  for (auto& n : nodes_) {
    pool_->release(std::move(n.value));
    pool_->release(std::move(n.grad));
  }
}

namespace {

Tape& tape_of(Tensor a) {
  if (!a.valid()) throw std::invalid_argument("tensor handle is empty");
  return *a.tape;
}

void check_same(Tensor a, Tensor b) {
  if (a.tape != b.tape) throw std::invalid_argument("tensors live on different tapes");
  if (!(a.shape() == b.shape())) throw std::invalid_argument("shape mismatch");
}

const std::vector<double>& V(Tensor t) { return t.tape->node(t.id).value; }
bool req(Tensor t) { return t.tape->node(t.id).requires_grad; }

}  // namespace

Shape Tensor::shape() const { return tape->node(id).shape; }
const std::vector<double>& Tensor::val() const { return tape->node(id).value; }
double Tensor::scalar() const {
  const auto& v = val();
  if (v.size() != 1) throw std::logic_error("scalar() on non-scalar tensor");
  return v[0];
}

Tensor Tape::alloc(Shape s, bool requires_grad) {
  Node n;
  n.shape = s;
  if (pool_) {
    n.value = pool_->acquire(std::size_t(s.size()));
  } else {
    n.value.resize(std::size_t(s.size()));
  }
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Tensor{this, int(nodes_.size()) - 1};
}

Tensor Tape::constant(Shape s, std::vector<double> data) {
  if (std::int64_t(data.size()) != s.size()) throw std::invalid_argument("constant: size mismatch");
  Node n;
  n.shape = s;
  n.value = std::move(data);
  n.requires_grad = false;
  nodes_.push_back(std::move(n));
  return Tensor{this, int(nodes_.size()) - 1};
}

Tensor Tape::leaf(Shape s, const double* values, double* grad_sink) {
  Tensor t = alloc(s, true);
  Node& n = node(t.id);
  std::memcpy(n.value.data(), values, sizeof(double) * std::size_t(s.size()));
  const int id = t.id;
  n.back = [id, grad_sink](Tape& tp) {
    const auto& g = tp.node(id).grad;
    for (std::size_t i = 0; i < g.size(); ++i) grad_sink[i] += g[i];
  };
  return t;
}

std::vector<double>& Tape::grad_buf(int id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) {
    if (pool_) {
      n.grad = pool_->acquire(std::size_t(n.shape.size()));
      std::fill(n.grad.begin(), n.grad.end(), 0.0);
    } else {
      n.grad.assign(std::size_t(n.shape.size()), 0.0);
    }
  }
  return n.grad;
}

void Tape::backward(Tensor root) {
  if (root.tape != this) throw std::invalid_argument("backward: foreign tensor");
  if (node(root.id).shape.size() != 1) throw std::invalid_argument("backward: root must be scalar");
  if (!node(root.id).requires_grad) return;  // constant graph, nothing to do
  grad_buf(root.id)[0] += 1.0;
  for (int id = root.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.grad.empty() || !n.back) continue;
    n.back(*this);
  }
}

void Tape::set_detach_mode(DetachMode m, std::vector<std::vector<double>>* log) {
  detach_mode_ = m;
  detach_log_ = log;
  detach_cursor = 0;
}

// ---------------------------------------------------------------------------

namespace {

/// Registers a unary elementwise op with derivative df(x, y) where y = f(x).
template <class F, class DF>
Tensor unary(Tensor a, F f, DF df) {
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc(a.shape(), req(a));
  kernels::map1(V(a).data(), tp.node(out.id).value.data(), a.shape().size(), f);
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, oi = out.id;
    tp.node(out.id).back = [ai, oi, df](Tape& t) {
      const auto& g = t.node(oi).grad;
      const auto& x = t.node(ai).value;
      const auto& y = t.node(oi).value;
      auto& ga = t.grad_buf(ai);
      const std::int64_t n = std::int64_t(g.size());
      if (kernels::parallel_enabled() && n >= kernels::kParallelGrain) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) ga[i] += g[i] * df(x[i], y[i]);
      } else {
        for (std::int64_t i = 0; i < n; ++i) ga[i] += g[i] * df(x[i], y[i]);
      }
    };
  }
  return out;
}

void axpy(const std::vector<double>& g, std::vector<double>& acc, double s = 1.0) {
  const std::int64_t n = std::int64_t(g.size());
  if (kernels::parallel_enabled() && n >= kernels::kParallelGrain) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) acc[i] += s * g[i];
  } else {
    for (std::int64_t i = 0; i < n; ++i) acc[i] += s * g[i];
  }
}

}  // namespace

Tensor add(Tensor a, Tensor b) {
  check_same(a, b);
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc(a.shape(), req(a) || req(b));
  kernels::map2(V(a).data(), V(b).data(), tp.node(out.id).value.data(), a.shape().size(),
                [](double x, double y) { return x + y; });
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, bi = b.id, oi = out.id;
    const bool ra = req(a), rb = req(b);
    tp.node(out.id).back = [=](Tape& t) {
      const auto& g = t.node(oi).grad;
      if (ra) axpy(g, t.grad_buf(ai));
      if (rb) axpy(g, t.grad_buf(bi));
    };
  }
  return out;
}

Tensor sub(Tensor a, Tensor b) {
  check_same(a, b);
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc(a.shape(), req(a) || req(b));
  kernels::map2(V(a).data(), V(b).data(), tp.node(out.id).value.data(), a.shape().size(),
                [](double x, double y) { return x - y; });
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, bi = b.id, oi = out.id;
    const bool ra = req(a), rb = req(b);
    tp.node(out.id).back = [=](Tape& t) {
      const auto& g = t.node(oi).grad;
      if (ra) axpy(g, t.grad_buf(ai));
      if (rb) axpy(g, t.grad_buf(bi), -1.0);
    };
  }
  return out;
}

Tensor mul(Tensor a, Tensor b) {
  check_same(a, b);
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc(a.shape(), req(a) || req(b));
  kernels::map2(V(a).data(), V(b).data(), tp.node(out.id).value.data(), a.shape().size(),
                [](double x, double y) { return x * y; });
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, bi = b.id, oi = out.id;
    const bool ra = req(a), rb = req(b);
    tp.node(out.id).back = [=](Tape& t) {
      const auto& g = t.node(oi).grad;
      const auto& av = t.node(ai).value;
      const auto& bv = t.node(bi).value;
      const std::int64_t n = std::int64_t(g.size());
      if (ra) {
        auto& ga = t.grad_buf(ai);
        for (std::int64_t i = 0; i < n; ++i) ga[i] += g[i] * bv[i];
      }
      if (rb) {
        auto& gb = t.grad_buf(bi);
        for (std::int64_t i = 0; i < n; ++i) gb[i] += g[i] * av[i];
      }
    };
  }
  return out;
}

Tensor div(Tensor a, Tensor b) {
  check_same(a, b);
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc(a.shape(), req(a) || req(b));
  kernels::map2(V(a).data(), V(b).data(), tp.node(out.id).value.data(), a.shape().size(),
                [](double x, double y) { return x / y; });
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, bi = b.id, oi = out.id;
    const bool ra = req(a), rb = req(b);
    tp.node(out.id).back = [=](Tape& t) {
      const auto& g = t.node(oi).grad;
      const auto& av = t.node(ai).value;
      const auto& bv = t.node(bi).value;
      const std::int64_t n = std::int64_t(g.size());
      if (ra) {
        auto& ga = t.grad_buf(ai);
        for (std::int64_t i = 0; i < n; ++i) ga[i] += g[i] / bv[i];
      }
      if (rb) {
        auto& gb = t.grad_buf(bi);
        for (std::int64_t i = 0; i < n; ++i) gb[i] -= g[i] * av[i] / (bv[i] * bv[i]);
      }
    };
  }
  return out;
}

Tensor neg(Tensor a) {
  return unary(a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor add_c(Tensor a, double c) {
  return unary(a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Tensor mul_c(Tensor a, double c) {
  return unary(a, [c](double x) { return x * c; }, [c](double, double) { return c; });
}

Tensor scale_by(Tensor a, Tensor s) {
  if (s.shape().size() != 1) throw std::invalid_argument("scale_by: scalar expected");
  Tape& tp = tape_of(a);
  const double sv = s.val()[0];
  Tensor out = tp.alloc(a.shape(), req(a) || req(s));
  kernels::map1(V(a).data(), tp.node(out.id).value.data(), a.shape().size(),
                [sv](double x) { return x * sv; });
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, si = s.id, oi = out.id;
    const bool ra = req(a), rs = req(s);
    tp.node(out.id).back = [=](Tape& t) {
      const auto& g = t.node(oi).grad;
      const auto& av = t.node(ai).value;
      const double svv = t.node(si).value[0];
      if (ra) axpy(g, t.grad_buf(ai), svv);
      if (rs) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * av[i];
        t.grad_buf(si)[0] += acc;
      }
    };
  }
  return out;
}

Tensor add_scalar_t(Tensor a, Tensor s) {
  if (s.shape().size() != 1) throw std::invalid_argument("add_scalar_t: scalar expected");
  Tape& tp = tape_of(a);
  const double sv = s.val()[0];
  Tensor out = tp.alloc(a.shape(), req(a) || req(s));
  kernels::map1(V(a).data(), tp.node(out.id).value.data(), a.shape().size(),
                [sv](double x) { return x + sv; });
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, si = s.id, oi = out.id;
    const bool ra = req(a), rs = req(s);
    tp.node(out.id).back = [=](Tape& t) {
      const auto& g = t.node(oi).grad;
      if (ra) axpy(g, t.grad_buf(ai));
      if (rs) {
        double acc = 0.0;
        for (double gi : g) acc += gi;
        t.grad_buf(si)[0] += acc;
      }
    };
  }
  return out;
}

Tensor add_rowvec(Tensor a, Tensor v) {
  const Shape sa = a.shape(), sv = v.shape();
  if (sv.rows != 1 || sv.cols != sa.cols) throw std::invalid_argument("add_rowvec: shape");
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc(sa, req(a) || req(v));
  const auto& av = V(a);
  const auto& vv = V(v);
  auto& ov = tp.node(out.id).value;
  const int rows = sa.rows, cols = sa.cols;
  if (kernels::parallel_enabled() && sa.size() >= kernels::kParallelGrain) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) ov[std::size_t(r) * cols + c] = av[std::size_t(r) * cols + c] + vv[c];
  } else {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) ov[std::size_t(r) * cols + c] = av[std::size_t(r) * cols + c] + vv[c];
  }
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, vi = v.id, oi = out.id;
    const bool ra = req(a), rv = req(v);
    tp.node(out.id).back = [=](Tape& t) {
      const auto& g = t.node(oi).grad;
      if (ra) axpy(g, t.grad_buf(ai));
      if (rv) {
        auto& gv = t.grad_buf(vi);
        // one owner per column keeps the reduction order fixed
        for (int c = 0; c < cols; ++c) {
          double acc = 0.0;
          for (int r = 0; r < rows; ++r) acc += g[std::size_t(r) * cols + c];
          gv[c] += acc;
        }
      }
    };
  }
  return out;
}

namespace {

Tensor colvec_op(Tensor a, Tensor s, bool divide) {
  const Shape sa = a.shape(), ss = s.shape();
  if (ss.cols != 1 || ss.rows != sa.rows) throw std::invalid_argument("colvec op: shape");
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc(sa, req(a) || req(s));
  const auto& av = V(a);
  const auto& sv = V(s);
  auto& ov = tp.node(out.id).value;
  const int rows = sa.rows, cols = sa.cols;
  for (int r = 0; r < rows; ++r) {
    const double f = divide ? 1.0 / sv[r] : sv[r];
    for (int c = 0; c < cols; ++c) ov[std::size_t(r) * cols + c] = av[std::size_t(r) * cols + c] * f;
  }
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, si = s.id, oi = out.id;
    const bool ra = req(a), rs = req(s);
    tp.node(out.id).back = [=](Tape& t) {
      const auto& g = t.node(oi).grad;
      const auto& avv = t.node(ai).value;
      const auto& svv = t.node(si).value;
      if (ra) {
        auto& ga = t.grad_buf(ai);
        for (int r = 0; r < rows; ++r) {
          const double f = divide ? 1.0 / svv[r] : svv[r];
          for (int c = 0; c < cols; ++c) ga[std::size_t(r) * cols + c] += g[std::size_t(r) * cols + c] * f;
        }
      }
      if (rs) {
        auto& gs = t.grad_buf(si);
        for (int r = 0; r < rows; ++r) {
          double acc = 0.0;
          for (int c = 0; c < cols; ++c) acc += g[std::size_t(r) * cols + c] * avv[std::size_t(r) * cols + c];
          if (divide) {
            gs[r] -= acc / (svv[r] * svv[r]);
          } else {
            gs[r] += acc;
          }
        }
      }
    };
  }
  return out;
}

}  // namespace

Tensor mul_colvec(Tensor a, Tensor s) { return colvec_op(a, s, false); }
Tensor div_colvec(Tensor a, Tensor s) { return colvec_op(a, s, true); }

Tensor matmul(Tensor a, Tensor b) {
  const Shape sa = a.shape(), sb = b.shape();
  if (sa.cols != sb.rows) throw std::invalid_argument("matmul: inner dims differ");
  Tape& tp = tape_of(a);
  if (a.tape != b.tape) throw std::invalid_argument("matmul: different tapes");
  Tensor out = tp.alloc({sa.rows, sb.cols}, req(a) || req(b));
  kernels::matmul(V(a).data(), V(b).data(), tp.node(out.id).value.data(), sa.rows, sa.cols, sb.cols);
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, bi = b.id, oi = out.id;
    const bool ra = req(a), rb = req(b);
    tp.node(out.id).back = [=](Tape& t) {
      const auto& g = t.node(oi).grad;
      if (ra)
        kernels::matmul_grad_lhs(g.data(), t.node(bi).value.data(), t.grad_buf(ai).data(),
                                 sa.rows, sa.cols, sb.cols);
      if (rb)
        kernels::matmul_grad_rhs(t.node(ai).value.data(), g.data(), t.grad_buf(bi).data(),
                                 sa.rows, sa.cols, sb.cols);
    };
  }
  return out;
}

Tensor linear_act(Tensor x, Tensor w, Tensor b, Act act) {
  const Shape sx = x.shape(), sw = w.shape(), sb = b.shape();
  if (sx.cols != sw.rows || sb.rows != 1 || sb.cols != sw.cols)
    throw std::invalid_argument("linear_act: shape mismatch");
  Tape& tp = tape_of(x);
  const int rows = sx.rows, in = sx.cols, out_c = sw.cols;
  Tensor out = tp.alloc({rows, out_c}, req(x) || req(w) || req(b));
  auto& ov = tp.node(out.id).value;
  kernels::matmul(V(x).data(), V(w).data(), ov.data(), rows, in, out_c);
  const auto& bv = V(b);
  auto act_row = [&](int r) {
    double* o = &ov[std::size_t(r) * out_c];
    for (int c = 0; c < out_c; ++c) {
      double z = o[c] + bv[std::size_t(c)];
      switch (act) {
        case Act::kNone: break;
        case Act::kRelu: z = z > 0.0 ? z : 0.0; break;
        case Act::kSigmoid:
          z = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
          break;
        case Act::kSoftplusShift1: {
          const double s = z - 1.0;
          z = s > 30.0 ? s : std::log1p(std::exp(s));
          break;
        }
      }
      o[c] = z;
    }
  };
  if (kernels::parallel_enabled() && std::int64_t(rows) * out_c >= kernels::kParallelGrain) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) act_row(r);
  } else {
    for (int r = 0; r < rows; ++r) act_row(r);
  }

  if (tp.node(out.id).requires_grad) {
    const int xi = x.id, wi = w.id, bi = b.id, oi = out.id;
    const bool rx = req(x), rw = req(w), rb = req(b);
    tp.node(out.id).back = [=](Tape& t) {
      const auto& g = t.node(oi).grad;
      const auto& y = t.node(oi).value;
      // pre-activation gradient; the scratch is safe because ops are issued
      // from one thread per tape
      static std::vector<double> dz;
      dz.resize(g.size());
      const std::int64_t n = std::int64_t(g.size());
      auto dz_fill = [&](std::int64_t i) {
        switch (act) {
          case Act::kNone: return g[i];
          case Act::kRelu: return y[i] > 0.0 ? g[i] : 0.0;
          case Act::kSigmoid: return g[i] * y[i] * (1.0 - y[i]);
          case Act::kSoftplusShift1: return g[i] * (1.0 - std::exp(-y[i]));
        }
        return 0.0;
      };
      if (kernels::parallel_enabled() && n >= kernels::kParallelGrain) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) dz[std::size_t(i)] = dz_fill(i);
      } else {
        for (std::int64_t i = 0; i < n; ++i) dz[std::size_t(i)] = dz_fill(i);
      }
      if (rx)
        kernels::matmul_grad_lhs(dz.data(), t.node(wi).value.data(), t.grad_buf(xi).data(), rows,
                                 in, out_c);
      if (rw)
        kernels::matmul_grad_rhs(t.node(xi).value.data(), dz.data(), t.grad_buf(wi).data(), rows,
                                 in, out_c);
      if (rb) {
        auto& gb = t.grad_buf(bi);
        for (int r = 0; r < rows; ++r) {
          const double* row = &dz[std::size_t(r) * out_c];
          for (int c = 0; c < out_c; ++c) gb[std::size_t(c)] += row[c];
        }
      }
    };
  }
  return out;
}

Tensor volume_weights(Tensor sigma, const std::vector<double>& deltas, int m) {
  const Shape s = sigma.shape();
  if (s.cols != 1 || s.rows % m != 0) throw std::invalid_argument("volume_weights: shape");
  if (std::int64_t(deltas.size()) != s.rows) throw std::invalid_argument("volume_weights: deltas");
  Tape& tp = tape_of(sigma);
  const int blocks = s.rows / m;
  Tensor out = tp.alloc(s, req(sigma));
  const auto& sv = V(sigma);
  auto& wv = tp.node(out.id).value;
  // stash transmittances for the backward pass
  auto trans = std::make_shared<std::vector<double>>(std::size_t(s.rows));
  auto compute_block = [&](int blk) {
    const std::size_t base = std::size_t(blk) * m;
    double optical = 0.0;
    for (int k = 0; k < m; ++k) {
      const double t_here = std::exp(-optical);
      (*trans)[base + k] = t_here;
      const double sdel = sv[base + k] * deltas[base + k];
      wv[base + k] = t_here * (1.0 - std::exp(-sdel));
      optical += sdel;
    }
  };
  if (kernels::parallel_enabled() && s.rows >= kernels::kParallelGrain) {
#pragma omp parallel for schedule(static)
    for (int blk = 0; blk < blocks; ++blk) compute_block(blk);
  } else {
    for (int blk = 0; blk < blocks; ++blk) compute_block(blk);
  }

  if (tp.node(out.id).requires_grad) {
    const int si = sigma.id, oi = out.id;
    auto deltas_copy = std::make_shared<std::vector<double>>(deltas);
    tp.node(out.id).back = [si, oi, trans, deltas_copy, blocks, m](Tape& t) {
      const auto& g = t.node(oi).grad;
      const auto& w = t.node(oi).value;
      auto& gs = t.grad_buf(si);
      const auto& dl = *deltas_copy;
      auto back_block = [&](int blk) {
        const std::size_t base = std::size_t(blk) * m;
        // d(sigma_k delta_k) = g_k (T_k - w_k) - sum_{j>k} g_j w_j
        double suffix = 0.0;
        for (int k = m - 1; k >= 0; --k) {
          const double dsdel = g[base + k] * ((*trans)[base + k] - w[base + k]) - suffix;
          gs[base + k] += dsdel * dl[base + k];
          suffix += g[base + k] * w[base + k];
        }
      };
      if (kernels::parallel_enabled() && std::int64_t(blocks) * m >= kernels::kParallelGrain) {
#pragma omp parallel for schedule(static)
        for (int blk = 0; blk < blocks; ++blk) back_block(blk);
      } else {
        for (int blk = 0; blk < blocks; ++blk) back_block(blk);
      }
    };
  }
  return out;
}

Tensor transpose(Tensor a) {
  const Shape s = a.shape();
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc({s.cols, s.rows}, req(a));
  const auto& av = V(a);
  auto& ov = tp.node(out.id).value;
  for (int r = 0; r < s.rows; ++r)
    for (int c = 0; c < s.cols; ++c) ov[std::size_t(c) * s.rows + r] = av[std::size_t(r) * s.cols + c];
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, oi = out.id;
    tp.node(out.id).back = [=](Tape& t) {
      const auto& g = t.node(oi).grad;
      auto& ga = t.grad_buf(ai);
      for (int r = 0; r < s.rows; ++r)
        for (int c = 0; c < s.cols; ++c) ga[std::size_t(r) * s.cols + c] += g[std::size_t(c) * s.rows + r];
    };
  }
  return out;
}

Tensor linmap(const std::vector<double>& m, Shape out_shape, Tensor in) {
  Tape& tp = tape_of(in);
  const std::int64_t k = in.shape().size();
  const std::int64_t o = out_shape.size();
  if (std::int64_t(m.size()) != o * k) throw std::invalid_argument("linmap: matrix size");
  Tensor out = tp.alloc(out_shape, req(in));
  const auto& x = V(in);
  auto& y = tp.node(out.id).value;
  for (std::int64_t r = 0; r < o; ++r) {
    double acc = 0.0;
    for (std::int64_t c = 0; c < k; ++c) acc += m[r * k + c] * x[c];
    y[r] = acc;
  }
  if (tp.node(out.id).requires_grad) {
    const int ii = in.id, oi = out.id;
    tp.node(out.id).back = [ii, oi, m, o, k](Tape& t) {
      const auto& g = t.node(oi).grad;
      auto& gi = t.grad_buf(ii);
      for (std::int64_t c = 0; c < k; ++c) {
        double acc = 0.0;
        for (std::int64_t r = 0; r < o; ++r) acc += m[r * k + c] * g[r];
        gi[c] += acc;
      }
    };
  }
  return out;
}

Tensor reshape(Tensor a, Shape s) {
  if (s.size() != a.shape().size()) throw std::invalid_argument("reshape: size mismatch");
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc(s, req(a));
  std::copy(V(a).begin(), V(a).end(), tp.node(out.id).value.begin());
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, oi = out.id;
    tp.node(out.id).back = [=](Tape& t) { axpy(t.node(oi).grad, t.grad_buf(ai)); };
  }
  return out;
}

Tensor concat_cols(const std::vector<Tensor>& ts) {
  if (ts.empty()) throw std::invalid_argument("concat_cols: empty");
  Tape& tp = tape_of(ts[0]);
  const int rows = ts[0].shape().rows;
  int cols = 0;
  bool rg = false;
  for (Tensor t : ts) {
    if (t.shape().rows != rows) throw std::invalid_argument("concat_cols: row mismatch");
    cols += t.shape().cols;
    rg = rg || req(t);
  }
  Tensor out = tp.alloc({rows, cols}, rg);
  auto& ov = tp.node(out.id).value;
  int off = 0;
  for (Tensor t : ts) {
    const int c = t.shape().cols;
    const auto& v = V(t);
    for (int r = 0; r < rows; ++r)
      std::memcpy(&ov[std::size_t(r) * cols + off], &v[std::size_t(r) * c], sizeof(double) * c);
    off += c;
  }
  if (rg) {
    std::vector<int> ids;
    std::vector<int> widths;
    for (Tensor t : ts) {
      ids.push_back(t.id);
      widths.push_back(t.shape().cols);
    }
    const int oi = out.id;
    tp.node(out.id).back = [oi, ids, widths, rows, cols](Tape& t) {
      const auto& g = t.node(oi).grad;
      int off2 = 0;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        const int c = widths[k];
        if (t.node(ids[k]).requires_grad) {
          auto& gi = t.grad_buf(ids[k]);
          for (int r = 0; r < rows; ++r)
            for (int j = 0; j < c; ++j) gi[std::size_t(r) * c + j] += g[std::size_t(r) * cols + off2 + j];
        }
        off2 += c;
      }
    };
  }
  return out;
}

Tensor concat_rows(const std::vector<Tensor>& ts) {
  if (ts.empty()) throw std::invalid_argument("concat_rows: empty");
  Tape& tp = tape_of(ts[0]);
  const int cols = ts[0].shape().cols;
  int rows = 0;
  bool rg = false;
  for (Tensor t : ts) {
    if (t.shape().cols != cols) throw std::invalid_argument("concat_rows: col mismatch");
    rows += t.shape().rows;
    rg = rg || req(t);
  }
  Tensor out = tp.alloc({rows, cols}, rg);
  auto& ov = tp.node(out.id).value;
  std::size_t off = 0;
  for (Tensor t : ts) {
    const auto& v = V(t);
    std::memcpy(&ov[off], v.data(), sizeof(double) * v.size());
    off += v.size();
  }
  if (rg) {
    std::vector<int> ids;
    std::vector<std::size_t> sizes;
    for (Tensor t : ts) {
      ids.push_back(t.id);
      sizes.push_back(std::size_t(t.shape().size()));
    }
    const int oi = out.id;
    tp.node(out.id).back = [oi, ids, sizes](Tape& t) {
      const auto& g = t.node(oi).grad;
      std::size_t off2 = 0;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (t.node(ids[k]).requires_grad) {
          auto& gi = t.grad_buf(ids[k]);
          for (std::size_t j = 0; j < sizes[k]; ++j) gi[j] += g[off2 + j];
        }
        off2 += sizes[k];
      }
    };
  }
  return out;
}

Tensor slice_cols(Tensor a, int c0, int c1) {
  const Shape s = a.shape();
  if (c0 < 0 || c1 > s.cols || c0 >= c1) throw std::invalid_argument("slice_cols: range");
  Tape& tp = tape_of(a);
  const int w = c1 - c0;
  Tensor out = tp.alloc({s.rows, w}, req(a));
  const auto& av = V(a);
  auto& ov = tp.node(out.id).value;
  for (int r = 0; r < s.rows; ++r)
    std::memcpy(&ov[std::size_t(r) * w], &av[std::size_t(r) * s.cols + c0], sizeof(double) * w);
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, oi = out.id;
    tp.node(out.id).back = [ai, oi, s, c0, w](Tape& t) {
      const auto& g = t.node(oi).grad;
      auto& ga = t.grad_buf(ai);
      for (int r = 0; r < s.rows; ++r)
        for (int j = 0; j < w; ++j) ga[std::size_t(r) * s.cols + c0 + j] += g[std::size_t(r) * w + j];
    };
  }
  return out;
}

Tensor slice_rows(Tensor a, int r0, int r1) {
  const Shape s = a.shape();
  if (r0 < 0 || r1 > s.rows || r0 >= r1) throw std::invalid_argument("slice_rows: range");
  Tape& tp = tape_of(a);
  const int h = r1 - r0;
  Tensor out = tp.alloc({h, s.cols}, req(a));
  const auto& av = V(a);
  auto& ov = tp.node(out.id).value;
  std::memcpy(ov.data(), &av[std::size_t(r0) * s.cols], sizeof(double) * std::size_t(h) * s.cols);
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, oi = out.id;
    tp.node(out.id).back = [ai, oi, s, r0, h](Tape& t) {
      const auto& g = t.node(oi).grad;
      auto& ga = t.grad_buf(ai);
      for (std::size_t j = 0; j < std::size_t(h) * s.cols; ++j) ga[std::size_t(r0) * s.cols + j] += g[j];
    };
  }
  return out;
}

Tensor exp_t(Tensor a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor sqrt_t(Tensor a) {
  return unary(a, [](double x) { return std::sqrt(x); },
               [](double, double y) { return 0.5 / y; });
}

Tensor sin_t(Tensor a) {
  return unary(a, [](double x) { return std::sin(x); }, [](double x, double) { return std::cos(x); });
}

Tensor cos_t(Tensor a) {
  return unary(a, [](double x) { return std::cos(x); }, [](double x, double) { return -std::sin(x); });
}

Tensor atan2_t(Tensor y, Tensor x) {
  check_same(y, x);
  Tape& tp = tape_of(y);
  Tensor out = tp.alloc(y.shape(), req(y) || req(x));
  kernels::map2(V(y).data(), V(x).data(), tp.node(out.id).value.data(), y.shape().size(),
                [](double yy, double xx) { return std::atan2(yy, xx); });
  if (tp.node(out.id).requires_grad) {
    const int yi = y.id, xi = x.id, oi = out.id;
    const bool ry = req(y), rx = req(x);
    tp.node(out.id).back = [=](Tape& t) {
      const auto& g = t.node(oi).grad;
      const auto& yv = t.node(yi).value;
      const auto& xv = t.node(xi).value;
      const std::int64_t n = std::int64_t(g.size());
      for (std::int64_t i = 0; i < n; ++i) {
        const double d = xv[i] * xv[i] + yv[i] * yv[i];
        if (ry) t.grad_buf(yi)[i] += g[i] * xv[i] / d;
        if (rx) t.grad_buf(xi)[i] -= g[i] * yv[i] / d;
      }
    };
  }
  return out;
}

Tensor abs_t(Tensor a) {
  return unary(a, [](double x) { return std::fabs(x); },
               [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor relu(Tensor a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(Tensor a) {
  return unary(a,
               [](double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); },
               [](double, double y) { return y * (1.0 - y); });
}

Tensor softplus(Tensor a, double shift) {
  return unary(a,
               [shift](double x) {
                 const double z = x - shift;
                 return z > 30.0 ? z : std::log1p(std::exp(z));
               },
               [shift](double x, double) {
                 const double z = x - shift;
                 return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
               });
}

Tensor sum_all(Tensor a) {
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc({1, 1}, req(a));
  tp.node(out.id).value[0] = kernels::sum_serial(V(a).data(), a.shape().size());
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, oi = out.id;
    tp.node(out.id).back = [=](Tape& t) {
      const double g = t.node(oi).grad[0];
      auto& ga = t.grad_buf(ai);
      for (auto& v : ga) v += g;
    };
  }
  return out;
}

Tensor mean_all(Tensor a) { return mul_c(sum_all(a), 1.0 / double(a.shape().size())); }

Tensor row_sum(Tensor a) {
  const Shape s = a.shape();
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc({s.rows, 1}, req(a));
  const auto& av = V(a);
  auto& ov = tp.node(out.id).value;
  for (int r = 0; r < s.rows; ++r) {
    double acc = 0.0;
    for (int c = 0; c < s.cols; ++c) acc += av[std::size_t(r) * s.cols + c];
    ov[r] = acc;
  }
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, oi = out.id;
    tp.node(out.id).back = [ai, oi, s](Tape& t) {
      const auto& g = t.node(oi).grad;
      auto& ga = t.grad_buf(ai);
      for (int r = 0; r < s.rows; ++r)
        for (int c = 0; c < s.cols; ++c) ga[std::size_t(r) * s.cols + c] += g[r];
    };
  }
  return out;
}

Tensor block_cumsum_exclusive(Tensor a, int m) {
  const Shape s = a.shape();
  if (s.rows % m != 0) throw std::invalid_argument("block_cumsum: rows not divisible by m");
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc(s, req(a));
  kernels::block_cumsum_exclusive(V(a).data(), tp.node(out.id).value.data(), s.rows, s.cols, m);
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, oi = out.id;
    tp.node(out.id).back = [ai, oi, s, m](Tape& t) {
      kernels::block_suffix_sum_add(t.node(oi).grad.data(), t.grad_buf(ai).data(), s.rows, s.cols, m);
    };
  }
  return out;
}

Tensor block_sum(Tensor a, int m) {
  const Shape s = a.shape();
  if (s.rows % m != 0) throw std::invalid_argument("block_sum: rows not divisible by m");
  Tape& tp = tape_of(a);
  const int blocks = s.rows / m;
  Tensor out = tp.alloc({blocks, s.cols}, req(a));
  kernels::block_sum(V(a).data(), tp.node(out.id).value.data(), blocks, m, s.cols);
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, oi = out.id;
    tp.node(out.id).back = [ai, oi, blocks, m, s](Tape& t) {
      // expand-add: each input row receives its block's output grad
      const auto& g = t.node(oi).grad;
      auto& ga = t.grad_buf(ai);
      for (int blk = 0; blk < blocks; ++blk)
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < s.cols; ++c)
            ga[(std::size_t(blk) * m + r) * s.cols + c] += g[std::size_t(blk) * s.cols + c];
    };
  }
  return out;
}

Tensor block_expand(Tensor a, int m) {
  const Shape s = a.shape();
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc({s.rows * m, s.cols}, req(a));
  kernels::block_expand(V(a).data(), tp.node(out.id).value.data(), s.rows, m, s.cols);
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, oi = out.id;
    tp.node(out.id).back = [ai, oi, s, m](Tape& t) {
      const auto& g = t.node(oi).grad;
      auto& ga = t.grad_buf(ai);
      for (int blk = 0; blk < s.rows; ++blk)
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < s.cols; ++c)
            ga[std::size_t(blk) * s.cols + c] += g[(std::size_t(blk) * m + r) * s.cols + c];
    };
  }
  return out;
}

Tensor block_shift_up(Tensor a, int m) {
  const Shape s = a.shape();
  if (s.rows % m != 0) throw std::invalid_argument("block_shift_up: rows not divisible by m");
  Tape& tp = tape_of(a);
  Tensor out = tp.alloc(s, req(a));
  const auto& av = V(a);
  auto& ov = tp.node(out.id).value;
  const int blocks = s.rows / m;
  for (int blk = 0; blk < blocks; ++blk) {
    const std::size_t base = std::size_t(blk) * m * s.cols;
    std::memcpy(&ov[base], &av[base + s.cols], sizeof(double) * std::size_t(m - 1) * s.cols);
    std::memset(&ov[base + std::size_t(m - 1) * s.cols], 0, sizeof(double) * s.cols);
  }
  if (tp.node(out.id).requires_grad) {
    const int ai = a.id, oi = out.id;
    tp.node(out.id).back = [ai, oi, s, m, blocks](Tape& t) {
      const auto& g = t.node(oi).grad;
      auto& ga = t.grad_buf(ai);
      for (int blk = 0; blk < blocks; ++blk) {
        const std::size_t base = std::size_t(blk) * m * s.cols;
        for (std::size_t j = 0; j < std::size_t(m - 1) * s.cols; ++j) ga[base + s.cols + j] += g[base + j];
      }
    };
  }
  return out;
}

namespace {

Tensor extreme_list(const std::vector<Tensor>& ts, bool take_min) {
  if (ts.empty()) throw std::invalid_argument("extreme_list: empty");
  Tape& tp = tape_of(ts[0]);
  const Shape s = ts[0].shape();
  bool rg = false;
  for (Tensor t : ts) {
    if (!(t.shape() == s)) throw std::invalid_argument("extreme_list: shape mismatch");
    rg = rg || req(t);
  }
  Tensor out = tp.alloc(s, rg);
  auto& ov = tp.node(out.id).value;
  const std::int64_t n = s.size();
  std::vector<int> arg(std::size_t(n), 0);
  std::copy(V(ts[0]).begin(), V(ts[0]).end(), ov.begin());
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const auto& v = V(ts[k]);
    for (std::int64_t i = 0; i < n; ++i) {
      const bool better = take_min ? v[i] < ov[i] : v[i] > ov[i];
      if (better) {
        ov[i] = v[i];
        arg[i] = int(k);
      }
    }
  }
  if (rg) {
    std::vector<int> ids;
    for (Tensor t : ts) ids.push_back(t.id);
    const int oi = out.id;
    tp.node(out.id).back = [oi, ids, arg, n](Tape& t) {
      const auto& g = t.node(oi).grad;
      for (std::int64_t i = 0; i < n; ++i) {
        const int k = arg[i];
        if (t.node(ids[k]).requires_grad) t.grad_buf(ids[k])[i] += g[i];
      }
    };
  }
  return out;
}

}  // namespace

Tensor min_list(const std::vector<Tensor>& ts) { return extreme_list(ts, true); }
Tensor max_list(const std::vector<Tensor>& ts) { return extreme_list(ts, false); }

Tensor select_rows(const std::vector<Tensor>& ts, const std::vector<int>& idx) {
  if (ts.empty()) throw std::invalid_argument("select_rows: empty");
  Tape& tp = tape_of(ts[0]);
  const Shape s = ts[0].shape();
  if (int(idx.size()) != s.rows) throw std::invalid_argument("select_rows: index length");
  bool rg = false;
  for (Tensor t : ts) {
    if (!(t.shape() == s)) throw std::invalid_argument("select_rows: shape mismatch");
    rg = rg || req(t);
  }
  Tensor out = tp.alloc(s, rg);
  auto& ov = tp.node(out.id).value;
  for (int r = 0; r < s.rows; ++r) {
    const int k = idx[r];
    if (k < 0 || k >= int(ts.size())) throw std::invalid_argument("select_rows: index range");
    std::memcpy(&ov[std::size_t(r) * s.cols], &V(ts[k])[std::size_t(r) * s.cols], sizeof(double) * s.cols);
  }
  if (rg) {
    std::vector<int> ids;
    for (Tensor t : ts) ids.push_back(t.id);
    const int oi = out.id;
    tp.node(out.id).back = [oi, ids, idx, s](Tape& t) {
      const auto& g = t.node(oi).grad;
      for (int r = 0; r < s.rows; ++r) {
        const int k = idx[r];
        if (!t.node(ids[k]).requires_grad) continue;
        auto& gk = t.grad_buf(ids[k]);
        for (int c = 0; c < s.cols; ++c) gk[std::size_t(r) * s.cols + c] += g[std::size_t(r) * s.cols + c];
      }
    };
  }
  return out;
}

Tensor detach(Tensor a) {
  Tape& tp = tape_of(a);
  switch (tp.detach_mode()) {
    case Tape::DetachMode::kNormal:
      return tp.constant(a.shape(), V(a));
    case Tape::DetachMode::kRecord:
      tp.detach_log()->push_back(V(a));
      return tp.constant(a.shape(), V(a));
    case Tape::DetachMode::kReplay: {
      auto* log = tp.detach_log();
      if (tp.detach_cursor >= log->size()) throw std::logic_error("detach replay: log exhausted");
      const auto& frozen = (*log)[tp.detach_cursor++];
      if (std::int64_t(frozen.size()) != a.shape().size())
        throw std::logic_error("detach replay: shape drift");
      return tp.constant(a.shape(), frozen);
    }
  }
  throw std::logic_error("unreachable");
}

Tensor normalize_rows(Tensor a) {
  Tensor n2 = row_sum(mul(a, a));
  Tensor len = sqrt_t(n2);
  return div_colvec(a, len);
}

}  // namespace blurf
