// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace blurf {

struct Shape {
  int rows = 1;
  int cols = 1;
  std::int64_t size() const { return std::int64_t(rows) * cols; }
  bool operator==(const Shape& o) const { return rows == o.rows && cols == o.cols; }
};

class Tape;

/// Size-bucketed recycler for node buffers. A training step allocates a few
/// thousand tensors; reusing their storage across steps keeps the allocator
/// out of the hot loop. Buffers come back fully overwritten by the ops, so
/// reuse cannot leak values between steps.
class BufferPool {
 public:
  std::vector<double> acquire(std::size_t n) {
    auto it = free_.find(n);
    if (it != free_.end() && !it->second.empty()) {
      std::vector<double> v = std::move(it->second.back());
      it->second.pop_back();
      return v;
    }
    return std::vector<double>(n, 0.0);
  }
  void release(std::vector<double>&& v) {
    if (v.empty()) return;
    free_[v.size()].push_back(std::move(v));
  }

 private:
  std::map<std::size_t, std::vector<std::vector<double>>> free_;
};

/// Lightweight handle to a node on a tape. Values are computed eagerly when
/// the op is recorded; gradients exist only after Tape::backward.
struct Tensor {
  Tape* tape = nullptr;
  int id = -1;
  bool valid() const { return tape != nullptr && id >= 0; }
  Shape shape() const;
  const std::vector<double>& val() const;
  double scalar() const;
};

/// Reverse-mode tape over dense row-major 2-D tensors. One tape per training
/// step; nodes are appended eagerly and freed with the tape. Gradients for
/// leaves are accumulated into caller-owned buffers, so repeated backward
/// calls without zeroing accumulate.
class Tape {
 public:
  explicit Tape(BufferPool* pool = nullptr);
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Unique per tape instance; lets caches detect address reuse.
  std::uint64_t epoch() const { return epoch_; }

  Tensor constant(Shape s, std::vector<double> data);
  Tensor constant_scalar(double v) { return constant({1, 1}, {v}); }
  Tensor zeros(Shape s) { return constant(s, std::vector<double>(s.size(), 0.0)); }

  /// Differentiable leaf. Copies `values`; backward adds into `grad_sink`
  /// (length = shape size), which the caller owns.
  Tensor leaf(Shape s, const double* values, double* grad_sink);

  /// Runs reverse accumulation from a scalar root.
  void backward(Tensor root);

  std::size_t node_count() const { return nodes_.size(); }

  // -- detach bookkeeping for gradient checking ------------------------------
  // `detach` cuts the graph: the result is a constant with the input's value.
  // A finite-difference harness must evaluate the same function the tape
  // differentiates, i.e. with detached values frozen at their baseline. The
  // record/replay modes support that: record stores each detached value in
  // order, replay substitutes the stored values on subsequent evaluations.
  enum class DetachMode { kNormal, kRecord, kReplay };
  void set_detach_mode(DetachMode m, std::vector<std::vector<double>>* log);

  // internal access for op implementations
  struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;  // sized lazily during backward
    std::function<void(Tape&)> back;
    bool requires_grad = false;
  };
  Node& node(int id) { return nodes_[id]; }
  const Node& node(int id) const { return nodes_[id]; }
  Tensor alloc(Shape s, bool requires_grad);
  std::vector<double>& grad_buf(int id);
  bool has_grad(int id) const { return !nodes_[id].grad.empty(); }

  DetachMode detach_mode() const { return detach_mode_; }
  std::vector<std::vector<double>>* detach_log() { return detach_log_; }
  std::size_t detach_cursor = 0;

 private:
  std::deque<Node> nodes_;  // stable references across appends
  BufferPool* pool_ = nullptr;
  std::uint64_t epoch_ = 0;
  DetachMode detach_mode_ = DetachMode::kNormal;
  std::vector<std::vector<double>>* detach_log_ = nullptr;
};

// ---------------------------------------------------------------------------
// Ops. All take handles on the same tape and compute values eagerly.

Tensor add(Tensor a, Tensor b);
Tensor sub(Tensor a, Tensor b);
Tensor mul(Tensor a, Tensor b);
Tensor div(Tensor a, Tensor b);
Tensor neg(Tensor a);

Tensor add_c(Tensor a, double c);
Tensor mul_c(Tensor a, double c);

/// Broadcast a (1x1) tensor across `a`. Gradient flows to both operands.
Tensor scale_by(Tensor a, Tensor s);
Tensor add_scalar_t(Tensor a, Tensor s);

/// (BxC) op (1xC): bias-style row-vector broadcast.
Tensor add_rowvec(Tensor a, Tensor v);
/// (BxC) op (Bx1): per-row scalar broadcast.
Tensor mul_colvec(Tensor a, Tensor s);
Tensor div_colvec(Tensor a, Tensor s);

Tensor matmul(Tensor a, Tensor b);
Tensor transpose(Tensor a);

/// Fused affine layer with activation: act(x * w + b). One node instead of
/// three keeps the per-layer buffer traffic down; the backward pass rebuilds
/// the activation derivative from the stored output.
enum class Act { kNone, kRelu, kSigmoid, kSoftplusShift1 };
Tensor linear_act(Tensor x, Tensor w, Tensor b, Act act);

/// Fused volume-rendering weights over blocks of m samples:
/// w_k = T_k * (1 - exp(-sigma_k * delta_k)), T_k = exp(-sum_{j<k} sigma_j delta_j).
Tensor volume_weights(Tensor sigma, const std::vector<double>& deltas, int m);

/// out_flat = M * in_flat for a constant matrix M (out_size x in_size).
Tensor linmap(const std::vector<double>& m, Shape out_shape, Tensor in);

Tensor reshape(Tensor a, Shape s);
Tensor concat_cols(const std::vector<Tensor>& ts);
Tensor concat_rows(const std::vector<Tensor>& ts);
Tensor slice_cols(Tensor a, int c0, int c1);
Tensor slice_rows(Tensor a, int r0, int r1);

Tensor exp_t(Tensor a);
Tensor sqrt_t(Tensor a);
Tensor sin_t(Tensor a);
Tensor cos_t(Tensor a);
Tensor atan2_t(Tensor y, Tensor x);
Tensor abs_t(Tensor a);
Tensor relu(Tensor a);
Tensor sigmoid(Tensor a);
/// softplus(x - shift); the shift keeps initial densities small.
Tensor softplus(Tensor a, double shift = 0.0);

Tensor sum_all(Tensor a);
Tensor mean_all(Tensor a);
/// (BxC) -> (Bx1) summing across columns.
Tensor row_sum(Tensor a);

/// Rows grouped in blocks of m. See kernels.hpp for semantics.
Tensor block_cumsum_exclusive(Tensor a, int m);
Tensor block_sum(Tensor a, int m);
Tensor block_expand(Tensor a, int m);
/// out[r] = in[r+1] within each block of m rows; the last row of each block
/// is zero. Used for neighbor differences along a ray.
Tensor block_shift_up(Tensor a, int m);

/// Elementwise min/max over a stack of same-shaped tensors. Subgradient is
/// routed to the first tensor attaining the extreme (deterministic ties).
Tensor min_list(const std::vector<Tensor>& ts);
Tensor max_list(const std::vector<Tensor>& ts);

/// Per-row selection among candidates; idx[r] names the winning candidate.
/// The indices are plain data (computed from forward values), so gradient
/// flows only into the selected rows.
Tensor select_rows(const std::vector<Tensor>& ts, const std::vector<int>& idx);

/// Value copy with the graph cut; see Tape detach modes.
Tensor detach(Tensor a);

/// Unit-normalizes each row (Euclidean norm).
Tensor normalize_rows(Tensor a);

}  // namespace blurf
