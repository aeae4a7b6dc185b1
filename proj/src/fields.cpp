// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/fields.hpp"

#include <cmath>

#include "blurf/encoding.hpp"

namespace blurf {

Tensor MlpFieldProvider::weight(Tape& tape, const std::string& name) {
  if (bound_epoch_ != tape.epoch()) {
    bound_epoch_ = tape.epoch();
    bound_.clear();
  }
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  Tensor t = model_.store().use(tape, name);
  bound_.emplace(name, t);
  return t;
}

Tensor MlpFieldProvider::trunk(Tape& tape, const std::string& prefix, const MlpConfig& cfg,
                               Tensor input) {
  Tensor h = input;
  for (int layer = 0; layer < cfg.depth; ++layer) {
    if (layer == cfg.skip && layer > 0) h = concat_cols({h, input});
    const std::string p = prefix + ".l" + std::to_string(layer);
    h = linear_act(h, weight(tape, p + ".w"), weight(tape, p + ".b"), Act::kRelu);
  }
  return h;
}

DynOut MlpFieldProvider::dynamic(Tape& tape, Tensor x, Tensor d, double t_flat) {
  const ModelConfig& cfg = model_.config();
  for (double v : x.val())
    if (!std::isfinite(v)) throw std::domain_error("dynamic field: non-finite sample position");
  const int rows = x.shape().rows;
  const int total = model_.basis_meta().total_timestamps();
  const double t_norm = t_flat / double(total);

  Tensor ex = encode(x, cfg.l_pos);
  // time is a shared constant for the whole pass
  std::vector<double> t_enc = encode_plain({t_norm}, 1, cfg.l_time);
  Tensor et = block_expand(tape.constant({1, int(t_enc.size())}, t_enc), rows);
  Tensor h = trunk(tape, "dyn", cfg.dynamic_mlp, concat_cols({ex, et}));

  DynOut out;
  out.sigma = linear_act(h, weight(tape, "dyn.sigma.w"), weight(tape, "dyn.sigma.b"),
                         Act::kSoftplusShift1);
  out.psi = linear_act(h, weight(tape, "dyn.psi.w"), weight(tape, "dyn.psi.b"), Act::kNone);
  Tensor w = linear_act(h, weight(tape, "dyn.w.w"), weight(tape, "dyn.w.b"), Act::kSigmoid);
  out.w_fw = slice_cols(w, 0, 1);
  out.w_bw = slice_cols(w, 1, 2);

  Tensor ed = encode(d, cfg.l_dir);
  Tensor c = linear_act(concat_cols({h, ed}), weight(tape, "dyn.c0.w"), weight(tape, "dyn.c0.b"),
                        Act::kRelu);
  out.color = linear_act(c, weight(tape, "dyn.c1.w"), weight(tape, "dyn.c1.b"), Act::kSigmoid);
  return out;
}

StatOut MlpFieldProvider::static_field(Tape& tape, Tensor x, Tensor d) {
  const ModelConfig& cfg = model_.config();
  if (!cfg.use_static) throw std::logic_error("static field queried but disabled");
  Tensor ex = encode(x, cfg.l_pos);
  Tensor h = trunk(tape, "st", cfg.static_mlp, ex);

  StatOut out;
  out.sigma = linear_act(h, weight(tape, "st.sigma.w"), weight(tape, "st.sigma.b"),
                         Act::kSoftplusShift1);
  out.blend_v = linear_act(h, weight(tape, "st.v.w"), weight(tape, "st.v.b"), Act::kSigmoid);
  Tensor ed = encode(d, cfg.l_dir);
  Tensor c = linear_act(concat_cols({h, ed}), weight(tape, "st.c0.w"), weight(tape, "st.c0.b"),
                        Act::kRelu);
  out.color = linear_act(c, weight(tape, "st.c1.w"), weight(tape, "st.c1.b"), Act::kSigmoid);
  return out;
}

Tensor MlpFieldProvider::basis_rows(Tape& tape) {
  const DctBasis& meta = model_.basis_meta();
  if (meta.learnable) return weight(tape, "dct.basis");
  return tape.constant({meta.total_timestamps(), meta.K}, meta.table);
}

void blend(const DynOut& dyn, const StatOut& st, Tensor* color_out, Tensor* sigma_out) {
  Tensor one_minus_v = add_c(neg(st.blend_v), 1.0);
  *color_out = add(mul_colvec(dyn.color, one_minus_v), mul_colvec(st.color, st.blend_v));
  *sigma_out = add(mul(dyn.sigma, one_minus_v), mul(st.sigma, st.blend_v));
}

}  // namespace blurf
