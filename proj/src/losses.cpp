// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/losses.hpp"

#include <cmath>
#include <sstream>

#include "blurf/trajectory.hpp"

namespace blurf {

double lambda_data_at(const LossWeights& w, std::int64_t step) {
  if (w.data_decay_interval <= 0) return w.lambda_data;
  const std::int64_t d = step / w.data_decay_interval;
  return w.lambda_data * std::pow(w.data_decay_factor, double(d));
}

Tensor loss_rgb(Tensor pred, Tensor gt) {
  Tensor diff = sub(pred, gt);
  return mean_all(mul(diff, diff));
}

Tensor loss_rgb_static(Tensor pred, Tensor gt, const std::vector<double>& mask) {
  const int rows = pred.shape().rows;
  if (int(mask.size()) != rows) throw std::invalid_argument("static loss: mask length");
  double count = 0.0;
  std::vector<double> keep(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    keep[i] = 1.0 - mask[i];
    count += keep[i];
  }
  Tape& tape = *pred.tape;
  if (count == 0.0) return tape.constant_scalar(0.0);
  Tensor diff = sub(pred, gt);
  Tensor per_pixel = mul_c(row_sum(mul(diff, diff)), 1.0 / double(pred.shape().cols));
  Tensor gated = mul(per_pixel, tape.constant({rows, 1}, keep));
  return mul_c(sum_all(gated), 1.0 / count);
}

Tensor loss_cross(const std::vector<CrossTimeRender>& crosses, Tensor gt) {
  Tape& tape = *gt.tape;
  Tensor acc = tape.constant_scalar(0.0);
  for (const auto& ct : crosses) {
    Tensor diff = sub(ct.blurry, gt);
    Tensor per_pixel = mul_c(row_sum(mul(diff, diff)), 1.0 / double(gt.shape().cols));
    Tensor gated = mul(per_pixel, detach(ct.disocclusion));
    acc = add(acc, mean_all(gated));
  }
  return acc;
}

DataLoss loss_data(const PriorsRender& priors, Tensor gt_depth, Tensor gt_flow,
                   const std::vector<double>& flow_valid) {
  Tape& tape = *gt_depth.tape;
  DataLoss out;
  out.depth = mean_all(abs_t(sub(priors.depth_evc, gt_depth)));
  out.flow = tape.constant_scalar(0.0);
  if (priors.has_flow && gt_flow.valid()) {
    const int rows = gt_flow.shape().rows;
    double count = 0.0;
    for (double v : flow_valid) count += v;
    if (count > 0.0) {
      Tensor res = row_sum(abs_t(sub(priors.flow_evc, gt_flow)));
      Tensor gated = mul(res, tape.constant({rows, 1}, flow_valid));
      out.flow = mul_c(sum_all(gated), 1.0 / count);
    }
  }
  return out;
}

SceneFlowLoss loss_scene_flow(RenderContext& ctx, const ExposureBundle& src,
                              const std::vector<const CrossTimeRender*>& neighbors) {
  Tape& tape = ctx.tape;
  const DctBasis& meta = ctx.field.basis_meta();
  Tensor basis = ctx.basis_rows();
  const int i = src.frame;
  const int m = ctx.settings.samples_m;
  const int pm = src.pixels.size() * m;

  SceneFlowLoss out;
  out.cyc = tape.constant_scalar(0.0);
  out.smooth = tape.constant_scalar(0.0);
  out.min = tape.constant_scalar(0.0);
  out.wreg = tape.constant_scalar(0.0);

  // mask selecting all but the last sample of each ray block
  std::vector<double> inner(std::size_t(pm), 1.0);
  for (int r = 0; r < src.pixels.size(); ++r) inner[std::size_t(r) * m + (m - 1)] = 0.0;
  Tensor inner_mask = tape.constant({pm, 1}, inner);
  const double inner_count = double(src.pixels.size()) * (m - 1);

  double cyc_rows = 0.0, min_rows = 0.0, smooth_rows = 0.0, temporal_rows = 0.0;
  Tensor smooth_spatial = tape.constant_scalar(0.0);
  Tensor smooth_temporal = tape.constant_scalar(0.0);

  for (int l = 1; l <= ctx.n; ++l) {
    const TimestampRender& tr = src.ts[std::size_t(l - 1)];
    std::vector<Tensor> fw_flows(2);  // [0] -> i-1, [1] -> i+1
    for (const CrossTimeRender* ct : neighbors) {
      if (!ct) continue;
      const int j = ct->target_frame;
      Tensor f_fw = scene_flow_graph(tr.dyn.psi, basis, meta, ctx.t_flat(i, l), ctx.t_flat(j, l));
      fw_flows[j > i ? 1 : 0] = f_fw;

      Tensor f_bw = scene_flow_graph(ct->warped_dyn[std::size_t(l - 1)].psi, basis, meta,
                                     ctx.t_flat(j, l), ctx.t_flat(i, l));
      Tensor w_src = j > i ? tr.dyn.w_fw : tr.dyn.w_bw;
      Tensor cyc_l = mul(add_c(neg(w_src), 1.0), row_sum(abs_t(add(f_fw, f_bw))));
      out.cyc = add(out.cyc, sum_all(cyc_l));
      cyc_rows += double(pm);

      out.min = add(out.min, sum_all(row_sum(abs_t(f_fw))));
      min_rows += double(pm);

      Tensor diff = sub(f_fw, block_shift_up(f_fw, m));
      smooth_spatial = add(smooth_spatial, sum_all(mul(row_sum(abs_t(diff)), inner_mask)));
      smooth_rows += inner_count;
    }
    if (fw_flows[0].valid() && fw_flows[1].valid()) {
      Tensor s = add(fw_flows[0], fw_flows[1]);
      smooth_temporal = add(smooth_temporal, sum_all(row_sum(mul(s, s))));
      temporal_rows += double(pm);
    }
    out.wreg = add(out.wreg, add(sum_all(tr.dyn.w_fw), sum_all(tr.dyn.w_bw)));
  }

  if (cyc_rows > 0.0) out.cyc = mul_c(out.cyc, 1.0 / cyc_rows);
  if (min_rows > 0.0) out.min = mul_c(out.min, 1.0 / min_rows);
  Tensor smooth_sum = tape.constant_scalar(0.0);
  if (smooth_rows > 0.0) smooth_sum = add(smooth_sum, mul_c(smooth_spatial, 1.0 / smooth_rows));
  if (temporal_rows > 0.0)
    smooth_sum = add(smooth_sum, mul_c(smooth_temporal, 0.5 / temporal_rows));
  out.smooth = smooth_sum;
  out.wreg = mul_c(out.wreg, 1.0 / (2.0 * double(pm) * ctx.n));
  return out;
}

Tensor total_loss(const LossTerms& t, const LossWeights& w, std::int64_t step) {
  Tensor total = add(t.rgb_cb, t.rgb_dy);
  if (t.rgb_st.valid()) total = add(total, mul_c(t.rgb_st, w.lambda_st));
  if (t.cross.valid()) total = add(total, t.cross);
  const double ld = lambda_data_at(w, step);
  if (t.data_depth.valid()) total = add(total, mul_c(t.data_depth, ld));
  if (t.data_flow.valid()) total = add(total, mul_c(t.data_flow, ld));
  if (t.cyc.valid()) {
    Tensor sf = mul_c(t.cyc, w.lambda_cyc);
    sf = add(sf, t.smooth);
    sf = add(sf, t.min);
    total = add(total, mul_c(sf, w.lambda_sf));
  }
  if (t.wreg.valid()) total = add(total, mul_c(t.wreg, w.lambda_w_reg));
  return total;
}

std::string LossReport::csv_header() {
  return "step,rgb_dy,rgb_st,rgb_cb,cross,data_depth,data_flow,cyc,smooth,min,wreg,lambda_data,total";
}

std::string LossReport::csv_row(std::int64_t step) const {
  std::ostringstream os;
  os.precision(17);
  os << step << ',' << rgb_dy << ',' << rgb_st << ',' << rgb_cb << ',' << cross << ','
     << data_depth << ',' << data_flow << ',' << cyc << ',' << smooth << ',' << minflow << ','
     << wreg << ',' << lambda_data << ',' << total;
  return os.str();
}

LossReport report_from_terms(const LossTerms& t, const LossWeights& w, std::int64_t step) {
  LossReport r;
  auto get = [](Tensor x) { return x.valid() ? x.val()[0] : 0.0; };
  r.rgb_dy = get(t.rgb_dy);
  r.rgb_st = get(t.rgb_st);
  r.rgb_cb = get(t.rgb_cb);
  r.cross = get(t.cross);
  r.data_depth = get(t.data_depth);
  r.data_flow = get(t.data_flow);
  r.cyc = get(t.cyc);
  r.smooth = get(t.smooth);
  r.minflow = get(t.min);
  r.wreg = get(t.wreg);
  r.lambda_data = lambda_data_at(w, step);
  r.total = get(t.total);
  return r;
}

void align_depth_scale_shift(const std::vector<double>& pred, std::vector<double>& gt,
                             const std::vector<double>& valid) {
  // least squares a, b minimizing sum valid * (a*gt + b - pred)^2
  double sw = 0, sg = 0, sp = 0, sgg = 0, sgp = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double w = valid.empty() ? 1.0 : valid[i];
    sw += w;
    sg += w * gt[i];
    sp += w * pred[i];
    sgg += w * gt[i] * gt[i];
    sgp += w * gt[i] * pred[i];
  }
  const double det = sw * sgg - sg * sg;
  if (std::fabs(det) < 1e-12 || sw == 0.0) return;  // degenerate, leave as-is
  const double a = (sw * sgp - sg * sp) / det;
  const double b = (sgg * sp - sg * sgp) / det;
  for (auto& v : gt) v = a * v + b;
}

}  // namespace blurf
