// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/model.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "blurf/util.hpp"

namespace blurf {

ParamTensor& ParamStore::add(const std::string& name, Shape shape, ParamGroup group) {
  if (contains(name)) throw std::invalid_argument("parameter exists: " + name);
  ParamTensor p;
  p.name = name;
  p.shape = shape;
  p.value.assign(std::size_t(shape.size()), 0.0);
  p.grad.assign(std::size_t(shape.size()), 0.0);
  p.group = group;
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return params_.back();
}

ParamTensor& ParamStore::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter: " + name);
  return params_[it->second];
}

const ParamTensor& ParamStore::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter: " + name);
  return params_[it->second];
}

bool ParamStore::contains(const std::string& name) const { return index_.count(name) > 0; }

void ParamStore::zero_grad() {
  for (auto& p : params_) std::fill(p.grad.begin(), p.grad.end(), 0.0);
}

std::size_t ParamStore::total_size() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

Tensor ParamStore::use(Tape& tape, const std::string& name) {
  ParamTensor& p = at(name);
  return tape.leaf(p.shape, p.value.data(), p.grad.data());
}

std::string Model::twist_name(int frame, bool end) {
  return "pose.twist_" + std::string(end ? "end" : "start") + "_" + std::to_string(frame);
}

namespace {

// Uniform He-style fan-in init; biases zero unless shifted by the caller.
void init_linear(ParamStore& store, const std::string& prefix, int in, int out, Rng& rng,
                 double bias_init = 0.0) {
  ParamTensor& w = store.add(prefix + ".w", {in, out}, ParamGroup::kMlp);
  const double bound = std::sqrt(6.0 / double(in));
  for (auto& v : w.value) v = rng.uniform(-bound, bound);
  ParamTensor& b = store.add(prefix + ".b", {1, out}, ParamGroup::kMlp);
  for (auto& v : b.value) v = bias_init;
}

int trunk_in_dim(int l_pos, int l_time, bool with_time) {
  int d = 3 * (2 * l_pos + 1);
  if (with_time) d += (2 * l_time + 1);
  return d;
}

}  // namespace

Model::Model(const ModelConfig& cfg, const std::vector<Pose>& init_start,
             const std::vector<Pose>& init_end, std::uint64_t seed)
    : cfg_(cfg), init_start_(init_start), init_end_(init_end) {
  if (int(init_start.size()) != cfg.frames || int(init_end.size()) != cfg.frames)
    throw std::invalid_argument("model: pose count must match frame count");
  basis_meta_ = cfg.learnable_basis ? init_learnable_basis(cfg.n, cfg.frames, cfg.K)
                                    : make_dct_basis(cfg.n, cfg.frames, cfg.K);

  Rng rng(hash_keys(seed, 0x6d6f64656cull));

  // dynamic field: trunk on [enc(x), enc(t)], heads for sigma/psi/w, a color
  // head that additionally sees enc(d)
  {
    const MlpConfig& m = cfg.dynamic_mlp;
    int in = trunk_in_dim(cfg.l_pos, cfg.l_time, true);
    int cur = in;
    for (int layer = 0; layer < m.depth; ++layer) {
      int lin = (layer == m.skip && layer > 0) ? cur + in : cur;
      init_linear(store_, "dyn.l" + std::to_string(layer), lin, m.width, rng);
      cur = m.width;
    }
    init_linear(store_, "dyn.sigma", cur, 1, rng);
    init_linear(store_, "dyn.psi", cur, 3 * cfg.K, rng);
    init_linear(store_, "dyn.w", cur, 2, rng, -2.0);  // start near "unoccluded"
    const int dir_dim = 3 * (2 * cfg.l_dir + 1);
    init_linear(store_, "dyn.c0", cur + dir_dim, cfg.color_head_width, rng);
    init_linear(store_, "dyn.c1", cfg.color_head_width, 3, rng);
  }

  if (cfg.use_static) {
    const MlpConfig& m = cfg.static_mlp;
    int in = trunk_in_dim(cfg.l_pos, cfg.l_time, false);
    int cur = in;
    for (int layer = 0; layer < m.depth; ++layer) {
      int lin = (layer == m.skip && layer > 0) ? cur + in : cur;
      init_linear(store_, "st.l" + std::to_string(layer), lin, m.width, rng);
      cur = m.width;
    }
    init_linear(store_, "st.sigma", cur, 1, rng);
    init_linear(store_, "st.v", cur, 1, rng);
    const int dir_dim = 3 * (2 * cfg.l_dir + 1);
    init_linear(store_, "st.c0", cur + dir_dim, cfg.color_head_width, rng);
    init_linear(store_, "st.c1", cfg.color_head_width, 3, rng);
  }

  for (int f = 1; f <= cfg.frames; ++f) {
    ParamTensor& ts = store_.add(twist_name(f, false), {1, 6}, ParamGroup::kCamera);
    ParamTensor& te = store_.add(twist_name(f, true), {1, 6}, ParamGroup::kCamera);
    (void)te;
    // the first start twist pins the gauge of the jointly optimized cameras
    if (f == 1) ts.trainable = false;
  }

  if (cfg.learnable_basis) {
    ParamTensor& b = store_.add("dct.basis", {basis_meta_.total_timestamps(), cfg.K},
                                ParamGroup::kDctBasis);
    b.value = basis_meta_.table;
  }
}

Pose Model::current_start(int frame) const {
  const auto& tw = store_.at(twist_name(frame, false)).value;
  Twist t;
  t.omega = Vec3(tw[0], tw[1], tw[2]);
  t.v = Vec3(tw[3], tw[4], tw[5]);
  return init_start_[frame - 1] * se3_exp(t);
}

Pose Model::current_end(int frame) const {
  const auto& tw = store_.at(twist_name(frame, true)).value;
  Twist t;
  t.omega = Vec3(tw[0], tw[1], tw[2]);
  t.v = Vec3(tw[3], tw[4], tw[5]);
  return init_end_[frame - 1] * se3_exp(t);
}

// --------------------------------------------------------------------------
// checkpoint format: "BLRF" magic, u32 version, i64 step, config JSON string,
// parameter blocks, optional Adam moments.

namespace {

void write_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_i64(std::ostream& os, std::int64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void write_str(std::ostream& os, const std::string& s) {
  write_i64(os, std::int64_t(s.size()));
  os.write(s.data(), std::streamsize(s.size()));
}
void write_vec(std::ostream& os, const std::vector<double>& v) {
  write_i64(os, std::int64_t(v.size()));
  os.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size() * sizeof(double)));
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
std::int64_t read_i64(std::istream& is) {
  std::int64_t v;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
std::string read_str(std::istream& is) {
  std::int64_t n = read_i64(is);
  std::string s(static_cast<std::size_t>(n), '\0');
  is.read(s.data(), n);
  return s;
}
std::vector<double> read_vec(std::istream& is) {
  std::int64_t n = read_i64(is);
  std::vector<double> v(static_cast<std::size_t>(n));
  is.read(reinterpret_cast<char*>(v.data()), std::streamsize(v.size() * sizeof(double)));
  return v;
}

constexpr std::uint32_t kCkptVersion = 1;

}  // namespace

void save_checkpoint(const std::string& path, const Model& model, std::int64_t step,
                     const std::string& config_json, const AdamStateBlob* adam) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
  os.write("BLRF", 4);
  write_u32(os, kCkptVersion);
  write_i64(os, step);
  write_str(os, config_json);
  const auto& params = model.store().all();
  write_i64(os, std::int64_t(params.size()));
  for (const auto& p : params) {
    write_str(os, p.name);
    write_u32(os, std::uint32_t(p.shape.rows));
    write_u32(os, std::uint32_t(p.shape.cols));
    write_u32(os, std::uint32_t(p.group));
    write_u32(os, p.trainable ? 1u : 0u);
    write_vec(os, p.value);
  }
  write_u32(os, adam ? 1u : 0u);
  if (adam) {
    write_i64(os, adam->step);
    write_i64(os, std::int64_t(adam->m.size()));
    for (std::size_t i = 0; i < adam->m.size(); ++i) {
      write_vec(os, adam->m[i]);
      write_vec(os, adam->v[i]);
    }
  }
  if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read checkpoint: " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, "BLRF", 4) != 0) throw std::runtime_error("not a checkpoint: " + path);
  const std::uint32_t version = read_u32(is);
  if (version != kCkptVersion) throw std::runtime_error("unsupported checkpoint version");
  CheckpointData out;
  out.step = read_i64(is);
  out.config_json = read_str(is);
  const std::int64_t count = read_i64(is);
  out.params.resize(static_cast<std::size_t>(count));
  for (auto& p : out.params) {
    p.name = read_str(is);
    p.shape.rows = int(read_u32(is));
    p.shape.cols = int(read_u32(is));
    p.group = ParamGroup(read_u32(is));
    p.trainable = read_u32(is) != 0;
    p.value = read_vec(is);
    p.grad.assign(p.value.size(), 0.0);
  }
  out.has_adam = read_u32(is) != 0;
  if (out.has_adam) {
    out.adam.step = read_i64(is);
    const std::int64_t n = read_i64(is);
    out.adam.m.resize(static_cast<std::size_t>(n));
    out.adam.v.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      out.adam.m[std::size_t(i)] = read_vec(is);
      out.adam.v[std::size_t(i)] = read_vec(is);
    }
  }
  if (!is) throw std::runtime_error("checkpoint truncated: " + path);
  return out;
}

Model model_from_checkpoint(const CheckpointData& ckpt, const ModelConfig& cfg,
                            const std::vector<Pose>& init_start, const std::vector<Pose>& init_end) {
  Model model(cfg, init_start, init_end, 0);
  for (const auto& p : ckpt.params) {
    ParamTensor& dst = model.store().at(p.name);
    if (!(dst.shape == p.shape)) throw std::runtime_error("checkpoint shape mismatch: " + p.name);
    dst.value = p.value;
    dst.trainable = p.trainable;
  }
  return model;
}

}  // namespace blurf
