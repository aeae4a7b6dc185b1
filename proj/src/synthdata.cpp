// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "blurf/kernels.hpp"

namespace blurf {

namespace fs = std::filesystem;
using nlohmann::json;

Vec3 TextureSpec::color(double u, double v) const {
  double s = std::sin(2.0 * M_PI * (fu * u + fv * v) + phase);
  if (edge > 0.0) s = std::tanh(edge * s) / std::tanh(edge);
  Vec3 c = base + amp * s;
  return c.cwiseMax(0.0).cwiseMin(1.0);
}

Vec3 MoverSpec::center(double t) const {
  Vec3 c = p0 + vel * t + 0.5 * t * t * acc;
  if (sin_freq != 0.0) c += sin_amp * std::sin(2.0 * M_PI * sin_freq * t + sin_phase);
  return c;
}

Pose CameraPathSpec::pose(double t) const {
  Pose p;
  p.rotation = so3_exp(rot_axis.normalized() * (rot_rate * (t - 0.5)));
  p.translation = t0 + vel * t;
  return p;
}

Camera SceneScript::camera() const {
  Camera c;
  c.fx = fx;
  c.fy = fy;
  c.cx = (width - 1) / 2.0;
  c.cy = (height - 1) / 2.0;
  c.width = width;
  c.height = height;
  c.near_s = near_s;
  c.far_s = far_s;
  return c;
}

double SceneScript::timestamp_time(int i, int l) const {
  const double mid = frame_center(i);
  if (n == 1) return mid;
  const double half = exposure_half(i);
  return mid - half + 2.0 * half * double(l - 1) / double(n - 1);
}

Pose SceneScript::pose_start(int i) const { return campath.pose(frame_center(i) - exposure_half(i)); }
Pose SceneScript::pose_end(int i) const { return campath.pose(frame_center(i) + exposure_half(i)); }

Pose SceneScript::pose_at(int i, double alpha) const {
  return interpolate_pose_alpha(pose_start(i), pose_end(i), alpha);
}

// ---------------------------------------------------------------------------

namespace {

struct Hit {
  double s = -1.0;
  int mover = -1;  // -1 = background
  Vec3 point = Vec3::Zero();
};

bool intersect_box(const Vec3& o, const Vec3& d, const Vec3& c, const Vec3& half, double* s_hit) {
  double t0 = 0.0, t1 = 1e30;
  for (int a = 0; a < 3; ++a) {
    const double lo = c[a] - half[a], hi = c[a] + half[a];
    if (std::fabs(d[a]) < 1e-12) {
      if (o[a] < lo || o[a] > hi) return false;
      continue;
    }
    double ta = (lo - o[a]) / d[a];
    double tb = (hi - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  if (t0 <= 1e-9) return false;
  *s_hit = t0;
  return true;
}

bool intersect_sphere(const Vec3& o, const Vec3& d, const Vec3& c, double r, double* s_hit) {
  const Vec3 oc = o - c;
  const double b = oc.dot(d);
  const double disc = b * b - (oc.squaredNorm() - r * r);
  if (disc < 0.0) return false;
  const double s = -b - std::sqrt(disc);
  if (s <= 1e-9) return false;
  *s_hit = s;
  return true;
}

Hit trace(const SceneScript& sc, const Vec3& o, const Vec3& d, double t) {
  Hit best;
  // background plane z = bg_depth
  if (std::fabs(d.z()) > 1e-12) {
    const double s = (sc.bg_depth - o.z()) / d.z();
    if (s > 1e-9) {
      best.s = s;
      best.mover = -1;
      best.point = o + s * d;
    }
  }
  for (std::size_t k = 0; k < sc.movers.size(); ++k) {
    const MoverSpec& mv = sc.movers[k];
    const Vec3 c = mv.center(t);
    double s;
    bool hit = mv.kind == MoverSpec::Kind::kBox ? intersect_box(o, d, c, mv.half, &s)
                                                : intersect_sphere(o, d, c, mv.half.x(), &s);
    if (hit && (best.s < 0.0 || s < best.s)) {
      best.s = s;
      best.mover = int(k);
      best.point = o + s * d;
    }
  }
  return best;
}

Vec3 shade(const SceneScript& sc, const Hit& h, double t) {
  if (h.mover < 0) return sc.bg_tex.color(h.point.x(), h.point.y());
  const MoverSpec& mv = sc.movers[std::size_t(h.mover)];
  const Vec3 local = h.point - mv.center(t);
  if (mv.kind == MoverSpec::Kind::kSphere) return mv.tex.color(local.x(), local.y());
  // texture the two axes spanning the hit face
  int axis = 0;
  double best = -1.0;
  for (int a = 0; a < 3; ++a) {
    const double f = std::fabs(local[a]) / mv.half[a];
    if (f > best) {
      best = f;
      axis = a;
    }
  }
  const int ua = axis == 0 ? 1 : 0;
  const int va = axis == 2 ? 1 : 2;
  return mv.tex.color(local[ua], local[va]);
}

}  // namespace

RasterResult raster_sharp(const SceneScript& sc, double t) {
  const Camera cam = sc.camera();
  // exposure-consistent pose: geodesic inside the containing frame's exposure
  // when t lies in one, otherwise the raw path pose
  Pose pose = sc.campath.pose(t);
  for (int i = 1; i <= sc.frames; ++i) {
    const double lo = sc.frame_center(i) - sc.exposure_half(i);
    const double hi = sc.frame_center(i) + sc.exposure_half(i);
    if (t >= lo - 1e-12 && t <= hi + 1e-12) {
      const double alpha = hi > lo ? (t - lo) / (hi - lo) : 0.0;
      pose = sc.pose_at(i, std::clamp(alpha, 0.0, 1.0));
      break;
    }
  }

  RasterResult out;
  out.color = Image(sc.width, sc.height, 3);
  out.depth = Image(sc.width, sc.height, 1);
  out.mask = Image(sc.width, sc.height, 1);
#pragma omp parallel for schedule(static) if (kernels::parallel_enabled())
  for (int r = 0; r < sc.height; ++r) {
    for (int c = 0; c < sc.width; ++c) {
      const Ray ray = pixel_ray(cam, pose, r, c);
      const Hit h = trace(sc, ray.origin, ray.direction, t);
      if (h.s < 0.0) {
        out.depth.at(r, c) = cam.far_s;
        continue;
      }
      const Vec3 col = shade(sc, h, t);
      out.color.at(r, c, 0) = col.x();
      out.color.at(r, c, 1) = col.y();
      out.color.at(r, c, 2) = col.z();
      out.depth.at(r, c) = h.s;
      out.mask.at(r, c) = h.mover >= 0 ? 1.0 : 0.0;
    }
  }
  return out;
}

Image make_blurry(const SceneScript& sc, int i) {
  const int steps = std::max(1, sc.substeps);
  Image acc(sc.width, sc.height, 3);
  for (int s = 0; s < steps; ++s) {
    const double alpha = steps == 1 ? 0.5 : double(s) / double(steps - 1);
    const double t = sc.frame_center(i) + sc.exposure_half(i) * (2.0 * alpha - 1.0);
    const RasterResult r = raster_sharp(sc, t);
    for (std::size_t k = 0; k < acc.data.size(); ++k) acc.data[k] += r.color.data[k];
  }
  for (auto& v : acc.data) v /= double(steps);
  return acc;
}

Image gt_flow(const SceneScript& sc, int i, int l) {
  if (i >= sc.frames) throw std::invalid_argument("gt_flow: last frame has no forward flow");
  const Camera cam = sc.camera();
  const double t_now = sc.timestamp_time(i, l);
  const double t_next = sc.timestamp_time(i + 1, l);
  const double alpha = sc.n == 1 ? 0.5 : double(l - 1) / double(sc.n - 1);
  const Pose pose_now = sc.pose_at(i, alpha);
  const Pose pose_next = sc.pose_at(i + 1, alpha);

  Image flow(sc.width, sc.height, 2);
#pragma omp parallel for schedule(static) if (kernels::parallel_enabled())
  for (int r = 0; r < sc.height; ++r) {
    for (int c = 0; c < sc.width; ++c) {
      const Ray ray = pixel_ray(cam, pose_now, r, c);
      const Hit h = trace(sc, ray.origin, ray.direction, t_now);
      if (h.s < 0.0) continue;
      Vec3 moved = h.point;
      if (h.mover >= 0) {
        const MoverSpec& mv = sc.movers[std::size_t(h.mover)];
        moved += mv.center(t_next) - mv.center(t_now);
      }
      const Eigen::Vector2d p = project(cam, pose_next, moved);
      flow.at(r, c, 0) = p.x() - double(c);
      flow.at(r, c, 1) = p.y() - double(r);
    }
  }
  return flow;
}

namespace {

// disc min-filter on depth / max-magnitude filter on flow: spreads foreground
// outward like priors estimated from blurry inputs do
Image corrupt_depth(const Image& d, int rad) {
  Image out = d;
  for (int r = 0; r < d.height; ++r)
    for (int c = 0; c < d.width; ++c) {
      double best = d.at(r, c);
      for (int dr = -rad; dr <= rad; ++dr)
        for (int dc = -rad; dc <= rad; ++dc) {
          if (dr * dr + dc * dc > rad * rad) continue;
          const int rr = std::clamp(r + dr, 0, d.height - 1);
          const int cc = std::clamp(c + dc, 0, d.width - 1);
          best = std::min(best, d.at(rr, cc));
        }
      out.at(r, c) = best;
    }
  return out;
}

Image corrupt_flow(const Image& f, int rad) {
  Image out = f;
  for (int r = 0; r < f.height; ++r)
    for (int c = 0; c < f.width; ++c) {
      double best = -1.0;
      for (int dr = -rad; dr <= rad; ++dr)
        for (int dc = -rad; dc <= rad; ++dc) {
          if (dr * dr + dc * dc > rad * rad) continue;
          const int rr = std::clamp(r + dr, 0, f.height - 1);
          const int cc = std::clamp(c + dc, 0, f.width - 1);
          const double n2 = f.at(rr, cc, 0) * f.at(rr, cc, 0) + f.at(rr, cc, 1) * f.at(rr, cc, 1);
          if (n2 > best) {
            best = n2;
            out.at(r, c, 0) = f.at(rr, cc, 0);
            out.at(r, c, 1) = f.at(rr, cc, 1);
          }
        }
    }
  return out;
}

}  // namespace

FrameData generate_frame(const SceneScript& sc, int i) {
  FrameData fd;
  fd.blurry = make_blurry(sc, i);
  const RasterResult mid = raster_sharp(sc, sc.frame_center(i));
  fd.sharp = mid.color;
  fd.pose_start = sc.pose_start(i);
  fd.pose_end = sc.pose_end(i);
  fd.t0 = sc.frame_center(i) - sc.exposure_half(i);
  fd.t1 = sc.frame_center(i) + sc.exposure_half(i);

  // priors composited over the n model timestamps: min depth, max-norm flow,
  // union mask
  Image depth_min;
  Image mask_union(sc.width, sc.height, 1);
  std::optional<Image> flow_sel;
  for (int l = 1; l <= sc.n; ++l) {
    const RasterResult rl = raster_sharp(sc, sc.timestamp_time(i, l));
    if (l == 1) {
      depth_min = rl.depth;
    } else {
      for (std::size_t k = 0; k < depth_min.data.size(); ++k)
        depth_min.data[k] = std::min(depth_min.data[k], rl.depth.data[k]);
    }
    for (std::size_t k = 0; k < mask_union.data.size(); ++k)
      mask_union.data[k] = std::max(mask_union.data[k], rl.mask.data[k]);
    if (i < sc.frames) {
      Image fl = gt_flow(sc, i, l);
      if (!flow_sel) {
        flow_sel = fl;
      } else {
        for (int r = 0; r < sc.height; ++r)
          for (int c = 0; c < sc.width; ++c) {
            const double cur = flow_sel->at(r, c, 0) * flow_sel->at(r, c, 0) +
                               flow_sel->at(r, c, 1) * flow_sel->at(r, c, 1);
            const double cand = fl.at(r, c, 0) * fl.at(r, c, 0) + fl.at(r, c, 1) * fl.at(r, c, 1);
            if (cand > cur) {
              flow_sel->at(r, c, 0) = fl.at(r, c, 0);
              flow_sel->at(r, c, 1) = fl.at(r, c, 1);
            }
          }
      }
    }
  }
  if (sc.corrupt_priors) {
    depth_min = corrupt_depth(depth_min, sc.corrupt_radius);
    if (flow_sel) *flow_sel = corrupt_flow(*flow_sel, sc.corrupt_radius);
  }
  fd.depth_prior = std::move(depth_min);
  fd.flow_prior = std::move(flow_sel);
  fd.mask = std::move(mask_union);
  return fd;
}

// ---------------------------------------------------------------------------

namespace {

json pose_to_json(const Pose& p) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rows.push_back(p.rotation(r, c));
    rows.push_back(p.translation[r]);
  }
  return rows;  // row-major 3x4
}

Pose pose_from_json(const json& j) {
  Pose p;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) p.rotation(r, c) = j[std::size_t(r * 4 + c)].get<double>();
    p.translation[r] = j[std::size_t(r * 4 + 3)].get<double>();
  }
  return p;
}

json tex_to_json(const TextureSpec& t) {
  return json{{"base", {t.base.x(), t.base.y(), t.base.z()}},
              {"amp", {t.amp.x(), t.amp.y(), t.amp.z()}},
              {"fu", t.fu},
              {"fv", t.fv},
              {"phase", t.phase},
              {"edge", t.edge}};
}

TextureSpec tex_from_json(const json& j) {
  TextureSpec t;
  t.base = Vec3(j["base"][0], j["base"][1], j["base"][2]);
  t.amp = Vec3(j["amp"][0], j["amp"][1], j["amp"][2]);
  t.fu = j["fu"];
  t.fv = j["fv"];
  t.phase = j["phase"];
  t.edge = j.value("edge", 0.0);
  return t;
}

}  // namespace

std::string script_to_json(const SceneScript& s) {
  json j;
  j["name"] = s.name;
  j["width"] = s.width;
  j["height"] = s.height;
  j["frames"] = s.frames;
  j["n"] = s.n;
  j["substeps"] = s.substeps;
  j["exposure_fraction"] = s.exposure_fraction;
  j["fx"] = s.fx;
  j["fy"] = s.fy;
  j["near"] = s.near_s;
  j["far"] = s.far_s;
  j["bg_depth"] = s.bg_depth;
  j["bg_tex"] = tex_to_json(s.bg_tex);
  j["corrupt_priors"] = s.corrupt_priors;
  j["corrupt_radius"] = s.corrupt_radius;
  j["camera_path"] = json{{"t0", {s.campath.t0.x(), s.campath.t0.y(), s.campath.t0.z()}},
                          {"vel", {s.campath.vel.x(), s.campath.vel.y(), s.campath.vel.z()}},
                          {"rot_axis", {s.campath.rot_axis.x(), s.campath.rot_axis.y(), s.campath.rot_axis.z()}},
                          {"rot_rate", s.campath.rot_rate}};
  j["movers"] = json::array();
  for (const auto& m : s.movers) {
    j["movers"].push_back(json{
        {"kind", m.kind == MoverSpec::Kind::kBox ? "box" : "sphere"},
        {"half", {m.half.x(), m.half.y(), m.half.z()}},
        {"tex", tex_to_json(m.tex)},
        {"p0", {m.p0.x(), m.p0.y(), m.p0.z()}},
        {"vel", {m.vel.x(), m.vel.y(), m.vel.z()}},
        {"acc", {m.acc.x(), m.acc.y(), m.acc.z()}},
        {"sin_amp", {m.sin_amp.x(), m.sin_amp.y(), m.sin_amp.z()}},
        {"sin_freq", m.sin_freq},
        {"sin_phase", m.sin_phase}});
  }
  return j.dump(2);
}

SceneScript script_from_json(const std::string& text) {
  const json j = json::parse(text);
  SceneScript s;
  s.name = j.value("name", "custom");
  s.width = j["width"];
  s.height = j["height"];
  s.frames = j["frames"];
  s.n = j["n"];
  s.substeps = j["substeps"];
  s.exposure_fraction = j["exposure_fraction"];
  s.fx = j["fx"];
  s.fy = j["fy"];
  s.near_s = j["near"];
  s.far_s = j["far"];
  s.bg_depth = j["bg_depth"];
  s.bg_tex = tex_from_json(j["bg_tex"]);
  s.corrupt_priors = j.value("corrupt_priors", false);
  s.corrupt_radius = j.value("corrupt_radius", 2);
  const json& cp = j["camera_path"];
  s.campath.t0 = Vec3(cp["t0"][0], cp["t0"][1], cp["t0"][2]);
  s.campath.vel = Vec3(cp["vel"][0], cp["vel"][1], cp["vel"][2]);
  s.campath.rot_axis = Vec3(cp["rot_axis"][0], cp["rot_axis"][1], cp["rot_axis"][2]);
  s.campath.rot_rate = cp["rot_rate"];
  for (const auto& mj : j["movers"]) {
    MoverSpec m;
    m.kind = mj["kind"] == "sphere" ? MoverSpec::Kind::kSphere : MoverSpec::Kind::kBox;
    m.half = Vec3(mj["half"][0], mj["half"][1], mj["half"][2]);
    m.tex = tex_from_json(mj["tex"]);
    m.p0 = Vec3(mj["p0"][0], mj["p0"][1], mj["p0"][2]);
    m.vel = Vec3(mj["vel"][0], mj["vel"][1], mj["vel"][2]);
    m.acc = Vec3(mj["acc"][0], mj["acc"][1], mj["acc"][2]);
    m.sin_amp = Vec3(mj["sin_amp"][0], mj["sin_amp"][1], mj["sin_amp"][2]);
    m.sin_freq = mj["sin_freq"];
    m.sin_phase = mj["sin_phase"];
    s.movers.push_back(m);
  }
  return s;
}

void generate_dataset(const SceneScript& sc, const std::string& out_dir) {
  fs::create_directories(out_dir);
  json manifest;
  manifest["schema_version"] = 1;
  manifest["script"] = json::parse(script_to_json(sc));
  const Camera cam = sc.camera();
  manifest["camera"] = json{{"fx", cam.fx}, {"fy", cam.fy}, {"cx", cam.cx}, {"cy", cam.cy},
                            {"width", cam.width}, {"height", cam.height},
                            {"near", cam.near_s}, {"far", cam.far_s}};
  json frames = json::array();
  for (int i = 1; i <= sc.frames; ++i) {
    const FrameData fd = generate_frame(sc, i);
    char idx[8];
    std::snprintf(idx, sizeof(idx), "%03d", i);
    const std::string tag(idx);
    save_png(out_dir + "/blurry_" + tag + ".png", fd.blurry);
    save_png(out_dir + "/sharp_" + tag + ".png", fd.sharp);
    save_pfm(out_dir + "/depth_" + tag + ".pfm", fd.depth_prior);
    save_png_mask(out_dir + "/mask_" + tag + ".png", fd.mask);
    json fj;
    fj["blurry"] = "blurry_" + tag + ".png";
    fj["sharp"] = "sharp_" + tag + ".png";
    fj["depth"] = "depth_" + tag + ".pfm";
    fj["mask"] = "mask_" + tag + ".png";
    if (fd.flow_prior) {
      save_pfm(out_dir + "/flow_" + tag + ".pfm", *fd.flow_prior);
      fj["flow"] = "flow_" + tag + ".pfm";
    }
    fj["pose_start"] = pose_to_json(fd.pose_start);
    fj["pose_end"] = pose_to_json(fd.pose_end);
    fj["exposure"] = {fd.t0, fd.t1};
    frames.push_back(fj);
  }
  manifest["frames"] = frames;
  std::ofstream os(out_dir + "/manifest.json");
  os << manifest.dump(2) << "\n";
  if (!os) throw std::runtime_error("cannot write manifest in " + out_dir);
}

Dataset load_dataset(const std::string& dir) {
  std::ifstream is(dir + "/manifest.json");
  if (!is) throw std::runtime_error("no manifest.json in " + dir);
  json manifest;
  is >> manifest;
  Dataset ds;
  ds.script = script_from_json(manifest["script"].dump());
  const json& cj = manifest["camera"];
  ds.cam.fx = cj["fx"];
  ds.cam.fy = cj["fy"];
  ds.cam.cx = cj["cx"];
  ds.cam.cy = cj["cy"];
  ds.cam.width = cj["width"];
  ds.cam.height = cj["height"];
  ds.cam.near_s = cj["near"];
  ds.cam.far_s = cj["far"];
  ds.frames = int(manifest["frames"].size());
  ds.n = ds.script.n;
  for (const auto& fj : manifest["frames"]) {
    FrameData fd;
    fd.blurry = load_png(dir + "/" + fj["blurry"].get<std::string>());
    fd.sharp = load_png(dir + "/" + fj["sharp"].get<std::string>());
    fd.depth_prior = load_pfm(dir + "/" + fj["depth"].get<std::string>());
    fd.mask = load_png(dir + "/" + fj["mask"].get<std::string>());
    if (fj.contains("flow")) {
      Image f3 = load_pfm(dir + "/" + fj["flow"].get<std::string>());
      Image f2(f3.width, f3.height, 2);
      for (int r = 0; r < f3.height; ++r)
        for (int c = 0; c < f3.width; ++c) {
          f2.at(r, c, 0) = f3.at(r, c, 0);
          f2.at(r, c, 1) = f3.at(r, c, 1);
        }
      fd.flow_prior = std::move(f2);
    }
    fd.pose_start = pose_from_json(fj["pose_start"]);
    fd.pose_end = pose_from_json(fj["pose_end"]);
    fd.t0 = fj["exposure"][0];
    fd.t1 = fj["exposure"][1];
    ds.data.push_back(std::move(fd));
  }
  return ds;
}

Dataset build_dataset(const SceneScript& script) {
  Dataset ds;
  ds.script = script;
  ds.cam = script.camera();
  ds.frames = script.frames;
  ds.n = script.n;
  for (int i = 1; i <= script.frames; ++i) ds.data.push_back(generate_frame(script, i));
  return ds;
}

// ---------------------------------------------------------------------------

SceneScript moving_square_script() {
  SceneScript s;
  s.name = "moving-square";
  s.width = 96;
  s.height = 54;
  s.frames = 12;
  s.n = 7;
  s.substeps = 21;
  s.exposure_fraction = 0.5;
  s.fx = s.fy = 92.0;
  s.near_s = 2.0;
  s.far_s = 9.0;
  s.bg_depth = 6.0;
  s.bg_tex.base = Vec3(0.42, 0.40, 0.52);
  s.bg_tex.amp = Vec3(0.32, 0.26, 0.22);
  s.bg_tex.fu = 1.05;
  s.bg_tex.fv = 0.62;
  s.bg_tex.phase = 0.4;
  s.bg_tex.edge = 3.0;

  MoverSpec m;
  m.kind = MoverSpec::Kind::kBox;
  m.half = Vec3(0.45, 0.45, 0.06);
  m.tex.base = Vec3(0.85, 0.30, 0.22);
  m.tex.amp = Vec3(0.10, 0.25, 0.15);
  m.tex.fu = 1.1;
  m.tex.fv = 0.8;
  m.tex.phase = 1.1;
  m.tex.edge = 2.5;
  m.p0 = Vec3(-1.6, -0.25, 4.0);
  m.vel = Vec3(3.2, 0.55, 0.0);
  s.movers.push_back(m);

  s.campath.t0 = Vec3(-0.40, 0.0, 0.0);
  s.campath.vel = Vec3(0.8, 0.0, 0.0);
  s.campath.rot_axis = Vec3::UnitY();
  s.campath.rot_rate = 1.05;
  return s;
}

SceneScript two_movers_script() {
  SceneScript s = moving_square_script();
  s.name = "two-movers";
  s.bg_depth = 6.5;
  s.bg_tex.fu = 0.95;
  s.bg_tex.fv = 0.58;
  s.bg_tex.edge = 3.0;
  s.movers.clear();

  MoverSpec a;
  a.kind = MoverSpec::Kind::kBox;
  a.half = Vec3(0.40, 0.40, 0.06);
  a.tex.base = Vec3(0.85, 0.30, 0.22);
  a.tex.amp = Vec3(0.10, 0.25, 0.15);
  a.tex.fu = 0.9;
  a.tex.fv = 0.6;
  a.tex.edge = 2.0;
  a.p0 = Vec3(-1.6, -0.35, 3.6);
  a.vel = Vec3(3.2, 0.6, 0.0);
  s.movers.push_back(a);

  MoverSpec b;
  b.kind = MoverSpec::Kind::kSphere;
  b.half = Vec3(0.45, 0.45, 0.45);
  b.tex.base = Vec3(0.25, 0.62, 0.38);
  b.tex.amp = Vec3(0.12, 0.22, 0.28);
  b.tex.fu = 0.8;
  b.tex.fv = 0.55;
  b.tex.phase = 0.7;
  b.tex.edge = 2.0;
  b.p0 = Vec3(1.7, 0.4, 4.8);
  b.vel = Vec3(-3.0, -0.65, 0.0);
  s.movers.push_back(b);
  s.campath.rot_rate = 0.95;
  return s;
}

SceneScript tiny_static_script() {
  SceneScript s;
  s.name = "tiny-static";
  s.width = 32;
  s.height = 18;
  s.frames = 3;
  s.n = 3;
  s.substeps = 5;
  s.exposure_fraction = 0.5;
  s.fx = s.fy = 30.0;
  s.near_s = 2.0;
  s.far_s = 9.0;
  s.bg_depth = 6.0;
  s.bg_tex.base = Vec3(0.5, 0.45, 0.55);
  s.bg_tex.amp = Vec3(0.25, 0.25, 0.2);
  s.bg_tex.fu = 0.6;
  s.bg_tex.fv = 0.4;
  s.campath.t0 = Vec3(-0.05, 0.0, 0.0);
  s.campath.vel = Vec3(0.1, 0.0, 0.0);
  s.campath.rot_rate = 0.0;
  return s;
}

SceneScript script_by_name(const std::string& name) {
  if (name == "moving-square") return moving_square_script();
  if (name == "two-movers") return two_movers_script();
  if (name == "tiny-static") return tiny_static_script();
  throw std::invalid_argument("unknown scene: " + name);
}

}  // namespace blurf
