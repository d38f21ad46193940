#include "advroad/scene.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace advroad {

namespace {

std::uint64_t hash2(std::uint64_t seed, long ix, long iy) {
  std::uint64_t h = seed;
  h ^= static_cast<std::uint64_t>(ix) * 0x9e3779b97f4a7c15ull;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h ^= static_cast<std::uint64_t>(iy) * 0xc2b2ae3d27d4eb4full;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  return h ^ (h >> 31);
}

double lattice(std::uint64_t seed, long ix, long iy) {
  return double(hash2(seed, ix, iy) >> 11) * 0x1.0p-53;
}

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

// C2-continuous value noise in [0,1).
double value_noise(std::uint64_t seed, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const long ix = static_cast<long>(fx), iy = static_cast<long>(fy);
  const double tx = fade(x - fx), ty = fade(y - fy);
  const double v00 = lattice(seed, ix, iy), v10 = lattice(seed, ix + 1, iy);
  const double v01 = lattice(seed, ix, iy + 1), v11 = lattice(seed, ix + 1, iy + 1);
  return (v00 * (1 - tx) + v10 * tx) * (1 - ty) + (v01 * (1 - tx) + v11 * tx) * ty;
}

double smoothstep(double lo, double hi, double v) {
  const double t = std::min(std::max((v - lo) / (hi - lo), 0.0), 1.0);
  return t * t * (3.0 - 2.0 * t);
}

double clamp01(double v) { return std::min(std::max(v, 0.0), 1.0); }

}  // namespace

TextureParams TextureParams::sample(Rng& rng, bool allow_markings) {
  TextureParams p;
  p.noise_seed = rng.next_u64();
  p.base_gray = rng.uniform(0.24, 0.44);
  p.fine_amp = rng.uniform(0.03, 0.06);
  p.fine_scale = rng.uniform(3.0, 4.5);
  p.coarse_amp = rng.uniform(0.03, 0.09);
  p.coarse_scale = rng.uniform(0.2, 0.5);
  p.stain_amp = rng.uniform(0.04, 0.16);
  p.stain_scale = rng.uniform(0.12, 0.3);
  p.stain_threshold = rng.uniform(0.55, 0.7);
  p.tint_r = rng.uniform(-0.012, 0.012);
  p.tint_b = rng.uniform(-0.012, 0.018);
  if (allow_markings && rng.uniform01() < 0.55) {
    p.n_markings = rng.uniform01() < 0.4 ? 2 : 1;
    p.marking_y[0] = rng.uniform(-3.5, 3.5);
    p.marking_y[1] = p.marking_y[0] + rng.uniform(2.8, 4.2);
    p.marking_half_width = rng.uniform(0.05, 0.09);
    p.marking_bright = rng.uniform(0.6, 0.85);
    p.marking_yellow = rng.uniform01() < 0.3;
    if (rng.uniform01() < 0.5) {
      p.dash_period = rng.uniform(2.0, 4.0);
      p.dash_duty = rng.uniform(0.45, 0.7);
      p.dash_phase = rng.uniform(0.0, p.dash_period);
    }
  } else {
    p.n_markings = 0;
  }
  return p;
}

std::array<double, 3> texture_color(const TextureParams& p, double x, double y) {
  double g = p.base_gray;
  g += p.fine_amp * (2.0 * value_noise(p.noise_seed, x * p.fine_scale, y * p.fine_scale) - 1.0);
  g += p.coarse_amp *
       (2.0 * value_noise(p.noise_seed ^ 0x5bf0363546e38021ull, x * p.coarse_scale,
                          y * p.coarse_scale) -
        1.0);
  const double stain_field = value_noise(p.noise_seed ^ 0x8e44c9b02ea7d9c3ull, x * p.stain_scale,
                                         y * p.stain_scale);
  g -= p.stain_amp * smoothstep(p.stain_threshold - 0.08, p.stain_threshold + 0.08, stain_field);

  double r = g + p.tint_r, b = g + p.tint_b;
  double gr = g;

  for (int m = 0; m < p.n_markings; ++m) {
    const double dy = std::abs(y - p.marking_y[static_cast<std::size_t>(m)]);
    double band = 1.0 - smoothstep(p.marking_half_width - p.marking_feather,
                                   p.marking_half_width + p.marking_feather, dy);
    if (band <= 0.0) continue;
    if (p.dash_period > 0.0) {
      const double phase = x / p.dash_period + p.dash_phase;
      const double frac = phase - std::floor(phase);
      band *= 1.0 - smoothstep(p.dash_duty - 0.02, p.dash_duty + 0.02, frac);
    }
    // paint wear follows the fine noise
    const double wear =
        0.8 + 0.2 * value_noise(p.noise_seed ^ 0x1f3dd2cbb1053a13ull, x * 2.0, y * 2.0);
    const double paint = p.marking_bright * wear;
    const double pr = paint, pg = p.marking_yellow ? paint * 0.84 : paint,
                 pb = p.marking_yellow ? paint * 0.45 : paint;
    r = r * (1 - band) + pr * band;
    gr = gr * (1 - band) + pg * band;
    b = b * (1 - band) + pb * band;
  }
  return {clamp01(r), clamp01(gr), clamp01(b)};
}

namespace {

struct VehicleDraw {
  Box3D box;
  std::array<double, 3> albedo;
};

// Slab test against an oriented box; returns entering distance and the world
// normal of the entered face.
bool ray_obb(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir, const Box3D& box,
             double& t_hit, Eigen::Vector3d& normal_world) {
  const double cy = std::cos(box.yaw), sy = std::sin(box.yaw);
  auto to_local = [&](const Eigen::Vector3d& v) {
    return Eigen::Vector3d(cy * v(0) + sy * v(1), -sy * v(0) + cy * v(1), v(2));
  };
  const Eigen::Vector3d o = to_local(origin - box.center);
  const Eigen::Vector3d d = to_local(dir);
  const double ext[3] = {0.5 * box.size(1), 0.5 * box.size(0), 0.5 * box.size(2)};

  double t_near = -1e30, t_far = 1e30;
  int near_axis = -1;
  double near_sign = 0;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d(a)) < 1e-12) {
      if (std::abs(o(a)) > ext[a]) return false;
      continue;
    }
    double t0 = (-ext[a] - o(a)) / d(a);
    double t1 = (ext[a] - o(a)) / d(a);
    double sign = -1;
    if (t0 > t1) {
      std::swap(t0, t1);
      sign = 1;
    }
    if (t0 > t_near) {
      t_near = t0;
      near_axis = a;
      near_sign = sign;
    }
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return false;
  }
  if (t_far < 1e-9 || near_axis < 0 || t_near < 1e-9) return false;
  t_hit = t_near;
  Eigen::Vector3d n_local = Eigen::Vector3d::Zero();
  n_local(near_axis) = near_sign;
  normal_world = Eigen::Vector3d(cy * n_local(0) - sy * n_local(1),
                                 sy * n_local(0) + cy * n_local(1), n_local(2));
  return true;
}

std::array<double, 3> sample_albedo(Rng& rng) {
  const double pick = rng.uniform01();
  if (pick < 0.45) {
    const double g = rng.uniform(0.25, 0.85);
    return {g + rng.uniform(-0.03, 0.03), g + rng.uniform(-0.03, 0.03),
            g + rng.uniform(-0.03, 0.03)};
  }
  if (pick < 0.75) {
    const double g = rng.uniform(0.06, 0.22);
    return {g, g, g + rng.uniform(0.0, 0.05)};
  }
  double c[3] = {rng.uniform(0.05, 0.2), rng.uniform(0.05, 0.2), rng.uniform(0.05, 0.2)};
  c[static_cast<int>(rng.uniform_int(0, 2))] = rng.uniform(0.35, 0.8);
  return {c[0], c[1], c[2]};
}

std::vector<VehicleDraw> sample_vehicles(const WorldConfig& cfg, Rng& rng) {
  std::vector<VehicleDraw> out;
  const long count = rng.uniform_int(cfg.min_vehicles, cfg.max_vehicles);
  const double tan_half = (cfg.image_width * 0.5) / cfg.fx;
  for (long i = 0; i < count; ++i) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      VehicleDraw v;
      v.box.size = {rng.uniform(1.7, 2.1), rng.uniform(4.0, 5.0), rng.uniform(1.35, 1.75)};
      const double x = rng.uniform(cfg.vehicle_x_min, cfg.vehicle_x_max);
      const double y_lim = std::max(0.4, tan_half * x - 1.2);
      const double y = rng.uniform(-y_lim, y_lim);
      v.box.center = {x, y, 0.5 * v.box.size(2)};
      v.box.yaw = rng.uniform(-0.35, 0.35);
      v.box.class_id = 0;
      v.box.score = 1.0;
      bool clash = false;
      for (const auto& other : out)
        if (bev_rectangles_intersect(v.box.center.head<2>(), 0.5 * v.box.size(1) + 0.3,
                                     0.5 * v.box.size(0) + 0.3, v.box.yaw,
                                     other.box.center.head<2>(), 0.5 * other.box.size(1),
                                     0.5 * other.box.size(0), other.box.yaw)) {
          clash = true;
          break;
        }
      if (clash) continue;
      v.albedo = sample_albedo(rng);
      out.push_back(v);
      break;
    }
  }
  return out;
}

}  // namespace

TextureParams frame_texture_params(const WorldConfig& cfg, Rng& rng) {
  Rng tex_rng = rng.split("texture");
  return TextureParams::sample(tex_rng, cfg.allow_markings);
}

SceneFrame generate_frame(const WorldConfig& cfg, Rng& rng, long frame_id,
                          const std::string& split) {
  SceneFrame frame;
  frame.frame_id = frame_id;
  frame.split = split;
  frame.camera = cfg.camera();
  frame.image = ImageF(cfg.image_height, cfg.image_width);

  const TextureParams tex = frame_texture_params(cfg, rng);
  Rng veh_rng = rng.split("vehicles");
  const auto vehicles = sample_vehicles(cfg, veh_rng);
  Rng sky_rng = rng.split("sky");
  const double sky_jitter = sky_rng.uniform(-0.05, 0.05);

  for (const auto& v : vehicles) frame.gt_boxes.push_back(v.box);

  const Eigen::Matrix3d r_t = frame.camera.rotation.transpose();
  const Eigen::Vector3d cam_pos = -r_t * frame.camera.translation;
  const Eigen::Vector3d light = Eigen::Vector3d(0.35, 0.2, 0.91).normalized();
  const std::array<double, 3> horizon_color = {0.78 + sky_jitter, 0.80 + sky_jitter,
                                               0.84 + sky_jitter};

  for (long iy = 0; iy < cfg.image_height; ++iy) {
    for (long ix = 0; ix < cfg.image_width; ++ix) {
      const Eigen::Vector3d dir_cam((ix - cfg.cx) / cfg.fx, (iy - cfg.cy) / cfg.fy, 1.0);
      const Eigen::Vector3d dir = (r_t * dir_cam).normalized();

      double t_ground = std::numeric_limits<double>::infinity();
      if (dir(2) < -1e-9) t_ground = (0.0 - cam_pos(2)) / dir(2);

      double t_best = t_ground;
      const VehicleDraw* hit = nullptr;
      Eigen::Vector3d hit_normal = Eigen::Vector3d::UnitZ();
      for (const auto& v : vehicles) {
        double t_v;
        Eigen::Vector3d n;
        if (ray_obb(cam_pos, dir, v.box, t_v, n) && t_v < t_best) {
          t_best = t_v;
          hit = &v;
          hit_normal = n;
        }
      }

      std::array<double, 3> color;
      if (hit) {
        const double lambert = 0.35 + 0.65 * std::max(0.0, hit_normal.dot(light));
        color = {hit->albedo[0] * lambert, hit->albedo[1] * lambert, hit->albedo[2] * lambert};
      } else if (std::isfinite(t_ground)) {
        const Eigen::Vector3d p = cam_pos + t_ground * dir;
        color = texture_color(tex, p(0), p(1));
        const double haze = 1.0 - std::exp(-t_ground / 70.0);
        for (int c = 0; c < 3; ++c) color[c] = color[c] * (1 - haze) + horizon_color[c] * haze;
      } else {
        const double t = clamp01(iy / std::max(1.0, cfg.cy));
        const std::array<double, 3> zenith = {0.45 + sky_jitter, 0.57 + sky_jitter,
                                              0.75 + sky_jitter};
        for (int c = 0; c < 3; ++c) color[c] = zenith[c] * (1 - t) + horizon_color[c] * t;
      }
      for (int c = 0; c < 3; ++c)
        frame.image.at(iy, ix, c) = static_cast<float>(clamp01(color[c]));
    }
  }
  return frame;
}

namespace {

using nlohmann::json;

json camera_to_json(const CameraModel& cam) {
  json j;
  j["fx"] = cam.fx;
  j["fy"] = cam.fy;
  j["cx"] = cam.cx;
  j["cy"] = cam.cy;
  std::vector<double> rot(9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot[static_cast<std::size_t>(r * 3 + c)] = cam.rotation(r, c);
  j["rotation"] = rot;
  j["translation"] = {cam.translation(0), cam.translation(1), cam.translation(2)};
  j["width"] = cam.image_width;
  j["height"] = cam.image_height;
  return j;
}

CameraModel camera_from_json(const json& j) {
  CameraModel cam;
  cam.fx = j.at("fx");
  cam.fy = j.at("fy");
  cam.cx = j.at("cx");
  cam.cy = j.at("cy");
  const auto rot = j.at("rotation").get<std::vector<double>>();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) cam.rotation(r, c) = rot[static_cast<std::size_t>(r * 3 + c)];
  const auto tr = j.at("translation").get<std::vector<double>>();
  cam.translation = {tr[0], tr[1], tr[2]};
  cam.image_width = j.at("width");
  cam.image_height = j.at("height");
  return cam;
}

json boxes_to_json(const std::vector<Box3D>& boxes) {
  json arr = json::array();
  for (const auto& b : boxes) {
    json j;
    j["center"] = {b.center(0), b.center(1), b.center(2)};
    j["size"] = {b.size(0), b.size(1), b.size(2)};
    j["yaw"] = b.yaw;
    j["class_id"] = b.class_id;
    arr.push_back(j);
  }
  return arr;
}

std::vector<Box3D> boxes_from_json(const json& arr) {
  std::vector<Box3D> boxes;
  for (const auto& j : arr) {
    Box3D b;
    const auto c = j.at("center").get<std::vector<double>>();
    const auto s = j.at("size").get<std::vector<double>>();
    b.center = {c[0], c[1], c[2]};
    b.size = {s[0], s[1], s[2]};
    b.yaw = j.at("yaw");
    b.class_id = j.at("class_id");
    b.score = 1.0;
    boxes.push_back(b);
  }
  return boxes;
}

std::string frame_filename(long frame_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06ld.ppm", frame_id);
  return buf;
}

}  // namespace

DatasetManifest generate_dataset(const WorldConfig& cfg, std::uint64_t seed, long n_train,
                                 long n_val, const std::filesystem::path& out_path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_path / "frames", ec);
  if (ec) raise(Errc::Io, "cannot create " + (out_path / "frames").string() + ": " + ec.message());

  DatasetManifest manifest;
  manifest.seed = seed;
  manifest.n_train = n_train;
  manifest.n_val = n_val;

  Rng root(seed);
  std::ofstream meta(out_path / "metadata.jsonl");
  if (!meta) raise(Errc::Io, "cannot open " + (out_path / "metadata.jsonl").string());

  std::array<double, 3> mean_acc = {0, 0, 0};
  long mean_px = 0;
  for (long i = 0; i < n_train + n_val; ++i) {
    const std::string split = i < n_train ? "train" : "val";
    Rng frame_rng = root.split("frame", static_cast<std::uint64_t>(i));
    SceneFrame frame = generate_frame(cfg, frame_rng, i, split);
    const auto bytes = encode_ppm(frame.image);
    {
      const fs::path file = out_path / "frames" / frame_filename(i);
      std::ofstream out(file, std::ios::binary);
      if (!out) raise(Errc::Io, "cannot open " + file.string());
      out.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
      if (!out) raise(Errc::Io, "write failed for " + file.string());
    }
    if (split == "train") {
      // mean of the quantized pixels, i.e. of the dataset as loaders see it
      const std::size_t header = bytes.size() - static_cast<std::size_t>(frame.image.height *
                                                                         frame.image.width * 3);
      for (std::size_t b = header; b < bytes.size(); b += 3)
        for (int c = 0; c < 3; ++c) mean_acc[c] += bytes[b + c] / 255.0;
      mean_px += frame.image.height * frame.image.width;
    }

    json line;
    line["frame_id"] = i;
    line["split"] = split;
    line["camera"] = camera_to_json(frame.camera);
    line["boxes"] = boxes_to_json(frame.gt_boxes);
    line["seed"] = seed;
    meta << line.dump() << "\n";
    manifest.entries.emplace_back(i, split);
  }
  meta.close();

  for (int c = 0; c < 3; ++c)
    manifest.mean_color[c] = mean_px ? static_cast<float>(mean_acc[c] / mean_px) : 0.5f;

  json mj;
  mj["seed"] = manifest.seed;
  mj["n_train"] = manifest.n_train;
  mj["n_val"] = manifest.n_val;
  mj["mean_color"] = {manifest.mean_color[0], manifest.mean_color[1], manifest.mean_color[2]};
  json entries = json::array();
  for (const auto& [id, split] : manifest.entries) entries.push_back({{"frame_id", id}, {"split", split}});
  mj["entries"] = entries;
  std::ofstream mf(out_path / "manifest.json");
  if (!mf) raise(Errc::Io, "cannot open " + (out_path / "manifest.json").string());
  mf << mj.dump(2) << "\n";
  return manifest;
}

Dataset load_dataset(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  Dataset ds;

  std::ifstream mf(path / "manifest.json");
  if (!mf) raise(Errc::Io, "cannot open " + (path / "manifest.json").string());
  json mj = json::parse(mf, nullptr, false);
  if (mj.is_discarded()) raise(Errc::CorruptFile, "manifest.json is not valid JSON");
  ds.manifest.seed = mj.at("seed");
  ds.manifest.n_train = mj.at("n_train");
  ds.manifest.n_val = mj.at("n_val");
  const auto mc = mj.at("mean_color").get<std::vector<double>>();
  for (int c = 0; c < 3; ++c) ds.manifest.mean_color[c] = static_cast<float>(mc[c]);

  std::ifstream meta(path / "metadata.jsonl");
  if (!meta) raise(Errc::Io, "cannot open " + (path / "metadata.jsonl").string());
  std::string line;
  while (std::getline(meta, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) raise(Errc::CorruptFile, "bad metadata line: " + line.substr(0, 80));
    SceneFrame frame;
    frame.frame_id = j.at("frame_id");
    frame.split = j.at("split");
    frame.camera = camera_from_json(j.at("camera"));
    frame.gt_boxes = boxes_from_json(j.at("boxes"));
    frame.image = load_ppm(path / "frames" / frame_filename(frame.frame_id));
    if (frame.image.width != frame.camera.image_width ||
        frame.image.height != frame.camera.image_height)
      raise(Errc::CorruptFile, "frame " + std::to_string(frame.frame_id) +
                                   " image size does not match its camera");
    ds.manifest.entries.emplace_back(frame.frame_id, frame.split);
    (frame.split == "train" ? ds.train : ds.val).push_back(std::move(frame));
  }
  return ds;
}

ImageF sample_texture_patch(const TextureParams& params, double origin_x, double origin_y,
                            double width_m, double length_m, long height_px, long width_px) {
  ImageF patch(height_px, width_px);
  for (long i = 0; i < height_px; ++i) {
    const double r = height_px > 1 ? double(i) / (height_px - 1) : 0.0;
    const double y = origin_y - r * width_m;
    for (long j = 0; j < width_px; ++j) {
      const double s = width_px > 1 ? double(j) / (width_px - 1) : 0.0;
      const double x = origin_x + s * length_m;
      const auto c = texture_color(params, x, y);
      for (int ch = 0; ch < 3; ++ch) patch.at(i, j, ch) = static_cast<float>(c[ch]);
    }
  }
  return patch;
}

RoadCorpus generate_road_corpus(const StyleConfig& cfg, Rng& rng, long n) {
  if (n < 64) raise(Errc::InvalidConfig, "road corpus needs at least 64 patches");
  RoadCorpus corpus;
  corpus.provenance = "procedural";
  corpus.patches.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    Rng patch_rng = rng.split("patch", static_cast<std::uint64_t>(i));
    TextureParams params = TextureParams::sample(patch_rng, true);
    const double ox = patch_rng.uniform(-40.0, 40.0);
    const double oy = patch_rng.uniform(-2.5, 4.5);
    corpus.patches.push_back(sample_texture_patch(params, ox, oy, cfg.width_m, cfg.length_m,
                                                  cfg.patch_height, cfg.patch_width));
  }
  return corpus;
}

void save_road_corpus(const RoadCorpus& corpus, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) raise(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());
  for (std::size_t i = 0; i < corpus.patches.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "patch_%05zu.ppm", i);
    save_ppm(corpus.patches[i], dir / buf);
  }
  nlohmann::json j;
  j["count"] = corpus.patches.size();
  j["provenance"] = corpus.provenance;
  std::ofstream out(dir / "corpus.json");
  out << j.dump(2) << "\n";
}

RoadCorpus load_road_corpus(const std::filesystem::path& dir, const StyleConfig& cfg) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".ppm") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.size() < 64)
    raise(Errc::InvalidConfig,
          "road corpus at " + dir.string() + " has only " + std::to_string(files.size()) +
              " patches (need at least 64)");
  RoadCorpus corpus;
  corpus.provenance = fs::exists(dir / "corpus.json") ? "procedural" : "user-supplied";
  for (const auto& f : files) {
    ImageF img = load_ppm(f);
    if (img.height != cfg.patch_height || img.width != cfg.patch_width)
      img = resize_bilinear(img, cfg.patch_height, cfg.patch_width);
    corpus.patches.push_back(std::move(img));
  }
  return corpus;
}

ImageF mask_objects(const SceneFrame& frame, const std::array<float, 3>& fill) {
  ImageF out = frame.image;
  const Eigen::Matrix4d m = projection_matrix(frame.camera);
  for (const auto& box : frame.gt_boxes) {
    double u_min = 1e30, u_max = -1e30, v_min = 1e30, v_max = -1e30;
    for (const auto& corner : box_corners(box)) {
      const auto px = project(m, corner);
      u_min = std::min(u_min, px.u);
      u_max = std::max(u_max, px.u);
      v_min = std::min(v_min, px.v);
      v_max = std::max(v_max, px.v);
    }
    const long x0 = std::max<long>(0, static_cast<long>(std::ceil(u_min)));
    const long x1 = std::min<long>(frame.image.width - 1, static_cast<long>(std::floor(u_max)));
    const long y0 = std::max<long>(0, static_cast<long>(std::ceil(v_min)));
    const long y1 = std::min<long>(frame.image.height - 1, static_cast<long>(std::floor(v_max)));
    for (long y = y0; y <= y1; ++y)
      for (long x = x0; x <= x1; ++x)
        for (int c = 0; c < 3; ++c) out.at(y, x, c) = fill[static_cast<std::size_t>(c)];
  }
  return out;
}

}  // namespace advroad
