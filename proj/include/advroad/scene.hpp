#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "advroad/geometry.hpp"
#include "advroad/image.hpp"
#include "advroad/rng.hpp"

namespace advroad {

// Procedural asphalt: quintic-smoothed value noise plus lane markings and
// stains. Evaluated continuously in world meters so poster crops and rendered
// ground pixels agree.
struct TextureParams {
  std::uint64_t noise_seed = 0;
  double base_gray = 0.33;
  double fine_amp = 0.045;
  double fine_scale = 4.0;  // lattice cells per meter
  double coarse_amp = 0.06;
  double coarse_scale = 0.35;
  double stain_amp = 0.12;
  double stain_scale = 0.18;
  double stain_threshold = 0.62;
  double tint_r = 0.0, tint_b = 0.0;
  int n_markings = 0;
  std::array<double, 2> marking_y = {0, 0};
  double marking_half_width = 0.06;
  double marking_bright = 0.75;
  bool marking_yellow = false;
  double dash_period = 0.0;  // 0 = solid
  double dash_duty = 0.6;
  double dash_phase = 0.0;
  double marking_feather = 0.02;

  static TextureParams sample(Rng& rng, bool allow_markings = true);
};

std::array<double, 3> texture_color(const TextureParams& p, double x, double y);

struct WorldConfig {
  long image_width = 256;
  long image_height = 128;
  double fx = 200, fy = 200, cx = 128, cy = 64;
  double camera_height = 1.5;
  long min_vehicles = 0, max_vehicles = 4;
  double vehicle_x_min = 4.0, vehicle_x_max = 16.0;
  bool allow_markings = true;

  CameraModel camera() const {
    return CameraModel::level_forward(fx, fy, cx, cy, image_width, image_height, camera_height);
  }
};

struct SceneFrame {
  ImageF image;
  CameraModel camera;
  std::vector<Box3D> gt_boxes;
  long frame_id = 0;
  std::string split = "train";
};

// Renders ground plane + sky + 0..max_vehicles shaded cuboids by per-pixel ray
// casting; gt_boxes match the drawn cuboids exactly.
SceneFrame generate_frame(const WorldConfig& cfg, Rng& rng, long frame_id = 0,
                          const std::string& split = "train");

// Texture parameters used for a frame (re-derivable from the same rng stream);
// exposed for tests that need the underlying continuous ground function.
TextureParams frame_texture_params(const WorldConfig& cfg, Rng& rng);

struct DatasetManifest {
  std::uint64_t seed = 0;
  long n_train = 0, n_val = 0;
  std::array<float, 3> mean_color = {0, 0, 0};
  std::vector<std::pair<long, std::string>> entries;  // frame_id, split
};

// Writes frames/*.ppm + metadata.jsonl + manifest.json under out_path.
DatasetManifest generate_dataset(const WorldConfig& cfg, std::uint64_t seed, long n_train,
                                 long n_val, const std::filesystem::path& out_path);

struct Dataset {
  std::vector<SceneFrame> train;
  std::vector<SceneFrame> val;
  DatasetManifest manifest;
};

Dataset load_dataset(const std::filesystem::path& path);

struct StyleConfig {
  long patch_height = 64;
  long patch_width = 128;
  double width_m = 2.0;
  double length_m = 4.0;
};

struct RoadCorpus {
  std::vector<ImageF> patches;
  std::string provenance = "procedural";
};

RoadCorpus generate_road_corpus(const StyleConfig& cfg, Rng& rng, long n);
void save_road_corpus(const RoadCorpus& corpus, const std::filesystem::path& dir);
RoadCorpus load_road_corpus(const std::filesystem::path& dir, const StyleConfig& cfg);

// Samples the texture over a width_m x length_m rectangle: texel (i,j) maps to
// origin + (j/(W-1)) * length along x and edges ordered like poster rows.
ImageF sample_texture_patch(const TextureParams& params, double origin_x, double origin_y,
                            double width_m, double length_m, long height_px, long width_px);

// Fills the clipped 2D bounding box of every projected ground-truth box with
// the given color. Returns a copy.
ImageF mask_objects(const SceneFrame& frame, const std::array<float, 3>& fill);

}  // namespace advroad
