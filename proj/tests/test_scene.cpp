#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "advroad/scene.hpp"

using namespace advroad;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  auto dir = fs::temp_directory_path() / ("advroad_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// convex hull (gift wrapping) + point-in-polygon, used as the projection-side
// oracle for the silhouette check
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
  };
  std::vector<Eigen::Vector2d> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = hull.size();
    for (const auto& p : pts) {
      while (hull.size() >= base + 2 &&
             cross(hull[hull.size() - 2], hull[hull.size() - 1], p) <= 0)
        hull.pop_back();
      hull.push_back(p);
    }
    hull.pop_back();
    std::reverse(pts.begin(), pts.end());
  }
  return hull;
}

bool inside_hull(const std::vector<Eigen::Vector2d>& hull, double x, double y) {
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    if ((b(0) - a(0)) * (y - a(1)) - (b(1) - a(1)) * (x - a(0)) < 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("empty vehicle range gives an empty scene") {
  WorldConfig cfg;
  cfg.min_vehicles = cfg.max_vehicles = 0;
  Rng rng(1);
  auto frame = generate_frame(cfg, rng);
  CHECK(frame.gt_boxes.empty());
  CHECK(frame.image.height == cfg.image_height);
  CHECK(frame.image.width == cfg.image_width);
  for (float v : frame.image.px) {
    CHECK(v >= 0.f);
    CHECK(v <= 1.f);
  }
}

TEST_CASE("same seed renders byte-identical frames") {
  WorldConfig cfg;
  Rng a(77), b(77);
  auto fa = generate_frame(cfg, a);
  auto fb = generate_frame(cfg, b);
  CHECK(encode_ppm(fa.image) == encode_ppm(fb.image));
  CHECK(fa.gt_boxes.size() == fb.gt_boxes.size());
}

TEST_CASE("distinct seeds give distinct images") {
  WorldConfig cfg;
  Rng a(1), b(2);
  auto fa = generate_frame(cfg, a);
  auto fb = generate_frame(cfg, b);
  CHECK(encode_ppm(fa.image) != encode_ppm(fb.image));
}

TEST_CASE("a centered cuboid 10 m ahead projects fully inside the image") {
  WorldConfig cfg;
  cfg.min_vehicles = cfg.max_vehicles = 1;
  cfg.vehicle_x_min = 9.0;
  cfg.vehicle_x_max = 11.0;
  bool found = false;
  for (std::uint64_t seed = 0; seed < 64 && !found; ++seed) {
    Rng rng(seed);
    auto frame = generate_frame(cfg, rng);
    REQUIRE(frame.gt_boxes.size() == 1);
    const auto& box = frame.gt_boxes[0];
    if (std::abs(box.center(1)) > 2.0) continue;
    found = true;
    const auto m = projection_matrix(frame.camera);
    for (const auto& corner : box_corners(box)) {
      const auto px = project(m, corner);
      CHECK(px.u >= 0);
      CHECK(px.u <= cfg.image_width - 1);
      CHECK(px.v >= 0);
      CHECK(px.v <= cfg.image_height - 1);
    }
  }
  CHECK(found);
}

TEST_CASE("projected hull overlaps the drawn silhouette") {
  WorldConfig with;
  with.min_vehicles = with.max_vehicles = 1;
  WorldConfig without = with;
  without.min_vehicles = without.max_vehicles = 0;

  int tested = 0;
  for (std::uint64_t seed = 0; tested < 100; ++seed) {
    Rng ra(seed), rb(seed);
    auto fa = generate_frame(with, ra);
    auto fb = generate_frame(without, rb);
    REQUIRE(fa.gt_boxes.size() == 1);

    const auto m = projection_matrix(fa.camera);
    std::vector<Eigen::Vector2d> pts;
    for (const auto& corner : box_corners(fa.gt_boxes[0])) {
      const auto px = project(m, corner);
      pts.push_back({px.u, px.v});
    }
    const auto hull = convex_hull(pts);

    long inter = 0, uni = 0;
    bool any_visible = false;
    for (long y = 0; y < fa.image.height; ++y)
      for (long x = 0; x < fa.image.width; ++x) {
        bool drawn = false;
        for (int c = 0; c < 3; ++c)
          if (std::abs(fa.image.at(y, x, c) - fb.image.at(y, x, c)) > 1e-6) drawn = true;
        const bool in_hull = inside_hull(hull, x, y);
        if (drawn) any_visible = true;
        if (drawn && in_hull) ++inter;
        if (drawn || in_hull) ++uni;
      }
    if (!any_visible) continue;  // box clipped out of frame entirely
    ++tested;
    CAPTURE(seed);
    CHECK(double(inter) / double(uni) > 0.5);
  }
}

TEST_CASE("dataset write, reload, counts and bit-exact roundtrip") {
  const auto dir = temp_dir("dataset");
  WorldConfig cfg;
  auto manifest = generate_dataset(cfg, 7, 12, 4, dir);
  CHECK(manifest.entries.size() == 16);
  CHECK(manifest.n_train == 12);
  CHECK(manifest.n_val == 4);

  auto ds1 = load_dataset(dir);
  auto ds2 = load_dataset(dir);
  CHECK(ds1.train.size() == 12);
  CHECK(ds1.val.size() == 4);
  REQUIRE(ds1.train.size() == ds2.train.size());
  for (std::size_t i = 0; i < ds1.train.size(); ++i)
    CHECK(ds1.train[i].image.px == ds2.train[i].image.px);

  // writing a loaded image back produces the original bytes
  std::ifstream in(dir / "frames" / "frame_000000.ppm", std::ios::binary);
  std::vector<std::uint8_t> original((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
  CHECK(encode_ppm(ds1.train[0].image) == original);

  for (int c = 0; c < 3; ++c) {
    CHECK(ds1.manifest.mean_color[c] > 0.05f);
    CHECK(ds1.manifest.mean_color[c] < 0.95f);
  }
  fs::remove_all(dir);
}

TEST_CASE("datasets from distinct seeds differ") {
  const auto dir_a = temp_dir("seed_a");
  const auto dir_b = temp_dir("seed_b");
  WorldConfig cfg;
  generate_dataset(cfg, 1, 2, 0, dir_a);
  generate_dataset(cfg, 2, 2, 0, dir_b);
  std::ifstream fa(dir_a / "frames" / "frame_000000.ppm", std::ios::binary);
  std::ifstream fb(dir_b / "frames" / "frame_000000.ppm", std::ios::binary);
  std::vector<char> ba((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  std::vector<char> bb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(ba != bb);
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("road corpus: count, range, at-least-64 rule") {
  StyleConfig cfg;
  Rng rng(5);
  auto corpus = generate_road_corpus(cfg, rng, 128);
  CHECK(corpus.patches.size() == 128);
  CHECK(corpus.provenance == "procedural");
  for (const auto& p : corpus.patches) {
    CHECK(p.height == cfg.patch_height);
    CHECK(p.width == cfg.patch_width);
    for (float v : p.px) {
      CHECK(v >= 0.f);
      CHECK(v <= 1.f);
    }
  }
  Rng rng2(5);
  CHECK_THROWS_AS(generate_road_corpus(cfg, rng2, 32), Error);
}

TEST_CASE("road corpus patches are diverse") {
  StyleConfig cfg;
  Rng rng(7);
  auto corpus = generate_road_corpus(cfg, rng, 64);
  double mean_abs_diff = 0;
  int pairs = 0;
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) {
      double acc = 0;
      for (std::size_t k = 0; k < corpus.patches[i].px.size(); ++k)
        acc += std::abs(corpus.patches[i].px[k] - corpus.patches[j].px[k]);
      mean_abs_diff += acc / corpus.patches[i].px.size();
      ++pairs;
    }
  CHECK(mean_abs_diff / pairs > 0.01);
}

TEST_CASE("corpus save/load roundtrip and user-supplied resampling") {
  StyleConfig cfg;
  Rng rng(9);
  auto corpus = generate_road_corpus(cfg, rng, 64);
  const auto dir = temp_dir("corpus");
  save_road_corpus(corpus, dir);
  auto loaded = load_road_corpus(dir, cfg);
  CHECK(loaded.patches.size() == 64);
  CHECK(loaded.patches[0].px == ImageF(decode_ppm(encode_ppm(corpus.patches[0]).data(),
                                                  encode_ppm(corpus.patches[0]).size()))
                                    .px);
  fs::remove_all(dir);
}

TEST_CASE("mask_objects: empty, fill, idempotence, union oracle") {
  WorldConfig cfg;
  cfg.min_vehicles = cfg.max_vehicles = 0;
  Rng rng(3);
  auto frame = generate_frame(cfg, rng);
  const std::array<float, 3> fill = {0.4f, 0.45f, 0.5f};

  auto untouched = mask_objects(frame, fill);
  CHECK(untouched.px == frame.image.px);

  // add two overlapping boxes by hand
  Box3D a;
  a.center = {9, 0.3, 0.8};
  a.size = {1.9, 4.5, 1.6};
  Box3D b = a;
  b.center = {10, -0.4, 0.8};
  frame.gt_boxes = {a, b};

  auto masked = mask_objects(frame, fill);
  auto twice = mask_objects({masked, frame.camera, frame.gt_boxes, 0, "train"}, fill);
  CHECK(masked.px == twice.px);

  // per-pixel oracle over both projected AABBs
  const auto m = projection_matrix(frame.camera);
  auto box_aabb = [&](const Box3D& box) {
    std::array<double, 4> r = {1e30, -1e30, 1e30, -1e30};
    for (const auto& corner : box_corners(box)) {
      const auto px = project(m, corner);
      r[0] = std::min(r[0], px.u);
      r[1] = std::max(r[1], px.u);
      r[2] = std::min(r[2], px.v);
      r[3] = std::max(r[3], px.v);
    }
    return r;
  };
  const auto ra = box_aabb(a), rb = box_aabb(b);
  for (long y = 0; y < frame.image.height; ++y)
    for (long x = 0; x < frame.image.width; ++x) {
      const bool in_a = x >= ra[0] && x <= ra[1] && y >= ra[2] && y <= ra[3];
      const bool in_b = x >= rb[0] && x <= rb[1] && y >= rb[2] && y <= rb[3];
      for (int c = 0; c < 3; ++c) {
        if (in_a || in_b) {
          CHECK(masked.at(y, x, c) == fill[static_cast<std::size_t>(c)]);
        } else {
          CHECK(masked.at(y, x, c) == frame.image.at(y, x, c));
        }
      }
    }
}

TEST_CASE("texture patch matches the continuous texture at texel centers") {
  Rng rng(11);
  auto params = TextureParams::sample(rng, false);
  auto patch = sample_texture_patch(params, 6.0, 1.0, 2.0, 4.0, 64, 128);
  const auto c = texture_color(params, 6.0, 1.0);
  for (int ch = 0; ch < 3; ++ch)
    CHECK(patch.at(0, 0, ch) == doctest::Approx(c[static_cast<std::size_t>(ch)]).epsilon(1e-6));
  const auto c2 = texture_color(params, 10.0, -1.0);
  for (int ch = 0; ch < 3; ++ch)
    CHECK(patch.at(63, 127, ch) == doctest::Approx(c2[static_cast<std::size_t>(ch)]).epsilon(1e-6));
}
