#include "advroad/geometry.hpp"

#include <cmath>

namespace advroad {

void CameraModel::validate() const {
  if (fx <= 0 || fy <= 0) raise(Errc::InvalidConfig, "camera focal lengths must be positive");
  if (image_width <= 0 || image_height <= 0)
    raise(Errc::InvalidConfig, "camera image dimensions must be positive");
  const Eigen::Matrix3d should_be_identity = rotation * rotation.transpose();
  if ((should_be_identity - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
      std::abs(rotation.determinant() - 1.0) > 1e-9)
    raise(Errc::InvalidConfig, "camera rotation is not a proper rotation");
}

CameraModel CameraModel::level_forward(double fx, double fy, double cx, double cy, long width,
                                       long height, double camera_height) {
  CameraModel cam;
  cam.fx = fx;
  cam.fy = fy;
  cam.cx = cx;
  cam.cy = cy;
  cam.image_width = width;
  cam.image_height = height;
  // camera x = world -y, camera y = world -z, camera z = world +x
  cam.rotation << 0, -1, 0,
                  0, 0, -1,
                  1, 0, 0;
  cam.translation = -cam.rotation * Eigen::Vector3d(0, 0, camera_height);
  return cam;
}

Eigen::Matrix4d projection_matrix(const CameraModel& camera) {
  camera.validate();
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  const Eigen::Matrix3d& r = camera.rotation;
  const Eigen::Vector3d& t = camera.translation;
  m.row(0) << camera.fx * r.row(0) + camera.cx * r.row(2), camera.fx * t(0) + camera.cx * t(2);
  m.row(1) << camera.fy * r.row(1) + camera.cy * r.row(2), camera.fy * t(1) + camera.cy * t(2);
  m.row(2) << r.row(2), t(2);
  m(3, 3) = 1.0;
  return m;
}

PixelDepth project(const Eigen::Matrix4d& m, const Eigen::Vector3d& p) {
  const Eigen::Vector4d q = m * p.homogeneous();
  if (q(2) <= 0.0)
    raise(Errc::BehindCamera, "point at depth " + std::to_string(q(2)) + " is not in front");
  return {q(0) / q(2), q(1) / q(2), q(2)};
}

Eigen::Vector3d unproject(const Eigen::Matrix4d& m, double u, double v, double z_height) {
  const Eigen::Matrix4d inv = m.inverse();
  // p(d) = d * dir + base, with z(d) = d * dir.z + base.z
  const Eigen::Vector4d dir = inv * Eigen::Vector4d(u, v, 1.0, 0.0);
  const Eigen::Vector4d base = inv * Eigen::Vector4d(0.0, 0.0, 0.0, 1.0);
  if (std::abs(dir(2)) < 1e-12)
    raise(Errc::DegenerateRay, "viewing ray is parallel to the z = " + std::to_string(z_height) +
                                   " plane");
  const double depth = (z_height - base(2)) / dir(2);
  return (depth * dir + base).head<3>();
}

std::array<Eigen::Vector3d, 4> poster_corners(const PlacementTransform& t) {
  if (t.width_m <= 0 || t.length_m <= 0)
    raise(Errc::InvalidConfig, "poster physical size must be positive");
  const Eigen::Vector2d c2 = placement_center(t);
  const Eigen::Vector3d c(c2(0), c2(1), t.ground_height);
  const Eigen::Vector3d along(std::cos(t.yaw), std::sin(t.yaw), 0.0);
  const Eigen::Vector3d across(-std::sin(t.yaw), std::cos(t.yaw), 0.0);
  const double hl = 0.5 * t.length_m;
  const double hw = 0.5 * t.width_m;
  return {
      c - hl * along + hw * across,  // near-left
      c - hl * along - hw * across,  // near-right
      c + hl * along - hw * across,  // far-right
      c + hl * along + hw * across,  // far-left
  };
}

double ground_height_estimate(const std::vector<Box3D>& gt_boxes, double center_x,
                              double center_y) {
  if (gt_boxes.empty()) return 0.0;
  double best_d2 = std::numeric_limits<double>::infinity();
  double height = 0.0;
  for (const auto& box : gt_boxes) {
    const double dx = box.center(0) - center_x;
    const double dy = box.center(1) - center_y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      height = box.center(2) - 0.5 * box.size(2);
    }
  }
  return height;
}

namespace {

void rect_axes(double yaw, Eigen::Vector2d& along, Eigen::Vector2d& across) {
  along = {std::cos(yaw), std::sin(yaw)};
  across = {-std::sin(yaw), std::cos(yaw)};
}

}  // namespace

bool bev_rectangles_intersect(const Eigen::Vector2d& center_a, double half_len_a,
                              double half_wid_a, double yaw_a, const Eigen::Vector2d& center_b,
                              double half_len_b, double half_wid_b, double yaw_b) {
  Eigen::Vector2d axes[4];
  Eigen::Vector2d along_a, across_a, along_b, across_b;
  rect_axes(yaw_a, along_a, across_a);
  rect_axes(yaw_b, along_b, across_b);
  axes[0] = along_a;
  axes[1] = across_a;
  axes[2] = along_b;
  axes[3] = across_b;
  const Eigen::Vector2d d = center_b - center_a;
  for (const auto& axis : axes) {
    const double ra = half_len_a * std::abs(axis.dot(along_a)) +
                      half_wid_a * std::abs(axis.dot(across_a));
    const double rb = half_len_b * std::abs(axis.dot(along_b)) +
                      half_wid_b * std::abs(axis.dot(across_b));
    if (std::abs(axis.dot(d)) > ra + rb) return false;
  }
  return true;
}

PlacementTransform sample_placement(const std::vector<Box3D>& gt_boxes,
                                    const PlacementConfig& cfg, Rng& rng) {
  if (cfg.d_min > cfg.d_max || cfg.width_m <= 0 || cfg.length_m <= 0 || cfg.delta_theta < 0)
    raise(Errc::InvalidConfig, "invalid placement configuration");
  for (int attempt = 0; attempt < 100; ++attempt) {
    PlacementTransform t;
    t.distance = rng.uniform(cfg.d_min, cfg.d_max);
    t.azimuth = rng.uniform(-cfg.delta_theta, cfg.delta_theta);
    t.yaw = t.azimuth;  // spoofed vehicle faces the ego heading
    t.width_m = cfg.width_m;
    t.length_m = cfg.length_m;
    const Eigen::Vector2d center = placement_center(t);
    bool overlaps = false;
    for (const auto& box : gt_boxes) {
      if (bev_rectangles_intersect(center, 0.5 * t.length_m, 0.5 * t.width_m, t.yaw,
                                   box.center.head<2>(), 0.5 * box.size(1), 0.5 * box.size(0),
                                   box.yaw)) {
        overlaps = true;
        break;
      }
    }
    if (overlaps) continue;
    t.ground_height = ground_height_estimate(gt_boxes, center(0), center(1));
    return t;
  }
  raise(Errc::PlacementFailure, "no non-overlapping placement found in 100 attempts");
}

std::array<Eigen::Vector3d, 8> box_corners(const Box3D& box) {
  Eigen::Vector2d along, across;
  rect_axes(box.yaw, along, across);
  const double hw = 0.5 * box.size(0);
  const double hl = 0.5 * box.size(1);
  const double hh = 0.5 * box.size(2);
  std::array<Eigen::Vector3d, 8> out;
  const Eigen::Vector2d c2 = box.center.head<2>();
  const Eigen::Vector2d bev[4] = {
      c2 - hl * along + hw * across,
      c2 - hl * along - hw * across,
      c2 + hl * along - hw * across,
      c2 + hl * along + hw * across,
  };
  for (int i = 0; i < 4; ++i) {
    out[i] = Eigen::Vector3d(bev[i](0), bev[i](1), box.center(2) - hh);
    out[i + 4] = Eigen::Vector3d(bev[i](0), bev[i](1), box.center(2) + hh);
  }
  return out;
}

}  // namespace advroad
