#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "advroad/error.hpp"
#include "advroad/rng.hpp"

namespace advroad {

// World frame: x forward, y left, z up, ego at the origin.
// Camera frame: x right, y down, z forward.

struct CameraModel {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // world -> camera
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();   // p_cam = R p_world + t
  long image_width = 0, image_height = 0;

  void validate() const;

  // Level camera at (0,0,height) looking along world +x.
  static CameraModel level_forward(double fx, double fy, double cx, double cy, long width,
                                   long height, double camera_height);
};

struct PlacementTransform {
  double distance = 0;       // d, meters forward
  double azimuth = 0;        // theta, radians
  double yaw = 0;            // poster long axis vs ego heading
  double ground_height = 0;  // z of the poster plane
  double width_m = 0;
  double length_m = 0;
};

struct Box3D {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Zero();  // (w, l, h)
  double yaw = 0;
  int class_id = 0;
  double score = 1.0;
};

struct PlacementConfig {
  double d_min = 7.0;
  double d_max = 10.0;
  double delta_theta = 5.0 * 3.14159265358979323846 / 180.0;
  double width_m = 2.0;
  double length_m = 4.0;
};

struct PixelDepth {
  double u = 0, v = 0, depth = 0;
};

// 4x4 matrix M with M [p;1] = [u d, v d, d, 1].
Eigen::Matrix4d projection_matrix(const CameraModel& camera);

// Perspective-divided pixel and camera-frame depth; throws behind-camera when
// depth <= 0.
PixelDepth project(const Eigen::Matrix4d& m, const Eigen::Vector3d& p);

// Unique world point on the z = z_height plane that projects to (u,v); throws
// degenerate-ray when the viewing ray is parallel to that plane.
Eigen::Vector3d unproject(const Eigen::Matrix4d& m, double u, double v, double z_height);

// Counterclockwise rectangle corners in the ground plane; first corner is the
// poster-frame near-left.
std::array<Eigen::Vector3d, 4> poster_corners(const PlacementTransform& t);

// Bottom-face height of the BEV-nearest ground-truth box; 0 with no boxes.
double ground_height_estimate(const std::vector<Box3D>& gt_boxes, double center_x,
                              double center_y);

// Uniform sector/distance draw, rejected (up to 100 tries) while the poster
// footprint intersects any ground-truth footprint in BEV.
PlacementTransform sample_placement(const std::vector<Box3D>& gt_boxes,
                                    const PlacementConfig& cfg, Rng& rng);

// Separating-axis intersection test for BEV rectangles (center, half extents
// along the local axes, yaw).
bool bev_rectangles_intersect(const Eigen::Vector2d& center_a, double half_len_a,
                              double half_wid_a, double yaw_a, const Eigen::Vector2d& center_b,
                              double half_len_b, double half_wid_b, double yaw_b);

inline Eigen::Vector2d placement_center(const PlacementTransform& t) {
  return {t.distance * std::cos(t.azimuth), t.distance * std::sin(t.azimuth)};
}

// Eight corners of a 3D box, bottom face first, counterclockwise in BEV.
std::array<Eigen::Vector3d, 8> box_corners(const Box3D& box);

}  // namespace advroad
