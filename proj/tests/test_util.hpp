#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "reg3d/geometry.hpp"
#include "reg3d/rng.hpp"

namespace reg3d::testutil {

inline Vector3 random_point(Rng& rng, double scale = 1.0) {
  return Vector3(rng.uniform(-scale, scale), rng.uniform(-scale, scale),
                 rng.uniform(-scale, scale));
}

inline std::vector<Vector3> random_points(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<Vector3> pts(n);
  for (auto& p : pts) p = random_point(rng, scale);
  return pts;
}

/// Frame of a keypoint physically rotated by `w` (axes rows are w's columns).
inline Lrf frame_of(const Matrix3& w) { return Lrf{w.transpose()}; }

/// Geodesic angle between two rotations via quaternions, in degrees.
inline double quaternion_angle_deg(const Matrix3& a, const Matrix3& b) {
  Eigen::Quaterniond qa(a), qb(b);
  const double dot = std::abs(qa.dot(qb));
  return rad2deg(2.0 * std::acos(std::min(dot, 1.0)));
}

/// Relative rotation angle via atan2 of the sin/cos parts; unlike the
/// arccos form this stays accurate for angles near zero.
inline double rotation_angle_deg(const Matrix3& a, const Matrix3& b) {
  const Matrix3 m = a * b.transpose();
  const Vector3 skew(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double s = 0.5 * skew.norm();
  const double c = std::clamp((m.trace() - 1.0) / 2.0, -1.0, 1.0);
  return rad2deg(std::atan2(s, c));
}

inline std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace reg3d::testutil
