#pragma once

#include <string>
#include <vector>

#include "reg3d/geometry.hpp"
#include "reg3d/point_cloud.hpp"

namespace reg3d {

/// Covariance frame at a keypoint: z = smallest eigenvector of the
/// neighborhood covariance, x = largest eigenvector orthogonalized against
/// z, both signs disambiguated so the majority of neighbor-to-keypoint
/// vectors project nonnegatively; y = z cross x. Requires at least 5
/// neighbors inside `radius` (the keypoint itself excluded).
Lrf compute_default_lrf(const PointCloud& cloud, int keypoint_index, double radius);

inline Lra lra_from_lrf(const Lrf& lrf) { return Lra{lrf.z()}; }

/// Rows are `index r11 r12 r13 r21 ... r33` (row-major axes), keyed by the
/// keypoint's index into the parent cloud. Rows that fail orthonormality
/// within 1e-3 (including wrong-handed frames) are projected onto the
/// nearest rotation; their keypoint positions are reported back.
struct LrfLoadStats {
  std::vector<int> repaired;  // positions within the keypoint set
};
LrfLoadStats load_lrf_file(const std::string& path, KeypointSet& keys);
void save_lrf_file(const std::string& path, const KeypointSet& keys);

/// Rows are `index x y z`; axes are renormalized on load.
void load_lra_file(const std::string& path, KeypointSet& keys);
void save_lra_file(const std::string& path, const KeypointSet& keys);

}  // namespace reg3d
