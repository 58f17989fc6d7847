#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "reg3d/geometry.hpp"
#include "reg3d/point_cloud.hpp"

namespace reg3d {

/// A matched model/scene keypoint pair. Feature distances and local frames
/// are optional and only present when the producing stage supplies them.
struct Correspondence {
  int model_index = -1;
  int scene_index = -1;
  Vector3 model_point = Vector3::Zero();
  Vector3 scene_point = Vector3::Zero();
  std::optional<double> nearest_dist;
  std::optional<double> second_dist;
  std::optional<Lrf> model_lrf;
  std::optional<Lrf> scene_lrf;
  std::optional<Lra> model_lra;
  std::optional<Lra> scene_lra;

  bool has_distances() const { return nearest_dist.has_value() && second_dist.has_value(); }
};

struct CorrespondenceSet {
  std::vector<Correspondence> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
  const Correspondence& operator[](std::size_t i) const { return items[i]; }
  Correspondence& operator[](std::size_t i) { return items[i]; }
  auto begin() const { return items.begin(); }
  auto end() const { return items.end(); }

  bool has_distances() const;
  bool has_lrf() const;  // every element carries frames on both sides
  bool has_lra() const;
};

/// ||R*p + t - q|| for one correspondence.
inline double residual(const RigidTransform& t, const Correspondence& c) {
  return (apply(t, c.model_point) - c.scene_point).norm();
}

/// For each model keypoint, the nearest and second-nearest scene features by
/// Euclidean distance; one correspondence per model keypoint. LRF/LRA are
/// propagated when both sets carry them. With a single scene keypoint the
/// second distance equals the nearest.
CorrespondenceSet match_features(const KeypointSet& model_keys, const KeypointSet& scene_keys);

/// Keeps the min(k, n) correspondences with the smallest nearest/second
/// distance ratio; ties by model index.
CorrespondenceSet select_ratio(const CorrespondenceSet& raw, std::size_t k);

/// Keeps the min(k, n) correspondences with the smallest nearest distance;
/// ties by model index.
CorrespondenceSet select_similarity(const CorrespondenceSet& raw, std::size_t k);

/// Builds a synthetic set with round(n * target_pcc) correct pairs (model
/// points drawn from the overlap, scene mate = nearest scene point to the
/// ground-truth image, required within 2*mr) and the rest false pairs drawn
/// independently on both clouds, re-drawn if accidentally consistent with
/// `gt`. Deterministic for a fixed seed.
CorrespondenceSet synthesize_correspondences(const PointCloud& model, const PointCloud& scene,
                                             const RigidTransform& gt, double target_pcc,
                                             std::uint64_t seed, std::size_t n = 200);

/// Fraction of correspondences with ||R_gt*p + t_gt - q|| < tol.
double pcc(const CorrespondenceSet& set, const RigidTransform& gt, double tol);

}  // namespace reg3d
