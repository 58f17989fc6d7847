#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "reg3d/geometry.hpp"
#include "reg3d/kdtree.hpp"

namespace reg3d {

/// Immutable 3D point set with an exact kd-tree and the mean
/// nearest-neighbor spacing (mesh resolution, "mr") cached at construction.
class PointCloud {
 public:
  PointCloud() = default;

  explicit PointCloud(std::vector<Vector3> points, std::vector<Vector3> normals = {});

  const std::vector<Vector3>& points() const { return points_; }
  const std::vector<Vector3>& normals() const { return normals_; }
  bool has_normals() const { return !normals_.empty(); }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vector3& operator[](std::size_t i) const { return points_[i]; }

  const KdTree3& index() const { return tree_; }

  /// Mean distance from each point to its nearest distinct neighbor.
  /// Throws DegenerateInput when the cloud has fewer than 2 points.
  double mesh_resolution() const;

  Vector3 centroid() const;

 private:
  std::vector<Vector3> points_;
  std::vector<Vector3> normals_;
  KdTree3 tree_;
  double mr_ = -1.0;
};

/// Exact nearest neighbor of `query`; ties by lowest index.
std::pair<int, double> nearest_neighbor(const PointCloud& cloud, const Vector3& query);

/// Indices selected by `subsample` for this (size, n, seed) triple; exposed
/// so verification subsamples can be reconstructed from recorded seeds.
std::vector<int> subsample_indices(std::size_t cloud_size, std::size_t n, std::uint64_t seed);

/// Uniform sample of min(n, |cloud|) points without replacement;
/// deterministic for a fixed seed.
PointCloud subsample(const PointCloud& cloud, std::size_t n, std::uint64_t seed);

/// Copy of `cloud` with every point (and normal) moved by `t`.
PointCloud transformed(const PointCloud& cloud, const RigidTransform& t);

/// Fraction of the smaller cloud whose nearest neighbor in the other cloud
/// lies within `tol` after aligning `source` by `gt`. Always in [0, 1].
double overlap_ratio(const PointCloud& source, const PointCloud& target,
                     const RigidTransform& gt, double tol);

/// Keypoints are indices into a parent cloud, optionally carrying features
/// and local frames/axes (parallel arrays, either empty or full-length).
struct KeypointSet {
  const PointCloud* cloud = nullptr;
  std::vector<int> indices;
  std::vector<Eigen::VectorXd> features;
  std::vector<Lrf> lrfs;
  std::vector<Lra> lras;

  std::size_t size() const { return indices.size(); }
  const Vector3& point(std::size_t k) const { return (*cloud)[static_cast<std::size_t>(indices[k])]; }
  bool has_features() const { return !indices.empty() && features.size() == indices.size(); }
  bool has_lrf() const { return !indices.empty() && lrfs.size() == indices.size(); }
  bool has_lra() const { return !indices.empty() && lras.size() == indices.size(); }

  /// Position of cloud index `cloud_index` within `indices`, or -1.
  int position_of(int cloud_index) const;

  /// Enforces the structural invariants (valid unique indices, consistent
  /// feature dimensions, valid frames). Throws on violation.
  void validate() const;
};

/// Parses ASCII or binary-little-endian PLY; reads x/y/z and nx/ny/nz.
PointCloud load_ply(const std::string& path);

/// Writes a PLY file (ASCII or binary little endian) with optional normals.
void save_ply(const std::string& path, const PointCloud& cloud, bool binary = false);

}  // namespace reg3d
