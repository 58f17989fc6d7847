#include "reg3d/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "reg3d/errors.hpp"
#include "reg3d/rng.hpp"

namespace reg3d {

PointCloud::PointCloud(std::vector<Vector3> points, std::vector<Vector3> normals)
    : points_(std::move(points)), normals_(std::move(normals)) {
  if (points_.empty()) throw DegenerateInput("PointCloud: empty point set");
  for (const Vector3& p : points_)
    if (!p.allFinite()) throw DegenerateInput("PointCloud: non-finite coordinate");
  if (!normals_.empty() && normals_.size() != points_.size())
    throw DimensionMismatch("PointCloud: normal count does not match point count");
  tree_ = KdTree3(points_);
  if (points_.size() >= 2) {
    double sum = 0.0;
    for (const Vector3& p : points_) {
      auto hits = tree_.knn(p, 2);  // hits[0] is the point itself
      sum += hits[1].distance;
    }
    mr_ = sum / static_cast<double>(points_.size());
  }
}

double PointCloud::mesh_resolution() const {
  if (mr_ < 0.0) throw DegenerateInput("mesh_resolution: need at least 2 points");
  return mr_;
}

Vector3 PointCloud::centroid() const {
  Vector3 c = Vector3::Zero();
  for (const Vector3& p : points_) c += p;
  return c / static_cast<double>(points_.size());
}

std::pair<int, double> nearest_neighbor(const PointCloud& cloud, const Vector3& query) {
  const KdTree3::Hit hit = cloud.index().nearest(query);
  return {hit.index, hit.distance};
}

std::vector<int> subsample_indices(std::size_t cloud_size, std::size_t n, std::uint64_t seed) {
  const std::size_t k = std::min(n, cloud_size);
  std::vector<int> order(cloud_size);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i)
    std::swap(order[i], order[i + rng.index(order.size() - i)]);
  order.resize(k);
  return order;
}

PointCloud subsample(const PointCloud& cloud, std::size_t n, std::uint64_t seed) {
  const std::vector<int> order = subsample_indices(cloud.size(), n, seed);
  std::vector<Vector3> pts(order.size());
  std::vector<Vector3> nrm;
  if (cloud.has_normals()) nrm.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    pts[i] = cloud[static_cast<std::size_t>(order[i])];
    if (cloud.has_normals()) nrm[i] = cloud.normals()[static_cast<std::size_t>(order[i])];
  }
  return PointCloud(std::move(pts), std::move(nrm));
}

PointCloud transformed(const PointCloud& cloud, const RigidTransform& t) {
  std::vector<Vector3> pts(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) pts[i] = apply(t, cloud[i]);
  std::vector<Vector3> nrm;
  if (cloud.has_normals()) {
    nrm.resize(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) nrm[i] = t.rotation * cloud.normals()[i];
  }
  return PointCloud(std::move(pts), std::move(nrm));
}

double overlap_ratio(const PointCloud& source, const PointCloud& target,
                     const RigidTransform& gt, double tol) {
  if (!(tol > 0.0)) throw InvalidMr("overlap_ratio: tolerance must be positive");
  const std::size_t smaller = std::min(source.size(), target.size());
  std::size_t hits = 0;
  if (source.size() <= target.size()) {
    for (std::size_t i = 0; i < source.size(); ++i)
      if (target.index().nearest(apply(gt, source[i])).distance < tol) ++hits;
  } else {
    // Query the aligned source; build its tree once.
    KdTree3 aligned_tree;
    {
      std::vector<Vector3> aligned(source.size());
      for (std::size_t i = 0; i < source.size(); ++i) aligned[i] = apply(gt, source[i]);
      aligned_tree = KdTree3(aligned);
    }
    for (std::size_t i = 0; i < target.size(); ++i)
      if (aligned_tree.nearest(target[i]).distance < tol) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(smaller);
}

int KeypointSet::position_of(int cloud_index) const {
  for (std::size_t k = 0; k < indices.size(); ++k)
    if (indices[k] == cloud_index) return static_cast<int>(k);
  return -1;
}

void KeypointSet::validate() const {
  if (cloud == nullptr) throw DegenerateInput("KeypointSet: no parent cloud");
  std::set<int> seen;
  for (int idx : indices) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= cloud->size())
      throw IndexOutOfRange("KeypointSet: index outside parent cloud");
    if (!seen.insert(idx).second) throw DegenerateInput("KeypointSet: duplicate index");
  }
  if (!features.empty()) {
    if (features.size() != indices.size())
      throw DimensionMismatch("KeypointSet: feature count mismatch");
    for (const auto& f : features)
      if (f.size() != features.front().size())
        throw DimensionMismatch("KeypointSet: inconsistent feature dimensions");
  }
  if (!lrfs.empty()) {
    if (lrfs.size() != indices.size()) throw DimensionMismatch("KeypointSet: LRF count mismatch");
    for (const auto& f : lrfs)
      if (!f.valid()) throw DegenerateInput("KeypointSet: invalid LRF");
  }
  if (!lras.empty()) {
    if (lras.size() != indices.size()) throw DimensionMismatch("KeypointSet: LRA count mismatch");
    for (const auto& a : lras)
      if (!a.valid()) throw DegenerateInput("KeypointSet: invalid LRA");
  }
}

}  // namespace reg3d
