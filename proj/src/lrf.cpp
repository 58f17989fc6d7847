#include "reg3d/lrf.hpp"

#include <Eigen/Eigenvalues>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "reg3d/errors.hpp"

namespace reg3d {

Lrf compute_default_lrf(const PointCloud& cloud, int keypoint_index, double radius) {
  if (keypoint_index < 0 || static_cast<std::size_t>(keypoint_index) >= cloud.size())
    throw IndexOutOfRange("compute_default_lrf: keypoint index outside cloud");
  const Vector3& key = cloud[static_cast<std::size_t>(keypoint_index)];

  std::vector<int> nbrs = cloud.index().radius_search(key, radius);
  std::erase(nbrs, keypoint_index);
  if (nbrs.size() < 5)
    throw InsufficientNeighbors("compute_default_lrf: fewer than 5 neighbors in radius");

  Vector3 centroid = Vector3::Zero();
  for (int i : nbrs) centroid += cloud[static_cast<std::size_t>(i)];
  centroid /= static_cast<double>(nbrs.size());

  Matrix3 cov = Matrix3::Zero();
  for (int i : nbrs) {
    const Vector3 d = cloud[static_cast<std::size_t>(i)] - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Matrix3> eig(cov);
  Vector3 z = eig.eigenvectors().col(0);  // smallest eigenvalue
  Vector3 x = eig.eigenvectors().col(2);

  // Majority of neighbor-to-keypoint vectors should project nonnegatively.
  auto majority_flip = [&](Vector3& axis) {
    int nonneg = 0;
    for (int i : nbrs)
      if ((key - cloud[static_cast<std::size_t>(i)]).dot(axis) >= 0.0) ++nonneg;
    if (2 * nonneg < static_cast<int>(nbrs.size())) axis = -axis;
  };
  majority_flip(z);
  x = (x - x.dot(z) * z).normalized();
  majority_flip(x);
  const Vector3 y = z.cross(x);
  return Lrf::from_rows(x, y, z);
}

namespace {

int position_or_throw(const KeypointSet& keys, int cloud_index, const std::string& path) {
  const int pos = keys.position_of(cloud_index);
  if (pos < 0)
    throw IndexOutOfRange("lrf/lra file '" + path + "': index " + std::to_string(cloud_index) +
                          " is not a keypoint");
  return pos;
}

}  // namespace

LrfLoadStats load_lrf_file(const std::string& path, KeypointSet& keys) {
  std::ifstream in(path);
  if (!in) throw IoError("load_lrf_file: cannot open '" + path + "'");

  LrfLoadStats stats;
  std::vector<Lrf> frames(keys.size());
  std::vector<bool> seen(keys.size(), false);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int idx;
    Matrix3 axes;
    if (!(ls >> idx >> axes(0, 0) >> axes(0, 1) >> axes(0, 2) >> axes(1, 0) >> axes(1, 1) >>
          axes(1, 2) >> axes(2, 0) >> axes(2, 1) >> axes(2, 2)))
      throw ParseError("load_lrf_file: malformed row at line " + std::to_string(line_no));
    const int pos = position_or_throw(keys, idx, path);

    Lrf f{axes};
    if (!f.valid(1e-3)) {
      f.axes = nearest_rotation(axes);
      // Row-frame validity wants x cross y = z; the projection returns a
      // proper rotation, which satisfies it.
      stats.repaired.push_back(pos);
    }
    frames[static_cast<std::size_t>(pos)] = f;
    seen[static_cast<std::size_t>(pos)] = true;
  }
  for (std::size_t k = 0; k < keys.size(); ++k)
    if (!seen[k])
      throw ParseError("load_lrf_file: no frame for keypoint index " +
                       std::to_string(keys.indices[k]));
  keys.lrfs = std::move(frames);
  return stats;
}

void save_lrf_file(const std::string& path, const KeypointSet& keys) {
  if (!keys.has_lrf()) throw MissingFrames("save_lrf_file: keypoints carry no LRFs");
  std::ofstream out(path);
  if (!out) throw IoError("save_lrf_file: cannot write '" + path + "'");
  char buf[64];
  for (std::size_t k = 0; k < keys.size(); ++k) {
    out << keys.indices[k];
    const Matrix3& a = keys.lrfs[k].axes;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        std::snprintf(buf, sizeof(buf), " %.17g", a(r, c));
        out << buf;
      }
    out << "\n";
  }
}

void load_lra_file(const std::string& path, KeypointSet& keys) {
  std::ifstream in(path);
  if (!in) throw IoError("load_lra_file: cannot open '" + path + "'");

  std::vector<Lra> axes(keys.size());
  std::vector<bool> seen(keys.size(), false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int idx;
    Vector3 a;
    if (!(ls >> idx >> a.x() >> a.y() >> a.z()))
      throw ParseError("load_lra_file: malformed row at line " + std::to_string(line_no));
    const int pos = position_or_throw(keys, idx, path);
    const double n = a.norm();
    if (!(n > 0.0))
      throw ParseError("load_lra_file: zero axis at line " + std::to_string(line_no));
    axes[static_cast<std::size_t>(pos)] = Lra{a / n};
    seen[static_cast<std::size_t>(pos)] = true;
  }
  for (std::size_t k = 0; k < keys.size(); ++k)
    if (!seen[k])
      throw ParseError("load_lra_file: no axis for keypoint index " +
                       std::to_string(keys.indices[k]));
  keys.lras = std::move(axes);
}

void save_lra_file(const std::string& path, const KeypointSet& keys) {
  if (!keys.has_lra()) throw MissingFrames("save_lra_file: keypoints carry no LRAs");
  std::ofstream out(path);
  if (!out) throw IoError("save_lra_file: cannot write '" + path + "'");
  char buf[96];
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const Vector3& a = keys.lras[k].axis;
    std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %.17g\n", keys.indices[k], a.x(), a.y(),
                  a.z());
    out << buf;
  }
}

}  // namespace reg3d
