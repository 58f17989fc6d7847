#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reg3d/correspondence.hpp"
#include "reg3d/geometry.hpp"
#include "reg3d/point_cloud.hpp"

namespace reg3d {

/// Ground-truth transform file: 4 lines x 4 whitespace-separated decimals,
/// row-major homogeneous matrix. The rotation block is projected onto the
/// nearest rotation when it is slightly off-orthonormal (manual alignments
/// often are); wildly non-rigid blocks are rejected.
RigidTransform load_transform(const std::string& path);
void save_transform(const std::string& path, const RigidTransform& t);

/// Keypoint/feature file: header `n d`, then n rows `index f1 ... fd` with
/// `index` pointing into the parent cloud.
KeypointSet load_keypoint_features(const std::string& path, const PointCloud& cloud);
void save_keypoint_features(const std::string& path, const KeypointSet& keys);

/// Correspondence dump: one line per pair `model_idx scene_idx nn nn2`.
void save_correspondences(const std::string& path, const CorrespondenceSet& set);
CorrespondenceSet load_correspondences(const std::string& path, const PointCloud& model,
                                       const PointCloud& scene);

/// Flat `key=value` configuration text; '#' starts a comment.
class Config {
 public:
  Config() = default;
  static Config load(const std::string& path);
  static Config parse(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  /// FNV-1a over the normalized key=value pairs; recorded in run metadata.
  std::uint64_t hash() const;

 private:
  std::map<std::string, std::string> values_;
};

/// One benchmark pair: clouds, ground truth, and optional side files.
struct ManifestPair {
  std::string name;
  std::string model;
  std::string scene;
  std::string gt;
  std::string features_model;
  std::string features_scene;
  std::string lrf_model;
  std::string lrf_scene;
};

/// Manifest: INI-style sections, one `[name]` per pair with keys model,
/// scene, gt, features_model, features_scene, lrf_model, lrf_scene.
/// Relative paths resolve against the manifest's directory.
std::vector<ManifestPair> load_manifest(const std::string& path);

}  // namespace reg3d
