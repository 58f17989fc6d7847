#include "reg3d/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "reg3d/errors.hpp"

namespace reg3d {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

RigidTransform load_transform(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_transform: cannot open '" + path + "'");
  Eigen::Matrix4d h;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (!(in >> h(r, c)))
        throw ParseError("load_transform: expected 16 numbers in '" + path + "'");

  const Matrix3 block = h.topLeftCorner<3, 3>();
  Eigen::JacobiSVD<Matrix3> svd(block);
  const Vector3 sv = svd.singularValues();
  if (sv(0) > 1.01 || sv(2) < 0.99)
    throw ParseError("load_transform: rotation block of '" + path + "' is not rigid");

  RigidTransform t;
  t.rotation = is_rotation(block) ? block : nearest_rotation(block);
  t.translation = h.topRightCorner<3, 1>();
  return t;
}

void save_transform(const std::string& path, const RigidTransform& t) {
  std::ofstream out(path);
  if (!out) throw IoError("save_transform: cannot write '" + path + "'");
  char buf[128];
  for (int r = 0; r < 3; ++r) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g\n", t.rotation(r, 0),
                  t.rotation(r, 1), t.rotation(r, 2), t.translation(r));
    out << buf;
  }
  out << "0 0 0 1\n";
}

KeypointSet load_keypoint_features(const std::string& path, const PointCloud& cloud) {
  std::ifstream in(path);
  if (!in) throw IoError("load_keypoint_features: cannot open '" + path + "'");
  std::size_t n = 0, d = 0;
  if (!(in >> n >> d) || n == 0 || d == 0)
    throw ParseError("load_keypoint_features: bad header in '" + path + "'");

  KeypointSet keys;
  keys.cloud = &cloud;
  keys.indices.reserve(n);
  keys.features.reserve(n);
  for (std::size_t row = 0; row < n; ++row) {
    int idx;
    if (!(in >> idx))
      throw ParseError("load_keypoint_features: truncated at row " + std::to_string(row));
    if (idx < 0 || static_cast<std::size_t>(idx) >= cloud.size())
      throw IndexOutOfRange("load_keypoint_features: index outside cloud at row " +
                            std::to_string(row));
    Eigen::VectorXd f(static_cast<Eigen::Index>(d));
    for (std::size_t c = 0; c < d; ++c)
      if (!(in >> f(static_cast<Eigen::Index>(c))))
        throw ParseError("load_keypoint_features: truncated feature at row " +
                         std::to_string(row));
    keys.indices.push_back(idx);
    keys.features.push_back(std::move(f));
  }
  keys.validate();
  return keys;
}

void save_keypoint_features(const std::string& path, const KeypointSet& keys) {
  if (!keys.has_features())
    throw MissingDistances("save_keypoint_features: keypoints carry no features");
  std::ofstream out(path);
  if (!out) throw IoError("save_keypoint_features: cannot write '" + path + "'");
  out << keys.size() << " " << keys.features.front().size() << "\n";
  char buf[64];
  for (std::size_t k = 0; k < keys.size(); ++k) {
    out << keys.indices[k];
    for (Eigen::Index c = 0; c < keys.features[k].size(); ++c) {
      std::snprintf(buf, sizeof(buf), " %.17g", keys.features[k](c));
      out << buf;
    }
    out << "\n";
  }
}

void save_correspondences(const std::string& path, const CorrespondenceSet& set) {
  std::ofstream out(path);
  if (!out) throw IoError("save_correspondences: cannot write '" + path + "'");
  char buf[96];
  for (const Correspondence& c : set) {
    std::snprintf(buf, sizeof(buf), "%d %d %.17g %.17g\n", c.model_index, c.scene_index,
                  c.nearest_dist.value_or(-1.0), c.second_dist.value_or(-1.0));
    out << buf;
  }
}

CorrespondenceSet load_correspondences(const std::string& path, const PointCloud& model,
                                       const PointCloud& scene) {
  std::ifstream in(path);
  if (!in) throw IoError("load_correspondences: cannot open '" + path + "'");
  CorrespondenceSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Correspondence c;
    double nn, nn2;
    if (!(ls >> c.model_index >> c.scene_index >> nn >> nn2))
      throw ParseError("load_correspondences: malformed line " + std::to_string(line_no));
    if (c.model_index < 0 || static_cast<std::size_t>(c.model_index) >= model.size() ||
        c.scene_index < 0 || static_cast<std::size_t>(c.scene_index) >= scene.size())
      throw IndexOutOfRange("load_correspondences: index outside cloud at line " +
                            std::to_string(line_no));
    c.model_point = model[static_cast<std::size_t>(c.model_index)];
    c.scene_point = scene[static_cast<std::size_t>(c.scene_index)];
    if (nn >= 0.0) c.nearest_dist = nn;
    if (nn2 >= 0.0) c.second_dist = nn2;
    if (c.nearest_dist && c.second_dist && *c.nearest_dist > *c.second_dist)
      throw ParseError("load_correspondences: nearest > second-nearest at line " +
                       std::to_string(line_no));
    set.items.push_back(std::move(c));
  }
  return set;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("Config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("Config: missing '=' at line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("Config: empty key at line " + std::to_string(line_no));
    cfg.values_[key] = value;
  }
  return cfg;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ParseError("Config: key '" + key + "' is not a number: '" + it->second + "'");
  }
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ParseError("Config: key '" + key + "' is not an integer: '" + it->second + "'");
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParseError("Config: key '" + key + "' is not a boolean: '" + it->second + "'");
}

std::uint64_t Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& [k, v] : values_) {
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  return h;
}

std::vector<ManifestPair> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_manifest: cannot open '" + path + "'");
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&base](const std::string& p) -> std::string {
    if (p.empty()) return p;
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  std::vector<ManifestPair> pairs;
  ManifestPair* current = nullptr;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("load_manifest: unterminated section at line " + std::to_string(line_no));
      pairs.emplace_back();
      current = &pairs.back();
      current->name = trim(line.substr(1, line.size() - 2));
      if (current->name.empty())
        throw ParseError("load_manifest: empty section name at line " + std::to_string(line_no));
      continue;
    }
    if (current == nullptr)
      throw ParseError("load_manifest: key outside a section at line " + std::to_string(line_no));
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("load_manifest: missing '=' at line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "model") current->model = resolve(value);
    else if (key == "scene") current->scene = resolve(value);
    else if (key == "gt") current->gt = resolve(value);
    else if (key == "features_model") current->features_model = resolve(value);
    else if (key == "features_scene") current->features_scene = resolve(value);
    else if (key == "lrf_model") current->lrf_model = resolve(value);
    else if (key == "lrf_scene") current->lrf_scene = resolve(value);
    else
      throw ParseError("load_manifest: unknown key '" + key + "' at line " +
                       std::to_string(line_no));
  }
  for (const ManifestPair& p : pairs)
    if (p.model.empty() || p.scene.empty() || p.gt.empty())
      throw ParseError("load_manifest: pair '" + p.name + "' lacks model/scene/gt");
  return pairs;
}

}  // namespace reg3d
