#include "reg3d/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "reg3d/errors.hpp"
#include "reg3d/rng.hpp"

namespace reg3d {

bool CorrespondenceSet::has_distances() const {
  return !items.empty() &&
         std::all_of(items.begin(), items.end(), [](const Correspondence& c) { return c.has_distances(); });
}

bool CorrespondenceSet::has_lrf() const {
  return !items.empty() && std::all_of(items.begin(), items.end(), [](const Correspondence& c) {
           return c.model_lrf.has_value() && c.scene_lrf.has_value();
         });
}

bool CorrespondenceSet::has_lra() const {
  return !items.empty() && std::all_of(items.begin(), items.end(), [](const Correspondence& c) {
           return c.model_lra.has_value() && c.scene_lra.has_value();
         });
}

CorrespondenceSet match_features(const KeypointSet& model_keys, const KeypointSet& scene_keys) {
  if (!model_keys.has_features() || !scene_keys.has_features())
    throw DimensionMismatch("match_features: keypoints carry no features");
  const Eigen::Index dim = model_keys.features.front().size();
  if (scene_keys.features.front().size() != dim)
    throw DimensionMismatch("match_features: feature dimensions differ");

  CorrespondenceSet out;
  out.items.reserve(model_keys.size());
  for (std::size_t m = 0; m < model_keys.size(); ++m) {
    const Eigen::VectorXd& f = model_keys.features[m];
    int best = -1, second = -1;
    double best_d = std::numeric_limits<double>::infinity();
    double second_d = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < scene_keys.size(); ++s) {
      const double d = (scene_keys.features[s] - f).norm();
      if (d < best_d) {
        second_d = best_d;
        second = best;
        best_d = d;
        best = static_cast<int>(s);
      } else if (d < second_d) {
        second_d = d;
        second = static_cast<int>(s);
      }
    }
    if (second < 0) second_d = best_d;  // single scene keypoint

    Correspondence c;
    c.model_index = model_keys.indices[m];
    c.scene_index = scene_keys.indices[static_cast<std::size_t>(best)];
    c.model_point = model_keys.point(m);
    c.scene_point = scene_keys.point(static_cast<std::size_t>(best));
    c.nearest_dist = best_d;
    c.second_dist = second_d;
    if (model_keys.has_lrf()) c.model_lrf = model_keys.lrfs[m];
    if (scene_keys.has_lrf()) c.scene_lrf = scene_keys.lrfs[static_cast<std::size_t>(best)];
    if (model_keys.has_lra()) c.model_lra = model_keys.lras[m];
    if (scene_keys.has_lra()) c.scene_lra = scene_keys.lras[static_cast<std::size_t>(best)];
    out.items.push_back(std::move(c));
  }
  return out;
}

namespace {

template <typename Key>
CorrespondenceSet select_by(const CorrespondenceSet& raw, std::size_t k, Key key) {
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ka = key(raw[a]), kb = key(raw[b]);
    if (ka != kb) return ka < kb;
    return raw[a].model_index < raw[b].model_index;
  });
  CorrespondenceSet out;
  const std::size_t keep = std::min(k, raw.size());
  out.items.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.items.push_back(raw[order[i]]);
  return out;
}

}  // namespace

CorrespondenceSet select_ratio(const CorrespondenceSet& raw, std::size_t k) {
  if (!raw.has_distances()) throw MissingDistances("select_ratio: feature distances missing");
  return select_by(raw, k, [](const Correspondence& c) {
    const double second = *c.second_dist;
    return second > 0.0 ? *c.nearest_dist / second : 0.0;
  });
}

CorrespondenceSet select_similarity(const CorrespondenceSet& raw, std::size_t k) {
  if (!raw.has_distances()) throw MissingDistances("select_similarity: feature distances missing");
  return select_by(raw, k, [](const Correspondence& c) { return *c.nearest_dist; });
}

CorrespondenceSet synthesize_correspondences(const PointCloud& model, const PointCloud& scene,
                                             const RigidTransform& gt, double target_pcc,
                                             std::uint64_t seed, std::size_t n) {
  if (target_pcc < 0.0 || target_pcc > 1.0)
    throw DegenerateInput("synthesize_correspondences: pcc outside [0, 1]");
  const double tol = 2.0 * scene.mesh_resolution();
  const std::size_t n_correct =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * target_pcc));

  std::vector<int> overlap;
  for (std::size_t i = 0; i < model.size(); ++i)
    if (scene.index().nearest(apply(gt, model[i])).distance < tol)
      overlap.push_back(static_cast<int>(i));
  if (n_correct > 0 && overlap.empty())
    throw NoOverlap("synthesize_correspondences: no model point maps into the scene");
  if (n_correct > overlap.size())
    throw NoOverlap("synthesize_correspondences: overlap smaller than requested correct pairs");

  Rng rng(seed);
  std::vector<Correspondence> items;
  items.reserve(n);

  for (std::size_t i = 0; i < n_correct; ++i)
    std::swap(overlap[i], overlap[i + rng.index(overlap.size() - i)]);
  for (std::size_t i = 0; i < n_correct; ++i) {
    const int mi = overlap[i];
    const KdTree3::Hit hit = scene.index().nearest(apply(gt, model[static_cast<std::size_t>(mi)]));
    Correspondence c;
    c.model_index = mi;
    c.scene_index = hit.index;
    c.model_point = model[static_cast<std::size_t>(mi)];
    c.scene_point = scene[static_cast<std::size_t>(hit.index)];
    items.push_back(std::move(c));
  }

  for (std::size_t i = n_correct; i < n; ++i) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000)
        throw Error("synthesize_correspondences: cannot draw a false pair");
      const int mi = static_cast<int>(rng.index(model.size()));
      const int si = static_cast<int>(rng.index(scene.size()));
      const Vector3& p = model[static_cast<std::size_t>(mi)];
      const Vector3& q = scene[static_cast<std::size_t>(si)];
      if ((apply(gt, p) - q).norm() < tol) continue;  // accidental inlier
      Correspondence c;
      c.model_index = mi;
      c.scene_index = si;
      c.model_point = p;
      c.scene_point = q;
      items.push_back(std::move(c));
      break;
    }
  }

  // Shuffle so position carries no correct/false signal.
  for (std::size_t i = 0; i + 1 < items.size(); ++i)
    std::swap(items[i], items[i + rng.index(items.size() - i)]);

  return CorrespondenceSet{std::move(items)};
}

double pcc(const CorrespondenceSet& set, const RigidTransform& gt, double tol) {
  if (!(tol > 0.0)) throw InvalidMr("pcc: tolerance must be positive");
  if (set.empty()) return 0.0;
  std::size_t hits = 0;
  for (const Correspondence& c : set)
    if (residual(gt, c) < tol) ++hits;
  return static_cast<double>(hits) / static_cast<double>(set.size());
}

}  // namespace reg3d
