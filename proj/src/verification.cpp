#include "reg3d/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reg3d/errors.hpp"

namespace reg3d {

std::vector<double> nn_residuals(const PointCloud& model_sub, const PointCloud& scene_sub,
                                 const RigidTransform& t) {
  if (model_sub.empty() || scene_sub.empty())
    throw DegenerateInput("nn_residuals: empty verification subsample");
  std::vector<double> out(model_sub.size());
  for (std::size_t i = 0; i < model_sub.size(); ++i)
    out[i] = scene_sub.index().nearest(apply(t, model_sub[i])).distance;
  return out;
}

VerificationScore count_inliers(const PointCloud& model_sub, const PointCloud& scene_sub,
                                const RigidTransform& t, double tol) {
  if (!(tol > 0.0)) throw InvalidMr("count_inliers: tolerance must be positive");
  const std::vector<double> res = nn_residuals(model_sub, scene_sub, t);
  std::size_t n = 0;
  for (double d : res)
    if (d < tol) ++n;
  VerificationScore s;
  s.kind = VerificationScore::Kind::inlier_count;
  s.value = static_cast<double>(n);
  s.inlier_fraction =
      static_cast<double>(n) / static_cast<double>(std::min(model_sub.size(), scene_sub.size()));
  return s;
}

double huber_metric(std::span<const double> errors, double t_e) {
  if (!(t_e > 0.0)) throw InvalidMr("huber_metric: threshold must be positive");
  double sum = 0.0;
  for (double e : errors) {
    const double a = std::abs(e);
    sum += a <= t_e ? 0.5 * a * a : 0.5 * t_e * (2.0 * a - t_e);
  }
  return sum;
}

double osac_metric(const PointCloud& model_sub, const PointCloud& scene_sub,
                   const RigidTransform& t, double delta, double tol) {
  if (!(delta > 0.0 && delta < 1.0)) throw DegenerateInput("osac_metric: delta outside (0, 1)");
  if (!(tol > 0.0)) throw InvalidMr("osac_metric: tolerance must be positive");
  const std::vector<double> res = nn_residuals(model_sub, scene_sub, t);
  double inlier_sum = 0.0;
  std::size_t n = 0;
  for (double d : res) {
    if (d < tol) {
      inlier_sum += d;
      ++n;
    }
  }
  const double fraction =
      static_cast<double>(n) / static_cast<double>(std::min(model_sub.size(), scene_sub.size()));
  if (!(fraction > delta)) return std::numeric_limits<double>::infinity();
  return inlier_sum / static_cast<double>(n);
}

}  // namespace reg3d
