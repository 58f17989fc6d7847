#pragma once

#include <span>
#include <vector>

#include "reg3d/geometry.hpp"
#include "reg3d/point_cloud.hpp"

namespace reg3d {

/// Quality score of a pose hypothesis against subsampled clouds.
struct VerificationScore {
  enum class Kind { inlier_count, huber_sum, d_avg };
  Kind kind = Kind::inlier_count;
  double value = 0.0;
  double inlier_fraction = 0.0;  // N / min(N1, N2) where applicable
};

/// Nearest-scene-neighbor distance of every transformed model point.
std::vector<double> nn_residuals(const PointCloud& model_sub, const PointCloud& scene_sub,
                                 const RigidTransform& t);

/// Counts transformed model points whose nearest scene neighbor lies
/// strictly within `tol`; also reports the fraction N / min(N1, N2).
VerificationScore count_inliers(const PointCloud& model_sub, const PointCloud& scene_sub,
                                const RigidTransform& t, double tol);

/// Sum of the Huber penalty: e^2/2 for |e| <= t_e, t_e*(2|e| - t_e)/2 above.
double huber_metric(std::span<const double> errors, double t_e);

/// Mean nearest-neighbor distance over the inliers when the inlier fraction
/// strictly exceeds `delta`, +infinity otherwise.
double osac_metric(const PointCloud& model_sub, const PointCloud& scene_sub,
                   const RigidTransform& t, double delta, double tol);

}  // namespace reg3d
