#include "reg3d/icp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "reg3d/errors.hpp"

namespace reg3d {

IcpResult icp(const PointCloud& model, const PointCloud& scene, const RigidTransform& t0,
              const IcpParams& params) {
  if (model.empty() || scene.empty()) throw DegenerateInput("icp: empty cloud");
  const double mr = scene.mesh_resolution();
  const double reject = params.reject_mr * mr;
  const double eps = params.epsilon_mr * mr;

  IcpResult result;
  result.transform = t0;
  double prev_rms = std::numeric_limits<double>::infinity();

  std::vector<Vector3> src, dst;
  src.reserve(model.size());
  dst.reserve(model.size());

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    src.clear();
    dst.clear();
    for (std::size_t i = 0; i < model.size(); ++i) {
      const KdTree3::Hit hit = scene.index().nearest(apply(result.transform, model[i]));
      if (hit.distance <= reject) {
        src.push_back(model[i]);
        dst.push_back(scene[static_cast<std::size_t>(hit.index)]);
      }
    }
    if (src.empty()) {
      if (iter == 0) {
        result.no_pairs = true;
        return result;
      }
      break;
    }

    RigidTransform refit;
    try {
      refit = fit_rigid(src, dst);
    } catch (const DegenerateInput&) {
      break;  // pairings collapsed onto a line; keep the current estimate
    }
    result.transform = refit;

    double sq = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i)
      sq += (apply(refit, src[i]) - dst[i]).squaredNorm();
    result.rms = std::sqrt(sq / static_cast<double>(src.size()));
    result.iterations = iter + 1;

    if (result.rms < eps || std::abs(prev_rms - result.rms) < eps) {
      result.converged = true;
      break;
    }
    prev_rms = result.rms;
  }
  return result;
}

}  // namespace reg3d
