#pragma once

#include "reg3d/geometry.hpp"
#include "reg3d/point_cloud.hpp"

namespace reg3d {

struct IcpParams {
  int max_iterations = 50;
  double epsilon_mr = 1e-6;  // convergence threshold on the RMS change
  double reject_mr = 5.0;    // correspondence rejection distance
};

struct IcpResult {
  RigidTransform transform;
  double rms = 0.0;
  int iterations = 0;
  bool converged = false;
  bool no_pairs = false;  // zero pairs survived rejection in iteration 1
};

/// Classic point-to-point ICP: pair each transformed model point with its
/// nearest scene point within the rejection distance, refit, repeat until
/// the RMS change drops below epsilon or the iteration budget runs out.
/// Thresholds are expressed in multiples of the scene mesh resolution.
IcpResult icp(const PointCloud& model, const PointCloud& scene, const RigidTransform& t0,
              const IcpParams& params = {});

}  // namespace reg3d
