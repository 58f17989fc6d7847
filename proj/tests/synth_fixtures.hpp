#pragma once

#include "reg3d/bench.hpp"
#include "reg3d/correspondence.hpp"
#include "reg3d/estimators.hpp"
#include "reg3d/point_cloud.hpp"
#include "reg3d/rng.hpp"

namespace reg3d::testutil {

struct SynthPair {
  PointCloud model;
  PointCloud scene;
  RigidTransform gt;
  double mr = 0.0;  // scene mesh resolution
};

inline SynthPair make_pair(std::size_t n_points, std::uint64_t seed) {
  SynthPair sp;
  sp.model = make_synthetic_surface(n_points, seed);
  Rng rng(derive_seed(seed, 0xA11CE));
  sp.gt.rotation = uniform_rotation(rng);
  sp.gt.translation =
      Vector3(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
  sp.scene = transformed(sp.model, sp.gt);
  sp.mr = sp.scene.mesh_resolution();
  return sp;
}

/// Full estimation context at a controlled inlier rate, with ground-truth
/// consistent frames on correct pairs and random frames on false ones.
inline EstimationContext make_context(const SynthPair& sp, double pcc_level,
                                      std::size_t n_correspondences, std::uint64_t seed,
                                      std::size_t model_sub = 100, std::size_t scene_sub = 8000,
                                      int iterations = 300) {
  EstimationContext ctx;
  ctx.correspondences =
      synthesize_correspondences(sp.model, sp.scene, sp.gt, pcc_level, seed, n_correspondences);
  attach_synthetic_frames(ctx.correspondences, sp.gt, 2.0 * sp.mr, 0.0, derive_seed(seed, 7));
  ctx.model_sub = subsample(sp.model, model_sub, derive_seed(seed, 1));
  ctx.scene_sub = subsample(sp.scene, scene_sub, derive_seed(seed, 2));
  ctx.mr = sp.mr;
  ctx.rng_seed = derive_seed(seed, 3);
  ctx.max_iterations = iterations;
  return ctx;
}

}  // namespace reg3d::testutil
