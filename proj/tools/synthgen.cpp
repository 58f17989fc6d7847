// Generates a synthetic scan pair (model.ply, scene.ply, gt.txt) plus
// keypoint features and covariance LRFs, so both benchmark modes run
// end-to-end without external datasets.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "reg3d/bench.hpp"
#include "reg3d/io.hpp"
#include "reg3d/lrf.hpp"
#include "reg3d/rng.hpp"

namespace fs = std::filesystem;
using namespace reg3d;

namespace {

KeypointSet sample_keypoints(const PointCloud& cloud, std::size_t count, Rng& rng) {
  KeypointSet keys;
  keys.cloud = &cloud;
  while (keys.indices.size() < count) {
    const int idx = static_cast<int>(rng.index(cloud.size()));
    if (keys.position_of(idx) < 0) keys.indices.push_back(idx);
  }
  return keys;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic scan-pair generator"};
  std::size_t points = 5000;
  std::size_t keypoints = 300;
  double feature_noise = 0.0;
  std::uint64_t seed = 1;
  std::string out = ".";
  app.add_option("--points", points, "points per cloud");
  app.add_option("--keypoints", keypoints, "keypoints per cloud");
  app.add_option("--feature-noise", feature_noise,
                 "sigma of the noise injected into scene features");
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--out", out, "output directory");
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out);
    const PointCloud model = make_synthetic_surface(points, seed);

    Rng rng(derive_seed(seed, 42));
    RigidTransform gt;
    gt.rotation = uniform_rotation(rng);
    gt.translation =
        Vector3(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
    const PointCloud scene = transformed(model, gt);

    // The scene is a point-for-point copy, so keypoint i names the same
    // physical point on both clouds; a unique per-index feature makes the
    // match exact and the noise knob re-introduces mismatches.
    KeypointSet mk = sample_keypoints(model, std::min(keypoints, model.size()), rng);
    KeypointSet sk;
    sk.cloud = &scene;
    sk.indices = mk.indices;
    for (std::size_t k = 0; k < mk.size(); ++k) {
      Eigen::VectorXd f(3);
      const double v = static_cast<double>(mk.indices[k]);
      f << v, std::sin(0.1 * v), std::cos(0.05 * v);
      mk.features.push_back(f);
      Eigen::VectorXd g = f;
      for (Eigen::Index d = 0; d < g.size(); ++d) g(d) += feature_noise * rng.normal();
      sk.features.push_back(g);
    }

    const double radius = 15.0 * model.mesh_resolution();
    for (std::size_t k = 0; k < mk.size(); ++k) {
      mk.lrfs.push_back(compute_default_lrf(model, mk.indices[k], radius));
      sk.lrfs.push_back(compute_default_lrf(scene, sk.indices[k], radius));
    }

    save_ply((fs::path(out) / "model.ply").string(), model);
    save_ply((fs::path(out) / "scene.ply").string(), scene);
    save_transform((fs::path(out) / "gt.txt").string(), gt);
    save_keypoint_features((fs::path(out) / "model.feat").string(), mk);
    save_keypoint_features((fs::path(out) / "scene.feat").string(), sk);
    save_lrf_file((fs::path(out) / "model.lrf").string(), mk);
    save_lrf_file((fs::path(out) / "scene.lrf").string(), sk);

    std::ofstream m(fs::path(out) / "pairs.manifest");
    m << "[synthetic]\n"
      << "model = model.ply\nscene = scene.ply\ngt = gt.txt\n"
      << "features_model = model.feat\nfeatures_scene = scene.feat\n"
      << "lrf_model = model.lrf\nlrf_scene = scene.lrf\n";

    std::cout << "wrote " << out << "/{model.ply, scene.ply, gt.txt, *.feat, *.lrf, "
              << "pairs.manifest} (" << points << " points, " << mk.size()
              << " keypoints, mr=" << model.mesh_resolution() << ")\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
