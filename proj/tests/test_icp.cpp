#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "reg3d/icp.hpp"
#include "synth_fixtures.hpp"
#include "test_util.hpp"

using namespace reg3d;
using namespace reg3d::testutil;

namespace {

/// Small rigid perturbation: rotation by `deg` about a random axis through
/// the cloud centroid plus a translation of `shift_mr` mesh units.
RigidTransform perturbation(const PointCloud& cloud, double deg, double shift_mr, Rng& rng) {
  const Vector3 c = cloud.centroid();
  const Matrix3 r =
      Eigen::AngleAxisd(deg2rad(deg), random_unit_vector(rng)).toRotationMatrix();
  RigidTransform t;
  t.rotation = r;
  t.translation = c - r * c + shift_mr * cloud.mesh_resolution() * random_unit_vector(rng);
  return t;
}

}  // namespace

TEST_CASE("icp converges immediately from the exact pose") {
  const SynthPair sp = make_pair(1500, 121);
  const IcpResult r = icp(sp.model, sp.scene, sp.gt, IcpParams{});
  CHECK(r.iterations == 1);
  CHECK(r.rms == doctest::Approx(0.0));
  CHECK(r.converged);
  CHECK(rotation_angle_deg(r.transform.rotation, sp.gt.rotation) < 1e-9);
}

TEST_CASE("icp recovers a 3 degree / 1 mr perturbation") {
  const SynthPair sp = make_pair(3000, 122);
  Rng rng(122);
  // Scene = model perturbed by a small motion; start from the identity.
  const RigidTransform gt = perturbation(sp.model, 3.0, 1.0, rng);
  const PointCloud scene = transformed(sp.model, gt);
  const IcpResult r = icp(sp.model, scene, RigidTransform::identity(), IcpParams{});
  CHECK(r.iterations <= 50);
  CHECK(rotation_error(r.transform.rotation, gt.rotation) < 0.5);
}

TEST_CASE("icp RMS is non-increasing across iterations") {
  const SynthPair sp = make_pair(1000, 123);
  Rng rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    const RigidTransform t0 = perturbation(sp.model, rng.uniform(0.0, 4.0),
                                           rng.uniform(0.0, 1.5), rng);
    // Track the RMS sequence by running with increasing iteration caps.
    IcpParams params;
    params.epsilon_mr = 0.0;  // disable early convergence
    double prev = std::numeric_limits<double>::infinity();
    for (int iters = 1; iters <= 6; ++iters) {
      params.max_iterations = iters;
      const IcpResult r = icp(sp.model, sp.model, t0, params);
      CHECK(r.rms <= prev + 1e-12);
      prev = r.rms;
    }
  }
}

TEST_CASE("icp is a fixed point at an exact minimum with stable pairings") {
  const SynthPair sp = make_pair(1200, 124);
  IcpParams params;
  const IcpResult first = icp(sp.model, sp.scene, sp.gt, params);
  const IcpResult again = icp(sp.model, sp.scene, first.transform, params);
  CHECK((again.transform.rotation - first.transform.rotation).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((again.transform.translation - first.transform.translation).norm() < 1e-9);
}

TEST_CASE("icp reports no pairs for a hopeless start") {
  const SynthPair sp = make_pair(500, 125);
  RigidTransform far = RigidTransform::identity();
  far.translation = Vector3(1000, 1000, 1000);
  const IcpResult r = icp(sp.model, sp.scene, far, IcpParams{});
  CHECK(r.no_pairs);
  CHECK((r.transform.translation - far.translation).norm() == 0.0);
}

TEST_CASE("icp output rotation is always valid") {
  const SynthPair sp = make_pair(800, 126);
  Rng rng(126);
  for (int trial = 0; trial < 20; ++trial) {
    const RigidTransform t0 = perturbation(sp.model, rng.uniform(0.0, 10.0),
                                           rng.uniform(0.0, 3.0), rng);
    const IcpResult r = icp(sp.model, sp.scene, compose(sp.gt, t0), IcpParams{});
    CHECK(is_rotation(r.transform.rotation, 1e-9));
  }
}
