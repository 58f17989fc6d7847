#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "reg3d/lrf.hpp"
#include "reg3d/rng.hpp"
#include "test_util.hpp"

using namespace reg3d;
using namespace reg3d::testutil;

namespace {

PointCloud planar_patch(Rng& rng, std::size_t n, double extent) {
  std::vector<Vector3> pts;
  pts.emplace_back(0, 0, 0);  // keypoint at index 0
  for (std::size_t i = 1; i < n; ++i)
    pts.emplace_back(rng.uniform(-extent, extent), rng.uniform(-extent, extent), 0.0);
  return PointCloud(pts);
}

}  // namespace

TEST_CASE("compute_default_lrf: planar neighborhood yields z = +/- e_z") {
  Rng rng(131);
  const PointCloud patch = planar_patch(rng, 60, 1.0);
  const Lrf f = compute_default_lrf(patch, 0, 2.0);
  CHECK(f.valid(1e-6));
  CHECK(std::abs(std::abs(f.z().z()) - 1.0) < 1e-6);
}

TEST_CASE("compute_default_lrf rotates with the neighborhood") {
  Rng rng(132);
  // A rippled patch so the covariance has distinct eigenvalues.
  std::vector<Vector3> pts;
  pts.emplace_back(0, 0, 0);
  for (int i = 1; i < 80; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    const double y = rng.uniform(-0.5, 0.5);
    pts.emplace_back(x, y, 0.08 * std::sin(5.0 * x));
  }
  const PointCloud base(pts);
  const Lrf f0 = compute_default_lrf(base, 0, 2.0);

  const Matrix3 r = uniform_rotation(rng);
  std::vector<Vector3> rotated;
  for (const Vector3& p : pts) rotated.push_back(r * p);
  const Lrf f1 = compute_default_lrf(PointCloud(rotated), 0, 2.0);

  // The rotated frame should be the original frame rotated by r.
  const Matrix3 expected = f0.axes * r.transpose();
  CHECK(rotation_error(f1.axes, expected) < 2.0);
}

TEST_CASE("compute_default_lrf rejects sparse neighborhoods") {
  const PointCloud tiny({Vector3(0, 0, 0), Vector3(1, 0, 0), Vector3(0, 1, 0),
                         Vector3(10, 10, 10)});
  CHECK_THROWS_AS(compute_default_lrf(tiny, 0, 2.0), InsufficientNeighbors);
  CHECK_THROWS_AS(compute_default_lrf(tiny, 99, 2.0), IndexOutOfRange);
}

TEST_CASE("lra_from_lrf returns the z row exactly") {
  CHECK((lra_from_lrf(Lrf{}).axis - Vector3(0, 0, 1)).norm() == 0.0);

  // Frame physically rotated 90 degrees about x: z-axis lands on -y.
  const Matrix3 rx90 = rotation_from_euler(0.0, 0.0, deg2rad(90.0));
  const Lrf f = frame_of(rx90);
  CHECK((lra_from_lrf(f).axis - Vector3(0, -1, 0)).norm() < 1e-12);

  Rng rng(133);
  for (int i = 0; i < 20; ++i) {
    const Lrf g = frame_of(uniform_rotation(rng));
    const Lra a = lra_from_lrf(g);
    CHECK((a.axis - g.z()).norm() == 0.0);
    CHECK(a.valid());
  }
}

TEST_CASE("LRF file roundtrip is bit-exact") {
  Rng rng(134);
  const PointCloud cloud(random_points(rng, 20));
  KeypointSet keys;
  keys.cloud = &cloud;
  keys.indices = {2, 5, 11, 17};
  for (std::size_t i = 0; i < 4; ++i) keys.lrfs.push_back(frame_of(uniform_rotation(rng)));

  const auto path = temp_file("reg3d_frames.lrf");
  save_lrf_file(path.string(), keys);

  KeypointSet loaded;
  loaded.cloud = &cloud;
  loaded.indices = keys.indices;
  const LrfLoadStats stats = load_lrf_file(path.string(), loaded);
  CHECK(stats.repaired.empty());
  REQUIRE(loaded.has_lrf());
  for (std::size_t i = 0; i < 4; ++i)
    CHECK((loaded.lrfs[i].axes - keys.lrfs[i].axes).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("load_lrf_file repairs off-orthonormal rows and flips reflections") {
  Rng rng(135);
  const PointCloud cloud(random_points(rng, 8));
  KeypointSet keys;
  keys.cloud = &cloud;
  keys.indices = {0, 1};

  const auto path = temp_file("reg3d_badframes.lrf");
  // Row 0: identity with determinant -1 (x negated). Row 1: mildly skewed.
  write_file(path,
             "0 -1 0 0 0 1 0 0 0 1\n"
             "1 1 0.01 0 0 1 0 0 0 1\n");
  const LrfLoadStats stats = load_lrf_file(path.string(), keys);
  CHECK(stats.repaired == std::vector<int>{0, 1});
  for (const Lrf& f : keys.lrfs) {
    CHECK(f.valid(1e-6));
    CHECK(f.axes.determinant() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("load_lrf_file rejects unknown keypoint indices and missing rows") {
  Rng rng(136);
  const PointCloud cloud(random_points(rng, 8));
  KeypointSet keys;
  keys.cloud = &cloud;
  keys.indices = {0, 1};

  const auto bad_index = temp_file("reg3d_badindex.lrf");
  write_file(bad_index, "7 1 0 0 0 1 0 0 0 1\n");
  CHECK_THROWS_AS(load_lrf_file(bad_index.string(), keys), IndexOutOfRange);

  const auto missing = temp_file("reg3d_missing.lrf");
  write_file(missing, "0 1 0 0 0 1 0 0 0 1\n");
  CHECK_THROWS_AS(load_lrf_file(missing.string(), keys), ParseError);
}

TEST_CASE("LRA file roundtrip and normalization") {
  Rng rng(137);
  const PointCloud cloud(random_points(rng, 10));
  KeypointSet keys;
  keys.cloud = &cloud;
  keys.indices = {1, 4, 9};
  for (int i = 0; i < 3; ++i) keys.lras.push_back(Lra{random_unit_vector(rng)});

  const auto path = temp_file("reg3d_axes.lra");
  save_lra_file(path.string(), keys);
  KeypointSet loaded;
  loaded.cloud = &cloud;
  loaded.indices = keys.indices;
  load_lra_file(path.string(), loaded);
  REQUIRE(loaded.has_lra());
  for (std::size_t i = 0; i < 3; ++i)
    CHECK((loaded.lras[i].axis - keys.lras[i].axis).norm() < 1e-15);

  // Unnormalized rows are renormalized on load.
  const auto raw = temp_file("reg3d_rawaxes.lra");
  write_file(raw, "1 0 0 4\n4 3 0 0\n9 0 5 0\n");
  KeypointSet scaled;
  scaled.cloud = &cloud;
  scaled.indices = keys.indices;
  load_lra_file(raw.string(), scaled);
  for (const Lra& a : scaled.lras) CHECK(a.valid(1e-12));
}
