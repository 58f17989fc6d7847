#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "reg3d/point_cloud.hpp"
#include "reg3d/rng.hpp"
#include "test_util.hpp"

using namespace reg3d;
using namespace reg3d::testutil;

TEST_CASE("load_ply parses a small ASCII file in order") {
  const auto path = temp_file("reg3d_ascii.ply");
  write_file(path,
             "ply\n"
             "format ascii 1.0\n"
             "comment three points\n"
             "element vertex 3\n"
             "property float x\nproperty float y\nproperty float z\n"
             "end_header\n"
             "0 0 0\n"
             "1 2 3\n"
             "-1 0.5 2.25\n");
  const PointCloud cloud = load_ply(path.string());
  REQUIRE(cloud.size() == 3);
  CHECK((cloud[0] - Vector3(0, 0, 0)).norm() == 0.0);
  CHECK((cloud[1] - Vector3(1, 2, 3)).norm() == 0.0);
  CHECK((cloud[2] - Vector3(-1, 0.5, 2.25)).norm() == 0.0);
  CHECK_FALSE(cloud.has_normals());
}

TEST_CASE("load_ply reads normals when present") {
  const auto path = temp_file("reg3d_normals.ply");
  write_file(path,
             "ply\n"
             "format ascii 1.0\n"
             "element vertex 2\n"
             "property float x\nproperty float y\nproperty float z\n"
             "property float nx\nproperty float ny\nproperty float nz\n"
             "end_header\n"
             "0 0 0 0 0 1\n"
             "1 1 1 1 0 0\n");
  const PointCloud cloud = load_ply(path.string());
  REQUIRE(cloud.has_normals());
  CHECK((cloud.normals()[0] - Vector3(0, 0, 1)).norm() == 0.0);
  CHECK((cloud.normals()[1] - Vector3(1, 0, 0)).norm() == 0.0);
}

TEST_CASE("load_ply roundtrips through the binary writer") {
  Rng rng(31);
  PointCloud cloud(random_points(rng, 64, 2.0));
  const auto path = temp_file("reg3d_bin.ply");
  save_ply(path.string(), cloud, /*binary=*/true);
  const PointCloud loaded = load_ply(path.string());
  REQUIRE(loaded.size() == cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i)
    CHECK((loaded[i] - cloud[i]).norm() == 0.0);
}

TEST_CASE("load_ply rejects truncated binary data without returning a partial cloud") {
  Rng rng(32);
  PointCloud cloud(random_points(rng, 16));
  const auto path = temp_file("reg3d_trunc.ply");
  save_ply(path.string(), cloud, /*binary=*/true);
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 11);
  CHECK_THROWS_AS(load_ply(path.string()), ParseError);
}

TEST_CASE("load_ply rejects big-endian files") {
  const auto path = temp_file("reg3d_be.ply");
  write_file(path,
             "ply\nformat binary_big_endian 1.0\nelement vertex 1\n"
             "property float x\nproperty float y\nproperty float z\nend_header\n");
  CHECK_THROWS_AS(load_ply(path.string()), UnsupportedFormat);
}

TEST_CASE("load_ply reports malformed ASCII rows with a line number") {
  const auto path = temp_file("reg3d_badrow.ply");
  write_file(path,
             "ply\nformat ascii 1.0\nelement vertex 2\n"
             "property float x\nproperty float y\nproperty float z\nend_header\n"
             "0 0 0\n"
             "1 nope 3\n");
  try {
    load_ply(path.string());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 9") != std::string::npos);
  }
}

TEST_CASE("mesh_resolution on regular grids and pairs") {
  std::vector<Vector3> grid;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) grid.emplace_back(x, y, 0.0);
  CHECK(PointCloud(grid).mesh_resolution() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(PointCloud({Vector3(0, 0, 0), Vector3(2, 0, 0)}).mesh_resolution() ==
        doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(PointCloud({Vector3(0, 0, 0)}).mesh_resolution(), DegenerateInput);
}

TEST_CASE("mesh_resolution equals the brute-force mean NN distance") {
  Rng rng(33);
  const std::vector<Vector3> pts = random_points(rng, 100);
  const PointCloud cloud(pts);
  double sum = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != i) best = std::min(best, (pts[i] - pts[j]).norm());
    sum += best;
  }
  CHECK(std::abs(cloud.mesh_resolution() - sum / 100.0) < 1e-12);
}

TEST_CASE("mesh_resolution is invariant under rigid motion") {
  Rng rng(34);
  const PointCloud cloud(random_points(rng, 200));
  RigidTransform t;
  t.rotation = uniform_rotation(rng);
  t.translation = random_point(rng, 10.0);
  const PointCloud moved = transformed(cloud, t);
  CHECK(std::abs(cloud.mesh_resolution() - moved.mesh_resolution()) < 1e-9);
}

TEST_CASE("nearest_neighbor matches a linear scan on random queries") {
  Rng rng(35);
  const std::vector<Vector3> pts = random_points(rng, 1000);
  const PointCloud cloud(pts);
  for (int q = 0; q < 1000; ++q) {
    const Vector3 query = random_point(rng, 1.2);
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double d2 = (pts[j] - query).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = static_cast<int>(j);
      }
    }
    const auto [idx, dist] = nearest_neighbor(cloud, query);
    CHECK(idx == best);
    CHECK(dist == doctest::Approx(std::sqrt(best_d2)).epsilon(1e-14));
  }
}

TEST_CASE("nearest_neighbor returns the queried point itself at distance zero") {
  Rng rng(36);
  const std::vector<Vector3> pts = random_points(rng, 50);
  const PointCloud cloud(pts);
  const auto [idx, dist] = nearest_neighbor(cloud, pts[17]);
  CHECK(idx == 17);
  CHECK(dist == 0.0);
}

TEST_CASE("nearest_neighbor breaks exact ties by lowest index") {
  // Two points symmetric about the origin; the query sits exactly between.
  const PointCloud cloud({Vector3(1, 0, 0), Vector3(-1, 0, 0), Vector3(0, 5, 0)});
  const auto [idx, dist] = nearest_neighbor(cloud, Vector3(0, 0, 0));
  CHECK(idx == 0);
  CHECK(dist == doctest::Approx(1.0));
}

TEST_CASE("subsample basics") {
  Rng rng(37);
  const PointCloud cloud(random_points(rng, 20));

  const PointCloud all = subsample(cloud, 100, 7);
  CHECK(all.size() == 20);

  const PointCloud one = subsample(cloud, 1, 7);
  REQUIRE(one.size() == 1);
  bool member = false;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if ((cloud[i] - one[0]).norm() == 0.0) member = true;
  CHECK(member);
}

TEST_CASE("subsample is deterministic per seed and seed-sensitive") {
  Rng rng(38);
  const PointCloud cloud(random_points(rng, 10000));
  const PointCloud a = subsample(cloud, 500, 99);
  const PointCloud b = subsample(cloud, 500, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).norm() == 0.0);

  const PointCloud c = subsample(cloud, 500, 100);
  bool differs = false;
  for (std::size_t i = 0; i < a.size() && !differs; ++i)
    if ((a[i] - c[i]).norm() != 0.0) differs = true;
  CHECK(differs);
}

TEST_CASE("subsample draws without replacement") {
  Rng rng(39);
  const PointCloud cloud(random_points(rng, 64));
  const PointCloud s = subsample(cloud, 64, 5);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      CHECK((s[i] - s[j]).norm() > 0.0);
}

TEST_CASE("overlap_ratio endpoints") {
  Rng rng(40);
  const PointCloud cloud(random_points(rng, 300));
  const double tol = 2.0 * cloud.mesh_resolution();
  CHECK(overlap_ratio(cloud, cloud, RigidTransform::identity(), tol) == doctest::Approx(1.0));

  RigidTransform gt;
  gt.rotation = uniform_rotation(rng);
  gt.translation = random_point(rng, 3.0);
  const PointCloud moved = transformed(cloud, gt);
  CHECK(overlap_ratio(cloud, moved, gt, tol) == doctest::Approx(1.0));

  std::vector<Vector3> far;
  for (const Vector3& p : cloud.points()) far.push_back(p + Vector3(1000, 0, 0));
  CHECK(overlap_ratio(cloud, PointCloud(far), RigidTransform::identity(), tol) == 0.0);
}

TEST_CASE("overlap_ratio on a constructed half-overlap pair") {
  // Target keeps the first half of the source grid and displaces the rest;
  // the tolerance is far below the displacement.
  std::vector<Vector3> source, target;
  for (int i = 0; i < 100; ++i) {
    source.emplace_back(static_cast<double>(i), 0.0, 0.0);
    target.emplace_back(static_cast<double>(i), i < 50 ? 0.0 : 500.0, 0.0);
  }
  const double ratio =
      overlap_ratio(PointCloud(source), PointCloud(target), RigidTransform::identity(), 0.1);
  CHECK(ratio == doctest::Approx(0.5));
}

TEST_CASE("overlap_ratio normalizes by the smaller cloud") {
  Rng rng(41);
  const std::vector<Vector3> pts = random_points(rng, 400);
  const PointCloud big(pts);
  const PointCloud small(std::vector<Vector3>(pts.begin(), pts.begin() + 100));
  const double tol = 2.0 * big.mesh_resolution();
  // Every small point appears in big, so the ratio is 1 either way around.
  CHECK(overlap_ratio(small, big, RigidTransform::identity(), tol) == doctest::Approx(1.0));
  CHECK(overlap_ratio(big, small, RigidTransform::identity(), tol) == doctest::Approx(1.0));
}

TEST_CASE("KeypointSet validation") {
  Rng rng(42);
  const PointCloud cloud(random_points(rng, 10));
  KeypointSet keys;
  keys.cloud = &cloud;
  keys.indices = {0, 3, 7};
  keys.validate();

  keys.indices = {0, 3, 3};
  CHECK_THROWS_AS(keys.validate(), DegenerateInput);
  keys.indices = {0, 3, 12};
  CHECK_THROWS_AS(keys.validate(), IndexOutOfRange);
}
