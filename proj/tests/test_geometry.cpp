#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "reg3d/geometry.hpp"
#include "reg3d/rng.hpp"
#include "test_util.hpp"

using namespace reg3d;
using namespace reg3d::testutil;

namespace {

RigidTransform random_transform(Rng& rng, double t_scale = 2.0) {
  RigidTransform t;
  t.rotation = uniform_rotation(rng);
  t.translation = random_point(rng, t_scale);
  return t;
}

}  // namespace

TEST_CASE("fit_rigid recovers a known transform exactly") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const RigidTransform gt = random_transform(rng);
    const std::vector<Vector3> model = random_points(rng, 10);
    std::vector<Vector3> scene(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) scene[i] = apply(gt, model[i]);

    const RigidTransform est = fit_rigid(model, scene);
    CHECK(rotation_angle_deg(est.rotation, gt.rotation) < 1e-6);
    CHECK((est.translation - gt.translation).norm() < 1e-9);
  }
}

TEST_CASE("fit_rigid on identical point sets is the identity") {
  Rng rng(12);
  const std::vector<Vector3> pts = random_points(rng, 8);
  const RigidTransform est = fit_rigid(pts, pts);
  CHECK((est.rotation - Matrix3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(est.translation.norm() < 1e-12);
}

TEST_CASE("fit_rigid: 3 noiseless pairs leave zero residuals") {
  RigidTransform gt;
  gt.rotation = rotation_from_euler(deg2rad(30.0), 0.0, 0.0);
  gt.translation = Vector3(1, 2, 3);
  const std::vector<Vector3> model = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0.5}};
  std::vector<Vector3> scene(3);
  for (int i = 0; i < 3; ++i) scene[i] = apply(gt, model[i]);

  const RigidTransform est = fit_rigid(model, scene);
  for (int i = 0; i < 3; ++i)
    CHECK((apply(est, model[i]) - scene[i]).norm() < 1e-12);
}

TEST_CASE("fit_rigid output satisfies rotation invariants, including under noise and reflection-prone inputs") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const RigidTransform gt = random_transform(rng);
    std::vector<Vector3> model = random_points(rng, 3 + rng.index(48));
    std::vector<Vector3> scene(model.size());
    for (std::size_t i = 0; i < model.size(); ++i)
      scene[i] = apply(gt, model[i]) + random_point(rng, 0.3);  // heavy noise
    const RigidTransform est = fit_rigid(model, scene);
    CHECK(is_rotation(est.rotation, 1e-9));
  }
  // Mirrored scene drives the unconstrained solution toward a reflection.
  std::vector<Vector3> model = random_points(rng, 12);
  std::vector<Vector3> mirrored(model.size());
  for (std::size_t i = 0; i < model.size(); ++i)
    mirrored[i] = Vector3(-model[i].x(), model[i].y(), model[i].z());
  const RigidTransform est = fit_rigid(model, mirrored);
  CHECK(is_rotation(est.rotation, 1e-9));
  CHECK(est.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fit_rigid noiseless recovery across sizes 3..50") {
  Rng rng(14);
  for (std::size_t n = 3; n <= 50; ++n) {
    const RigidTransform gt = random_transform(rng);
    const std::vector<Vector3> model = random_points(rng, n);
    std::vector<Vector3> scene(n);
    for (std::size_t i = 0; i < n; ++i) scene[i] = apply(gt, model[i]);
    const RigidTransform est = fit_rigid(model, scene);
    CHECK(rotation_angle_deg(est.rotation, gt.rotation) < 1e-6);
  }
}

TEST_CASE("fit_rigid rejects degenerate input") {
  const std::vector<Vector3> two = {{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(fit_rigid(two, two), DegenerateInput);

  std::vector<Vector3> collinear, target;
  for (int i = 0; i < 5; ++i) {
    collinear.emplace_back(i, 0.0, 0.0);
    target.emplace_back(i, 1.0, 0.0);
  }
  CHECK_THROWS_AS(fit_rigid(collinear, target), DegenerateInput);
}

TEST_CASE("transform_from_lrf_pair with identity frames and equal points is the identity") {
  const Vector3 p(0.3, -0.2, 0.9);
  const RigidTransform t = transform_from_lrf_pair(p, p, Lrf{}, Lrf{});
  CHECK((t.rotation - Matrix3::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(t.translation.norm() < 1e-15);
}

TEST_CASE("transform_from_lrf_pair reproduces a pure frame rotation") {
  const Matrix3 rz90 = rotation_from_euler(deg2rad(90.0), 0.0, 0.0);
  const RigidTransform t =
      transform_from_lrf_pair(Vector3::Zero(), Vector3::Zero(), Lrf{}, frame_of(rz90));
  CHECK((t.rotation * Vector3(1, 0, 0) - Vector3(0, 1, 0)).norm() < 1e-12);
  CHECK(t.translation.norm() < 1e-12);
}

TEST_CASE("transform_from_lrf_pair maps keypoint and frame axes exactly") {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector3 p = random_point(rng);
    const Vector3 q = random_point(rng);
    const Lrf fp = frame_of(uniform_rotation(rng));
    const Lrf fq = frame_of(uniform_rotation(rng));
    const RigidTransform t = transform_from_lrf_pair(p, q, fp, fq);
    CHECK((apply(t, p) - q).norm() < 1e-12);
    for (int r = 0; r < 3; ++r) {
      const Vector3 axis_p = fp.axes.row(r);
      const Vector3 axis_q = fq.axes.row(r);
      CHECK((t.rotation * axis_p - axis_q).norm() < 1e-12);
    }
  }
}

TEST_CASE("transform_from_two_lra: identical sides give the identity") {
  const Vector3 pi(0, 0, 0), pj(1, 0.4, 0);
  const Lra axis{Vector3::UnitZ()};
  const RigidTransform t = transform_from_two_lra(pi, pi, pj, pj, axis, axis);
  CHECK((t.rotation - Matrix3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(t.translation.norm() < 1e-12);
}

TEST_CASE("transform_from_two_lra recovers a random rotation") {
  Rng rng(16);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix3 r0 = uniform_rotation(rng);
    const Vector3 t0 = random_point(rng);
    const RigidTransform gt{r0, t0};
    const Vector3 pi = random_point(rng);
    Vector3 pj;
    Lra lra_p;
    do {  // keep the baseline off the axis
      pj = random_point(rng);
      lra_p.axis = random_unit_vector(rng);
    } while ((pj - pi).norm() < 0.1 ||
             std::abs(lra_p.axis.dot((pj - pi).normalized())) > 0.95);
    const Lra lra_q{r0 * lra_p.axis};
    const RigidTransform est =
        transform_from_two_lra(pi, apply(gt, pi), pj, apply(gt, pj), lra_p, lra_q);
    CHECK(rotation_angle_deg(est.rotation, r0) < 1e-9);
    CHECK((apply(est, pi) - apply(gt, pi)).norm() < 1e-12);
  }
}

TEST_CASE("transform_from_two_lra rejects a baseline parallel to the axis") {
  const Vector3 pi(0, 0, 0), pj(0, 0, 2);
  const Lra axis{Vector3::UnitZ()};
  CHECK_THROWS_AS(transform_from_two_lra(pi, pi, pj, pj, axis, axis), DegenerateInput);
  CHECK_THROWS_AS(transform_from_two_lra(pi, pi, pi, pi, axis, axis), DegenerateInput);
}

TEST_CASE("rotation_error basics") {
  Rng rng(17);
  const Matrix3 r = uniform_rotation(rng);
  CHECK(rotation_error(r, r) == doctest::Approx(0.0).epsilon(1e-12));

  const Matrix3 rz5 = rotation_from_euler(deg2rad(5.0), 0.0, 0.0);
  CHECK(rotation_error(rz5, Matrix3::Identity()) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("rotation_error matches the quaternion geodesic oracle") {
  Rng rng(18);
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix3 a = uniform_rotation(rng);
    const Matrix3 b = uniform_rotation(rng);
    const double err = rotation_error(a, b);
    CHECK(std::abs(err - quaternion_angle_deg(a, b)) < 1e-9);
    CHECK(err >= 0.0);
    CHECK(err <= 180.0);
    CHECK(std::abs(err - rotation_error(b, a)) < 1e-9);
  }
}

TEST_CASE("rotation_error of a relative z-rotation equals its angle") {
  Rng rng(19);
  const Matrix3 a = uniform_rotation(rng);
  for (double deg = 10.0; deg < 180.0; deg += 10.0) {
    const Matrix3 b = a * rotation_from_euler(deg2rad(deg), 0.0, 0.0);
    CHECK(std::abs(rotation_error(a, b) - deg) < 1e-9);
  }
}

TEST_CASE("translation_error basics") {
  Rng rng(20);
  const Matrix3 r = uniform_rotation(rng);
  const Vector3 t = random_point(rng);
  const Vector3 mc = random_point(rng);
  CHECK(translation_error(t, t, r, r, mc, 0.7) == doctest::Approx(0.0));

  const double mr = 0.25;
  const Vector3 te(0, 0, 0);
  const Vector3 tg(3 * mr, 4 * mr, 0);
  CHECK(translation_error(te, tg, Matrix3::Identity(), Matrix3::Identity(), mc, mr) ==
        doctest::Approx(5.0).epsilon(1e-12));

  CHECK_THROWS_AS(translation_error(te, tg, r, r, mc, 0.0), InvalidMr);
  CHECK_THROWS_AS(translation_error(te, tg, r, r, mc, -1.0), InvalidMr);
}

TEST_CASE("translation_error applies the rotation compensation term") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix3 r_gt = uniform_rotation(rng);
    const Matrix3 r_e = uniform_rotation(rng);
    const Vector3 t_gt = random_point(rng);
    const Vector3 t_e = random_point(rng);
    const Vector3 mc = random_point(rng);
    const double mr = rng.uniform(0.01, 2.0);
    // Independent arithmetic: expand the compensated difference directly.
    const Vector3 diff = (t_gt - t_e) + (r_gt * mc - r_e * mc);
    const double expected =
        std::sqrt(diff.x() * diff.x() + diff.y() * diff.y() + diff.z() * diff.z()) / mr;
    CHECK(translation_error(t_e, t_gt, r_e, r_gt, mc, mr) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("euler decomposition basics") {
  const EulerZYX<double> id = euler_from_rotation(Matrix3::Identity());
  CHECK(id.yaw == doctest::Approx(0.0));
  CHECK(id.pitch == doctest::Approx(0.0));
  CHECK(id.roll == doctest::Approx(0.0));
  CHECK_FALSE(id.gimbal_lock);

  const EulerZYX<double> z90 = euler_from_rotation(rotation_from_euler(deg2rad(90.0), 0.0, 0.0));
  CHECK(z90.yaw == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
  CHECK(z90.pitch == doctest::Approx(0.0));
  CHECK(z90.roll == doctest::Approx(0.0));
}

TEST_CASE("euler roundtrip identity away from gimbal lock") {
  Rng rng(22);
  int tested = 0;
  while (tested < 1000) {
    const Matrix3 r = uniform_rotation(rng);
    const EulerZYX<double> e = euler_from_rotation(r);
    if (std::abs(rad2deg(e.pitch)) >= 89.0) continue;
    ++tested;
    const Matrix3 back = rotation_from_euler(e.yaw, e.pitch, e.roll);
    CHECK((back - r).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("euler flags gimbal lock and fixes roll to zero") {
  const Matrix3 lock = rotation_from_euler(deg2rad(30.0), deg2rad(90.0), deg2rad(45.0));
  const EulerZYX<double> e = euler_from_rotation(lock);
  CHECK(e.gimbal_lock);
  CHECK(e.roll == 0.0);
  // The recomposed rotation must still match: only yaw-roll coupling exists.
  const Matrix3 back = rotation_from_euler(e.yaw, e.pitch, e.roll);
  CHECK((back - lock).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("apply/compose/invert form a consistent group") {
  Rng rng(23);
  const Vector3 p = random_point(rng);
  CHECK((apply(RigidTransform::identity(), p) - p).norm() == 0.0);

  for (int trial = 0; trial < 100; ++trial) {
    const RigidTransform t = random_transform(rng);
    const Vector3 x = random_point(rng);
    CHECK((apply(compose(t, invert(t)), x) - x).norm() < 1e-9);
    const RigidTransform a = random_transform(rng);
    const RigidTransform b = random_transform(rng);
    CHECK((apply(compose(a, b), x) - apply(a, apply(b, x))).norm() < 1e-9);
  }
}

TEST_CASE("nearest_rotation projects onto a proper rotation") {
  Rng rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix3 m = uniform_rotation(rng);
    m += 0.05 * Matrix3::Random();
    const Matrix3 r = nearest_rotation(m);
    CHECK(is_rotation(r, 1e-9));
  }
  // A reflection must flip to determinant +1.
  Matrix3 mirror = Matrix3::Identity();
  mirror(0, 0) = -1.0;
  CHECK(nearest_rotation(mirror).determinant() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Lrf validity checks orthonormality and handedness") {
  CHECK(Lrf{}.valid());
  Lrf bad;
  bad.axes.row(0) = Vector3(1, 0, 0);
  bad.axes.row(1) = Vector3(0, 0, 1);  // left-handed
  bad.axes.row(2) = Vector3(0, 1, 0);
  CHECK_FALSE(bad.valid());
  Lrf scaled;
  scaled.axes *= 1.001;
  CHECK_FALSE(scaled.valid());
}
