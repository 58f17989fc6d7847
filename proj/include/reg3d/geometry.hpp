#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "reg3d/errors.hpp"

namespace reg3d {

template <typename Scalar> using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar> using Mat3T = Eigen::Matrix<Scalar, 3, 3>;

using Vector3 = Vec3T<double>;
using Matrix3 = Mat3T<double>;

template <typename Scalar>
constexpr Scalar deg2rad(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad2deg(Scalar rad) {
  return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

/// True if `r` is orthonormal with determinant +1 within `tol`.
template <typename Derived>
bool is_rotation(const Eigen::MatrixBase<Derived>& r,
                 typename Derived::Scalar tol = typename Derived::Scalar(1e-9)) {
  using Scalar = typename Derived::Scalar;
  Mat3T<Scalar> gram = r.transpose() * r - Mat3T<Scalar>::Identity();
  return gram.cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - Scalar(1)) <= tol;
}

/// Nearest rotation matrix in the Frobenius sense (SVD projection with the
/// determinant forced to +1).
template <typename Derived>
Mat3T<typename Derived::Scalar> nearest_rotation(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::JacobiSVD<Mat3T<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3T<Scalar> u = svd.matrixU();
  Mat3T<Scalar> v = svd.matrixV();
  Vec3T<Scalar> s = Vec3T<Scalar>::Ones();
  if ((u * v.transpose()).determinant() < Scalar(0)) s.z() = Scalar(-1);
  return u * s.asDiagonal() * v.transpose();
}

/// Rigid motion q = R*p + t.
template <typename Scalar>
struct RigidTransformT {
  Mat3T<Scalar> rotation = Mat3T<Scalar>::Identity();
  Vec3T<Scalar> translation = Vec3T<Scalar>::Zero();

  static RigidTransformT identity() { return {}; }
};

using RigidTransform = RigidTransformT<double>;

template <typename Scalar, typename Derived>
Vec3T<Scalar> apply(const RigidTransformT<Scalar>& t, const Eigen::MatrixBase<Derived>& p) {
  return t.rotation * p + t.translation;
}

/// compose(a, b) applies b first, then a.
template <typename Scalar>
RigidTransformT<Scalar> compose(const RigidTransformT<Scalar>& a, const RigidTransformT<Scalar>& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

template <typename Scalar>
RigidTransformT<Scalar> invert(const RigidTransformT<Scalar>& t) {
  Mat3T<Scalar> rt = t.rotation.transpose();
  return {rt, Vec3T<Scalar>(-(rt * t.translation))};
}

/// Local reference frame: rows of `axes` are the x, y, z axes in world
/// coordinates, so `axes * v` expresses a world vector in the local frame.
template <typename Scalar>
struct LrfT {
  Mat3T<Scalar> axes = Mat3T<Scalar>::Identity();

  Vec3T<Scalar> x() const { return axes.row(0); }
  Vec3T<Scalar> y() const { return axes.row(1); }
  Vec3T<Scalar> z() const { return axes.row(2); }

  /// Rows unit and mutually orthogonal, x cross y = z, all within tol.
  bool valid(Scalar tol = Scalar(1e-6)) const {
    Mat3T<Scalar> gram = axes * axes.transpose() - Mat3T<Scalar>::Identity();
    if (gram.cwiseAbs().maxCoeff() > tol) return false;
    return (x().cross(y()) - z()).norm() <= tol;
  }

  static LrfT from_rows(const Vec3T<Scalar>& x, const Vec3T<Scalar>& y, const Vec3T<Scalar>& z) {
    LrfT f;
    f.axes.row(0) = x;
    f.axes.row(1) = y;
    f.axes.row(2) = z;
    return f;
  }
};

using Lrf = LrfT<double>;

/// Local reference axis: a single oriented unit vector.
template <typename Scalar>
struct LraT {
  Vec3T<Scalar> axis = Vec3T<Scalar>::UnitZ();

  bool valid(Scalar tol = Scalar(1e-6)) const {
    return std::abs(axis.norm() - Scalar(1)) <= tol;
  }
};

using Lra = LraT<double>;

/// Least-squares rigid fit minimizing sum ||R*model_i + t - scene_i||^2.
///
/// Cross-covariance SVD with the reflection corrected through the sign
/// attached to the smallest singular value. Throws DegenerateInput for fewer
/// than 3 pairs or when the centered model points are rank-deficient
/// (collinear or coincident).
template <typename Scalar>
RigidTransformT<Scalar> fit_rigid(std::span<const Vec3T<Scalar>> model,
                                  std::span<const Vec3T<Scalar>> scene) {
  if (model.size() != scene.size())
    throw DimensionMismatch("fit_rigid: model/scene size mismatch");
  const std::size_t n = model.size();
  if (n < 3) throw DegenerateInput("fit_rigid: need at least 3 pairs");

  Vec3T<Scalar> cm = Vec3T<Scalar>::Zero();
  Vec3T<Scalar> cs = Vec3T<Scalar>::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    cm += model[i];
    cs += scene[i];
  }
  cm /= Scalar(n);
  cs /= Scalar(n);

  Mat3T<Scalar> cross = Mat3T<Scalar>::Zero();   // sum of p~ q~^T
  Mat3T<Scalar> scatter = Mat3T<Scalar>::Zero(); // sum of p~ p~^T
  for (std::size_t i = 0; i < n; ++i) {
    Vec3T<Scalar> p = model[i] - cm;
    Vec3T<Scalar> q = scene[i] - cs;
    cross += p * q.transpose();
    scatter += p * p.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Mat3T<Scalar>> eig(scatter);
  const Vec3T<Scalar> ev = eig.eigenvalues();  // ascending
  if (!(ev(2) > Scalar(0)) || ev(1) <= Scalar(1e-12) * ev(2))
    throw DegenerateInput("fit_rigid: centered model points are rank-deficient");

  Eigen::JacobiSVD<Mat3T<Scalar>> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3T<Scalar> u = svd.matrixU();
  Mat3T<Scalar> v = svd.matrixV();
  Vec3T<Scalar> d = Vec3T<Scalar>::Ones();
  if ((v * u.transpose()).determinant() < Scalar(0)) d.z() = Scalar(-1);

  RigidTransformT<Scalar> t;
  t.rotation = v * d.asDiagonal() * u.transpose();
  t.translation = cs - t.rotation * cm;
  return t;
}

inline RigidTransform fit_rigid(const std::vector<Vector3>& model,
                                const std::vector<Vector3>& scene) {
  return fit_rigid<double>(std::span<const Vector3>(model), std::span<const Vector3>(scene));
}

/// Pose hypothesis from one correspondence with full local frames:
/// R = LRF(q)^T * LRF(p), t = q - R*p. Maps p exactly onto q and the p-frame
/// axes onto the q-frame axes.
template <typename Scalar, typename DP, typename DQ>
RigidTransformT<Scalar> transform_from_lrf_pair(const Eigen::MatrixBase<DP>& p,
                                                const Eigen::MatrixBase<DQ>& q,
                                                const LrfT<Scalar>& lrf_p,
                                                const LrfT<Scalar>& lrf_q) {
  RigidTransformT<Scalar> t;
  t.rotation = lrf_q.axes.transpose() * lrf_p.axes;
  t.translation = q - t.rotation * p;
  return t;
}

/// Orthonormal frame with z = axis and x = baseline orthogonalized against
/// the axis. Throws DegenerateInput when the baseline is (near-)parallel to
/// the axis or has (near-)zero length.
template <typename DA, typename DB>
Mat3T<typename DA::Scalar> frame_from_axis_baseline(const Eigen::MatrixBase<DA>& axis_in,
                                                    const Eigen::MatrixBase<DB>& baseline_in) {
  using Scalar = typename DA::Scalar;
  const Vec3T<Scalar> axis = axis_in;
  const Vec3T<Scalar> baseline = baseline_in;
  const Scalar blen = baseline.norm();
  if (blen <= Scalar(1e-9))
    throw DegenerateInput("frame_from_axis_baseline: zero-length baseline");
  Vec3T<Scalar> z = axis.normalized();
  Vec3T<Scalar> x = baseline - baseline.dot(z) * z;
  // |x| / |baseline| = sin(angle between baseline and axis)
  if (x.norm() <= Scalar(1e-4) * blen)
    throw DegenerateInput("frame_from_axis_baseline: baseline parallel to axis");
  x.normalize();
  Vec3T<Scalar> y = z.cross(x);
  Mat3T<Scalar> f;
  f.row(0) = x;
  f.row(1) = y;
  f.row(2) = z;
  return f;
}

/// Pose hypothesis from two correspondences carrying a local axis at the
/// first point of each side. Builds a frame per side from (axis, baseline to
/// the second point) and anchors the LRF-pair construction at the first
/// correspondence, so p_i maps exactly onto q_i.
template <typename Scalar, typename DPi, typename DQi, typename DPj, typename DQj>
RigidTransformT<Scalar> transform_from_two_lra(const Eigen::MatrixBase<DPi>& p_i,
                                               const Eigen::MatrixBase<DQi>& q_i,
                                               const Eigen::MatrixBase<DPj>& p_j,
                                               const Eigen::MatrixBase<DQj>& q_j,
                                               const LraT<Scalar>& lra_pi,
                                               const LraT<Scalar>& lra_qi) {
  LrfT<Scalar> fp{frame_from_axis_baseline(lra_pi.axis, p_j - p_i)};
  LrfT<Scalar> fq{frame_from_axis_baseline(lra_qi.axis, q_j - q_i)};
  return transform_from_lrf_pair(p_i, q_i, fp, fq);
}

/// Rotation error in degrees: arccos((trace(R_gt * R_e^-1) - 1) / 2), with
/// the arccos argument clamped to [-1, 1].
template <typename DerivedE, typename DerivedG>
typename DerivedE::Scalar rotation_error(const Eigen::MatrixBase<DerivedE>& r_e,
                                         const Eigen::MatrixBase<DerivedG>& r_gt) {
  using Scalar = typename DerivedE::Scalar;
  const Scalar arg = ((r_gt * r_e.transpose()).trace() - Scalar(1)) / Scalar(2);
  return rad2deg(std::acos(std::clamp(arg, Scalar(-1), Scalar(1))));
}

/// Translation error in mr units with the rotation-coupling compensation
/// term (R_gt - R_e) * m_c applied about the model center m_c.
template <typename DTe, typename DTg, typename DRe, typename DRg, typename DMc>
typename DTe::Scalar translation_error(const Eigen::MatrixBase<DTe>& t_e,
                                       const Eigen::MatrixBase<DTg>& t_gt,
                                       const Eigen::MatrixBase<DRe>& r_e,
                                       const Eigen::MatrixBase<DRg>& r_gt,
                                       const Eigen::MatrixBase<DMc>& m_c,
                                       typename DTe::Scalar mr) {
  using Scalar = typename DTe::Scalar;
  if (!(mr > Scalar(0))) throw InvalidMr("translation_error: mr must be positive");
  return (t_gt - t_e + r_gt * m_c - r_e * m_c).norm() / mr;
}

/// Intrinsic Z-Y-X Euler angles, i.e. R = Rz(yaw) * Ry(pitch) * Rx(roll).
template <typename Scalar>
struct EulerZYX {
  Scalar yaw = 0;
  Scalar pitch = 0;
  Scalar roll = 0;
  bool gimbal_lock = false;

  Vec3T<Scalar> vec() const { return {yaw, pitch, roll}; }
};

template <typename Scalar>
Mat3T<Scalar> rotation_from_euler(Scalar yaw, Scalar pitch, Scalar roll) {
  using AA = Eigen::AngleAxis<Scalar>;
  return (AA(yaw, Vec3T<Scalar>::UnitZ()) * AA(pitch, Vec3T<Scalar>::UnitY()) *
          AA(roll, Vec3T<Scalar>::UnitX()))
      .toRotationMatrix();
}

/// Decomposes a rotation into intrinsic Z-Y-X angles. At gimbal lock
/// (|R(2,0)| > 1 - 1e-9) the roll is fixed to zero and the flag is set.
template <typename Derived>
EulerZYX<typename Derived::Scalar> euler_from_rotation(const Eigen::MatrixBase<Derived>& r) {
  using Scalar = typename Derived::Scalar;
  EulerZYX<Scalar> e;
  const Scalar sp = std::clamp(-r(2, 0), Scalar(-1), Scalar(1));
  if (std::abs(r(2, 0)) > Scalar(1) - Scalar(1e-9)) {
    e.gimbal_lock = true;
    e.pitch = sp > Scalar(0) ? std::numbers::pi_v<Scalar> / 2 : -std::numbers::pi_v<Scalar> / 2;
    e.roll = Scalar(0);
    e.yaw = std::atan2(-r(0, 1), r(1, 1));
  } else {
    e.pitch = std::asin(sp);
    e.yaw = std::atan2(r(1, 0), r(0, 0));
    e.roll = std::atan2(r(2, 1), r(2, 2));
  }
  return e;
}

/// Uniform random rotation (Shoemake's quaternion method). Works with any
/// generator exposing uniform01().
template <typename Rng>
Matrix3 uniform_rotation(Rng& rng) {
  const double u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  const double u3 = rng.uniform01();
  const double two_pi = 2.0 * std::numbers::pi;
  Eigen::Quaterniond q(std::sqrt(u1) * std::cos(two_pi * u3),
                       std::sqrt(1.0 - u1) * std::sin(two_pi * u2),
                       std::sqrt(1.0 - u1) * std::cos(two_pi * u2),
                       std::sqrt(u1) * std::sin(two_pi * u3));
  return q.toRotationMatrix();
}

template <typename Rng>
Vector3 random_unit_vector(Rng& rng) {
  for (;;) {
    Vector3 v(rng.normal(), rng.normal(), rng.normal());
    const double n = v.norm();
    if (n > 1e-6) return v / n;
  }
}

/// Rotates `r` by `angle_rad` about a random axis; used to inject controlled
/// frame noise in synthetic studies.
template <typename Rng>
Matrix3 perturb_rotation(const Matrix3& r, double angle_rad, Rng& rng) {
  if (angle_rad == 0.0) return r;
  return Eigen::AngleAxisd(angle_rad, random_unit_vector(rng)).toRotationMatrix() * r;
}

}  // namespace reg3d
