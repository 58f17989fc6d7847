#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reg3d/correspondence.hpp"
#include "reg3d/point_cloud.hpp"

namespace reg3d {

/// Shared input of all estimators: the correspondence set, the verification
/// subsamples used by the confidence-verification family, the mesh
/// resolution all tolerances scale with, and the iteration budget.
struct EstimationContext {
  CorrespondenceSet correspondences;
  PointCloud model_sub;  // may stay empty for the maximum-consistency family
  PointCloud scene_sub;
  double mr = 0.0;
  std::uint64_t rng_seed = 0;
  int max_iterations = 300;
};

struct RansacParams {
  double inlier_tol_mr = 3.0;  // t
  int min_consensus = 5;       // k
};

struct GccParams {
  double epsilon_mr = 5.0;
  bool pairwise = false;  // require compatibility among all group members
};

struct GcmParams {
  double eps_loose_mr = 8.0;
  double delta_loose = 0.70;
  double eps_severe_mr = 2.0;
  double delta_severe = 0.30;
  int passes = 5;
};

struct GtmParams {
  double lambda = 1.0;
  double keep_threshold = 0.5;  // relative to max(x)
};

struct VgtmParams {
  double gamma_mr = 1.0;
};

struct LgvParams {
  double zeta = 0.9;
  int top_k = 250;
  double delta_mr = 5.0;
  int neighborhood = 50;
};

struct SaciaParams {
  double huber_tol_mr = 2.0;        // t_e
  double min_sample_dist_mr = 10.0;
};

struct CcvParams {
  double tau_angle = 0.2;  // Euler-vector Euclidean distance, radians
  double tau_translation_mr = 10.0;
};

struct OsacParams {
  double min_inlier_fraction = 0.3;  // delta
  double min_sample_dist_mr = 10.0;
};

struct TwoSacGcParams {
  double sigma_d_mr = 6.0;
  double sigma_a_deg = 6.0;
};

struct EstimatorParams {
  RansacParams ransac;
  GccParams gcc;
  GcmParams gcm;
  GtmParams gtm;
  VgtmParams vgtm;
  LgvParams lgv;
  SaciaParams sacia;
  CcvParams ccv;
  OsacParams osac;
  TwoSacGcParams two_sac;
  double verify_tol_mr = 2.0;  // inlier tolerance of the verification stage

  /// All thresholds positive, fractions in (0, 1]. Throws DegenerateInput.
  void validate() const;
};

struct EstimateResult {
  RigidTransform transform;
  std::vector<int> inliers;  // indices into the input correspondence set
  int iterations = 0;
  std::optional<double> score;  // method-specific verification score
  bool low_confidence = false;
  std::string note;  // set when low_confidence
};

enum class Method {
  ransac,
  gcc,
  gcm,
  gtm,
  vgtm,
  lgv,
  sacia,
  ccv,
  one_point_ransac,
  osac,
  two_sac_gc,
};

std::span<const Method> all_methods();
std::string_view method_name(Method m);  // display name, e.g. "V-GTM"
std::optional<Method> method_from_string(std::string_view s);
bool method_requires_lrf(Method m);
bool method_requires_lra(Method m);
bool method_uses_verification(Method m);

/// Pairwise compatibility matrix (min/max distance ratio)^lambda with zero
/// diagonal; entries where both side distances vanish are zero.
Eigen::MatrixXd build_payoff_gtm(const CorrespondenceSet& set, double lambda);

/// Ratio payoff damped by exp(-|d_p - d_q| / (gamma * mr)), then zeroed for
/// shared endpoints and for raw values below 0.1.
Eigen::MatrixXd build_payoff_vgtm(const CorrespondenceSet& set, double gamma, double mr);

struct ReplicatorTrace {
  std::vector<double> average_payoff;  // x^T pi x before every step
  int steps = 0;
  double max_simplex_error = 0.0;  // max |sum(x) - 1| over all steps
  double min_coefficient = 0.0;    // most negative coefficient seen
};

/// Discrete replicator dynamics x_i <- x_i (pi x)_i / (x^T pi x), explicitly
/// renormalized every step. Stops when max |dx| < tol or after max_steps.
/// Returns x unchanged when the average payoff is zero.
Eigen::VectorXd replicator_dynamics(const Eigen::MatrixXd& payoff, Eigen::VectorXd x,
                                    int max_steps = 1000, double tol = 1e-8,
                                    ReplicatorTrace* trace = nullptr);

/// Histogram-free Otsu split on scores in [0, 1]: the 256 uniform bin
/// boundaries are the candidate thresholds and the between-class variance is
/// evaluated from the exact class sums; ties pick the lower boundary. With
/// all scores identical the common value is returned (callers keep all).
double otsu_threshold(std::span<const double> scores);

/// Eq.-style pairwise pre-check of the two-point sampler: distance gap
/// within sigma_d and LRA angle gap strictly within sigma_a (radians).
bool two_point_constraints_ok(const Correspondence& a, const Correspondence& b, double sigma_d,
                              double sigma_a_rad);

EstimateResult estimate_ransac(const EstimationContext& ctx, const RansacParams& p);
EstimateResult estimate_gcc(const EstimationContext& ctx, const GccParams& p);
EstimateResult estimate_gcm(const EstimationContext& ctx, const GcmParams& p);
EstimateResult estimate_gtm(const EstimationContext& ctx, const GtmParams& p);
EstimateResult estimate_vgtm(const EstimationContext& ctx, const VgtmParams& p);
EstimateResult estimate_lgv(const EstimationContext& ctx, const LgvParams& p);
EstimateResult estimate_sacia(const EstimationContext& ctx, const SaciaParams& p);
EstimateResult estimate_ccv(const EstimationContext& ctx, const CcvParams& p,
                            double verify_tol_mr = 2.0);
EstimateResult estimate_1p_ransac(const EstimationContext& ctx, double verify_tol_mr = 2.0);
EstimateResult estimate_osac(const EstimationContext& ctx, const OsacParams& p,
                             double verify_tol_mr = 2.0);
EstimateResult estimate_2sac_gc(const EstimationContext& ctx, const TwoSacGcParams& p,
                                double verify_tol_mr = 2.0);

/// Dispatch by method id.
EstimateResult estimate(Method m, const EstimationContext& ctx, const EstimatorParams& params);

}  // namespace reg3d
