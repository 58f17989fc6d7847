#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "reg3d/estimators.hpp"
#include "reg3d/icp.hpp"
#include "reg3d/io.hpp"
#include "reg3d/point_cloud.hpp"

namespace reg3d {

/// Benchmark-wide knobs; every field can be overridden from a Config file.
struct BenchConfig {
  int iterations = 300;
  int verify_model_points = 100;
  int verify_scene_points = 8000;
  double overlap_tol_mr = 2.0;
  bool use_icp = false;
  EstimatorParams params;
  IcpParams icp;
  std::map<Method, int> input_counts;  // ratio-selection budget per method
  int sweep_trials = 50;
  int sweep_n = 200;
  double frame_noise_deg = 0.0;

  BenchConfig();
  static BenchConfig from_config(const Config& cfg);

  /// Emits the full key=value table (the `bench params` output).
  std::string describe() const;
};

struct PairSpec {
  std::string name;
  std::string model;
  std::string scene;
  std::string gt;
  std::string features_model;
  std::string features_scene;
  std::string lrf_model;
  std::string lrf_scene;

  static PairSpec from_manifest(const ManifestPair& p);
};

struct PairResult {
  Method method = Method::ransac;
  std::string pair_id;
  std::string group;  // overlap bin or PCC level
  double eps_r = 0.0;
  double eps_t = 0.0;
  bool success = false;
  double seconds = 0.0;  // estimator call only
  int iterations = 0;
  std::uint64_t seed = 0;
  std::string error;  // nonempty when the run failed before judging
};

struct MethodGroupStat {
  Method method = Method::ransac;
  std::string group;
  int count = 0;
  int successes = 0;
  double mean_seconds = 0.0;

  double success_pct() const {
    return count > 0 ? 100.0 * static_cast<double>(successes) / static_cast<double>(count) : 0.0;
  }
};

struct SuiteReport {
  std::vector<PairResult> results;
  std::vector<std::string> group_labels;  // ordered as run
  std::uint64_t master_seed = 0;
  std::uint64_t config_hash = 0;
  bool include_timing = true;  // timing columns are omitted from sweep CSVs

  /// Per-method rows: "overall" first, then each group label in order.
  std::vector<MethodGroupStat> aggregate() const;
};

/// Correct iff eps_r < 5 degrees and eps_t < 5 mr units (both strict).
bool judge(double eps_r, double eps_t);

PairResult run_pair(const PairSpec& spec, Method method, const BenchConfig& cfg,
                    std::uint64_t seed);

/// Runs the method x pair matrix; pairs with overlap ratio <= 10% are
/// excluded up front. Failures are recorded and the suite continues.
SuiteReport run_suite(const std::vector<PairSpec>& pairs, std::span<const Method> methods,
                      const BenchConfig& cfg, std::uint64_t master_seed);

/// Synthetic-PCC sweep: for each PCC in {5%, ..., 50%} and each trial,
/// synthesizes `sweep_n` correspondences, attaches exact frames to correct
/// pairs and random frames to false ones, runs all eleven methods and
/// judges against the ground truth.
SuiteReport pcc_sweep(const PointCloud& model, const PointCloud& scene, const RigidTransform& gt,
                      const BenchConfig& cfg, std::uint64_t master_seed);

void emit_pair_csv(const SuiteReport& report, const std::string& path);
void emit_aggregate_csv(const SuiteReport& report, const std::string& path);
void emit_meta(const SuiteReport& report, const std::string& path);

/// Self-contained SVG charts: success per group and, when timing is
/// recorded, mean estimator time per method.
void emit_plots(const SuiteReport& report, const std::string& dir);

/// Jittered bumpy height-field with ~unit extent; a stand-in scan for
/// synthetic studies. Mesh resolution scales like 1/sqrt(n).
PointCloud make_synthetic_surface(std::size_t n, std::uint64_t seed);

/// Attaches ground-truth-consistent frames to correspondences judged
/// correct under `gt` (residual < tol) and uniformly random frames to the
/// rest; `noise_deg` perturbs every frame by that angle about a random axis.
void attach_synthetic_frames(CorrespondenceSet& set, const RigidTransform& gt, double tol,
                             double noise_deg, std::uint64_t seed);

}  // namespace reg3d
