#include "reg3d/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "reg3d/correspondence.hpp"
#include "reg3d/errors.hpp"
#include "reg3d/lrf.hpp"
#include "reg3d/rng.hpp"

namespace reg3d {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const char* method_token(Method m) {
  switch (m) {
    case Method::ransac: return "ransac";
    case Method::gcc: return "gcc";
    case Method::gcm: return "gcm";
    case Method::gtm: return "gtm";
    case Method::vgtm: return "vgtm";
    case Method::lgv: return "lgv";
    case Method::sacia: return "sacia";
    case Method::ccv: return "ccv";
    case Method::one_point_ransac: return "1p_ransac";
    case Method::osac: return "osac";
    case Method::two_sac_gc: return "2sac_gc";
  }
  return "?";
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

BenchConfig::BenchConfig() {
  input_counts = {
      {Method::ransac, 100}, {Method::gcc, 50},   {Method::sacia, 200},
      {Method::gtm, 200},    {Method::gcm, 50},   {Method::ccv, 200},
      {Method::lgv, 200},    {Method::one_point_ransac, 150},
      {Method::osac, 100},   {Method::two_sac_gc, 50}, {Method::vgtm, 200},
  };
}

BenchConfig BenchConfig::from_config(const Config& cfg) {
  BenchConfig b;
  b.iterations = cfg.get_int("iterations", b.iterations);
  b.verify_model_points = cfg.get_int("verify.model_points", b.verify_model_points);
  b.verify_scene_points = cfg.get_int("verify.scene_points", b.verify_scene_points);
  b.overlap_tol_mr = cfg.get_double("overlap.tol_mr", b.overlap_tol_mr);
  b.use_icp = cfg.get_bool("icp", b.use_icp);
  b.icp.max_iterations = cfg.get_int("icp.max_iterations", b.icp.max_iterations);
  b.icp.epsilon_mr = cfg.get_double("icp.epsilon_mr", b.icp.epsilon_mr);
  b.icp.reject_mr = cfg.get_double("icp.reject_mr", b.icp.reject_mr);
  b.sweep_trials = cfg.get_int("sweep.trials", b.sweep_trials);
  b.sweep_n = cfg.get_int("sweep.n", b.sweep_n);
  b.frame_noise_deg = cfg.get_double("sweep.frame_noise_deg", b.frame_noise_deg);

  EstimatorParams& p = b.params;
  p.verify_tol_mr = cfg.get_double("verify.tol_mr", p.verify_tol_mr);
  p.ransac.inlier_tol_mr = cfg.get_double("ransac.t_mr", p.ransac.inlier_tol_mr);
  p.ransac.min_consensus = cfg.get_int("ransac.k", p.ransac.min_consensus);
  p.gcc.epsilon_mr = cfg.get_double("gcc.epsilon_mr", p.gcc.epsilon_mr);
  p.gcc.pairwise = cfg.get_bool("gcc.pairwise", p.gcc.pairwise);
  p.gcm.eps_loose_mr = cfg.get_double("gcm.eps1_mr", p.gcm.eps_loose_mr);
  p.gcm.delta_loose = cfg.get_double("gcm.delta1", p.gcm.delta_loose);
  p.gcm.eps_severe_mr = cfg.get_double("gcm.eps2_mr", p.gcm.eps_severe_mr);
  p.gcm.delta_severe = cfg.get_double("gcm.delta2", p.gcm.delta_severe);
  p.gcm.passes = cfg.get_int("gcm.passes", p.gcm.passes);
  p.gtm.lambda = cfg.get_double("gtm.lambda", p.gtm.lambda);
  p.gtm.keep_threshold = cfg.get_double("gtm.t", p.gtm.keep_threshold);
  p.vgtm.gamma_mr = cfg.get_double("vgtm.gamma", p.vgtm.gamma_mr);
  p.lgv.zeta = cfg.get_double("lgv.zeta", p.lgv.zeta);
  p.lgv.top_k = cfg.get_int("lgv.k", p.lgv.top_k);
  p.lgv.delta_mr = cfg.get_double("lgv.delta_mr", p.lgv.delta_mr);
  p.lgv.neighborhood = cfg.get_int("lgv.neighbors", p.lgv.neighborhood);
  p.sacia.huber_tol_mr = cfg.get_double("sacia.te_mr", p.sacia.huber_tol_mr);
  p.sacia.min_sample_dist_mr = cfg.get_double("sacia.dmin_mr", p.sacia.min_sample_dist_mr);
  p.ccv.tau_angle = cfg.get_double("ccv.tau_a", p.ccv.tau_angle);
  p.ccv.tau_translation_mr = cfg.get_double("ccv.tau_t_mr", p.ccv.tau_translation_mr);
  p.osac.min_inlier_fraction = cfg.get_double("osac.delta", p.osac.min_inlier_fraction);
  p.osac.min_sample_dist_mr = cfg.get_double("osac.dmin_mr", p.osac.min_sample_dist_mr);
  p.two_sac.sigma_d_mr = cfg.get_double("2sac.sigma_d_mr", p.two_sac.sigma_d_mr);
  p.two_sac.sigma_a_deg = cfg.get_double("2sac.sigma_a_deg", p.two_sac.sigma_a_deg);

  for (Method m : all_methods()) {
    const std::string key = std::string("inputs.") + method_token(m);
    b.input_counts[m] = cfg.get_int(key, b.input_counts[m]);
  }
  return b;
}

std::string BenchConfig::describe() const {
  std::ostringstream out;
  out << "iterations=" << iterations << "\n";
  out << "verify.model_points=" << verify_model_points << "\n";
  out << "verify.scene_points=" << verify_scene_points << "\n";
  out << "verify.tol_mr=" << params.verify_tol_mr << "\n";
  out << "overlap.tol_mr=" << overlap_tol_mr << "\n";
  out << "icp=" << (use_icp ? 1 : 0) << "\n";
  out << "icp.max_iterations=" << icp.max_iterations << "\n";
  out << "icp.epsilon_mr=" << icp.epsilon_mr << "\n";
  out << "icp.reject_mr=" << icp.reject_mr << "\n";
  out << "sweep.trials=" << sweep_trials << "\n";
  out << "sweep.n=" << sweep_n << "\n";
  out << "sweep.frame_noise_deg=" << frame_noise_deg << "\n";
  out << "ransac.t_mr=" << params.ransac.inlier_tol_mr << "\n";
  out << "ransac.k=" << params.ransac.min_consensus << "\n";
  out << "gcc.epsilon_mr=" << params.gcc.epsilon_mr << "\n";
  out << "gcc.pairwise=" << (params.gcc.pairwise ? 1 : 0) << "\n";
  out << "gcm.eps1_mr=" << params.gcm.eps_loose_mr << "\n";
  out << "gcm.delta1=" << params.gcm.delta_loose << "\n";
  out << "gcm.eps2_mr=" << params.gcm.eps_severe_mr << "\n";
  out << "gcm.delta2=" << params.gcm.delta_severe << "\n";
  out << "gcm.passes=" << params.gcm.passes << "\n";
  out << "gtm.lambda=" << params.gtm.lambda << "\n";
  out << "gtm.t=" << params.gtm.keep_threshold << "\n";
  out << "vgtm.gamma=" << params.vgtm.gamma_mr << "\n";
  out << "lgv.zeta=" << params.lgv.zeta << "\n";
  out << "lgv.k=" << params.lgv.top_k << "\n";
  out << "lgv.delta_mr=" << params.lgv.delta_mr << "\n";
  out << "lgv.neighbors=" << params.lgv.neighborhood << "\n";
  out << "sacia.te_mr=" << params.sacia.huber_tol_mr << "\n";
  out << "sacia.dmin_mr=" << params.sacia.min_sample_dist_mr << "\n";
  out << "ccv.tau_a=" << params.ccv.tau_angle << "\n";
  out << "ccv.tau_t_mr=" << params.ccv.tau_translation_mr << "\n";
  out << "osac.delta=" << params.osac.min_inlier_fraction << "\n";
  out << "osac.dmin_mr=" << params.osac.min_sample_dist_mr << "\n";
  out << "2sac.sigma_d_mr=" << params.two_sac.sigma_d_mr << "\n";
  out << "2sac.sigma_a_deg=" << params.two_sac.sigma_a_deg << "\n";
  for (Method m : all_methods())
    out << "inputs." << method_token(m) << "=" << input_counts.at(m) << "\n";
  return out.str();
}

PairSpec PairSpec::from_manifest(const ManifestPair& p) {
  return {p.name, p.model, p.scene, p.gt, p.features_model, p.features_scene, p.lrf_model,
          p.lrf_scene};
}

bool judge(double eps_r, double eps_t) { return eps_r < 5.0 && eps_t < 5.0; }

// ---------------------------------------------------------------------------
// Pair execution
// ---------------------------------------------------------------------------

namespace {

struct LoadedPair {
  std::string name;
  PointCloud model;
  PointCloud scene;
  RigidTransform gt;
  CorrespondenceSet raw;  // matched, unselected
  double overlap = -1.0;  // filled by run_suite
};

LoadedPair load_pair(const PairSpec& spec) {
  LoadedPair lp;
  lp.name = spec.name;
  lp.model = load_ply(spec.model);
  lp.scene = load_ply(spec.scene);
  lp.gt = load_transform(spec.gt);
  if (spec.features_model.empty() || spec.features_scene.empty())
    throw Error("pair '" + spec.name + "': no feature files, cannot build correspondences");
  KeypointSet mk = load_keypoint_features(spec.features_model, lp.model);
  KeypointSet sk = load_keypoint_features(spec.features_scene, lp.scene);
  if (!spec.lrf_model.empty()) {
    load_lrf_file(spec.lrf_model, mk);
    mk.lras.clear();
    for (const Lrf& f : mk.lrfs) mk.lras.push_back(lra_from_lrf(f));
  }
  if (!spec.lrf_scene.empty()) {
    load_lrf_file(spec.lrf_scene, sk);
    sk.lras.clear();
    for (const Lrf& f : sk.lrfs) sk.lras.push_back(lra_from_lrf(f));
  }
  lp.raw = match_features(mk, sk);
  return lp;
}

PairResult failed_result(Method method, const std::string& pair_id, std::uint64_t seed,
                         std::string error) {
  PairResult r;
  r.method = method;
  r.pair_id = pair_id;
  r.seed = seed;
  r.eps_r = kNan;
  r.eps_t = kNan;
  r.success = false;
  r.error = std::move(error);
  return r;
}

PairResult run_loaded(const LoadedPair& lp, Method method, const BenchConfig& cfg,
                      std::uint64_t seed) {
  PairResult r;
  r.method = method;
  r.pair_id = lp.name;
  r.seed = seed;
  try {
    const std::size_t count =
        static_cast<std::size_t>(std::max(3, cfg.input_counts.at(method)));
    EstimationContext ctx;
    ctx.correspondences = select_ratio(lp.raw, count);
    if (method_requires_lrf(method) && !ctx.correspondences.has_lrf())
      throw MissingFrames("pair lacks LRFs");
    if (method_requires_lra(method) && !ctx.correspondences.has_lra())
      throw MissingFrames("pair lacks LRAs");
    ctx.model_sub = subsample(lp.model, static_cast<std::size_t>(cfg.verify_model_points),
                              derive_seed(seed, 1));
    ctx.scene_sub = subsample(lp.scene, static_cast<std::size_t>(cfg.verify_scene_points),
                              derive_seed(seed, 2));
    ctx.mr = lp.scene.mesh_resolution();
    ctx.rng_seed = derive_seed(seed, 3);
    ctx.max_iterations = cfg.iterations;

    const auto t0 = std::chrono::steady_clock::now();
    const EstimateResult est = estimate(method, ctx, cfg.params);
    const auto t1 = std::chrono::steady_clock::now();
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    r.iterations = est.iterations;

    RigidTransform final_t = est.transform;
    if (cfg.use_icp) final_t = icp(lp.model, lp.scene, final_t, cfg.icp).transform;

    r.eps_r = rotation_error(final_t.rotation, lp.gt.rotation);
    r.eps_t = translation_error(final_t.translation, lp.gt.translation, final_t.rotation,
                                lp.gt.rotation, lp.model.centroid(), ctx.mr);
    r.success = judge(r.eps_r, r.eps_t);
  } catch (const MissingFrames&) {
    return failed_result(method, lp.name, seed, "MissingFrames");
  } catch (const Error& e) {
    return failed_result(method, lp.name, seed, e.what());
  }
  return r;
}

std::string overlap_bin_label(double overlap) {
  int bin = static_cast<int>(std::floor(overlap * 10.0));
  bin = std::clamp(bin, 1, 9);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "overlap=%d-%d%%", bin * 10, bin * 10 + 10);
  return buf;
}

}  // namespace

PairResult run_pair(const PairSpec& spec, Method method, const BenchConfig& cfg,
                    std::uint64_t seed) {
  LoadedPair lp;
  try {
    lp = load_pair(spec);
  } catch (const Error& e) {
    return failed_result(method, spec.name, seed, e.what());
  }
  return run_loaded(lp, method, cfg, seed);
}

SuiteReport run_suite(const std::vector<PairSpec>& pairs, std::span<const Method> methods,
                      const BenchConfig& cfg, std::uint64_t master_seed) {
  SuiteReport report;
  report.master_seed = master_seed;

  std::vector<std::string> seen_bins;
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    LoadedPair lp;
    bool loaded = true;
    std::string load_error;
    try {
      lp = load_pair(pairs[pi]);
      lp.overlap =
          overlap_ratio(lp.model, lp.scene, lp.gt,
                        cfg.overlap_tol_mr * lp.scene.mesh_resolution());
    } catch (const Error& e) {
      loaded = false;
      load_error = e.what();
    }

    if (loaded && lp.overlap <= 0.10) continue;  // only pairs overlapping >10% count

    const std::string group = loaded ? overlap_bin_label(lp.overlap) : std::string("unloadable");
    if (loaded && std::find(seen_bins.begin(), seen_bins.end(), group) == seen_bins.end())
      seen_bins.push_back(group);

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const std::uint64_t seed = derive_seed(master_seed, pi, mi);
      PairResult r = loaded ? run_loaded(lp, methods[mi], cfg, seed)
                            : failed_result(methods[mi], pairs[pi].name, seed, load_error);
      r.group = group;
      report.results.push_back(std::move(r));
    }
  }
  std::sort(seen_bins.begin(), seen_bins.end());
  report.group_labels = std::move(seen_bins);
  return report;
}

// ---------------------------------------------------------------------------
// Synthetic sweep
// ---------------------------------------------------------------------------

PointCloud make_synthetic_surface(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw DegenerateInput("make_synthetic_surface: need at least 2 points");
  Rng rng(seed);

  constexpr int kWaves = 6;
  double amp[kWaves], fx[kWaves], fy[kWaves], phase[kWaves];
  for (int k = 0; k < kWaves; ++k) {
    amp[k] = rng.uniform(0.02, 0.06);
    fx[k] = rng.uniform(0.5, 3.0);
    fy[k] = rng.uniform(0.5, 3.0);
    phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  auto height = [&](double x, double y) {
    double z = 0.0;
    for (int k = 0; k < kWaves; ++k)
      z += amp[k] * std::sin(2.0 * std::numbers::pi * (fx[k] * x + fy[k] * y) + phase[k]);
    return z;
  };

  const std::size_t side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  const double h = 1.0 / static_cast<double>(side);
  std::vector<Vector3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double cx = static_cast<double>(i % side);
    const double cy = static_cast<double>(i / side);
    const double x = (cx + 0.5 + rng.uniform(-0.35, 0.35)) * h;
    const double y = (cy + 0.5 + rng.uniform(-0.35, 0.35)) * h;
    pts.emplace_back(x, y, height(x, y));
  }
  return PointCloud(std::move(pts));
}

void attach_synthetic_frames(CorrespondenceSet& set, const RigidTransform& gt, double tol,
                             double noise_deg, std::uint64_t seed) {
  Rng rng(seed);
  const double noise_rad = deg2rad(noise_deg);
  for (Correspondence& c : set.items) {
    const bool correct = residual(gt, c) < tol;
    Matrix3 fp = uniform_rotation(rng);
    Matrix3 fq = correct ? Matrix3(fp * gt.rotation.transpose()) : uniform_rotation(rng);
    if (noise_rad > 0.0) {
      // Rotating the frame axes means right-multiplying the row matrix.
      fp = fp * perturb_rotation(Matrix3::Identity(), noise_rad, rng).transpose();
      fq = fq * perturb_rotation(Matrix3::Identity(), noise_rad, rng).transpose();
    }
    c.model_lrf = Lrf{fp};
    c.scene_lrf = Lrf{fq};
    c.model_lra = lra_from_lrf(*c.model_lrf);
    c.scene_lra = lra_from_lrf(*c.scene_lrf);
  }
}

SuiteReport pcc_sweep(const PointCloud& model, const PointCloud& scene, const RigidTransform& gt,
                      const BenchConfig& cfg, std::uint64_t master_seed) {
  SuiteReport report;
  report.master_seed = master_seed;
  report.include_timing = false;  // sweep CSVs stay byte-reproducible

  const double mr = scene.mesh_resolution();
  const double tol = 2.0 * mr;
  const Vector3 model_center = model.centroid();

  for (int level = 5; level <= 50; level += 5) {
    char label[24];
    std::snprintf(label, sizeof(label), "pcc=%d%%", level);
    report.group_labels.emplace_back(label);

    for (int trial = 0; trial < cfg.sweep_trials; ++trial) {
      // Level-independent trial seeds: every PCC level sees the same draw.
      const std::uint64_t seed =
          derive_seed(master_seed, 1000003ull, static_cast<std::uint64_t>(trial));
      char pair_id[48];
      std::snprintf(pair_id, sizeof(pair_id), "%s/t%03d", label, trial);

      CorrespondenceSet set;
      EstimationContext ctx;
      bool prepared = true;
      std::string prep_error;
      try {
        set = synthesize_correspondences(model, scene, gt, static_cast<double>(level) / 100.0,
                                         seed, static_cast<std::size_t>(cfg.sweep_n));
        attach_synthetic_frames(set, gt, tol, cfg.frame_noise_deg, derive_seed(seed, 7));
        ctx.correspondences = std::move(set);
        ctx.model_sub = subsample(model, static_cast<std::size_t>(cfg.verify_model_points),
                                  derive_seed(seed, 1));
        ctx.scene_sub = subsample(scene, static_cast<std::size_t>(cfg.verify_scene_points),
                                  derive_seed(seed, 2));
        ctx.mr = mr;
        ctx.max_iterations = cfg.iterations;
      } catch (const Error& e) {
        prepared = false;
        prep_error = e.what();
      }

      const auto methods = all_methods();
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        PairResult r;
        if (!prepared) {
          r = failed_result(methods[mi], pair_id, seed, prep_error);
        } else {
          r.method = methods[mi];
          r.pair_id = pair_id;
          r.seed = seed;
          ctx.rng_seed = derive_seed(seed, 100 + mi);
          try {
            const auto t0 = std::chrono::steady_clock::now();
            const EstimateResult est = estimate(methods[mi], ctx, cfg.params);
            const auto t1 = std::chrono::steady_clock::now();
            r.seconds = std::chrono::duration<double>(t1 - t0).count();
            r.iterations = est.iterations;
            r.eps_r = rotation_error(est.transform.rotation, gt.rotation);
            r.eps_t = translation_error(est.transform.translation, gt.translation,
                                        est.transform.rotation, gt.rotation, model_center, mr);
            r.success = judge(r.eps_r, r.eps_t);
          } catch (const Error& e) {
            r = failed_result(methods[mi], pair_id, seed, e.what());
          }
        }
        r.group = label;
        report.results.push_back(std::move(r));
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Aggregation and emission
// ---------------------------------------------------------------------------

std::vector<MethodGroupStat> SuiteReport::aggregate() const {
  std::vector<MethodGroupStat> out;
  for (Method m : all_methods()) {
    std::vector<const PairResult*> mine;
    for (const PairResult& r : results)
      if (r.method == m) mine.push_back(&r);
    if (mine.empty()) continue;

    auto make_stat = [&](const std::string& group) {
      MethodGroupStat s;
      s.method = m;
      s.group = group;
      double secs = 0.0;
      for (const PairResult* r : mine) {
        if (!group.empty() && r->group != group) continue;
        ++s.count;
        if (r->success) ++s.successes;
        secs += r->seconds;
      }
      s.mean_seconds = s.count > 0 ? secs / static_cast<double>(s.count) : 0.0;
      return s;
    };

    MethodGroupStat overall = make_stat("");
    overall.group = "overall";
    out.push_back(overall);
    for (const std::string& g : group_labels) {
      MethodGroupStat s = make_stat(g);
      if (s.count > 0) out.push_back(s);
    }
  }
  return out;
}

void emit_pair_csv(const SuiteReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_pair_csv: cannot write '" + path + "'");
  out << (report.include_timing ? "method,pair_id,eps_r,eps_t,success,seconds,seed,error\n"
                                : "method,pair_id,eps_r,eps_t,success,seed,error\n");
  for (const PairResult& r : report.results) {
    out << method_name(r.method) << ',' << csv_escape(r.pair_id) << ','
        << fmt("%.9g", r.eps_r) << ',' << fmt("%.9g", r.eps_t) << ',' << (r.success ? 1 : 0)
        << ',';
    if (report.include_timing) out << fmt("%.6f", r.seconds) << ',';
    out << r.seed << ',' << csv_escape(r.error) << '\n';
  }
  if (!out) throw IoError("emit_pair_csv: write failed for '" + path + "'");
}

void emit_aggregate_csv(const SuiteReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_aggregate_csv: cannot write '" + path + "'");
  out << (report.include_timing ? "method,group,count,successes,success_pct,mean_seconds\n"
                                : "method,group,count,successes,success_pct\n");
  for (const MethodGroupStat& s : report.aggregate()) {
    out << method_name(s.method) << ',' << csv_escape(s.group) << ',' << s.count << ','
        << s.successes << ',' << fmt("%.9g", s.success_pct());
    if (report.include_timing) out << ',' << fmt("%.6f", s.mean_seconds);
    out << '\n';
  }
}

void emit_meta(const SuiteReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_meta: cannot write '" + path + "'");
  out << "master_seed=" << report.master_seed << "\n"
      << "config_hash=" << report.config_hash << "\n"
      << "results=" << report.results.size() << "\n";
}

// ---------------------------------------------------------------------------
// SVG charts
// ---------------------------------------------------------------------------

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                          "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79"};

struct ChartFrame {
  double width = 880, height = 480;
  double left = 70, right = 180, top = 40, bottom = 60;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

void svg_header(std::ostream& out, const ChartFrame& f, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\""
      << f.height << "\" viewBox=\"0 0 " << f.width << " " << f.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << f.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
}

void svg_axes(std::ostream& out, const ChartFrame& f, const std::vector<std::string>& x_labels,
              double y_max, const std::string& y_label) {
  out << "<line x1=\"" << f.left << "\" y1=\"" << f.top << "\" x2=\"" << f.left << "\" y2=\""
      << f.top + f.plot_h() << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << f.left << "\" y1=\"" << f.top + f.plot_h() << "\" x2=\""
      << f.left + f.plot_w() << "\" y2=\"" << f.top + f.plot_h() << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 5; ++tick) {
    const double v = y_max * tick / 5.0;
    const double y = f.top + f.plot_h() * (1.0 - static_cast<double>(tick) / 5.0);
    out << "<line x1=\"" << f.left - 4 << "\" y1=\"" << y << "\" x2=\"" << f.left << "\" y2=\""
        << y << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << f.left - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt("%.4g", v) << "</text>\n";
  }
  const std::size_t n = x_labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x =
        f.left + (n == 1 ? f.plot_w() / 2
                         : f.plot_w() * static_cast<double>(i) / static_cast<double>(n - 1));
    out << "<text x=\"" << x << "\" y=\"" << f.top + f.plot_h() + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << x_labels[i]
        << "</text>\n";
  }
  out << "<text x=\"18\" y=\"" << f.top + f.plot_h() / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 18 " << f.top + f.plot_h() / 2 << ")\">" << y_label
      << "</text>\n";
}

}  // namespace

void emit_plots(const SuiteReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::vector<MethodGroupStat> stats = report.aggregate();

  // Success percentage per group, one polyline per method.
  {
    std::ofstream out(fs::path(dir) / "success.svg");
    if (!out) throw IoError("emit_plots: cannot write success.svg");
    ChartFrame f;
    svg_header(out, f, "Correct registration per group");
    svg_axes(out, f, report.group_labels, 100.0, "success %");
    const std::size_t n = report.group_labels.size();
    int color = 0;
    for (Method m : all_methods()) {
      std::vector<double> ys;
      for (const std::string& g : report.group_labels)
        for (const MethodGroupStat& s : stats)
          if (s.method == m && s.group == g) ys.push_back(s.success_pct());
      if (ys.size() != n || n == 0) {
        ++color;
        continue;
      }
      std::ostringstream pts;
      for (std::size_t i = 0; i < n; ++i) {
        const double x =
            f.left + (n == 1 ? f.plot_w() / 2
                             : f.plot_w() * static_cast<double>(i) / static_cast<double>(n - 1));
        const double y = f.top + f.plot_h() * (1.0 - ys[i] / 100.0);
        pts << x << ',' << y << ' ';
      }
      const char* c = kPalette[color % 11];
      out << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\""
          << pts.str() << "\"/>\n";
      const double ly = f.top + 16.0 * color;
      out << "<rect x=\"" << f.width - f.right + 14 << "\" y=\"" << ly - 9
          << "\" width=\"12\" height=\"12\" fill=\"" << c << "\"/>\n"
          << "<text x=\"" << f.width - f.right + 32 << "\" y=\"" << ly + 2
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << method_name(m) << "</text>\n";
      ++color;
    }
    out << "</svg>\n";
  }

  // Mean estimator time per method.
  {
    std::ofstream out(fs::path(dir) / "time.svg");
    if (!out) throw IoError("emit_plots: cannot write time.svg");
    ChartFrame f;
    std::vector<std::string> labels;
    std::vector<double> values;
    for (const MethodGroupStat& s : stats) {
      if (s.group != "overall") continue;
      labels.push_back(std::string(method_name(s.method)));
      values.push_back(s.mean_seconds);
    }
    double y_max = 1e-6;
    for (double v : values) y_max = std::max(y_max, v);
    svg_header(out, f, "Mean estimator time per method");
    svg_axes(out, f, labels, y_max, "seconds");
    const std::size_t n = labels.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double cx =
          f.left + (n == 1 ? f.plot_w() / 2
                           : f.plot_w() * static_cast<double>(i) / static_cast<double>(n - 1));
      const double h = f.plot_h() * values[i] / y_max;
      out << "<rect x=\"" << cx - 12 << "\" y=\"" << f.top + f.plot_h() - h
          << "\" width=\"24\" height=\"" << h << "\" fill=\"" << kPalette[i % 11] << "\"/>\n";
    }
    out << "</svg>\n";
  }
}

}  // namespace reg3d
