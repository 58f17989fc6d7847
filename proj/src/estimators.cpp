#include "reg3d/estimators.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "reg3d/errors.hpp"
#include "reg3d/rng.hpp"
#include "reg3d/verification.hpp"

namespace reg3d {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RigidTransform fit_from_indices(const CorrespondenceSet& set, std::span<const int> idx) {
  std::vector<Vector3> m, s;
  m.reserve(idx.size());
  s.reserve(idx.size());
  for (int i : idx) {
    m.push_back(set[static_cast<std::size_t>(i)].model_point);
    s.push_back(set[static_cast<std::size_t>(i)].scene_point);
  }
  return fit_rigid(m, s);
}

std::vector<int> inliers_of(const CorrespondenceSet& set, const RigidTransform& t, double tol) {
  std::vector<int> out;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (residual(t, set[i]) < tol) out.push_back(static_cast<int>(i));
  return out;
}

double triangle_area(const Vector3& a, const Vector3& b, const Vector3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

std::array<int, 3> draw3(Rng& rng, std::size_t n) {
  const int a = static_cast<int>(rng.index(n));
  int b;
  do b = static_cast<int>(rng.index(n));
  while (b == a);
  int c;
  do c = static_cast<int>(rng.index(n));
  while (c == a || c == b);
  return {a, b, c};
}

/// Draws triples until one passes the degeneracy check (model triangle area
/// above min_area) and, when dmin > 0, the minimum pairwise model distance.
/// Rejected draws consume `budget`, not iterations.
std::optional<std::array<int, 3>> next_triple(Rng& rng, const CorrespondenceSet& set,
                                              double min_area, double dmin, long& budget) {
  while (budget > 0) {
    --budget;
    const std::array<int, 3> t = draw3(rng, set.size());
    const Vector3& a = set[static_cast<std::size_t>(t[0])].model_point;
    const Vector3& b = set[static_cast<std::size_t>(t[1])].model_point;
    const Vector3& c = set[static_cast<std::size_t>(t[2])].model_point;
    if (dmin > 0.0 &&
        ((a - b).norm() <= dmin || (a - c).norm() <= dmin || (b - c).norm() <= dmin))
      continue;
    if (triangle_area(a, b, c) < min_area) continue;
    return t;
  }
  return std::nullopt;
}

void require_context(const EstimationContext& ctx, std::size_t min_correspondences,
                     bool needs_subsamples, const char* who) {
  if (ctx.correspondences.size() < min_correspondences)
    throw DegenerateInput(std::string(who) + ": too few correspondences");
  if (!(ctx.mr > 0.0)) throw InvalidMr(std::string(who) + ": context mr must be positive");
  if (ctx.max_iterations < 1) throw DegenerateInput(std::string(who) + ": max_iterations < 1");
  if (needs_subsamples && (ctx.model_sub.empty() || ctx.scene_sub.empty()))
    throw DegenerateInput(std::string(who) + ": verification subsamples missing");
}

RigidTransform lrf_pair_transform(const Correspondence& c) {
  return transform_from_lrf_pair(c.model_point, c.scene_point, *c.model_lrf, *c.scene_lrf);
}

Eigen::VectorXd uniform_simplex(std::size_t n) {
  return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
}

/// Keeps the three largest entries of x (ties by index) when the thresholded
/// set is too small to fit a transform.
std::vector<int> top3_by(const Eigen::VectorXd& x) {
  std::vector<int> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x(a) > x(b); });
  order.resize(std::min<std::size_t>(3, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

EstimateResult fit_or_flag(const CorrespondenceSet& set, std::vector<int> keep,
                           bool low_confidence, std::string note) {
  EstimateResult r;
  r.inliers = std::move(keep);
  r.low_confidence = low_confidence;
  r.note = std::move(note);
  try {
    r.transform = fit_from_indices(set, r.inliers);
  } catch (const DegenerateInput&) {
    r.low_confidence = true;
    if (r.note.empty()) r.note = "DegenerateFit";
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Shared numerical kernels
// ---------------------------------------------------------------------------

Eigen::MatrixXd build_payoff_gtm(const CorrespondenceSet& set, double lambda) {
  if (!(lambda > 0.0)) throw DegenerateInput("build_payoff_gtm: lambda must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd payoff = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& ci = set[static_cast<std::size_t>(i)];
      const auto& cj = set[static_cast<std::size_t>(j)];
      const double dp = (ci.model_point - cj.model_point).norm();
      const double dq = (ci.scene_point - cj.scene_point).norm();
      const double hi = std::max(dp, dq);
      const double v = hi > 0.0 ? std::pow(std::min(dp, dq) / hi, lambda) : 0.0;
      payoff(i, j) = payoff(j, i) = v;
    }
  }
  return payoff;
}

Eigen::MatrixXd build_payoff_vgtm(const CorrespondenceSet& set, double gamma, double mr) {
  if (!(gamma > 0.0)) throw DegenerateInput("build_payoff_vgtm: gamma must be positive");
  if (!(mr > 0.0)) throw InvalidMr("build_payoff_vgtm: mr must be positive");
  const double scale = gamma * mr;
  const Eigen::Index n = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd payoff = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& ci = set[static_cast<std::size_t>(i)];
      const auto& cj = set[static_cast<std::size_t>(j)];
      // Shared endpoints force one-to-one solutions.
      if ((ci.model_point - cj.model_point).squaredNorm() == 0.0 ||
          (ci.scene_point - cj.scene_point).squaredNorm() == 0.0)
        continue;
      const double dp = (ci.model_point - cj.model_point).norm();
      const double dq = (ci.scene_point - cj.scene_point).norm();
      const double v = std::min(dp, dq) / std::max(dp, dq) * std::exp(-std::abs(dp - dq) / scale);
      if (v < 0.1) continue;
      payoff(i, j) = payoff(j, i) = v;
    }
  }
  return payoff;
}

Eigen::VectorXd replicator_dynamics(const Eigen::MatrixXd& payoff, Eigen::VectorXd x,
                                    int max_steps, double tol, ReplicatorTrace* trace) {
  if (payoff.rows() != payoff.cols() || payoff.rows() != x.size())
    throw DimensionMismatch("replicator_dynamics: payoff/strategy shape mismatch");
  if (trace) {
    trace->average_payoff.clear();
    trace->steps = 0;
    trace->max_simplex_error = 0.0;
    trace->min_coefficient = x.size() > 0 ? x.minCoeff() : 0.0;
  }
  for (int step = 0; step < max_steps; ++step) {
    Eigen::VectorXd y = x.cwiseProduct(payoff * x);
    const double avg = y.sum();  // x^T payoff x
    if (!(avg > 0.0)) break;
    y /= avg;
    const double delta = (y - x).cwiseAbs().maxCoeff();
    x = std::move(y);
    if (trace) {
      trace->average_payoff.push_back(avg);
      ++trace->steps;
      trace->max_simplex_error = std::max(trace->max_simplex_error, std::abs(x.sum() - 1.0));
      trace->min_coefficient = std::min(trace->min_coefficient, x.minCoeff());
    }
    if (delta < tol) break;
  }
  return x;
}

double otsu_threshold(std::span<const double> scores) {
  if (scores.size() < 2) throw DegenerateInput("otsu_threshold: need at least 2 scores");
  for (double s : scores)
    if (!(s >= 0.0 && s <= 1.0)) throw DegenerateInput("otsu_threshold: score outside [0, 1]");

  const bool all_same = std::all_of(scores.begin(), scores.end(),
                                    [&](double s) { return s == scores.front(); });
  if (all_same) return scores.front();

  constexpr int kBins = 256;
  std::array<double, kBins> count{};
  std::array<double, kBins> sum{};
  for (double s : scores) {
    const int bin = std::min(kBins - 1, static_cast<int>(s * kBins));
    count[static_cast<std::size_t>(bin)] += 1.0;
    sum[static_cast<std::size_t>(bin)] += s;
  }
  const double total_n = static_cast<double>(scores.size());
  const double total_sum = std::accumulate(scores.begin(), scores.end(), 0.0);

  double best_var = -1.0;
  int best_t = -1;
  double n0 = 0.0, s0 = 0.0;
  for (int t = 1; t < kBins; ++t) {
    n0 += count[static_cast<std::size_t>(t - 1)];
    s0 += sum[static_cast<std::size_t>(t - 1)];
    if (n0 == 0.0 || n0 == total_n) continue;
    const double w0 = n0 / total_n;
    const double w1 = 1.0 - w0;
    const double mu0 = s0 / n0;
    const double mu1 = (total_sum - s0) / (total_n - n0);
    const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (var > best_var) {
      best_var = var;
      best_t = t;
    }
  }
  if (best_t < 0) {
    // Distinct scores inside one bin: no boundary separates them.
    return *std::min_element(scores.begin(), scores.end());
  }
  return static_cast<double>(best_t) / static_cast<double>(kBins);
}

bool two_point_constraints_ok(const Correspondence& a, const Correspondence& b, double sigma_d,
                              double sigma_a_rad) {
  if (!a.model_lra || !a.scene_lra || !b.model_lra || !b.scene_lra)
    throw MissingFrames("two_point_constraints_ok: correspondences lack LRAs");
  const double dp = (a.model_point - b.model_point).norm();
  const double dq = (a.scene_point - b.scene_point).norm();
  if (std::abs(dp - dq) > sigma_d) return false;
  const double ap =
      std::acos(std::clamp(a.model_lra->axis.dot(b.model_lra->axis), -1.0, 1.0));
  const double aq =
      std::acos(std::clamp(a.scene_lra->axis.dot(b.scene_lra->axis), -1.0, 1.0));
  return std::abs(ap - aq) < sigma_a_rad;
}

// ---------------------------------------------------------------------------
// Maximum-consistency family
// ---------------------------------------------------------------------------

EstimateResult estimate_ransac(const EstimationContext& ctx, const RansacParams& p) {
  require_context(ctx, 3, false, "estimate_ransac");
  const CorrespondenceSet& set = ctx.correspondences;
  const double tol = p.inlier_tol_mr * ctx.mr;
  const double min_area = 1e-9 * ctx.mr * ctx.mr;
  Rng rng(ctx.rng_seed);
  long budget = 20L * ctx.max_iterations;

  EstimateResult best;
  std::size_t best_size = 0;
  bool found = false;

  int iter = 0;
  while (iter < ctx.max_iterations) {
    const auto sample = next_triple(rng, set, min_area, 0.0, budget);
    if (!sample) break;
    ++iter;
    std::vector<int> sample_idx(sample->begin(), sample->end());
    RigidTransform t = fit_from_indices(set, sample_idx);
    std::vector<int> consensus = inliers_of(set, t, tol);
    if (static_cast<int>(consensus.size()) > p.min_consensus) {
      try {
        t = fit_from_indices(set, consensus);
      } catch (const DegenerateInput&) {
        // keep the sample fit
      }
    }
    if (!found || consensus.size() > best_size) {
      found = true;
      best_size = consensus.size();
      best.transform = t;
      best.inliers = std::move(consensus);
    }
  }
  best.iterations = iter;
  best.score = static_cast<double>(best_size);
  if (!found || best_size < 3) {
    best.low_confidence = true;
    best.note = "NoConsensus";
  }
  return best;
}

EstimateResult estimate_gcc(const EstimationContext& ctx, const GccParams& p) {
  require_context(ctx, 3, false, "estimate_gcc");
  const CorrespondenceSet& set = ctx.correspondences;
  const std::size_t n = set.size();
  const double eps = p.epsilon_mr * ctx.mr;

  Eigen::MatrixXd gap(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    gap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dp = (set[i].model_point - set[j].model_point).norm();
      const double dq = (set[i].scene_point - set[j].scene_point).norm();
      gap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          gap(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::abs(dq - dp);
    }
  }
  auto compatible = [&](std::size_t i, std::size_t j) {
    return gap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) < eps;
  };

  std::vector<int> best_group;
  std::size_t best_seed = 0;
  for (std::size_t seed = 0; seed < n; ++seed) {
    std::vector<int> group{static_cast<int>(seed)};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == seed) continue;
      bool ok = true;
      if (p.pairwise) {
        for (int member : group)
          if (!compatible(static_cast<std::size_t>(member), j)) {
            ok = false;
            break;
          }
      } else {
        ok = compatible(seed, j);
      }
      if (ok) group.push_back(static_cast<int>(j));
    }
    if (group.size() > best_group.size()) {
      best_group = std::move(group);
      best_seed = seed;
    }
  }
  std::sort(best_group.begin(), best_group.end());

  if (best_group.size() >= 3) {
    EstimateResult r = fit_or_flag(set, std::move(best_group), false, "");
    r.iterations = static_cast<int>(n);
    r.score = static_cast<double>(r.inliers.size());
    return r;
  }

  // Degenerate winning group: seed plus the two least-gapped partners.
  std::vector<int> order;
  for (std::size_t j = 0; j < n; ++j)
    if (j != best_seed) order.push_back(static_cast<int>(j));
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return gap(static_cast<Eigen::Index>(best_seed), a) <
           gap(static_cast<Eigen::Index>(best_seed), b);
  });
  std::vector<int> fallback{static_cast<int>(best_seed), order[0], order[1]};
  std::sort(fallback.begin(), fallback.end());
  EstimateResult r = fit_or_flag(set, std::move(fallback), true, "DegenerateGroup");
  r.iterations = static_cast<int>(n);
  r.score = static_cast<double>(r.inliers.size());
  return r;
}

EstimateResult estimate_gcm(const EstimationContext& ctx, const GcmParams& p) {
  require_context(ctx, 3, false, "estimate_gcm");
  const CorrespondenceSet& set = ctx.correspondences;
  const std::size_t n = set.size();
  if (p.passes < 1) throw DegenerateInput("estimate_gcm: passes < 1");

  Eigen::MatrixXd gap(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    gap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dp = (set[i].model_point - set[j].model_point).norm();
      const double dq = (set[i].scene_point - set[j].scene_point).norm();
      gap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          gap(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::abs(dq - dp);
    }
  }

  std::vector<int> survivors(n);
  std::iota(survivors.begin(), survivors.end(), 0);
  std::vector<int> last_state = survivors;
  std::vector<double> last_fracs(n, 0.0);
  bool all_rejected = false;
  int passes_run = 0;

  auto violation_fractions = [&](const std::vector<int>& members, double eps) {
    std::vector<double> fracs(members.size(), 0.0);
    if (members.size() < 2) return fracs;
    for (std::size_t a = 0; a < members.size(); ++a) {
      std::size_t violations = 0;
      for (std::size_t b = 0; b < members.size(); ++b) {
        if (a == b) continue;
        if (gap(members[a], members[b]) >= eps) ++violations;
      }
      fracs[a] = static_cast<double>(violations) / static_cast<double>(members.size() - 1);
    }
    return fracs;
  };

  auto run_pass = [&](double eps, double delta) -> bool {  // true if anything was removed
    if (survivors.size() < 2) return false;
    const std::vector<double> fracs = violation_fractions(survivors, eps);
    std::vector<int> kept;
    kept.reserve(survivors.size());
    for (std::size_t a = 0; a < survivors.size(); ++a)
      if (!(fracs[a] > delta)) kept.push_back(survivors[a]);
    last_state = survivors;
    last_fracs = fracs;
    ++passes_run;
    if (kept.empty()) {
      all_rejected = true;
      return false;
    }
    const bool removed = kept.size() != survivors.size();
    survivors = std::move(kept);
    return removed;
  };

  const double eps_severe = p.eps_severe_mr * ctx.mr;
  for (int pass = 0; pass < p.passes && !all_rejected; ++pass) {
    const double f = p.passes == 1 ? 1.0
                                   : static_cast<double>(pass) / static_cast<double>(p.passes - 1);
    const double eps = (p.eps_loose_mr + f * (p.eps_severe_mr - p.eps_loose_mr)) * ctx.mr;
    const double delta = p.delta_loose + f * (p.delta_severe - p.delta_loose);
    run_pass(eps, delta);
  }
  // Re-apply the severe thresholds until stable so every survivor satisfies
  // the final-pass bound.
  for (int extra = 0; extra < 64 && !all_rejected; ++extra)
    if (!run_pass(eps_severe, p.delta_severe)) break;

  if (!all_rejected && survivors.size() >= 3) {
    EstimateResult r = fit_or_flag(set, std::move(survivors), false, "");
    r.iterations = passes_run;
    r.score = static_cast<double>(r.inliers.size());
    return r;
  }

  // AllRejected (or too few survivors): fit the three least-violating
  // correspondences of the last evaluated state.
  std::vector<std::size_t> order(last_state.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return last_fracs[a] < last_fracs[b]; });
  std::vector<int> fallback;
  for (std::size_t i = 0; i < order.size() && fallback.size() < 3; ++i)
    fallback.push_back(last_state[order[i]]);
  std::sort(fallback.begin(), fallback.end());
  EstimateResult r = fit_or_flag(set, std::move(fallback), true, "AllRejected");
  r.iterations = passes_run;
  r.score = static_cast<double>(r.inliers.size());
  return r;
}

EstimateResult estimate_gtm(const EstimationContext& ctx, const GtmParams& p) {
  require_context(ctx, 3, false, "estimate_gtm");
  const CorrespondenceSet& set = ctx.correspondences;
  const Eigen::MatrixXd payoff = build_payoff_gtm(set, p.lambda);
  ReplicatorTrace trace;
  const Eigen::VectorXd x =
      replicator_dynamics(payoff, uniform_simplex(set.size()), 1000, 1e-8, &trace);

  // Table-3 t = 0.5 applied relative to max(x): on the simplex no absolute
  // x_i can reach 0.5 once |C| is large.
  const double cut = p.keep_threshold * x.maxCoeff();
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) >= cut) keep.push_back(static_cast<int>(i));

  const bool too_few = keep.size() < 3;
  if (too_few) keep = top3_by(x);
  EstimateResult r = fit_or_flag(set, std::move(keep), too_few, too_few ? "TooFewInliers" : "");
  r.iterations = trace.steps;
  return r;
}

EstimateResult estimate_vgtm(const EstimationContext& ctx, const VgtmParams& p) {
  require_context(ctx, 3, false, "estimate_vgtm");
  const CorrespondenceSet& set = ctx.correspondences;
  const Eigen::MatrixXd payoff = build_payoff_vgtm(set, p.gamma_mr, ctx.mr);
  ReplicatorTrace trace;
  const Eigen::VectorXd x =
      replicator_dynamics(payoff, uniform_simplex(set.size()), 1000, 1e-8, &trace);

  // "x_i > 0" with floating-point residue absorbed.
  const double cut = 1e-6 * x.maxCoeff();
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) > cut) keep.push_back(static_cast<int>(i));

  const bool too_few = keep.size() < 3;
  if (too_few) keep = top3_by(x);
  EstimateResult r = fit_or_flag(set, std::move(keep), too_few, too_few ? "TooFewInliers" : "");
  r.iterations = trace.steps;
  return r;
}

EstimateResult estimate_lgv(const EstimationContext& ctx, const LgvParams& p) {
  require_context(ctx, 3, false, "estimate_lgv");
  const CorrespondenceSet& set = ctx.correspondences;
  if (!set.has_lrf()) throw MissingFrames("estimate_lgv: correspondences lack LRFs");
  const std::size_t n = set.size();
  const double delta = p.delta_mr * ctx.mr;

  // Pairwise ratio compatibility; equal (including both-zero) distances
  // count as fully compatible.
  Eigen::MatrixXd ul = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n),
                                             static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dp = (set[i].model_point - set[j].model_point).norm();
      const double dq = (set[i].scene_point - set[j].scene_point).norm();
      const double hi = std::max(dp, dq);
      const double v = hi > 0.0 ? std::min(dp, dq) / hi : 1.0;
      ul(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          ul(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }

  // Local voting over the nearest correspondences by model-point distance.
  const std::size_t k_local = std::min<std::size_t>(static_cast<std::size_t>(p.neighborhood),
                                                    n - 1);
  std::vector<double> local_votes(n, 0.0);
  std::vector<double> s_local(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> by_dist;
    by_dist.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      by_dist.emplace_back((set[i].model_point - set[j].model_point).squaredNorm(),
                           static_cast<int>(j));
    }
    std::sort(by_dist.begin(), by_dist.end());
    std::size_t votes = 0;
    for (std::size_t k = 0; k < k_local; ++k)
      if (ul(static_cast<Eigen::Index>(i), by_dist[k].second) > p.zeta) ++votes;
    local_votes[i] = static_cast<double>(votes);
    s_local[i] = k_local > 0 ? static_cast<double>(votes) / static_cast<double>(k_local) : 0.0;
  }

  // Global voting over the top-k candidates by local score.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return s_local[static_cast<std::size_t>(a)] > s_local[static_cast<std::size_t>(b)];
  });
  const std::size_t k_global = std::min<std::size_t>(static_cast<std::size_t>(p.top_k), n);
  std::vector<int> candidates(order.begin(), order.begin() + static_cast<long>(k_global));

  std::vector<RigidTransform> hyps(k_global);
  for (std::size_t a = 0; a < k_global; ++a)
    hyps[a] = lrf_pair_transform(set[static_cast<std::size_t>(candidates[a])]);

  std::vector<double> score(k_global, 0.0);
  for (std::size_t a = 0; a < k_global; ++a) {
    const int i = candidates[a];
    std::size_t global_votes = 0;
    for (std::size_t b = 0; b < k_global; ++b) {
      const int j = candidates[b];
      if (!(ul(i, j) > p.zeta)) continue;
      const double err = (apply(hyps[a], set[static_cast<std::size_t>(j)].model_point) -
                          set[static_cast<std::size_t>(j)].scene_point)
                             .norm();
      if (err < delta) ++global_votes;
    }
    score[a] = (local_votes[static_cast<std::size_t>(i)] + static_cast<double>(global_votes)) /
               (static_cast<double>(k_local) + static_cast<double>(k_global));
  }

  const double cut = otsu_threshold(score);
  std::vector<int> keep;
  for (std::size_t a = 0; a < k_global; ++a)
    if (score[a] >= cut) keep.push_back(candidates[a]);
  std::sort(keep.begin(), keep.end());

  bool too_few = keep.size() < 3;
  if (too_few) {
    std::vector<std::size_t> by_score(k_global);
    std::iota(by_score.begin(), by_score.end(), std::size_t{0});
    std::stable_sort(by_score.begin(), by_score.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    keep.clear();
    for (std::size_t a = 0; a < by_score.size() && keep.size() < 3; ++a)
      keep.push_back(candidates[by_score[a]]);
    std::sort(keep.begin(), keep.end());
  }
  EstimateResult r = fit_or_flag(set, std::move(keep), too_few, too_few ? "TooFewInliers" : "");
  r.iterations = static_cast<int>(k_global);
  return r;
}

// ---------------------------------------------------------------------------
// Confidence-verification family
// ---------------------------------------------------------------------------

EstimateResult estimate_sacia(const EstimationContext& ctx, const SaciaParams& p) {
  require_context(ctx, 3, true, "estimate_sacia");
  const CorrespondenceSet& set = ctx.correspondences;
  const double t_e = p.huber_tol_mr * ctx.mr;
  const double min_area = 1e-9 * ctx.mr * ctx.mr;
  Rng rng(ctx.rng_seed);

  EstimateResult best;
  double best_metric = kInf;
  bool found = false;
  int total_iters = 0;

  // The minimum-sample-distance filter is halved once if it rejects every
  // draw, then dropped entirely as a last resort.
  const std::array<double, 3> dmin_schedule{p.min_sample_dist_mr * ctx.mr,
                                            0.5 * p.min_sample_dist_mr * ctx.mr, 0.0};
  for (std::size_t phase = 0; phase < dmin_schedule.size(); ++phase) {
    long budget = 10L * ctx.max_iterations;
    int iters = 0;
    while (iters < ctx.max_iterations) {
      const auto sample = next_triple(rng, set, min_area, dmin_schedule[phase], budget);
      if (!sample) break;
      ++iters;
      std::vector<int> idx(sample->begin(), sample->end());
      const RigidTransform t = fit_from_indices(set, idx);
      const std::vector<double> res = nn_residuals(ctx.model_sub, ctx.scene_sub, t);
      const double metric = huber_metric(res, t_e);
      if (metric < best_metric) {
        best_metric = metric;
        best.transform = t;
        found = true;
      }
    }
    total_iters += iters;
    if (found) {
      if (phase == 1) {
        best.low_confidence = true;
        best.note = "NoValidSample: min sample distance halved";
      } else if (phase == 2) {
        best.low_confidence = true;
        best.note = "NoValidSample: sample distance filter disabled";
      }
      break;
    }
  }
  best.iterations = total_iters;
  if (!found) {
    best.low_confidence = true;
    best.note = "NoValidSample";
    return best;
  }
  best.score = best_metric;
  best.inliers = inliers_of(set, best.transform, t_e);
  return best;
}

EstimateResult estimate_ccv(const EstimationContext& ctx, const CcvParams& p,
                            double verify_tol_mr) {
  require_context(ctx, 1, true, "estimate_ccv");
  const CorrespondenceSet& set = ctx.correspondences;
  if (!set.has_lrf()) throw MissingFrames("estimate_ccv: correspondences lack LRFs");
  const std::size_t n = set.size();
  const double tol = verify_tol_mr * ctx.mr;
  const double tau_t = p.tau_translation_mr * ctx.mr;

  std::vector<RigidTransform> hyps(n);
  std::vector<Vector3> eulers(n);
  for (std::size_t i = 0; i < n; ++i) {
    hyps[i] = lrf_pair_transform(set[i]);
    eulers[i] = euler_from_rotation(hyps[i].rotation).vec();
  }

  double best_count = -1.0;
  std::vector<int> best_members;
  RigidTransform best_transform;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> members;
    for (std::size_t j = 0; j < n; ++j) {
      if ((eulers[i] - eulers[j]).norm() < p.tau_angle &&
          (hyps[i].translation - hyps[j].translation).norm() < tau_t)
        members.push_back(static_cast<int>(j));
    }
    RigidTransform candidate = hyps[i];
    if (members.size() >= 3) {
      try {
        candidate = fit_from_indices(set, members);
      } catch (const DegenerateInput&) {
        candidate = hyps[i];
      }
    }
    const double count = count_inliers(ctx.model_sub, ctx.scene_sub, candidate, tol).value;
    if (count > best_count) {
      best_count = count;
      best_members = std::move(members);
      best_transform = candidate;
    }
  }

  EstimateResult r;
  r.transform = best_transform;
  r.inliers = std::move(best_members);
  r.iterations = static_cast<int>(n);
  r.score = best_count;
  return r;
}

EstimateResult estimate_1p_ransac(const EstimationContext& ctx, double verify_tol_mr) {
  require_context(ctx, 1, true, "estimate_1p_ransac");
  const CorrespondenceSet& set = ctx.correspondences;
  if (!set.has_lrf()) throw MissingFrames("estimate_1p_ransac: correspondences lack LRFs");
  const double tol = verify_tol_mr * ctx.mr;

  EstimateResult r;
  double best_count = -1.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const RigidTransform hyp = lrf_pair_transform(set[i]);
    const double count = count_inliers(ctx.model_sub, ctx.scene_sub, hyp, tol).value;
    if (count > best_count) {
      best_count = count;
      std::vector<int> corr_inliers = inliers_of(set, hyp, tol);
      r.transform = hyp;
      if (corr_inliers.size() >= 3) {
        try {
          r.transform = fit_from_indices(set, corr_inliers);
        } catch (const DegenerateInput&) {
          r.transform = hyp;
        }
      }
      r.inliers = std::move(corr_inliers);
    }
  }
  r.iterations = static_cast<int>(set.size());
  r.score = best_count;
  return r;
}

EstimateResult estimate_osac(const EstimationContext& ctx, const OsacParams& p,
                             double verify_tol_mr) {
  require_context(ctx, 3, true, "estimate_osac");
  const CorrespondenceSet& set = ctx.correspondences;
  const double tol = verify_tol_mr * ctx.mr;
  const double min_area = 1e-9 * ctx.mr * ctx.mr;
  const double n_small = static_cast<double>(std::min(ctx.model_sub.size(), ctx.scene_sub.size()));
  Rng rng(ctx.rng_seed);

  EstimateResult best;
  double best_metric = kInf;
  RigidTransform fallback_transform;
  double fallback_mean = kInf;
  bool any_sample = false;
  int total_iters = 0;

  const std::array<double, 3> dmin_schedule{p.min_sample_dist_mr * ctx.mr,
                                            0.5 * p.min_sample_dist_mr * ctx.mr, 0.0};
  std::string phase_note;
  for (std::size_t phase = 0; phase < dmin_schedule.size(); ++phase) {
    long budget = 10L * ctx.max_iterations;
    int iters = 0;
    while (iters < ctx.max_iterations) {
      const auto sample = next_triple(rng, set, min_area, dmin_schedule[phase], budget);
      if (!sample) break;
      ++iters;
      any_sample = true;
      std::vector<int> idx(sample->begin(), sample->end());
      const RigidTransform t = fit_from_indices(set, idx);
      const std::vector<double> res = nn_residuals(ctx.model_sub, ctx.scene_sub, t);
      double inlier_sum = 0.0;
      std::size_t inliers = 0;
      double total = 0.0;
      for (double d : res) {
        total += d;
        if (d < tol) {
          inlier_sum += d;
          ++inliers;
        }
      }
      const double fraction = static_cast<double>(inliers) / n_small;
      const double metric =
          fraction > p.min_inlier_fraction ? inlier_sum / static_cast<double>(inliers) : kInf;
      if (metric < best_metric) {
        best_metric = metric;
        best.transform = t;
      }
      const double mean_all = total / static_cast<double>(res.size());
      if (mean_all < fallback_mean) {
        fallback_mean = mean_all;
        fallback_transform = t;
      }
    }
    total_iters += iters;
    if (any_sample) {
      if (phase == 1) phase_note = "NoValidSample: min sample distance halved";
      if (phase == 2) phase_note = "NoValidSample: sample distance filter disabled";
      break;
    }
  }

  best.iterations = total_iters;
  if (!any_sample) {
    best.low_confidence = true;
    best.note = "NoValidSample";
    return best;
  }
  if (best_metric == kInf) {
    // Every candidate failed the closeness test; return the minimum mean
    // distance hypothesis, flagged.
    best.transform = fallback_transform;
    best.low_confidence = true;
    best.note = phase_note.empty() ? "AllInfinite" : phase_note + "; AllInfinite";
    best.score = fallback_mean;
  } else {
    best.score = best_metric;
    if (!phase_note.empty()) {
      best.low_confidence = true;
      best.note = phase_note;
    }
  }
  best.inliers = inliers_of(set, best.transform, tol);
  return best;
}

EstimateResult estimate_2sac_gc(const EstimationContext& ctx, const TwoSacGcParams& p,
                                double verify_tol_mr) {
  require_context(ctx, 2, true, "estimate_2sac_gc");
  const CorrespondenceSet& set = ctx.correspondences;
  if (!set.has_lra()) throw MissingFrames("estimate_2sac_gc: correspondences lack LRAs");
  const double tol = verify_tol_mr * ctx.mr;
  const double sigma_d = p.sigma_d_mr * ctx.mr;
  const double sigma_a = deg2rad(p.sigma_a_deg);
  Rng rng(ctx.rng_seed);

  EstimateResult best;
  double best_count = -1.0;
  double near_violation = kInf;
  std::pair<int, int> near_pair{-1, -1};

  for (int iter = 0; iter < ctx.max_iterations; ++iter) {
    const int i = static_cast<int>(rng.index(set.size()));
    int j;
    do j = static_cast<int>(rng.index(set.size()));
    while (j == i);
    const Correspondence& a = set[static_cast<std::size_t>(i)];
    const Correspondence& b = set[static_cast<std::size_t>(j)];

    if (!two_point_constraints_ok(a, b, sigma_d, sigma_a)) {
      const double dp = (a.model_point - b.model_point).norm();
      const double dq = (a.scene_point - b.scene_point).norm();
      const double ap = std::acos(std::clamp(a.model_lra->axis.dot(b.model_lra->axis), -1.0, 1.0));
      const double aq = std::acos(std::clamp(a.scene_lra->axis.dot(b.scene_lra->axis), -1.0, 1.0));
      const double violation =
          std::max(std::abs(dp - dq) / sigma_d, std::abs(ap - aq) / sigma_a);
      if (violation < near_violation) {
        near_violation = violation;
        near_pair = {i, j};
      }
      continue;
    }

    RigidTransform t;
    try {
      t = transform_from_two_lra(a.model_point, a.scene_point, b.model_point, b.scene_point,
                                 *a.model_lra, *a.scene_lra);
    } catch (const DegenerateInput&) {
      continue;
    }
    const double count = count_inliers(ctx.model_sub, ctx.scene_sub, t, tol).value;
    if (count > best_count) {
      best_count = count;
      best.transform = t;
      best.inliers = inliers_of(set, t, tol);
      best.score = count;
    }
  }
  best.iterations = ctx.max_iterations;

  if (best_count < 0.0) {
    best.low_confidence = true;
    best.note = "NoValidPair";
    if (near_pair.first >= 0) {
      const Correspondence& a = set[static_cast<std::size_t>(near_pair.first)];
      const Correspondence& b = set[static_cast<std::size_t>(near_pair.second)];
      try {
        best.transform =
            transform_from_two_lra(a.model_point, a.scene_point, b.model_point, b.scene_point,
                                   *a.model_lra, *a.scene_lra);
      } catch (const DegenerateInput&) {
        // identity stands
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

namespace {
constexpr std::array<Method, 11> kAllMethods = {
    Method::ransac, Method::gcc,  Method::gcm,   Method::gtm,
    Method::vgtm,   Method::lgv,  Method::sacia, Method::ccv,
    Method::one_point_ransac,     Method::osac,  Method::two_sac_gc};
}  // namespace

std::span<const Method> all_methods() { return kAllMethods; }

std::string_view method_name(Method m) {
  switch (m) {
    case Method::ransac: return "RANSAC";
    case Method::gcc: return "GCC";
    case Method::gcm: return "GCM";
    case Method::gtm: return "GTM";
    case Method::vgtm: return "V-GTM";
    case Method::lgv: return "LGV";
    case Method::sacia: return "SAC-IA";
    case Method::ccv: return "CCV";
    case Method::one_point_ransac: return "1P-RANSAC";
    case Method::osac: return "OSAC";
    case Method::two_sac_gc: return "2SAC-GC";
  }
  return "?";
}

std::optional<Method> method_from_string(std::string_view s) {
  std::string key;
  for (char c : s) {
    if (c == '-' || c == '_' || c == ' ') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "ransac") return Method::ransac;
  if (key == "gcc") return Method::gcc;
  if (key == "gcm") return Method::gcm;
  if (key == "gtm") return Method::gtm;
  if (key == "vgtm") return Method::vgtm;
  if (key == "lgv") return Method::lgv;
  if (key == "sacia") return Method::sacia;
  if (key == "ccv") return Method::ccv;
  if (key == "1pransac" || key == "1p") return Method::one_point_ransac;
  if (key == "osac") return Method::osac;
  if (key == "2sacgc" || key == "2sac") return Method::two_sac_gc;
  return std::nullopt;
}

bool method_requires_lrf(Method m) {
  return m == Method::lgv || m == Method::ccv || m == Method::one_point_ransac;
}

bool method_requires_lra(Method m) { return m == Method::two_sac_gc; }

bool method_uses_verification(Method m) {
  switch (m) {
    case Method::sacia:
    case Method::ccv:
    case Method::one_point_ransac:
    case Method::osac:
    case Method::two_sac_gc:
      return true;
    default:
      return false;
  }
}

void EstimatorParams::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw DegenerateInput(std::string("EstimatorParams: ") + what);
  };
  auto fraction = [](double v, const char* what) {
    if (!(v > 0.0 && v <= 1.0)) throw DegenerateInput(std::string("EstimatorParams: ") + what);
  };
  positive(ransac.inlier_tol_mr, "ransac.t must be positive");
  positive(gcc.epsilon_mr, "gcc.epsilon must be positive");
  positive(gcm.eps_loose_mr, "gcm.eps1 must be positive");
  positive(gcm.eps_severe_mr, "gcm.eps2 must be positive");
  fraction(gcm.delta_loose, "gcm.delta1 must be in (0,1]");
  fraction(gcm.delta_severe, "gcm.delta2 must be in (0,1]");
  positive(gtm.lambda, "gtm.lambda must be positive");
  fraction(gtm.keep_threshold, "gtm.t must be in (0,1]");
  positive(vgtm.gamma_mr, "vgtm.gamma must be positive");
  fraction(lgv.zeta, "lgv.zeta must be in (0,1]");
  positive(lgv.delta_mr, "lgv.delta must be positive");
  positive(sacia.huber_tol_mr, "sacia.t_e must be positive");
  positive(ccv.tau_angle, "ccv.tau_a must be positive");
  positive(ccv.tau_translation_mr, "ccv.tau_t must be positive");
  fraction(osac.min_inlier_fraction, "osac.delta must be in (0,1]");
  positive(two_sac.sigma_d_mr, "2sac.sigma_d must be positive");
  positive(two_sac.sigma_a_deg, "2sac.sigma_a must be positive");
  positive(verify_tol_mr, "verify tolerance must be positive");
}

EstimateResult estimate(Method m, const EstimationContext& ctx, const EstimatorParams& params) {
  params.validate();
  switch (m) {
    case Method::ransac: return estimate_ransac(ctx, params.ransac);
    case Method::gcc: return estimate_gcc(ctx, params.gcc);
    case Method::gcm: return estimate_gcm(ctx, params.gcm);
    case Method::gtm: return estimate_gtm(ctx, params.gtm);
    case Method::vgtm: return estimate_vgtm(ctx, params.vgtm);
    case Method::lgv: return estimate_lgv(ctx, params.lgv);
    case Method::sacia: return estimate_sacia(ctx, params.sacia);
    case Method::ccv: return estimate_ccv(ctx, params.ccv, params.verify_tol_mr);
    case Method::one_point_ransac: return estimate_1p_ransac(ctx, params.verify_tol_mr);
    case Method::osac: return estimate_osac(ctx, params.osac, params.verify_tol_mr);
    case Method::two_sac_gc: return estimate_2sac_gc(ctx, params.two_sac, params.verify_tol_mr);
  }
  throw Error("estimate: unknown method");
}

}  // namespace reg3d
