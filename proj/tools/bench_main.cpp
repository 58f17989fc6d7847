#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <vector>

#include "reg3d/bench.hpp"
#include "reg3d/errors.hpp"

namespace fs = std::filesystem;
using namespace reg3d;

namespace {

std::vector<Method> parse_methods(const std::string& list) {
  if (list == "all" || list.empty()) {
    auto span = all_methods();
    return {span.begin(), span.end()};
  }
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = list.find(',', start);
    const std::string token =
        list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!token.empty()) {
      const auto m = method_from_string(token);
      if (!m) throw CLI::ValidationError("--methods", "unknown method '" + token + "'");
      out.push_back(*m);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw CLI::ValidationError("--methods", "no methods selected");
  return out;
}

BenchConfig load_bench_config(const std::string& path) {
  if (path.empty()) return BenchConfig{};
  return BenchConfig::from_config(Config::load(path));
}

void print_summary(const SuiteReport& report, bool with_time) {
  std::printf("%-10s %-16s %7s %7s %9s", "method", "group", "count", "success", "pct");
  if (with_time) std::printf(" %12s", "mean_s");
  std::printf("\n");
  for (const MethodGroupStat& s : report.aggregate()) {
    if (s.group != "overall") continue;
    std::printf("%-10s %-16s %7d %7d %8.1f%%", std::string(method_name(s.method)).c_str(),
                s.group.c_str(), s.count, s.successes, s.success_pct());
    if (with_time) std::printf(" %12.6f", s.mean_seconds);
    std::printf("\n");
  }
}

void emit_all(SuiteReport& report, const std::string& out_dir, std::uint64_t config_hash) {
  report.config_hash = config_hash;
  fs::create_directories(out_dir);
  emit_pair_csv(report, (fs::path(out_dir) / "pairs.csv").string());
  emit_aggregate_csv(report, (fs::path(out_dir) / "aggregate.csv").string());
  emit_meta(report, (fs::path(out_dir) / "meta.txt").string());
  emit_plots(report, out_dir);
  std::printf("wrote %s/{pairs.csv, aggregate.csv, meta.txt, *.svg}\n", out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust rigid-transform estimation benchmark"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  std::string run_manifest, run_methods = "all", run_config, run_out = "out";
  std::uint64_t run_seed = 0;
  bool run_icp = false;
  CLI::App* run = app.add_subcommand("run", "Run a manifest of scan pairs");
  run->add_option("--manifest", run_manifest, "pair manifest file")->required();
  run->add_option("--methods", run_methods, "comma-separated list or 'all'");
  run->add_option("--config", run_config, "key=value config file");
  run->add_option("--seed", run_seed, "master seed");
  run->add_flag("--icp", run_icp, "refine every estimate with ICP");
  run->add_option("--out", run_out, "output directory");

  // --- pcc-sweep -----------------------------------------------------------
  std::string sw_model, sw_scene, sw_gt, sw_config, sw_out = "out";
  std::uint64_t sw_seed = 0;
  int sw_trials = -1;
  CLI::App* sweep = app.add_subcommand("pcc-sweep", "Synthetic correspondence sweep over PCC");
  sweep->add_option("--model", sw_model, "model PLY")->required();
  sweep->add_option("--scene", sw_scene, "scene PLY")->required();
  sweep->add_option("--gt", sw_gt, "ground-truth transform file")->required();
  sweep->add_option("--trials", sw_trials, "trials per PCC level");
  sweep->add_option("--seed", sw_seed, "master seed");
  sweep->add_option("--config", sw_config, "key=value config file");
  sweep->add_option("--out", sw_out, "output directory");

  // --- params --------------------------------------------------------------
  app.add_subcommand("params", "Print the default parameter table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("params")) {
      std::cout << BenchConfig{}.describe();
      return 0;
    }
    if (app.got_subcommand("run")) {
      BenchConfig cfg = load_bench_config(run_config);
      if (run_icp) cfg.use_icp = true;
      const auto methods = parse_methods(run_methods);
      std::vector<PairSpec> specs;
      for (const ManifestPair& mp : load_manifest(run_manifest))
        specs.push_back(PairSpec::from_manifest(mp));
      SuiteReport report = run_suite(specs, methods, cfg, run_seed);
      const std::uint64_t hash =
          run_config.empty() ? Config{}.hash() : Config::load(run_config).hash();
      emit_all(report, run_out, hash);
      print_summary(report, true);
      return 0;
    }
    if (app.got_subcommand("pcc-sweep")) {
      BenchConfig cfg = load_bench_config(sw_config);
      if (sw_trials > 0) cfg.sweep_trials = sw_trials;
      const PointCloud model = load_ply(sw_model);
      const PointCloud scene = load_ply(sw_scene);
      const RigidTransform gt = load_transform(sw_gt);
      SuiteReport report = pcc_sweep(model, scene, gt, cfg, sw_seed);
      const std::uint64_t hash =
          sw_config.empty() ? Config{}.hash() : Config::load(sw_config).hash();
      emit_all(report, sw_out, hash);
      print_summary(report, false);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
