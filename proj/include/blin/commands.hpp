#pragma once

// Subcommand implementations shared by the CLI binary and the test suites.
// Exit codes: 0 success, 2 usage/config error, 1 runtime failure (mapped by
// the caller; these functions throw ConfigError for usage problems).

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "blin/analysis.hpp"
#include "blin/engine.hpp"
#include "blin/environments.hpp"
#include "blin/trace_io.hpp"
#include "blin/zooming.hpp"

namespace blin {

inline json env_descriptor_from_name(const std::string& name, int d) {
  if (name == "two-peak") return json{{"kind", "two-peak"}};
  if (name == "linear") return json{{"kind", "linear"}};
  if (name == "constant") return json{{"kind", "constant"}, {"d", d}};
  throw ConfigError("unknown env: " + name + " (expected two-peak | linear | constant, "
                    "or an instance descriptor via --config)");
}

struct RunSpec {
  json env;  // instance descriptor
  std::string alg = "ablin";
  std::int64_t T = 2;
  double dz = 0.0;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path out_dir = ".";
  bool snapshots = false;
  double noise_sigma = 1.0;
  std::string arm_policy = "cube-center";
  int candidate_depth = 0;  // zooming baseline; 0 = auto
};

inline ArmPolicy parse_arm_policy(const std::string& s) {
  if (s == "cube-center") return ArmPolicy::CubeCenter;
  if (s == "uniform-in-cube") return ArmPolicy::UniformInCube;
  throw ConfigError("unknown arm policy: " + s);
}

inline RunTrace run_algorithm(const RunSpec& spec, const RewardInstance& inst,
                              std::uint64_t seed) {
  if (spec.alg == "zooming") {
    ZoomingConfig zc;
    zc.horizon = spec.T;
    zc.seed = seed;
    zc.noise_sigma = spec.noise_sigma;
    zc.candidate_depth = spec.candidate_depth;
    return run_zooming_baseline(zc, inst);
  }
  RunConfig rc;
  rc.horizon = spec.T;
  rc.seed = seed;
  rc.noise_sigma = spec.noise_sigma;
  rc.arm_policy = parse_arm_policy(spec.arm_policy);
  if (spec.alg == "dblin") {
    rc.schedule = EdgeLengthSchedule::doubling();
  } else if (spec.alg == "ablin") {
    rc.schedule =
        EdgeLengthSchedule::rounded_ace(ACEParams::for_problem(inst.dim(), spec.dz, spec.T));
  } else {
    throw ConfigError("unknown algorithm: " + spec.alg +
                      " (expected dblin | ablin | zooming)");
  }
  return run_blin(rc, inst);
}

/// run: trace.csv, summary.json, regret.csv (+ partition_batch_m.svg).
inline int cmd_run(const RunSpec& spec) {
  if (spec.seeds.size() != 1)
    throw ConfigError("run takes exactly one --seed; use compare for sweeps");
  InstancePtr inst = instance_from_descriptor(spec.env);
  RunTrace trace = run_algorithm(spec, *inst, spec.seeds[0]);
  atomic_write(spec.out_dir / "trace.csv", trace_csv(trace, *inst));
  atomic_write(spec.out_dir / "regret.csv", regret_csv(cumulative_regret(trace, *inst)));
  json summary = summary_json(trace, *inst);
  if (spec.snapshots) summary["snapshots"] = write_partition_svgs(spec.out_dir, trace);
  atomic_write(spec.out_dir / "summary.json", summary.dump(2) + "\n");
  return 0;
}

/// compare: per-(alg, seed) regret CSVs, one merged long-format CSV with
/// batch boundaries, and a JSON of final regrets.
inline int cmd_compare(const RunSpec& base, const std::vector<std::string>& algs) {
  if (algs.size() < 2 && base.seeds.size() < 2)
    throw ConfigError("compare needs at least two algorithms or two seeds");
  if (algs.empty()) throw ConfigError("compare needs at least one algorithm");
  InstancePtr inst = instance_from_descriptor(base.env);
  json finals;
  std::string merged = "alg,seed,t,batch,regret\n";
  for (const auto& alg : algs) {
    for (auto seed : base.seeds) {
      RunSpec spec = base;
      spec.alg = alg;
      RunTrace trace = run_algorithm(spec, *inst, seed);
      std::vector<double> series = cumulative_regret(trace, *inst);
      atomic_write(base.out_dir / ("regret_" + alg + "_" + std::to_string(seed) + ".csv"),
                   regret_csv(series));
      const bool per_pull = trace.algorithm == "zooming";
      for (std::int64_t t = 0; t < trace.total_pulls(); ++t) {
        merged += alg;
        merged += ',';
        merged += std::to_string(seed);
        merged += ',';
        merged += std::to_string(t + 1);
        merged += ',';
        merged +=
            std::to_string(per_pull ? t + 1 : trace.batches[trace.pull_batch[t]].number);
        merged += ',';
        merged += fmt_double(series[t]);
        merged += '\n';
      }
      finals[alg][std::to_string(seed)] = {{"final_regret", series.back()},
                                           {"rounds_used", trace.rounds_used}};
    }
  }
  atomic_write(base.out_dir / "compare.csv", merged);
  atomic_write(base.out_dir / "final_regrets.json", finals.dump(2) + "\n");
  return 0;
}

/// zooming-oracle: table of (r, N_r) plus (dz_hat, Cz_hat).
inline int cmd_zooming_oracle(const json& env, double r_min,
                              const std::filesystem::path& out_dir) {
  InstancePtr inst = instance_from_descriptor(env);
  ZoomingEstimate est = zooming_dimension_estimate(*inst, r_min);
  json out;
  out["env"] = inst->descriptor();
  out["dz_hat"] = est.dz_hat;
  out["Cz_hat"] = est.cz_hat;
  json table = json::array();
  for (auto& [r, n] : est.table) table.push_back({{"r", r}, {"N_r", n}});
  out["table"] = table;
  atomic_write(out_dir / "zooming_oracle.json", out.dump(2) + "\n");
  return 0;
}

/// bounds: full BoundReport as bounds.json.
inline int cmd_bounds(int d, double dz, double Cz, std::int64_t T, int B,
                      const std::filesystem::path& out_dir) {
  BoundReport r = evaluate_bounds(d, dz, Cz, T, B);
  atomic_write(out_dir / "bounds.json", r.to_json().dump(2) + "\n");
  return 0;
}

/// lower-bound-env: materialize instance descriptors for a peak family.
inline int cmd_lower_bound_env(const std::string& family, int d, double r, std::int64_t T, int B,
                               const std::filesystem::path& out_dir) {
  json out;
  if (family == "static") {
    auto base = static_lower_bound_instance(d, r, 1);
    out["family"] = "static";
    out["M"] = static_cast<const ConePeaksInstance&>(*base).peaks().size();
    json insts = json::array();
    auto M = static_cast<int>(static_cast<const ConePeaksInstance&>(*base).peaks().size());
    for (int i = 1; i <= M; ++i)
      insts.push_back(static_lower_bound_instance(d, r, i)->descriptor());
    out["instances"] = insts;
  } else if (family == "adaptive") {
    AdaptiveGrid g = adaptive_grid(d, T, B);
    out["family"] = "adaptive";
    out["eps"] = g.eps;
    out["ref_times"] = g.ref_times;
    out["radii"] = g.radii;
    out["peak_counts"] = g.peak_counts;
    json insts = json::array();
    for (int j = 1; j <= B; ++j) {
      // one representative instance per world (k = 1); I_B is the singleton
      insts.push_back(adaptive_lower_bound_world(d, T, B, j, 1)->descriptor());
    }
    out["instances"] = insts;
  } else {
    throw ConfigError("unknown family: " + family + " (expected static | adaptive)");
  }
  atomic_write(out_dir / ("lower_bound_env_" + family + ".json"), out.dump(2) + "\n");
  return 0;
}

}  // namespace blin
