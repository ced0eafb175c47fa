// blin — batched Lipschitz bandit experiments.
//
// Subcommands: run, compare, zooming-oracle, bounds, lower-bound-env.
// Flags use long names only. --config names a JSON file supplying the same
// settings (plus noise_sigma / arm_policy / candidate_depth and inline env
// descriptors); explicit flags win over config values.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blin/commands.hpp"

namespace {

using blin::json;

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw blin::ConfigError("cannot read config file: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batched Lipschitz Narrowing: runs, sweeps, oracles and bound reports"};
  app.require_subcommand(1);

  std::string env_name, alg, out_dir, config_path, family = "static";
  std::int64_t T = 80000;
  int d = 1, B = 3;
  double dz = 0.0, r_min = 1.0 / 64, r = 0.125, Cz = 1.0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> algs;
  bool snapshots = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--env", env_name, "two-peak | linear | constant");
    sub->add_option("--T", T, "time horizon");
    sub->add_option("--d", d, "ambient dimension (constant env)");
    sub->add_option("--dz", dz, "zooming dimension for the ACE schedule");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--config", config_path, "JSON config file");
  };

  auto* run = app.add_subcommand("run", "single experiment: trace/regret/summary (+snapshots)");
  add_common(run);
  run->add_option("--alg", alg, "dblin | ablin | zooming");
  run->add_option("--seed", seeds, "run seed");
  run->add_flag("--snapshots", snapshots, "write partition_batch_m.svg (d = 2)");

  auto* cmp = app.add_subcommand("compare", "multi-algorithm / multi-seed regret sweep");
  add_common(cmp);
  cmp->add_option("--alg", algs, "algorithms to compare")->expected(-1);
  cmp->add_option("--seed", seeds, "seeds to sweep")->expected(-1);

  auto* zo = app.add_subcommand("zooming-oracle", "N_r table and (dz_hat, Cz_hat)");
  add_common(zo);
  zo->add_option("--r-min", r_min, "finest dyadic scale (a power of two)");

  auto* bd = app.add_subcommand("bounds", "evaluate every closed-form bound");
  bd->add_option("--d", d)->required();
  bd->add_option("--dz", dz)->required();
  bd->add_option("--Cz", Cz);
  bd->add_option("--T", T)->required();
  bd->add_option("--B", B, "rounds for the lower bounds");
  bd->add_option("--out", out_dir);

  auto* lb = app.add_subcommand("lower-bound-env", "materialize peak-family instances");
  lb->add_option("--family", family, "static | adaptive");
  lb->add_option("--d", d);
  lb->add_option("--r", r, "peak scale (static family)");
  lb->add_option("--T", T, "horizon (adaptive family)");
  lb->add_option("--B", B, "rounds (adaptive family)");
  lb->add_option("--out", out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json cfg = load_config(config_path);
    auto merge = [&](CLI::App* sub) {
      if (!sub->count("--env") && cfg.contains("env") && cfg.at("env").is_string())
        env_name = cfg.at("env").get<std::string>();
      if (!sub->count("--T") && cfg.contains("T")) T = cfg.at("T").get<std::int64_t>();
      if (!sub->count("--d") && cfg.contains("d")) d = cfg.at("d").get<int>();
      if (!sub->count("--dz") && cfg.contains("dz")) dz = cfg.at("dz").get<double>();
      if (!sub->count("--out") && cfg.contains("out"))
        out_dir = cfg.at("out").get<std::string>();
      if (!sub->count("--seed") && cfg.contains("seeds"))
        seeds = cfg.at("seeds").get<std::vector<std::uint64_t>>();
    };
    auto make_env = [&]() -> json {
      if (env_name.empty() && cfg.contains("env") && cfg.at("env").is_object())
        return cfg.at("env");
      return blin::env_descriptor_from_name(env_name.empty() ? "two-peak" : env_name, d);
    };
    auto make_spec = [&](CLI::App* sub) {
      merge(sub);
      blin::RunSpec spec;
      spec.env = make_env();
      spec.T = T;
      spec.dz = dz;
      if (!seeds.empty()) spec.seeds = seeds;
      spec.out_dir = out_dir.empty() ? "." : out_dir;
      spec.snapshots = snapshots || cfg.value("snapshots", false);
      spec.noise_sigma = cfg.value("noise_sigma", 1.0);
      spec.arm_policy = cfg.value("arm_policy", std::string("cube-center"));
      spec.candidate_depth = cfg.value("candidate_depth", 0);
      if (spec.T < 2) throw blin::ConfigError("invalid horizon: T must be >= 2");
      return spec;
    };

    std::filesystem::path out;
    if (run->parsed()) {
      auto spec = make_spec(run);
      spec.alg = !alg.empty() ? alg : cfg.value("alg", std::string("ablin"));
      return blin::cmd_run(spec);
    }
    if (cmp->parsed()) {
      auto spec = make_spec(cmp);
      auto list = !algs.empty()
                      ? algs
                      : cfg.value("algs", std::vector<std::string>{"ablin", "zooming"});
      return blin::cmd_compare(spec, list);
    }
    if (zo->parsed()) {
      merge(zo);
      double rm = zo->count("--r-min") ? r_min : cfg.value("r_min", r_min);
      return blin::cmd_zooming_oracle(make_env(), rm, out_dir.empty() ? "." : out_dir);
    }
    out = out_dir.empty() ? "." : out_dir;
    if (bd->parsed()) return blin::cmd_bounds(d, dz, Cz, T, B, out);
    if (lb->parsed()) return blin::cmd_lower_bound_env(family, d, r, T, B, out);
  } catch (const blin::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
