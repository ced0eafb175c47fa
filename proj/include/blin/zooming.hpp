#pragma once

// Per-pull-feedback zooming baseline for the regret comparisons.
//
// Arms live at the centers of depth-q dyadic cubes. When some candidate is
// outside every active arm's confidence ball (radius sqrt(8 ln T / (1+n)),
// sup metric), the lex-first such candidate is activated; a fresh arm's
// radius exceeds the space diameter, so at most one activation per step is
// ever needed. Each step plays the active arm maximizing mean + 2 * radius.
// Coverage is tracked lazily with per-arm expiry counts so a T = 80000 run
// stays in the tens of milliseconds.

#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

#include "blin/engine.hpp"

namespace blin {

struct ZoomingConfig {
  std::int64_t horizon = 2;
  std::uint64_t seed = 0;
  double noise_sigma = 1.0;
  int candidate_depth = 0;  // 0 = pick by dimension
};

inline int default_candidate_depth(int d) {
  switch (d) {
    case 1: return 7;
    case 2: return 6;
    case 3: return 4;
    default: return std::max(1, 12 / d);
  }
}

inline RunTrace run_zooming_baseline(const ZoomingConfig& cfg, const RewardInstance& inst) {
  if (cfg.horizon < 2) throw ConfigError("invalid horizon: T must be >= 2");
  const int d = inst.dim();
  const int q = cfg.candidate_depth > 0 ? cfg.candidate_depth : default_candidate_depth(d);
  const double ln_t = std::log(static_cast<double>(cfg.horizon));
  const double conf_num = 8.0 * ln_t;

  std::vector<StandardCube> cand_cubes = unit_grid(d, q);
  const int G = static_cast<int>(cand_cubes.size());
  std::vector<Point> cand_pts(G);
  for (int c = 0; c < G; ++c) cand_pts[c] = cand_cubes[c].center();

  struct Arm {
    int candidate;
    Point x;
    std::int64_t pulls = 0;
    double sum = 0.0;
  };
  std::vector<Arm> arms;
  GaussianStream noise(NoiseModel{cfg.seed, cfg.noise_sigma});

  auto radius = [&](std::int64_t pulls) { return std::sqrt(conf_num / (1.0 + pulls)); };
  // arm v covers candidate u while pulls(v) <= expiry(u, v)
  auto cover_expiry = [&](double dist) -> std::int64_t {
    if (dist <= 0.0) return std::numeric_limits<std::int64_t>::max();
    double bound = conf_num / (dist * dist) - 1.0;
    if (bound < 0.0) return -1;
    return static_cast<std::int64_t>(std::floor(bound));
  };

  std::vector<std::vector<std::pair<int, std::int64_t>>> bucket;  // per arm: (candidate, expiry)
  std::deque<int> uncovered;
  for (int c = 0; c < G; ++c) uncovered.push_back(c);

  auto try_cover = [&](int c) -> bool {
    int best_arm = -1;
    std::int64_t best_life = -1;
    for (int a = 0; a < static_cast<int>(arms.size()); ++a) {
      std::int64_t exp = cover_expiry(sup_distance(cand_pts[c], arms[a].x));
      if (exp >= arms[a].pulls) {
        std::int64_t life = exp == std::numeric_limits<std::int64_t>::max()
                                ? exp
                                : exp - arms[a].pulls;
        if (life > best_life) {
          best_life = life;
          best_arm = a;
        }
      }
    }
    if (best_arm < 0) return false;
    bucket[best_arm].emplace_back(c, cover_expiry(sup_distance(cand_pts[c], arms[best_arm].x)));
    return true;
  };

  RunTrace trace;
  trace.dim = d;
  trace.horizon = cfg.horizon;
  trace.algorithm = "zooming";
  trace.seed = cfg.seed;
  trace.noise_sigma = cfg.noise_sigma;
  trace.pull_batch.reserve(cfg.horizon);
  trace.pull_slot.reserve(cfg.horizon);
  trace.arms.reserve(cfg.horizon * d);

  BatchRecord rec;  // single record holding the activated arms' cubes
  rec.number = 1;
  rec.edge = std::ldexp(1.0, -q);
  rec.prev_edge = 1.0;
  trace.batches.push_back(rec);

  for (std::int64_t t = 0; t < cfg.horizon; ++t) {
    // activation phase
    while (!uncovered.empty()) {
      int c = uncovered.front();
      uncovered.pop_front();
      if (try_cover(c)) continue;
      arms.push_back(Arm{c, cand_pts[c], 0, 0.0});
      bucket.emplace_back();
      bucket.back().emplace_back(c, std::numeric_limits<std::int64_t>::max());
      trace.batches[0].active.push_back(cand_cubes[c]);
      break;  // the fresh arm's radius covers the whole space
    }

    int best = 0;
    double best_index = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < static_cast<int>(arms.size()); ++a) {
      double mean = arms[a].pulls > 0 ? arms[a].sum / arms[a].pulls : 0.0;
      double idx = mean + 2.0 * radius(arms[a].pulls);
      if (idx > best_index) {
        best_index = idx;
        best = a;
      }
    }

    Arm& arm = arms[best];
    double reward = inst.mean(arm.x) + noise.next();
    arm.pulls += 1;
    arm.sum += reward;

    trace.pull_batch.push_back(0);
    trace.pull_slot.push_back(best);
    trace.arms.insert(trace.arms.end(), arm.x.begin(), arm.x.end());
    trace.rewards.push_back(reward);

    // expire covers broken by this arm's shrunken radius
    auto& bk = bucket[best];
    for (std::size_t i = 0; i < bk.size();) {
      if (bk[i].second < arm.pulls) {
        int c = bk[i].first;
        bk[i] = bk.back();
        bk.pop_back();
        if (!try_cover(c)) uncovered.push_back(c);
      } else {
        ++i;
      }
    }
  }

  trace.commits_for_decisions = static_cast<int>(cfg.horizon);  // per-pull feedback: B = T
  trace.rounds_used = static_cast<int>(cfg.horizon);
  return trace;
}

}  // namespace blin
