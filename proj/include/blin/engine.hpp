#pragma once

// BLiN: batched elimination over a shrinking dyadic partition.
//
// Each batch m plays every active cube n_m = ceil(16 ln T / r_m^2) times,
// commits once (one communication round), eliminates cubes whose estimate
// trails the best by MORE than 4 r_m (strict, so boundary ties survive),
// partitions survivors down to the next edge length, and exits the loop the
// moment the pull budget runs out mid-batch. A truncated batch never commits
// for decision-making; its rewards, and any cleanup pulls, are delivered by
// one final commit at t = T (the realized grid always ends at the horizon).
// rounds_used is the realized grid size, which reproduces the "B*+1 rounds"
// accounting: full-batch commits plus the final handoff.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blin/channel.hpp"
#include "blin/environments.hpp"
#include "blin/errors.hpp"
#include "blin/geometry.hpp"
#include "blin/sequences.hpp"

namespace blin {

enum class ArmPolicy { CubeCenter, UniformInCube };

struct RunConfig {
  std::int64_t horizon = 2;
  EdgeLengthSchedule schedule = EdgeLengthSchedule::doubling();
  ArmPolicy arm_policy = ArmPolicy::CubeCenter;
  std::uint64_t seed = 0;
  double noise_sigma = 1.0;
};

struct ActiveCubeStats {
  StandardCube cube;
  std::int64_t pulls = 0;
  double reward_sum = 0.0;
  double estimate() const { return reward_sum / static_cast<double>(pulls); }
};

struct EliminationResult {
  std::vector<int> survivors;   // slots, ascending
  std::vector<int> eliminated;  // slots, ascending
  int best_slot = 0;
  double best_estimate = 0.0;
};

/// Eliminate C iff max estimate - estimate(C) > 4 r_m. The argmax cube has
/// gap 0, so at least one cube always survives.
inline EliminationResult eliminate(const std::vector<ActiveCubeStats>& stats, double r_m) {
  if (stats.empty()) throw ConfigError("eliminate: empty active set");
  EliminationResult res;
  res.best_estimate = stats[0].estimate();
  for (int s = 1; s < static_cast<int>(stats.size()); ++s) {
    double e = stats[s].estimate();
    if (e > res.best_estimate) {
      res.best_estimate = e;
      res.best_slot = s;
    }
  }
  for (int s = 0; s < static_cast<int>(stats.size()); ++s) {
    if (res.best_estimate - stats[s].estimate() > 4.0 * r_m)
      res.eliminated.push_back(s);
    else
      res.survivors.push_back(s);
  }
  return res;
}

struct BatchRecord {
  enum class Role { Batch, Cleanup };
  Role role = Role::Batch;
  int number = 0;           // 1-based batch number; cleanup continues the count
  double edge = 1.0;        // r_m (for cleanup: edge of the played cube)
  double prev_edge = 2.0;   // r_{m-1} under the schedule's m = 1 extension
  std::int64_t samples_per_cube = 0;
  std::vector<StandardCube> active;
  std::vector<double> estimates;  // filled on commit
  int best_slot = -1;
  std::vector<int> eliminated_slots;
  bool committed = false;
  std::int64_t commit_time = 0;
};

struct RunTrace {
  // config echo
  int dim = 0;
  std::int64_t horizon = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  double noise_sigma = 1.0;
  ArmPolicy arm_policy = ArmPolicy::CubeCenter;

  // per-pull log; arms are flattened row-major (total_pulls x dim)
  std::vector<std::int32_t> pull_batch;  // index into batches
  std::vector<std::int32_t> pull_slot;   // slot within that record's active list
  std::vector<double> rewards;
  std::vector<double> arms;

  std::vector<BatchRecord> batches;
  std::vector<std::int64_t> grid;  // realized commit times t_1 < ... <= T
  int commits_for_decisions = 0;   // full-batch commits usable by the player
  bool final_handoff = false;      // trailing rewards delivered at t = T
  int rounds_used = 0;
  std::int64_t cleanup_pulls = 0;

  std::int64_t total_pulls() const { return static_cast<std::int64_t>(rewards.size()); }
  const StandardCube& cube_of_pull(std::int64_t t) const {
    return batches[pull_batch[t]].active[pull_slot[t]];
  }
  Point arm_of_pull(std::int64_t t) const {
    return Point(arms.begin() + t * dim, arms.begin() + (t + 1) * dim);
  }
};

inline std::string schedule_algorithm_name(const EdgeLengthSchedule& s) {
  switch (s.kind()) {
    case ScheduleKind::Doubling: return "dblin";
    case ScheduleKind::RoundedAce: return "ablin";
    case ScheduleKind::Ace: return "ace";
    case ScheduleKind::Custom: return "custom";
  }
  return "?";
}

namespace detail {

inline constexpr std::uint64_t kArmStreamSalt = 0x9E3779B97F4A7C15ull;

inline RunTrace run_blin_impl(const RunConfig& cfg, int dim, RewardSource& source) {
  if (cfg.horizon < 2) throw ConfigError("invalid horizon: T must be >= 2");
  if (!cfg.schedule.dyadic())
    throw ConfigError(
        "raw ACE edge lengths have non-integer ratios; use rounded-ace for runs");

  const auto r1 = cfg.schedule.edge_length(1);
  if (!r1) throw ConfigError("schedule emits no edge lengths");

  RunTrace trace;
  trace.dim = dim;
  trace.horizon = cfg.horizon;
  trace.algorithm = schedule_algorithm_name(cfg.schedule);
  trace.seed = cfg.seed;
  trace.noise_sigma = cfg.noise_sigma;
  trace.arm_policy = cfg.arm_policy;
  trace.pull_batch.reserve(cfg.horizon);
  trace.pull_slot.reserve(cfg.horizon);
  trace.arms.reserve(cfg.horizon * dim);

  BatchedChannel channel(source, cfg.horizon);
  std::mt19937_64 arm_rng(cfg.seed ^ kArmStreamSalt);  // distinct from the noise stream

  std::vector<StandardCube> active = unit_grid(dim, EdgeLengthSchedule::dyadic_exponent(*r1));

  auto log_pull = [&](int rec, int slot, const Point& arm) {
    trace.pull_batch.push_back(rec);
    trace.pull_slot.push_back(slot);
    trace.arms.insert(trace.arms.end(), arm.begin(), arm.end());
    channel.play(slot, arm);
  };

  int m = 1;
  int last_committed = -1;
  bool truncated = false;
  while (!truncated) {
    auto r_opt = cfg.schedule.edge_length(m);
    if (!r_opt || channel.exhausted()) break;
    const double r = *r_opt;
    const std::int64_t n = samples_per_cube(r, cfg.horizon);

    BatchRecord rec;
    rec.number = m;
    rec.edge = r;
    rec.prev_edge = cfg.schedule.previous_edge(m);
    rec.samples_per_cube = n;
    rec.active = active;
    const int rec_idx = static_cast<int>(trace.batches.size());
    const std::int64_t batch_start = channel.time();
    trace.batches.push_back(std::move(rec));
    auto& record = trace.batches.back();

    for (int slot = 0; slot < static_cast<int>(active.size()) && !truncated; ++slot) {
      for (std::int64_t i = 0; i < n; ++i) {
        if (channel.exhausted()) {
          truncated = true;
          break;
        }
        Point arm = cfg.arm_policy == ArmPolicy::CubeCenter ? active[slot].center()
                                                            : sample_uniform(active[slot], arm_rng);
        log_pull(rec_idx, slot, arm);
      }
    }
    if (truncated) break;  // budget ran out mid-batch: no commit, straight to handoff

    channel.commit();
    record.committed = true;
    record.commit_time = channel.time();
    ++trace.commits_for_decisions;
    last_committed = rec_idx;

    std::vector<ActiveCubeStats> stats(active.size());
    for (std::size_t s = 0; s < active.size(); ++s) stats[s].cube = active[s];
    for (std::int64_t t = batch_start; t < record.commit_time; ++t) {
      auto& cs = stats[channel.cube_slot(t)];
      ++cs.pulls;
      cs.reward_sum += channel.reward(t);
    }
    record.estimates.resize(stats.size());
    for (std::size_t s = 0; s < stats.size(); ++s) record.estimates[s] = stats[s].estimate();
    EliminationResult elim = eliminate(stats, r);
    record.best_slot = elim.best_slot;
    record.eliminated_slots = elim.eliminated;

    std::vector<StandardCube> survivors;
    survivors.reserve(elim.survivors.size());
    for (int s : elim.survivors) survivors.push_back(active[s]);

    auto r_next = cfg.schedule.edge_length(m + 1);
    if (r_next) {
      int e_now = EdgeLengthSchedule::dyadic_exponent(r);
      int e_next = EdgeLengthSchedule::dyadic_exponent(*r_next);
      std::uint64_t factor = std::uint64_t{1} << (e_next - e_now);
      std::vector<StandardCube> next;
      for (const auto& c : survivors) {
        auto kids = partition(c, factor);
        next.insert(next.end(), kids.begin(), kids.end());
      }
      std::sort(next.begin(), next.end());  // canonical lex order for the next batch
      active = std::move(next);
    } else {
      active = std::move(survivors);
    }
    ++m;
  }

  // Cleanup: schedule exhausted with budget left. Plays the center of the
  // surviving cube with the highest last-committed estimate; needs no
  // further commits for decision-making.
  if (!channel.exhausted()) {
    if (last_committed < 0) throw ContractViolation("cleanup reached without any committed batch");
    const auto& prev = trace.batches[last_committed];
    StandardCube best_cube = prev.active[prev.best_slot];
    BatchRecord rec;
    rec.role = BatchRecord::Role::Cleanup;
    rec.number = prev.number + 1;
    rec.edge = best_cube.edge();
    rec.prev_edge = prev.edge;
    rec.active = {best_cube};
    const int rec_idx = static_cast<int>(trace.batches.size());
    trace.batches.push_back(std::move(rec));
    Point arm = best_cube.center();
    while (!channel.exhausted()) {
      log_pull(rec_idx, 0, arm);
      ++trace.cleanup_pulls;
    }
  }

  if (channel.has_uncommitted()) {
    channel.commit();  // final handoff at t = T
    trace.final_handoff = true;
  }

  trace.grid = channel.grid();
  trace.rounds_used = static_cast<int>(trace.grid.size());
  trace.rewards.resize(channel.time());
  for (std::int64_t t = 0; t < channel.time(); ++t) trace.rewards[t] = channel.reward(t);
  return trace;
}

}  // namespace detail

inline RunTrace run_blin(const RunConfig& cfg, const RewardInstance& instance) {
  InstanceRewardSource source(instance, NoiseModel{cfg.seed, cfg.noise_sigma});
  return detail::run_blin_impl(cfg, instance.dim(), source);
}

/// Re-executes the decision process against the trace's recorded rewards.
inline RunTrace run_blin_replay(const RunConfig& cfg, int dim, const std::vector<double>& rewards) {
  ReplayRewardSource source(rewards);
  return detail::run_blin_impl(cfg, dim, source);
}

struct ReplayReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Feedback-isolation verifier: every decision (arm choice, elimination,
/// partition, grid point) must be a deterministic function of the config and
/// the committed history, so replaying the recorded rewards must reproduce
/// the trace exactly.
inline ReplayReport replay_verify(const RunTrace& trace, const RunConfig& cfg) {
  ReplayReport rep;
  auto fail = [&](std::string msg) {
    rep.ok = false;
    rep.violations.push_back(std::move(msg));
  };
  RunTrace re = run_blin_replay(cfg, trace.dim, trace.rewards);
  if (re.total_pulls() != trace.total_pulls()) fail("pull count mismatch");
  if (re.arms != trace.arms) fail("arm sequence mismatch");
  if (re.pull_batch != trace.pull_batch || re.pull_slot != trace.pull_slot)
    fail("pull-to-cube assignment mismatch");
  if (re.grid != trace.grid) fail("communication grid mismatch");
  if (re.batches.size() != trace.batches.size()) {
    fail("batch count mismatch");
    return rep;
  }
  for (std::size_t b = 0; b < trace.batches.size(); ++b) {
    const auto& x = trace.batches[b];
    const auto& y = re.batches[b];
    if (!(x.active == y.active)) fail("active set mismatch in batch " + std::to_string(x.number));
    if (x.eliminated_slots != y.eliminated_slots)
      fail("elimination mismatch in batch " + std::to_string(x.number));
    if (x.estimates != y.estimates)
      fail("estimate mismatch in batch " + std::to_string(x.number));
    if (x.committed != y.committed || x.commit_time != y.commit_time)
      fail("commit mismatch in batch " + std::to_string(x.number));
  }
  return rep;
}

}  // namespace blin
