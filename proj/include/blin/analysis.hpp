#pragma once

// Regret metrics, lemma-level runtime checks on traces, and evaluators for
// every closed-form bound. Log conventions mirror sequences.hpp: natural log
// inside n_m and everything derived from it (concentration widths, R_z),
// base-2 logs in the ACE / B* / regret-rate exponent algebra.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "blin/engine.hpp"
#include "blin/environments.hpp"
#include "blin/sequences.hpp"

namespace blin {

/// R(t) prefix series against the true means: sum_{s<=t} (mu* - mu(x_s)).
inline std::vector<double> cumulative_regret(const RunTrace& trace, const RewardInstance& inst) {
  std::vector<double> out(trace.total_pulls());
  const double star = inst.mu_star();
  double acc = 0.0;
  Point x(trace.dim);
  for (std::int64_t t = 0; t < trace.total_pulls(); ++t) {
    for (int a = 0; a < trace.dim; ++a) x[a] = trace.arms[t * trace.dim + a];
    acc += star - inst.mean(x);
    out[t] = acc;
  }
  return out;
}

inline double final_regret(const RunTrace& trace, const RewardInstance& inst) {
  auto s = cumulative_regret(trace, inst);
  return s.empty() ? 0.0 : s.back();
}

struct EventEReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Concentration event: for every committed batch m, active cube C and
/// x in C, |mu(x) - muhat_m(C)| <= r_m + sqrt(16 ln T / n_m). Checked on the
/// cube extrema of the true mean (exact where the instance provides them,
/// grid-tight otherwise), which dominates the per-arm condition.
inline EventEReport check_event_E(const RunTrace& trace, const RewardInstance& inst,
                                  int grid_per_axis = 33) {
  EventEReport rep;
  const double ln_t = std::log(static_cast<double>(trace.horizon));
  std::vector<std::vector<double>> sums(trace.batches.size());
  std::vector<std::vector<std::int64_t>> counts(trace.batches.size());
  for (std::size_t b = 0; b < trace.batches.size(); ++b) {
    sums[b].assign(trace.batches[b].active.size(), 0.0);
    counts[b].assign(trace.batches[b].active.size(), 0);
  }
  for (std::int64_t t = 0; t < trace.total_pulls(); ++t) {
    sums[trace.pull_batch[t]][trace.pull_slot[t]] += trace.rewards[t];
    counts[trace.pull_batch[t]][trace.pull_slot[t]] += 1;
  }
  for (std::size_t b = 0; b < trace.batches.size(); ++b) {
    const auto& rec = trace.batches[b];
    if (!rec.committed || rec.role != BatchRecord::Role::Batch) continue;
    const double width = rec.edge + std::sqrt(16.0 * ln_t / static_cast<double>(rec.samples_per_cube));
    for (std::size_t s = 0; s < rec.active.size(); ++s) {
      double est = sums[b][s] / static_cast<double>(counts[b][s]);
      CubeExtrema ex = inst.cube_extrema(rec.active[s], grid_per_axis);
      double dev = std::max(std::abs(ex.max - est), std::abs(ex.min - est));
      if (dev > width) {
        rep.ok = false;
        rep.violations.push_back("batch " + std::to_string(rec.number) + " cube slot " +
                                 std::to_string(s) + ": deviation " + std::to_string(dev) +
                                 " > " + std::to_string(width));
      }
    }
  }
  return rep;
}

/// True iff a cube containing x* is active entering every committed batch
/// (equivalently: x*'s cube is never among the eliminated).
inline bool check_optimal_survival(const RunTrace& trace, const RewardInstance& inst) {
  const Point star = inst.x_star();
  for (const auto& rec : trace.batches) {
    if (rec.role != BatchRecord::Role::Batch) continue;
    bool covered = false;
    for (const auto& c : rec.active)
      if (c.contains(star)) {
        covered = true;
        break;
      }
    if (!covered) return false;
  }
  return true;
}

struct Lemma3Report {
  bool ok = true;
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  double worst_ratio = 0.0;  // max Delta_x / (8 r_{m-1})
};

/// Every pull of batch m must satisfy Delta_x <= 8 r_{m-1}; cleanup pulls are
/// held to 8 r of the last committed batch.
inline Lemma3Report check_lemma3(const RunTrace& trace, const RewardInstance& inst,
                                 double tol = 0.0) {
  Lemma3Report rep;
  const double star = inst.mu_star();
  Point x(trace.dim);
  for (std::int64_t t = 0; t < trace.total_pulls(); ++t) {
    for (int a = 0; a < trace.dim; ++a) x[a] = trace.arms[t * trace.dim + a];
    double delta = star - inst.mean(x);
    double bound = 8.0 * trace.batches[trace.pull_batch[t]].prev_edge;
    ++rep.checked;
    rep.worst_ratio = std::max(rep.worst_ratio, delta / bound);
    if (delta > bound + tol) {
      rep.ok = false;
      ++rep.violations;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Closed-form bound evaluators

struct DblinBounds {
  double regret_bound = 0.0;
  double rounds_bound = 0.0;
};

/// R(T) <= 528 (log T)^{1/(dz+2)} T^{(dz+1)/(dz+2)};
/// rounds <= (log T - log log T)/(dz+2) + 2. Base-2 logs.
inline DblinBounds dblin_bounds(int /*d*/, double dz, std::int64_t T) {
  if (T < 2) throw ConfigError("invalid horizon: T must be >= 2");
  double lt = std::log2(static_cast<double>(T));
  DblinBounds b;
  b.regret_bound = 528.0 * std::pow(lt, 1.0 / (dz + 2.0)) *
                   std::pow(static_cast<double>(T), (dz + 1.0) / (dz + 2.0));
  b.rounds_bound = (lt - std::log2(lt)) / (dz + 2.0) + 2.0;
  return b;
}

struct AblinBounds {
  double regret_bound = 0.0;
  double rounded_regret_bound = 0.0;
  double rounds_bound = 0.0;
  double rounded_rounds_bound = 0.0;
};

/// A-BLiN: (128 Cz / log((d+2)/(d+1-dz)) * loglog T + 8e) * T^{(dz+1)/(dz+2)}
/// (log T)^{1/(dz+2)}; rounded variant adds 512 Cz to the bracket. Rounds:
/// loglog T / log((d+2)/(d+1-dz)) + 1 (doubled inside for rounded). Base 2.
inline AblinBounds ablin_bounds(int d, double dz, double Cz, std::int64_t T) {
  if (T < 2) throw ConfigError("invalid horizon: T must be >= 2");
  if (!(dz >= 0.0) || dz >= d + 1) throw ConfigError("zooming dimension must be in [0, d+1)");
  double lt = std::log2(static_cast<double>(T));
  double llt = std::log2(lt);
  double lr = std::log2((d + 2.0) / (d + 1.0 - dz));
  double rate = std::pow(static_cast<double>(T), (dz + 1.0) / (dz + 2.0)) *
                std::pow(lt, 1.0 / (dz + 2.0));
  const double e8 = 8.0 * kNaturalBase;
  AblinBounds b;
  b.regret_bound = (128.0 * Cz / lr * llt + e8) * rate;
  b.rounded_regret_bound = (128.0 * Cz * llt / lr + 512.0 * Cz + e8) * rate;
  b.rounds_bound = llt / lr + 1.0;
  b.rounded_rounds_bound = 2.0 * llt / lr + 1.0;
  return b;
}

/// 2 (ln T)^{1/(d+2)} T^{(d+1)/(d+2)} — the worst-case R_z envelope.
inline double rz_envelope(int d, std::int64_t T) {
  double lt = std::log(static_cast<double>(T));
  return 2.0 * std::pow(lt, 1.0 / (d + 2.0)) *
         std::pow(static_cast<double>(T), (d + 1.0) / (d + 2.0));
}

/// T-exponent (1 - eps) / (1 - eps^B), eps = 1/(d+2).
inline double lower_bound_exponent(int d, int B) {
  double eps = 1.0 / (d + 2.0);
  return (1.0 - eps) / (1.0 - std::pow(eps, B));
}

/// Raw form (1/(32 e^{1/16})) T^{(1-eps)/(1-eps^B)}.
inline double lower_bound_static_raw(int d, std::int64_t T, int B) {
  if (B < 1) throw ConfigError("rounds must be >= 1");
  return std::pow(static_cast<double>(T), lower_bound_exponent(d, B)) /
         (32.0 * std::exp(1.0 / 16.0));
}

/// Constant-carrying form: (1/(128 e^{1/16})) (ln T)^{-eps/(1-eps^B)}
/// R_z(T)^{1/(1-eps^B)} with R_z's envelope substituted.
inline double lower_bound_static(int d, std::int64_t T, int B) {
  if (B < 1) throw ConfigError("rounds must be >= 1");
  double eps = 1.0 / (d + 2.0);
  double den = 1.0 - std::pow(eps, B);
  double lt = std::log(static_cast<double>(T));
  return (1.0 / (128.0 * std::exp(1.0 / 16.0))) * std::pow(lt, -eps / den) *
         std::pow(rz_envelope(d, T), 1.0 / den);
}

/// Adaptive-grid variant: constant 1/1024 and a 1/B^2 penalty.
inline double lower_bound_adaptive(int d, std::int64_t T, int B) {
  if (B < 1) throw ConfigError("rounds must be >= 1");
  double eps = 1.0 / (d + 2.0);
  double den = 1.0 - std::pow(eps, B);
  double lt = std::log(static_cast<double>(T));
  return (1.0 / 1024.0) / (static_cast<double>(B) * B) * std::pow(lt, -eps / den) *
         std::pow(rz_envelope(d, T), 1.0 / den);
}

/// Omega(log log T) communication floor:
/// B >= log[ ((d+1)/((d+2) log C)) log T + 1 ] / log(d+2), natural logs.
inline double min_rounds_for_optimality(int d, double C, std::int64_t T) {
  if (!(C > 1.0)) throw ConfigError("constant C must exceed 1");
  double lt = std::log(static_cast<double>(T));
  double inner = (d + 1.0) / ((d + 2.0) * std::log(C)) * lt + 1.0;
  return std::log(inner) / std::log(d + 2.0);
}

struct RzBudgetResult {
  double value = 0.0;
  double argmin_r0 = 1.0;
  std::vector<std::pair<double, std::int64_t>> table;  // (r, N_r) for r = 1 .. 2^-i_max
};

/// R_z(T) = min over dyadic r0 of ( r0 T + sum_{dyadic r >= r0} (N_r / r) ln T ).
inline RzBudgetResult rz_budget(const RewardInstance& inst, std::int64_t T, int i_max) {
  if (T < 2) throw ConfigError("invalid horizon: T must be >= 2");
  if (i_max < 0) throw ConfigError("i_max must be >= 0");
  const double ln_t = std::log(static_cast<double>(T));
  RzBudgetResult out;
  double partial = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= i_max; ++i) {
    double r = std::ldexp(1.0, -i);
    std::int64_t n = zooming_number(inst, r);
    out.table.emplace_back(r, n);
    partial += static_cast<double>(n) / r * ln_t;
    double value = r * static_cast<double>(T) + partial;
    if (value < best) {
      best = value;
      out.argmin_r0 = r;
    }
  }
  out.value = best;
  return out;
}

struct BoundReport {
  int d = 1;
  double dz = 0.0;
  double cz = 1.0;
  std::int64_t T = 2;
  int B = 1;
  double dblin_regret_bound = 0.0;
  double ablin_regret_bound = 0.0;
  double rounded_ablin_regret_bound = 0.0;
  double dblin_rounds = 0.0;
  double ablin_rounds = 0.0;
  double rounded_ablin_rounds = 0.0;
  double static_lower_bound = 0.0;
  double adaptive_lower_bound = 0.0;
  double min_rounds_lower = 0.0;

  json to_json() const {
    return json{{"d", d},
                {"dz", dz},
                {"Cz", cz},
                {"T", T},
                {"B", B},
                {"dblin_regret_bound", dblin_regret_bound},
                {"ablin_regret_bound", ablin_regret_bound},
                {"rounded_ablin_regret_bound", rounded_ablin_regret_bound},
                {"dblin_rounds", dblin_rounds},
                {"ablin_rounds", ablin_rounds},
                {"rounded_ablin_rounds", rounded_ablin_rounds},
                {"static_lower_bound", static_lower_bound},
                {"adaptive_lower_bound", adaptive_lower_bound},
                {"min_rounds_lower", min_rounds_lower},
                {"log_conventions",
                 {{"n_m", "natural"}, {"exponents", "base-2"}, {"lower_bounds", "natural"}}}};
  }
};

/// min_rounds_lower uses C = e by default (the theorem's unspecified constant).
inline BoundReport evaluate_bounds(int d, double dz, double Cz, std::int64_t T, int B,
                                   double C = kNaturalBase) {
  BoundReport r;
  r.d = d;
  r.dz = dz;
  r.cz = Cz;
  r.T = T;
  r.B = B;
  auto db = dblin_bounds(d, dz, T);
  r.dblin_regret_bound = db.regret_bound;
  r.dblin_rounds = db.rounds_bound;
  auto ab = ablin_bounds(d, dz, Cz, T);
  r.ablin_regret_bound = ab.regret_bound;
  r.rounded_ablin_regret_bound = ab.rounded_regret_bound;
  r.ablin_rounds = ab.rounds_bound;
  r.rounded_ablin_rounds = ab.rounded_rounds_bound;
  r.static_lower_bound = lower_bound_static(d, T, B);
  r.adaptive_lower_bound = lower_bound_adaptive(d, T, B);
  r.min_rounds_lower = min_rounds_for_optimality(d, C, T);
  return r;
}

}  // namespace blin
