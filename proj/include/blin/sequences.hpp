#pragma once

// Edge-length schedules (doubling / ACE / rounded ACE / custom), per-batch
// sample counts, and batch-budget calculators.
//
// Log-base conventions, fixed module-wide and overridable per call for
// sensitivity experiments:
//   - n_m = 16 log T / r^2 uses the NATURAL log (the Hoeffding step behind the
//     concentration event needs exp(-8 ln T) = T^-8).
//   - all ACE / B* exponent algebra uses BASE-2 logs (the identity
//     2^{c_1(d+2)} = (T/log T)^{(dz+1)/(dz+2)} lives in base 2).

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "blin/errors.hpp"

namespace blin {

inline constexpr double kNaturalBase = 2.718281828459045235360287471352662498;
inline constexpr double kExponentBase = 2.0;

inline double log_base(double x, double base) { return std::log(x) / std::log(base); }

/// Parameters of the geometrically-decaying exponent increments c_1, c_2, ...
/// with c_{i+1} = eta * c_i and r_m = 2^{-sum_{i<=m} c_i}.
struct ACEParams {
  int dim = 1;
  double zooming_dim = 0.0;
  std::int64_t horizon = 2;
  double c1 = 0.0;
  double eta = 0.0;

  /// Canonical construction: eta = (d+1-dz)/(d+2),
  /// c1 = (dz+1)/((d+2)(dz+2)) * log(T / log T).
  static ACEParams for_problem(int d, double dz, std::int64_t T,
                               double exp_base = kExponentBase) {
    if (d < 1) throw ConfigError("ambient dimension must be >= 1");
    if (T < 2) throw ConfigError("invalid horizon: T must be >= 2");
    if (!(dz >= 0.0) || dz >= d + 1) throw ConfigError("zooming dimension must be in [0, d+1)");
    ACEParams p;
    p.dim = d;
    p.zooming_dim = dz;
    p.horizon = T;
    p.eta = (d + 1 - dz) / (d + 2);
    double lt = log_base(static_cast<double>(T), exp_base);
    p.c1 = (dz + 1) / ((d + 2) * (dz + 2)) * log_base(static_cast<double>(T) / lt, exp_base);
    return p;
  }

  /// Raw construction for tests and sensitivity sweeps (bypasses the d/dz/T tie).
  static ACEParams raw(double c1, double eta) {
    if (!(c1 > 0.0)) throw ConfigError("c1 must be positive");
    if (!(eta > 0.0) || !(eta < 1.0)) throw ConfigError("eta must lie in (0,1)");
    ACEParams p;
    p.c1 = c1;
    p.eta = eta;
    return p;
  }
};

/// c_i = c1 * eta^(i-1), i >= 1.
inline double c_increment(const ACEParams& p, int i) {
  if (i < 1) throw ConfigError("batch index must be >= 1");
  return p.c1 * std::pow(p.eta, i - 1);
}

inline double ace_partial_sum(const ACEParams& p, int m) {
  // c1 * (1 - eta^m) / (1 - eta), numerically stable for large m
  return p.c1 * (1.0 - std::pow(p.eta, m)) / (1.0 - p.eta);
}

/// (alpha_k, beta_k) = (floor, ceil) of the k-th partial sum; the rounded
/// sequence is r~_{2k-1} = 2^-alpha_k, r~_{2k} = 2^-beta_k before skipping.
inline std::pair<long, long> rounded_exponents(const ACEParams& p, int k) {
  double s = ace_partial_sum(p, k);
  return {static_cast<long>(std::floor(s)), static_cast<long>(std::ceil(s))};
}

enum class ScheduleKind { Doubling, Ace, RoundedAce, Custom };

/// Generator of the per-batch edge lengths r_1 > r_2 > ...
///
/// Doubling: r_m = 2^{-m+1} (unbounded). Ace: r_m = 2^{-sum c_i}, analysis
/// only (ratios are not integers). RoundedAce: r~_{2k-1} = 2^{-floor(s_k)},
/// r~_{2k} = 2^{-ceil(s_k)} with s_k the partial sums, then entries not
/// strictly below every earlier entry are skipped; since s_k converges the
/// post-skip sequence is finite and the run ends in cleanup.
class EdgeLengthSchedule {
 public:
  static EdgeLengthSchedule doubling() { return EdgeLengthSchedule(ScheduleKind::Doubling); }

  static EdgeLengthSchedule ace(ACEParams p) {
    EdgeLengthSchedule s(ScheduleKind::Ace);
    s.params_ = p;
    return s;
  }

  static EdgeLengthSchedule rounded_ace(ACEParams p) {
    EdgeLengthSchedule s(ScheduleKind::RoundedAce);
    s.params_ = p;
    s.exponents_ = materialize_rounded(p);
    return s;
  }

  /// Explicit list; must be strictly decreasing exact dyadics 2^-e.
  static EdgeLengthSchedule custom(const std::vector<double>& edges) {
    EdgeLengthSchedule s(ScheduleKind::Custom);
    if (edges.empty()) throw ConfigError("custom schedule must be nonempty");
    int prev = -1;
    for (double r : edges) {
      int e = dyadic_exponent(r);
      if (e <= prev) throw ConfigError("custom schedule must be strictly decreasing");
      s.exponents_.push_back(e);
      prev = e;
    }
    return s;
  }

  ScheduleKind kind() const { return kind_; }
  const ACEParams& params() const { return params_; }

  /// r_m for m >= 1; nullopt once a finite schedule is exhausted.
  std::optional<double> edge_length(int m) const {
    if (m < 1) throw ConfigError("batch index must be >= 1");
    switch (kind_) {
      case ScheduleKind::Doubling:
        if (m - 1 > 62) return std::nullopt;
        return std::ldexp(1.0, -(m - 1));
      case ScheduleKind::Ace:
        return std::exp2(-ace_partial_sum(params_, m));
      case ScheduleKind::RoundedAce:
      case ScheduleKind::Custom:
        if (m > static_cast<int>(exponents_.size())) return std::nullopt;
        return std::ldexp(1.0, -exponents_[m - 1]);
    }
    return std::nullopt;
  }

  /// r_{m-1} extended to m = 1: doubling gives 2 (the formula at m = 0),
  /// ACE-type give 1 (empty partial sum), custom gives twice its first edge.
  double previous_edge(int m) const {
    if (m < 1) throw ConfigError("batch index must be >= 1");
    if (m >= 2) {
      auto r = edge_length(m - 1);
      if (!r) throw ConfigError("previous_edge past end of schedule");
      return *r;
    }
    switch (kind_) {
      case ScheduleKind::Doubling:
        return 2.0;
      case ScheduleKind::Ace:
      case ScheduleKind::RoundedAce:
        return 1.0;
      case ScheduleKind::Custom:
        return 2.0 * std::ldexp(1.0, -exponents_.front());
    }
    return 1.0;
  }

  /// Every edge is an exact dyadic 2^-e (false only for raw ACE).
  bool dyadic() const { return kind_ != ScheduleKind::Ace; }

  static int dyadic_exponent(double r) {
    if (!(r > 0.0) || r > 1.0) throw ConfigError("edge length must lie in (0,1]");
    int e;
    double mant = std::frexp(r, &e);
    if (mant != 0.5 && r != 1.0) throw ConfigError("edge length is not an exact dyadic 2^-e");
    int exp = (r == 1.0) ? 0 : (1 - e);
    if (exp < 0 || exp > 62) throw ConfigError("dyadic exponent out of supported range");
    return exp;
  }

 private:
  explicit EdgeLengthSchedule(ScheduleKind k) : kind_(k) {}

  static std::vector<int> materialize_rounded(const ACEParams& p) {
    std::vector<int> out;
    // s_k -> c1/(1-eta); past the point where c_k is below double resolution
    // the floor/ceil pair repeats forever and everything is skipped.
    int kmax = 1;
    while (std::pow(p.eta, kmax) > 1e-15 && kmax < 4000) ++kmax;
    double limit = p.c1 / (1.0 - p.eta);
    for (int k = 1; k <= kmax; ++k) {
      auto [alpha, beta] = rounded_exponents(p, k);
      for (long e : {alpha, beta}) {
        if (e > 62) return out;  // beyond exact-double dyadics; budget ends runs long before
        if (out.empty() || e > out.back()) out.push_back(static_cast<int>(e));
      }
      if (static_cast<double>(out.back()) >= std::ceil(limit)) break;
    }
    return out;
  }

  ScheduleKind kind_;
  ACEParams params_{};
  std::vector<int> exponents_;  // rounded/custom, post-skip
};

/// n_m before rounding: 16 log T / r^2.
inline double samples_per_cube_raw(double r, std::int64_t T, double base = kNaturalBase) {
  if (!(r > 0.0) || r > 1.0) throw ConfigError("edge length must lie in (0,1]");
  if (T < 2) throw ConfigError("invalid horizon: T must be >= 2");
  return 16.0 * log_base(static_cast<double>(T), base) / (r * r);
}

/// n_m = ceil(16 log T / r^2), at least 1. Rounding up never under-samples
/// relative to the concentration requirement.
inline std::int64_t samples_per_cube(double r, std::int64_t T, double base = kNaturalBase) {
  double raw = samples_per_cube_raw(r, T, base);
  if (!(raw < 9.0e15)) throw ConfigError("sample count overflows supported range");
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(raw)));
}

/// B* = 1 + log(T/log T)/(dz+2), base-2 logs.
inline double dblin_bstar(double dz, std::int64_t T) {
  if (T < 2) throw ConfigError("invalid horizon: T must be >= 2");
  double lt = std::log2(static_cast<double>(T));
  return 1.0 + std::log2(static_cast<double>(T) / lt) / (dz + 2.0);
}

/// B* = (log log T - log(dz+2)) / log((d+2)/(d+1-dz)), base-2 logs,
/// clamped at 0 for tiny horizons.
inline double ace_bstar(int d, double dz, std::int64_t T) {
  if (T < 2) throw ConfigError("invalid horizon: T must be >= 2");
  if (!(dz >= 0.0) || dz >= d + 1) throw ConfigError("zooming dimension must be in [0, d+1)");
  double lt = std::log2(static_cast<double>(T));
  double b = (std::log2(lt) - std::log2(dz + 2.0)) / std::log2((d + 2.0) / (d + 1.0 - dz));
  return std::max(b, 0.0);
}

/// Communication rounds sufficient for the optimal rate:
/// ceil(B*)+1 for doubling/ACE, ceil(2 B*)+1 for rounded ACE.
inline int batch_budget(ScheduleKind kind, int d, double dz, std::int64_t T) {
  switch (kind) {
    case ScheduleKind::Doubling:
      return static_cast<int>(std::ceil(dblin_bstar(dz, T))) + 1;
    case ScheduleKind::Ace:
      return static_cast<int>(std::ceil(ace_bstar(d, dz, T))) + 1;
    case ScheduleKind::RoundedAce:
      return static_cast<int>(std::ceil(2.0 * ace_bstar(d, dz, T))) + 1;
    case ScheduleKind::Custom:
      throw ConfigError("no analytic batch budget for custom schedules");
  }
  throw ConfigError("unknown schedule kind");
}

}  // namespace blin
