#pragma once

// Lipschitz reward instances over [0,1]^d with Gaussian noise: the two-peak
// experiment function, linear/constant references, the cone-extended peak
// families used by the lower-bound constructions, and brute-force zooming
// oracles (N_r tables, zooming-dimension estimates).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "blin/errors.hpp"
#include "blin/geometry.hpp"
#include "blin/sequences.hpp"

namespace blin {

using json = nlohmann::json;

enum class Metric { L2, SupNorm };

/// Cube extrema of the mean reward. Exact flags tell the caller whether the
/// value is analytic or a grid approximation (documented default 33/axis).
struct CubeExtrema {
  double min = 0.0;
  double max = 0.0;
  bool min_exact = false;
  bool max_exact = false;
};

class RewardInstance {
 public:
  virtual ~RewardInstance() = default;

  virtual int dim() const = 0;
  virtual double mean(const Point& x) const = 0;
  virtual double mu_star() const = 0;
  virtual Point x_star() const = 0;
  virtual double lipschitz_constant(Metric m) const = 0;
  virtual std::string name() const = 0;
  virtual json descriptor() const = 0;

  virtual CubeExtrema cube_extrema(const StandardCube& cube, int grid_per_axis = 33) const {
    return grid_extrema(cube, grid_per_axis);
  }

  /// Minimum of the mean over the cube; the containment tests of the zooming
  /// oracles need only this side of the extrema.
  virtual double cube_min(const StandardCube& cube, int grid_per_axis = 33) const {
    return cube_extrema(cube, grid_per_axis).min;
  }

 protected:
  CubeExtrema grid_extrema(const StandardCube& cube, int g) const {
    if (g < 2) throw ConfigError("grid resolution must be >= 2");
    const int d = cube.dim();
    CubeExtrema e;
    e.min = std::numeric_limits<double>::infinity();
    e.max = -std::numeric_limits<double>::infinity();
    Point x(d);
    std::vector<int> odo(d, 0);
    while (true) {
      for (int a = 0; a < d; ++a)
        x[a] = cube.lower(a) + cube.edge() * (static_cast<double>(odo[a]) / (g - 1));
      double v = mean(x);
      e.min = std::min(e.min, v);
      e.max = std::max(e.max, v);
      int a = d - 1;
      while (a >= 0 && ++odo[a] == g) odo[a--] = 0;
      if (a < 0) break;
    }
    return e;
  }
};

using InstancePtr = std::shared_ptr<const RewardInstance>;

// ---------------------------------------------------------------------------
// Shipped instances

/// mu(x) = 1 - 1/2 |x - x1|_2 - 3/10 |x - x2|_2 on [0,1]^2,
/// x1 = (0.8, 0.7) (the optimum), x2 = (0.1, 0.1).
class TwoPeakInstance final : public RewardInstance {
 public:
  int dim() const override { return 2; }
  double mean(const Point& x) const override {
    return 1.0 - 0.5 * l2_distance(x, kX1) - 0.3 * l2_distance(x, kX2);
  }
  double mu_star() const override { return mean(kX1); }
  Point x_star() const override { return kX1; }
  double lipschitz_constant(Metric m) const override {
    // 0.8 in l2; the sup-metric constant picks up a sqrt(d) factor
    return m == Metric::L2 ? 0.8 : 0.8 * std::sqrt(2.0);
  }
  std::string name() const override { return "two-peak"; }
  json descriptor() const override { return json{{"kind", "two-peak"}}; }

  CubeExtrema cube_extrema(const StandardCube& cube, int grid_per_axis = 33) const override {
    // the mean is concave, so the box minimum sits at a vertex; the maximum
    // may be interior and falls back to the grid
    CubeExtrema e = grid_extrema(cube, grid_per_axis);
    e.min = cube_min(cube);
    e.min_exact = true;
    return e;
  }

  double cube_min(const StandardCube& cube, int = 33) const override {
    double corner_min = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < 4; ++mask) {
      Point c{(mask & 1) ? cube.upper(0) : cube.lower(0),
              (mask & 2) ? cube.upper(1) : cube.lower(1)};
      corner_min = std::min(corner_min, mean(c));
    }
    return corner_min;
  }

 private:
  static inline const Point kX1{0.8, 0.7};
  static inline const Point kX2{0.1, 0.1};
};

/// mu(x) = x on [0,1]; zooming dimension 0 with zooming constant 16.
class LinearInstance final : public RewardInstance {
 public:
  int dim() const override { return 1; }
  double mean(const Point& x) const override { return x[0]; }
  double mu_star() const override { return 1.0; }
  Point x_star() const override { return Point{1.0}; }
  double lipschitz_constant(Metric) const override { return 1.0; }
  std::string name() const override { return "linear"; }
  json descriptor() const override { return json{{"kind", "linear"}}; }

  CubeExtrema cube_extrema(const StandardCube& cube, int = 33) const override {
    return CubeExtrema{cube.lower(0), cube.upper(0), true, true};
  }
  double cube_min(const StandardCube& cube, int = 33) const override { return cube.lower(0); }
};

/// mu == 0; every arm is optimal.
class ConstantInstance final : public RewardInstance {
 public:
  explicit ConstantInstance(int d) : dim_(d) {
    if (d < 1) throw ConfigError("dimension must be >= 1");
  }
  int dim() const override { return dim_; }
  double mean(const Point&) const override { return 0.0; }
  double mu_star() const override { return 0.0; }
  Point x_star() const override { return Point(dim_, 0.5); }
  double lipschitz_constant(Metric) const override { return 0.0; }
  std::string name() const override { return "constant"; }
  json descriptor() const override { return json{{"kind", "constant"}, {"d", dim_}}; }

  CubeExtrema cube_extrema(const StandardCube&, int = 33) const override {
    return CubeExtrema{0.0, 0.0, true, true};
  }
  double cube_min(const StandardCube&, int = 33) const override { return 0.0; }

 private:
  int dim_;
};

/// Lipschitz cone extension over separated peaks:
///   mu(x) = max{ floor, max_i (h_i - |x - u_i|_sup) }.
/// 1-Lipschitz in the sup metric by construction.
class ConePeaksInstance final : public RewardInstance {
 public:
  ConePeaksInstance(int d, double floor, std::vector<Point> peaks, std::vector<double> heights,
                    std::string name, json descriptor)
      : dim_(d),
        floor_(floor),
        peaks_(std::move(peaks)),
        heights_(std::move(heights)),
        name_(std::move(name)),
        descriptor_(std::move(descriptor)) {
    if (peaks_.empty() || peaks_.size() != heights_.size())
      throw ConfigError("cone instance needs matching peaks and heights");
    best_ = 0;
    for (std::size_t i = 1; i < heights_.size(); ++i)
      if (heights_[i] > heights_[best_]) best_ = i;
  }

  int dim() const override { return dim_; }
  double mean(const Point& x) const override {
    double v = floor_;
    for (std::size_t i = 0; i < peaks_.size(); ++i)
      v = std::max(v, heights_[i] - sup_distance(x, peaks_[i]));
    return v;
  }
  double mu_star() const override { return heights_[best_]; }
  Point x_star() const override { return peaks_[best_]; }
  double lipschitz_constant(Metric) const override { return 1.0; }
  std::string name() const override { return name_; }
  json descriptor() const override { return descriptor_; }

  CubeExtrema cube_extrema(const StandardCube& cube, int grid_per_axis = 33) const override {
    // max over the box decomposes per cone (clamp distance is attained at a
    // single point); min of a max of cones does not and stays on the grid
    CubeExtrema e = grid_extrema(cube, grid_per_axis);
    double mx = floor_;
    for (std::size_t i = 0; i < peaks_.size(); ++i)
      mx = std::max(mx, heights_[i] - cube.sup_distance(peaks_[i]));
    e.max = mx;
    e.max_exact = true;
    return e;
  }

  double floor_value() const { return floor_; }
  const std::vector<Point>& peaks() const { return peaks_; }
  const std::vector<double>& heights() const { return heights_; }

 private:
  int dim_;
  double floor_;
  std::vector<Point> peaks_;
  std::vector<double> heights_;
  std::size_t best_;
  std::string name_;
  json descriptor_;
};

inline InstancePtr two_peak_instance() { return std::make_shared<TwoPeakInstance>(); }
inline InstancePtr linear_instance() { return std::make_shared<LinearInstance>(); }
inline InstancePtr constant_instance(int d = 1) { return std::make_shared<ConstantInstance>(d); }

// ---------------------------------------------------------------------------
// Lower-bound peak families

/// Centered pitch-r sublattice ((k+1/2)r per axis), lexicographic. For dyadic
/// r this packs exactly r^-d points at pairwise sup distance >= r.
inline std::vector<Point> centered_lattice(int d, double r) {
  int per_axis = static_cast<int>(std::floor(1.0 / r + 0.5 + 1e-12));
  if (per_axis < 1) throw ConfigError("pitch too large for the unit cube");
  std::vector<Point> pts;
  std::vector<int> odo(d, 0);
  while (true) {
    Point p(d);
    for (int a = 0; a < d; ++a) p[a] = (odo[a] + 0.5) * r;
    pts.push_back(std::move(p));
    int a = d - 1;
    while (a >= 0 && ++odo[a] == per_axis) odo[a--] = 0;
    if (a < 0) break;
  }
  return pts;
}

/// Static-grid family: M = r^-d peaks; instance 1 peaks at 3/4 r (top) with
/// the rest at 5/8 r; instance i >= 2 additionally raises u_i to 7/8 r.
/// Floor r/2, cone-extended, 1-Lipschitz.
inline InstancePtr static_lower_bound_instance(int d, double r, int instance_index) {
  EdgeLengthSchedule::dyadic_exponent(r);  // restrict to dyadic scales
  std::vector<Point> peaks = centered_lattice(d, r);
  const auto M = static_cast<int>(peaks.size());
  if (instance_index < 1 || instance_index > M)
    throw ConfigError("instance index out of range [1, M]");
  std::vector<double> heights(M, 0.625 * r);
  heights[0] = 0.75 * r;
  if (instance_index >= 2) heights[instance_index - 1] = 0.875 * r;
  json desc{{"kind", "static-peaks"}, {"d", d}, {"r", r}, {"i", instance_index}};
  return std::make_shared<ConePeaksInstance>(d, 0.5 * r, std::move(peaks), std::move(heights),
                                             "static-peaks", std::move(desc));
}

/// Reference grid and radii of the adaptive lower-bound construction:
/// eps = 1/(d+2), T_j = T^{(1-eps^j)/(1-eps^B)}, r_j = 1/(T_{j-1}^eps * B),
/// M_j = r_j^-d peaks (capped by lattice capacity).
struct AdaptiveGrid {
  int dim = 0;
  std::int64_t horizon = 0;
  int rounds = 0;
  double eps = 0.0;
  std::vector<double> ref_times;         // T_0 .. T_B
  std::vector<double> radii;             // r_1 .. r_B
  std::vector<std::int64_t> peak_counts; // M_1 .. M_B
};

/// Lattice of pitch r anchored so that the arm-space center is a lattice
/// point; the center is returned as the LAST point (the shared top peak).
inline std::vector<Point> center_anchored_lattice(int d, double r) {
  int half = static_cast<int>(std::floor(0.5 / r + 1e-12));
  std::vector<Point> pts;
  std::vector<int> odo(d, 0);
  const int per_axis = 2 * half + 1;
  const Point center(d, 0.5);
  std::vector<Point> rest;
  while (true) {
    Point p(d);
    for (int a = 0; a < d; ++a) p[a] = 0.5 + (odo[a] - half) * r;
    if (p != center) rest.push_back(std::move(p));
    int a = d - 1;
    while (a >= 0 && ++odo[a] == per_axis) odo[a--] = 0;
    if (a < 0) break;
  }
  rest.push_back(center);
  return rest;
}

inline AdaptiveGrid adaptive_grid(int d, std::int64_t T, int B) {
  if (d < 1) throw ConfigError("dimension must be >= 1");
  if (T < 2) throw ConfigError("invalid horizon: T must be >= 2");
  if (B < 1) throw ConfigError("rounds must be >= 1");
  AdaptiveGrid g;
  g.dim = d;
  g.horizon = T;
  g.rounds = B;
  g.eps = 1.0 / (d + 2);
  double denom = 1.0 - std::pow(g.eps, B);
  for (int j = 0; j <= B; ++j)
    g.ref_times.push_back(std::pow(static_cast<double>(T), (1.0 - std::pow(g.eps, j)) / denom));
  for (int j = 1; j <= B; ++j) {
    double r = 1.0 / (std::pow(g.ref_times[j - 1], g.eps) * B);
    g.radii.push_back(r);
    auto capacity = static_cast<std::int64_t>(
        std::pow(2.0 * std::floor(0.5 / r + 1e-12) + 1.0, d));
    g.peak_counts.push_back(std::min<std::int64_t>(
        static_cast<std::int64_t>(std::floor(std::pow(r, -d))), capacity));
  }
  return g;
}

/// World I_j, instance k: peak r_1/2 + r_j/16 + r_B/16 at u_{j,k}, shared top
/// peak r_1/2 + r_B/16 at the common location, floor r_1/2. j = B yields the
/// single-peak instance I_B (k ignored).
inline InstancePtr adaptive_lower_bound_world(int d, std::int64_t T, int B, int j, int k = 1) {
  AdaptiveGrid g = adaptive_grid(d, T, B);
  if (j < 1 || j > B) throw ConfigError("world index out of range [1, B]");
  double r1 = g.radii[0];
  double rB = g.radii[B - 1];
  double floor = 0.5 * r1;
  json desc{{"kind", "adaptive-world"}, {"d", d}, {"T", T}, {"B", B}, {"j", j}, {"k", k}};
  if (j == B) {
    std::vector<Point> peaks{Point(d, 0.5)};
    std::vector<double> heights{floor + rB / 16.0};
    return std::make_shared<ConePeaksInstance>(d, floor, std::move(peaks), std::move(heights),
                                               "adaptive-world", std::move(desc));
  }
  double rj = g.radii[j - 1];
  std::vector<Point> lattice = center_anchored_lattice(d, rj);
  auto Mj = std::min<std::int64_t>(g.peak_counts[j - 1], static_cast<std::int64_t>(lattice.size()));
  if (Mj < 2) throw ConfigError("infeasible world: fewer than 2 peaks fit at separation r_j");
  if (k < 1 || k > Mj - 1) throw ConfigError("instance index out of range [1, M_j - 1]");
  std::vector<Point> peaks{lattice[k - 1], Point(d, 0.5)};
  std::vector<double> heights{floor + rj / 16.0 + rB / 16.0, floor + rB / 16.0};
  return std::make_shared<ConePeaksInstance>(d, floor, std::move(peaks), std::move(heights),
                                             "adaptive-world", std::move(desc));
}

inline InstancePtr instance_from_descriptor(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "two-peak") return two_peak_instance();
  if (kind == "linear") return linear_instance();
  if (kind == "constant") return constant_instance(j.value("d", 1));
  if (kind == "static-peaks")
    return static_lower_bound_instance(j.at("d").get<int>(), j.at("r").get<double>(),
                                       j.at("i").get<int>());
  if (kind == "adaptive-world")
    return adaptive_lower_bound_world(j.at("d").get<int>(), j.at("T").get<std::int64_t>(),
                                      j.at("B").get<int>(), j.at("j").get<int>(),
                                      j.value("k", 1));
  throw ConfigError("unknown instance kind: " + kind);
}

// ---------------------------------------------------------------------------
// Noise

/// i.i.d. N(0,1) stream; equal seeds give identical streams. One run consumes
/// a single stream in pull order, which makes traces bit-reproducible.
struct NoiseModel {
  std::uint64_t seed = 0;
  double sigma = 1.0;  // 0 is the noiseless test hook
};

class GaussianStream {
 public:
  explicit GaussianStream(const NoiseModel& m) : rng_(m.seed), sigma_(m.sigma) {}
  double next() { return sigma_ * normal_(rng_); }
  double sigma() const { return sigma_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  double sigma_;
};

inline double sample_reward(const RewardInstance& inst, GaussianStream& noise, const Point& x) {
  return inst.mean(x) + noise.next();
}

// ---------------------------------------------------------------------------
// Zooming oracles

/// N_r: count of edge-r standard cubes C with C inside S(slack*r),
/// i.e. min over C of mu >= mu* - slack*r. Exact when the instance's cube
/// minimum is exact, grid-approximate otherwise.
inline std::int64_t zooming_number(const RewardInstance& inst, double r, double slack = 16.0,
                                   int grid_per_axis = 33) {
  int depth = EdgeLengthSchedule::dyadic_exponent(r);
  const int d = inst.dim();
  if (static_cast<long long>(d) * depth > 24)
    throw ConfigError("zooming_number scale below the enumeration feasibility floor");
  double threshold = inst.mu_star() - slack * r;
  std::int64_t count = 0;
  StandardCube cube(depth, std::vector<std::uint64_t>(d, 0));
  while (true) {
    if (inst.cube_min(cube, grid_per_axis) >= threshold) ++count;
    int a = d - 1;
    const std::uint64_t per_axis = std::uint64_t{1} << depth;
    while (a >= 0 && ++cube.index[a] == per_axis) cube.index[a--] = 0;
    if (a < 0) break;
  }
  return count;
}

struct ZoomingEstimate {
  double dz_hat = 0.0;
  double cz_hat = 0.0;
  std::vector<std::pair<double, std::int64_t>> table;  // (r, N_r), r = 1/2 .. r_min
};

/// Least-squares slope of log2 N_r against log2(1/r), restricted to scales
/// where S(16r) is not the whole arm space (saturated scales have
/// N_r = r^-d and measure the ambient dimension, not the zooming one).
/// Fewer than two informative scales give slope 0; none at all gives d.
/// cz_hat is the minimal a with N_r <= a r^-dz_hat over ALL sampled scales.
inline ZoomingEstimate zooming_dimension_estimate(const RewardInstance& inst, double r_min,
                                                  double slack = 16.0, int grid_per_axis = 33) {
  int i_min = EdgeLengthSchedule::dyadic_exponent(r_min);
  if (i_min < 3) throw ConfigError("need at least 3 dyadic scales (r_min <= 1/8)");
  const int d = inst.dim();
  ZoomingEstimate out;
  std::vector<std::pair<int, std::int64_t>> informative;
  bool any_nonzero = false;
  for (int i = 1; i <= i_min; ++i) {
    double r = std::ldexp(1.0, -i);
    std::int64_t n = zooming_number(inst, r, slack, grid_per_axis);
    out.table.emplace_back(r, n);
    if (n > 0) any_nonzero = true;
    auto full = static_cast<std::int64_t>(1) << (static_cast<long long>(d) * i);
    if (n > 0 && n < full) informative.emplace_back(i, n);
  }
  if (!any_nonzero) throw ConfigError("undefined estimate: all zooming numbers are zero");

  double slope;
  if (informative.empty()) {
    slope = static_cast<double>(d);
  } else if (informative.size() == 1) {
    slope = 0.0;
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [i, n] : informative) {
      double x = i, y = std::log2(static_cast<double>(n));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double m = static_cast<double>(informative.size());
    slope = (sxy - sx * sy / m) / (sxx - sx * sx / m);
  }
  out.dz_hat = std::clamp(slope, 0.0, static_cast<double>(d));
  out.cz_hat = 0.0;
  for (auto& [r, n] : out.table)
    if (n > 0) out.cz_hat = std::max(out.cz_hat, static_cast<double>(n) * std::pow(r, out.dz_hat));
  return out;
}

}  // namespace blin
