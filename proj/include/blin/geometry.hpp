#pragma once

// Dyadic cube arithmetic over the arm space [0,1]^d with the sup-norm metric.
//
// Cube identity is integer (depth, index), never floating-point corners, so
// arbitrarily long partition chains stay exact and elimination bookkeeping is
// drift-free. Cubes are closed; boundary points belong to all touching cubes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

#include "blin/errors.hpp"

namespace blin {

using Point = std::vector<double>;

inline bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline int log2_exact(std::uint64_t v) {
  int e = 0;
  while (v > 1) {
    v >>= 1;
    ++e;
  }
  return e;
}

/// Axis-aligned cube of edge 2^-depth from the regular dyadic grid,
/// occupying [index[a]*2^-depth, (index[a]+1)*2^-depth] on each axis.
struct StandardCube {
  int depth = 0;
  std::vector<std::uint64_t> index;  // one entry per axis, each < 2^depth

  StandardCube() = default;
  StandardCube(int depth_, std::vector<std::uint64_t> index_)
      : depth(depth_), index(std::move(index_)) {
    if (depth < 0 || depth > 62) throw ConfigError("cube depth out of range");
    for (auto k : index)
      if (depth < 63 && k >= (std::uint64_t{1} << depth))
        throw ConfigError("cube index out of range for depth");
  }

  static StandardCube unit(int dim) { return StandardCube(0, std::vector<std::uint64_t>(dim, 0)); }

  int dim() const { return static_cast<int>(index.size()); }
  double edge() const { return std::ldexp(1.0, -depth); }
  double lower(int axis) const { return std::ldexp(static_cast<double>(index[axis]), -depth); }
  double upper(int axis) const { return std::ldexp(static_cast<double>(index[axis] + 1), -depth); }

  Point center() const {
    Point c(index.size());
    for (int a = 0; a < dim(); ++a)
      c[a] = std::ldexp(static_cast<double>(index[a]) + 0.5, -depth);
    return c;
  }

  /// Closed-cube membership; boundary points may belong to several cubes.
  bool contains(const Point& x) const {
    if (static_cast<int>(x.size()) != dim()) return false;
    for (int a = 0; a < dim(); ++a)
      if (x[a] < lower(a) || x[a] > upper(a)) return false;
    return true;
  }

  /// sup-norm distance from the cube (as a set) to a point; 0 if inside.
  double sup_distance(const Point& x) const {
    double d = 0.0;
    for (int a = 0; a < dim(); ++a) {
      double below = lower(a) - x[a];
      double above = x[a] - upper(a);
      d = std::max(d, std::max(below, above));
    }
    return std::max(d, 0.0);
  }

  friend bool operator==(const StandardCube& a, const StandardCube& b) {
    return a.depth == b.depth && a.index == b.index;
  }
  friend bool operator<(const StandardCube& a, const StandardCube& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.index < b.index;
  }
};

struct CubeKeyHash {
  std::size_t operator()(const StandardCube& c) const {
    std::size_t h = std::hash<int>{}(c.depth);
    for (auto k : c.index) h = h * 1000003u ^ std::hash<std::uint64_t>{}(k);
    return h;
  }
};

/// Collection of cubes at a common depth with distinct indices.
struct CubeSet {
  int depth = 0;
  std::vector<StandardCube> cubes;

  static CubeSet of(std::vector<StandardCube> cs) {
    CubeSet s;
    if (!cs.empty()) s.depth = cs.front().depth;
    std::unordered_set<StandardCube, CubeKeyHash> seen;
    for (const auto& c : cs) {
      if (c.depth != s.depth) throw ConfigError("CubeSet members must share one depth");
      if (!seen.insert(c).second) throw ConfigError("CubeSet has duplicate cube indices");
    }
    s.cubes = std::move(cs);
    return s;
  }
};

/// Equally partition a cube into factor^d children of edge cube.edge()/factor.
/// factor must be 2^j with j >= 1 (schedules guarantee power-of-two ratios).
inline std::vector<StandardCube> partition(const StandardCube& cube, std::uint64_t factor) {
  if (factor < 2 || !is_power_of_two(factor))
    throw ConfigError("partition factor must be a power of two >= 2 (schedule mismatch)");
  int j = log2_exact(factor);
  if (cube.depth + j > 62) throw ConfigError("partition would exceed supported cube depth");
  const int d = cube.dim();
  std::vector<StandardCube> children;
  children.reserve(static_cast<std::size_t>(std::pow(double(factor), d)));
  std::vector<std::uint64_t> offset(d, 0);
  while (true) {
    std::vector<std::uint64_t> idx(d);
    for (int a = 0; a < d; ++a) idx[a] = cube.index[a] * factor + offset[a];
    children.emplace_back(cube.depth + j, std::move(idx));
    int a = d - 1;
    while (a >= 0 && ++offset[a] == factor) offset[a--] = 0;
    if (a < 0) break;
  }
  return children;
}

/// All 2^(d*depth) cubes of edge 2^-depth tiling the unit cube, lexicographic.
inline std::vector<StandardCube> unit_grid(int dim, int depth) {
  if (depth == 0) return {StandardCube::unit(dim)};
  StandardCube root = StandardCube::unit(dim);
  return partition(root, std::uint64_t{1} << depth);
}

/// Uniform draw from the closed cube; deterministic given the generator state.
inline Point sample_uniform(const StandardCube& cube, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point x(cube.dim());
  for (int a = 0; a < cube.dim(); ++a) x[a] = cube.lower(a) + u(rng) * cube.edge();
  return x;
}

inline double sup_distance(const Point& x, const Point& y) {
  double d = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) d = std::max(d, std::abs(x[a] - y[a]));
  return d;
}

inline double l2_distance(const Point& x, const Point& y) {
  double s = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) s += (x[a] - y[a]) * (x[a] - y[a]);
  return std::sqrt(s);
}

}  // namespace blin
