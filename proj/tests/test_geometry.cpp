#include <doctest.h>

#include <random>
#include <set>

#include "blin/geometry.hpp"

using namespace blin;

TEST_CASE("partition tiles the unit square") {
  auto kids = partition(StandardCube::unit(2), 2);
  REQUIRE(kids.size() == 4);
  for (const auto& k : kids) {
    CHECK(k.depth == 1);
    CHECK(k.edge() == 0.5);
  }
}

TEST_CASE("partition rejects degenerate factors") {
  CHECK_THROWS_AS(partition(StandardCube::unit(2), 1), ConfigError);
  CHECK_THROWS_AS(partition(StandardCube::unit(2), 3), ConfigError);
  CHECK_THROWS_AS(partition(StandardCube::unit(2), 6), ConfigError);
}

TEST_CASE("partition of depth-2 cube (3,1) by 4") {
  StandardCube c(2, {3, 1});
  auto kids = partition(c, 4);
  REQUIRE(kids.size() == 16);
  // children tile [12..15] x [4..7] at depth 4
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  for (const auto& k : kids) {
    CHECK(k.depth == 4);
    CHECK(k.index[0] >= 12);
    CHECK(k.index[0] <= 15);
    CHECK(k.index[1] >= 4);
    CHECK(k.index[1] <= 7);
    seen.insert({k.index[0], k.index[1]});
  }
  CHECK(seen.size() == 16);
}

TEST_CASE("center") {
  CHECK(StandardCube::unit(1).center() == Point{0.5});
  StandardCube c(2, {3, 1});
  CHECK(c.center() == Point{0.875, 0.375});
  CHECK(StandardCube::unit(3).center() == Point{0.5, 0.5, 0.5});
}

TEST_CASE("contains is closed") {
  CHECK(StandardCube::unit(2).contains({0.3, 0.9}));
  StandardCube half(1, {0});
  CHECK(half.contains({0.5}));  // boundary belongs to both halves
  CHECK(StandardCube(1, {1}).contains({0.5}));
  StandardCube c(2, {3, 1});
  CHECK_FALSE(c.contains({0.7, 0.3}));
  CHECK(c.contains({0.75, 0.3}));
}

TEST_CASE("sample_uniform is deterministic and supported") {
  StandardCube c(2, {3, 1});
  std::mt19937_64 a(42), b(42);
  for (int i = 0; i < 32; ++i) {
    Point pa = sample_uniform(c, a);
    CHECK(pa == sample_uniform(c, b));
    CHECK(c.contains(pa));
  }
}

TEST_CASE("sample_uniform per-axis mean") {
  std::mt19937_64 rng(7);
  StandardCube u = StandardCube::unit(1);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_uniform(u, rng)[0];
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("random partition chains: tiling, disjointness, exact edges") {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 1000; ++trial) {
    int d = 1 + static_cast<int>(rng() % 3);
    int depth = static_cast<int>(rng() % 4);
    std::vector<std::uint64_t> idx(d);
    for (auto& k : idx) k = rng() % (std::uint64_t{1} << depth);
    StandardCube root(depth, idx);

    std::vector<StandardCube> frontier{root};
    int steps = 1 + static_cast<int>(rng() % 3);
    for (int s = 0; s < steps; ++s) {
      std::uint64_t f = std::uint64_t{1} << (1 + rng() % 2);
      std::vector<StandardCube> next;
      for (const auto& c : frontier) {
        auto kids = partition(c, f);
        CHECK(kids.size() == static_cast<std::size_t>(std::pow(double(f), d)));
        for (const auto& k : kids) CHECK(k.edge() * f == c.edge());  // exact dyadic
        next.insert(next.end(), kids.begin(), kids.end());
      }
      frontier = std::move(next);
    }

    // measures sum to the root's measure exactly
    double root_measure = std::pow(root.edge(), d);
    double sum = 0.0;
    for (const auto& c : frontier) sum += std::pow(c.edge(), d);
    CHECK(sum == doctest::Approx(root_measure).epsilon(1e-12));

    // disjoint interiors via index uniqueness at the common depth
    std::unordered_set<StandardCube, CubeKeyHash> unique(frontier.begin(), frontier.end());
    CHECK(unique.size() == frontier.size());
    CHECK_NOTHROW(CubeSet::of(frontier));

    // every corner of the root is covered by some leaf
    for (int mask = 0; mask < (1 << d); ++mask) {
      Point corner(d);
      for (int a = 0; a < d; ++a)
        corner[a] = (mask >> a) & 1 ? root.upper(a) : root.lower(a);
      bool covered = false;
      for (const auto& c : frontier)
        if (c.contains(corner)) {
          covered = true;
          break;
        }
      CHECK(covered);
    }
  }
}

TEST_CASE("CubeSet validation") {
  CHECK_THROWS_AS(CubeSet::of({StandardCube(1, {0}), StandardCube(2, {0})}), ConfigError);
  CHECK_THROWS_AS(CubeSet::of({StandardCube(1, {0}), StandardCube(1, {0})}), ConfigError);
}

TEST_CASE("sup distance from cube to point") {
  StandardCube c(2, {3, 1});  // [0.75,1] x [0.25,0.5]
  CHECK(c.sup_distance({0.8, 0.3}) == 0.0);
  CHECK(c.sup_distance({0.5, 0.3}) == doctest::Approx(0.25));
  CHECK(c.sup_distance({0.8, 0.9}) == doctest::Approx(0.4));
}
