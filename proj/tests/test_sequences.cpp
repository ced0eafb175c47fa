#include <doctest.h>

#include <cmath>

#include "blin/sequences.hpp"

using namespace blin;

TEST_CASE("c_increment geometric decay") {
  ACEParams p = ACEParams::raw(1.0, 0.5);
  CHECK(c_increment(p, 3) == doctest::Approx(0.25).epsilon(1e-12));
  ACEParams q = ACEParams::raw(0.37, 0.81);
  CHECK(c_increment(q, 2) / c_increment(q, 1) == doctest::Approx(q.eta).epsilon(1e-12));
  CHECK_THROWS_AS(c_increment(p, 0), ConfigError);
}

TEST_CASE("c1 for d=2, dz=0, T=80000 with base-2 logs") {
  ACEParams p = ACEParams::for_problem(2, 0.0, 80000);
  CHECK(p.eta == doctest::Approx(0.75).epsilon(1e-15));
  // (1/8) * log2(80000 / log2(80000))
  CHECK(p.c1 == doctest::Approx(1.5327500367606364).epsilon(1e-9));
}

TEST_CASE("doubling edge lengths") {
  auto s = EdgeLengthSchedule::doubling();
  CHECK(*s.edge_length(1) == 1.0);
  CHECK(*s.edge_length(3) == 0.25);
  CHECK(s.previous_edge(1) == 2.0);
  for (int m = 1; m < 20; ++m)
    CHECK(*s.edge_length(m) / *s.edge_length(m + 1) == 2.0);
}

TEST_CASE("rounded-ace skip rule on partial sums 1.6, 2.8, 3.7") {
  // c1 = 1.6, eta = 0.75 gives increments 1.6, 1.2, 0.9
  ACEParams p = ACEParams::raw(1.6, 0.75);
  CHECK(ace_partial_sum(p, 2) == doctest::Approx(2.8).epsilon(1e-12));
  CHECK(ace_partial_sum(p, 3) == doctest::Approx(3.7).epsilon(1e-12));
  auto s = EdgeLengthSchedule::rounded_ace(p);
  CHECK(*s.edge_length(1) == 0.5);
  CHECK(*s.edge_length(2) == 0.25);
  CHECK(*s.edge_length(3) == 0.125);
  CHECK(*s.edge_length(4) == 0.0625);
  CHECK(s.previous_edge(1) == 1.0);
}

TEST_CASE("rounded-ace emits a strictly decreasing finite ladder") {
  auto s = EdgeLengthSchedule::rounded_ace(ACEParams::for_problem(2, 0.0, 80000));
  std::vector<double> edges;
  for (int m = 1; s.edge_length(m); ++m) edges.push_back(*s.edge_length(m));
  REQUIRE(edges.size() >= 4);
  for (std::size_t i = 1; i < edges.size(); ++i) CHECK(edges[i] < edges[i - 1]);
  CHECK(edges[0] == 0.5);  // floor(c1) = 1 at T = 80000
  // converged: 2^-ceil(c1/(1-eta)) is the last value
  ACEParams p = ACEParams::for_problem(2, 0.0, 80000);
  CHECK(edges.back() == std::ldexp(1.0, -static_cast<int>(std::ceil(p.c1 / (1 - p.eta)))));
}

TEST_CASE("raw ace limit of -log2 r_m") {
  ACEParams p = ACEParams::raw(0.9, 0.6);
  auto s = EdgeLengthSchedule::ace(p);
  double r60 = *s.edge_length(60);
  CHECK(-std::log2(r60) == doctest::Approx(p.c1 / (1.0 - p.eta)).epsilon(1e-9));
}

TEST_CASE("samples_per_cube") {
  CHECK(samples_per_cube(1.0, 8) == 34);  // ceil(16 ln 8) = ceil(33.27)
  CHECK(samples_per_cube(0.25, 80000) == 2891);
  // 1/r^2 scaling before the ceiling
  CHECK(samples_per_cube_raw(0.5, 8) == doctest::Approx(4.0 * samples_per_cube_raw(1.0, 8)));
  CHECK_THROWS_AS(samples_per_cube(0.5, 1), ConfigError);
  CHECK_THROWS_AS(samples_per_cube(1.5, 100), ConfigError);
}

TEST_CASE("samples_per_cube monotonicity") {
  for (double r : {1.0, 0.5, 0.25, 0.125}) {
    CHECK(samples_per_cube(r, 4000) <= samples_per_cube(r, 9000));
    CHECK(samples_per_cube(r, 4000) >= samples_per_cube(2 * r > 1 ? 1.0 : 2 * r, 4000));
  }
}

TEST_CASE("batch budgets") {
  // T = 2^16, dz = 0: B* = 1 + (16 - 4)/2 = 7
  CHECK(dblin_bstar(0.0, 65536) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(batch_budget(ScheduleKind::Doubling, 1, 0.0, 65536) == 8);
  // d=2, dz=0, T=80000
  CHECK(ace_bstar(2, 0.0, 80000) == doctest::Approx(7.290213753508398).epsilon(1e-9));
  CHECK(batch_budget(ScheduleKind::Ace, 2, 0.0, 80000) == 9);
  int rounded = batch_budget(ScheduleKind::RoundedAce, 2, 0.0, 80000);
  CHECK(rounded == 16);
  CHECK(rounded <= 16);
  CHECK_THROWS_AS(batch_budget(ScheduleKind::Doubling, 1, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(ACEParams::for_problem(2, 3.0, 1000), ConfigError);  // dz >= d+1
}

TEST_CASE("batch budget monotone in T") {
  std::vector<std::int64_t> ts{2, 3, 4, 8, 50, 1000, 80000, 1000000, 100000000};
  for (auto kind : {ScheduleKind::Doubling, ScheduleKind::Ace, ScheduleKind::RoundedAce}) {
    int prev = 0;
    for (auto t : ts) {
      int b = batch_budget(kind, 2, 0.5, t);
      CHECK(b >= prev);
      prev = b;
    }
  }
}

TEST_CASE("ace telescoping identity C_m = C_1") {
  for (auto [d, dz, T] : std::vector<std::tuple<int, double, std::int64_t>>{
           {1, 0.0, 5000}, {2, 0.0, 80000}, {2, 1.0, 80000}, {3, 1.5, 1000000}}) {
    ACEParams p = ACEParams::for_problem(d, dz, T);
    double c1_total = p.c1 * (d + 2);
    for (int m = 1; m <= 50; ++m) {
      double cm = ace_partial_sum(p, m - 1) * (dz + 1) + c_increment(p, m) * (d + 2);
      CHECK(cm == doctest::Approx(c1_total).epsilon(1e-9));
    }
  }
}

TEST_CASE("rounded sandwich and halving") {
  for (auto [c1, eta] : std::vector<std::pair<double, double>>{
           {1.532750, 0.75}, {0.9, 0.6}, {2.3, 0.5}, {1.1, 0.8}}) {
    ACEParams p = ACEParams::raw(c1, eta);
    for (int k = 1; k <= 30; ++k) {
      double s = ace_partial_sum(p, k);
      double raw = std::exp2(-s);
      auto [alpha, beta] = rounded_exponents(p, k);
      double odd = std::ldexp(1.0, -static_cast<int>(alpha));
      double even = std::ldexp(1.0, -static_cast<int>(beta));
      CHECK(odd >= raw);
      CHECK(even <= raw);
      if (s != std::floor(s)) CHECK(odd / even == 2.0);
    }
  }
}

TEST_CASE("custom schedule validation") {
  CHECK_NOTHROW(EdgeLengthSchedule::custom({0.5, 0.125}));
  CHECK_THROWS_AS(EdgeLengthSchedule::custom({0.5, 0.5}), ConfigError);
  CHECK_THROWS_AS(EdgeLengthSchedule::custom({0.25, 0.5}), ConfigError);
  CHECK_THROWS_AS(EdgeLengthSchedule::custom({0.3}), ConfigError);  // not dyadic
  auto s = EdgeLengthSchedule::custom({0.5, 0.125});
  CHECK(*s.edge_length(2) == 0.125);
  CHECK_FALSE(s.edge_length(3).has_value());
  CHECK(s.previous_edge(1) == 1.0);
}
