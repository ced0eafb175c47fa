#include <doctest.h>

#include <cmath>
#include <random>

#include "blin/environments.hpp"

using namespace blin;

namespace {

Point random_point(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point x(d);
  for (auto& v : x) v = u(rng);
  return x;
}

void check_lipschitz(const RewardInstance& inst, int pairs = 10000) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < pairs; ++i) {
    Point a = random_point(inst.dim(), rng);
    Point b = random_point(inst.dim(), rng);
    double diff = std::abs(inst.mean(a) - inst.mean(b));
    double dl2 = l2_distance(a, b);
    double dsup = sup_distance(a, b);
    if (dl2 > 0) CHECK(diff <= inst.lipschitz_constant(Metric::L2) * dl2 + 1e-9);
    if (dsup > 0) CHECK(diff <= inst.lipschitz_constant(Metric::SupNorm) * dsup + 1e-9);
  }
}

}  // namespace

TEST_CASE("two-peak closed form") {
  auto inst = two_peak_instance();
  CHECK(inst->mean({0.8, 0.7}) == doctest::Approx(0.7234136662812134).epsilon(1e-12));
  CHECK(inst->mean({0.1, 0.1}) == doctest::Approx(0.5390227771353556).epsilon(1e-12));
  CHECK(inst->mu_star() == inst->mean({0.8, 0.7}));
  // x* dominates a 101x101 grid
  double best = -1;
  Point argmax;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j) {
      double v = inst->mean({i / 100.0, j / 100.0});
      if (v > best) {
        best = v;
        argmax = {i / 100.0, j / 100.0};
      }
    }
  CHECK(argmax == Point{0.8, 0.7});
  CHECK(best <= inst->mu_star());
}

TEST_CASE("two-peak cube extrema: exact corner minimum") {
  auto inst = two_peak_instance();
  StandardCube c(2, {1, 2});
  CubeExtrema e = inst->cube_extrema(c, 17);
  CHECK(e.min_exact);
  double m = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < 4; ++mask)
    m = std::min(m, inst->mean({mask & 1 ? c.upper(0) : c.lower(0),
                                mask & 2 ? c.upper(1) : c.lower(1)}));
  CHECK(e.min == m);
  CHECK(e.max >= e.min);
}

TEST_CASE("linear instance") {
  auto inst = linear_instance();
  CHECK(inst->mean({0.0}) == 0.0);
  CHECK(inst->mean({1.0}) == 1.0);
  CHECK(inst->mu_star() == 1.0);
  CHECK(inst->lipschitz_constant(Metric::SupNorm) == 1.0);
  // S(16r) = [1-16r, 1]: exactly 16 cubes of edge r fit once 16r <= 1
  CHECK(zooming_number(*inst, 0.5) == 2);
  CHECK(zooming_number(*inst, 0.25) == 4);
  for (int i = 4; i <= 7; ++i) CHECK(zooming_number(*inst, std::ldexp(1.0, -i)) == 16);
}

TEST_CASE("constant instance saturates every scale") {
  auto inst = constant_instance(2);
  CHECK(zooming_number(*inst, 0.5) == 4);
  CHECK(zooming_number(*inst, 0.25) == 16);
  auto est = zooming_dimension_estimate(*inst, 0.125);
  CHECK(est.dz_hat == 2.0);
  CHECK(est.cz_hat == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zooming estimate: linear gives (0, 16) exactly") {
  auto est = zooming_dimension_estimate(*linear_instance(), 1.0 / 128);
  CHECK(est.dz_hat == 0.0);
  CHECK(est.cz_hat == 16.0);
  REQUIRE(est.table.size() == 7);
  CHECK(est.table[3].second == 16);  // r = 2^-4
}

TEST_CASE("zooming estimate: two-peak near zero at desk scale") {
  auto est = zooming_dimension_estimate(*two_peak_instance(), 1.0 / 64);
  CHECK(est.dz_hat == 0.0);  // single informative scale at 2^-6
  CHECK(est.table[4].second == 1024);  // saturated through 2^-5
  CHECK(est.table[5].second < 4096);
}

TEST_CASE("zooming estimate: undefined when all N_r vanish") {
  struct Spike final : RewardInstance {
    int dim() const override { return 1; }
    double mean(const Point& x) const override { return -1000.0 * std::abs(x[0] - 1.0 / 3); }
    double mu_star() const override { return 0.0; }
    Point x_star() const override { return {1.0 / 3}; }
    double lipschitz_constant(Metric) const override { return 1000.0; }
    std::string name() const override { return "spike"; }
    json descriptor() const override { return {{"kind", "spike"}}; }
  } spike;
  CHECK_THROWS_AS(zooming_dimension_estimate(spike, 0.125), ConfigError);
}

TEST_CASE("zooming number slack monotonicity") {
  auto inst = two_peak_instance();
  for (int i = 4; i <= 6; ++i) {
    double r = std::ldexp(1.0, -i);
    CHECK(zooming_number(*inst, r, 16.0) >= zooming_number(*inst, r, 8.0));
  }
}

TEST_CASE("static family heights and gaps") {
  const double r = 0.125;
  auto i1 = static_lower_bound_instance(2, r, 1);
  const auto& cone = static_cast<const ConePeaksInstance&>(*i1);
  REQUIRE(cone.peaks().size() == 64);  // r^-d
  CHECK(i1->mean(cone.peaks()[0]) == 0.75 * r);
  CHECK(i1->mean(cone.peaks()[5]) == 0.625 * r);
  CHECK(i1->mu_star() == 0.75 * r);

  auto i3 = static_lower_bound_instance(2, r, 3);
  const auto& cone3 = static_cast<const ConePeaksInstance&>(*i3);
  CHECK(i3->mean(cone3.peaks()[2]) == 0.875 * r);
  // top minus second gap is exactly r/8
  CHECK(i3->mu_star() - i3->mean(cone3.peaks()[0]) == doctest::Approx(r / 8).epsilon(1e-15));
  // lattice-corner points sit r/2 from every peak, beyond all cone reach
  CHECK(i1->mean({0.5, 0.5}) == 0.5 * r);
  CHECK_THROWS_AS(static_lower_bound_instance(2, r, 0), ConfigError);
  CHECK_THROWS_AS(static_lower_bound_instance(2, r, 65), ConfigError);
}

TEST_CASE("static family locality: differs only inside B(u_i, 3r/8)") {
  const double r = 0.25;
  auto base = static_lower_bound_instance(2, r, 1);
  auto alt = static_lower_bound_instance(2, r, 3);
  const Point u = static_cast<const ConePeaksInstance&>(*alt).peaks()[2];
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j) {
      Point x{i / 100.0, j / 100.0};
      double diff = alt->mean(x) - base->mean(x);
      if (sup_distance(x, u) > 3.0 * r / 8.0 + 1e-12) {
        CHECK(std::abs(diff) <= 1e-9);
      } else {
        CHECK(diff >= -1e-12);
        CHECK(diff <= r / 4 + 1e-12);
      }
    }
}

TEST_CASE("cone extension floor behaviour") {
  auto inst = static_lower_bound_instance(2, 0.25, 2);
  const auto& cone = static_cast<const ConePeaksInstance&>(*inst);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 2000; ++t) {
    Point x = random_point(2, rng);
    double v = inst->mean(x);
    CHECK(v >= cone.floor_value());
    bool in_reach = false;
    for (std::size_t p = 0; p < cone.peaks().size(); ++p)
      if (sup_distance(x, cone.peaks()[p]) < cone.heights()[p] - cone.floor_value())
        in_reach = true;
    if (!in_reach) CHECK(v == cone.floor_value());
  }
}

TEST_CASE("adaptive grid endpoints") {
  AdaptiveGrid g = adaptive_grid(2, 80000, 3);
  CHECK(g.ref_times.front() == doctest::Approx(1.0));
  CHECK(g.ref_times.back() == doctest::Approx(80000.0).epsilon(1e-12));
  CHECK(g.radii[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));  // 1/(T_0^eps B)
  for (std::size_t j = 1; j < g.radii.size(); ++j) CHECK(g.radii[j] < g.radii[j - 1]);
}

TEST_CASE("adaptive worlds: peak gap r_j/16 and shared top location") {
  const int d = 2, B = 3;
  const std::int64_t T = 80000;
  AdaptiveGrid g = adaptive_grid(d, T, B);
  const Point shared(d, 0.5);
  for (int j = 1; j < B; ++j) {
    auto inst = adaptive_lower_bound_world(d, T, B, j, 1);
    const auto& cone = static_cast<const ConePeaksInstance&>(*inst);
    double gap = inst->mean(cone.peaks()[0]) - inst->mean(shared);
    CHECK(gap == doctest::Approx(g.radii[j - 1] / 16.0).epsilon(1e-12));
    CHECK(inst->mean(shared) ==
          doctest::Approx(g.radii[0] / 2 + g.radii[B - 1] / 16).epsilon(1e-12));
  }
  auto last = adaptive_lower_bound_world(d, T, B, B);
  CHECK(last->x_star() == shared);
}

TEST_CASE("adaptive worlds agree with I_B outside B(u_jk, 3 r_j / 8)") {
  const int d = 1, B = 2;
  const std::int64_t T = 10000;
  AdaptiveGrid g = adaptive_grid(d, T, B);
  auto world = adaptive_lower_bound_world(d, T, B, 1, 1);
  auto base = adaptive_lower_bound_world(d, T, B, B);
  const Point u = static_cast<const ConePeaksInstance&>(*world).peaks()[0];
  double rj = g.radii[0];
  for (int i = 0; i <= 4000; ++i) {
    Point x{i / 4000.0};
    double diff = world->mean(x) - base->mean(x);
    if (sup_distance(x, u) > 3.0 * rj / 8.0 + 1e-12) {
      CHECK(std::abs(diff) <= 1e-9);
    } else {
      CHECK(diff >= -1e-12);
      CHECK(diff <= rj / 8 + 1e-12);
    }
  }
}

TEST_CASE("Lipschitz verification for every shipped instance") {
  check_lipschitz(*two_peak_instance());
  check_lipschitz(*linear_instance());
  check_lipschitz(*constant_instance(2));
  check_lipschitz(*static_lower_bound_instance(2, 0.125, 3));
  check_lipschitz(*adaptive_lower_bound_world(2, 80000, 3, 1, 1));
  check_lipschitz(*adaptive_lower_bound_world(2, 80000, 3, 3));
}

TEST_CASE("noise stream determinism and the zero-variance hook") {
  auto inst = two_peak_instance();
  GaussianStream a(NoiseModel{123, 1.0});
  GaussianStream b(NoiseModel{123, 1.0});
  for (int i = 0; i < 100; ++i)
    CHECK(sample_reward(*inst, a, {0.3, 0.4}) == sample_reward(*inst, b, {0.3, 0.4}));
  GaussianStream z(NoiseModel{5, 0.0});
  CHECK(sample_reward(*inst, z, {0.3, 0.4}) == inst->mean({0.3, 0.4}));
}

TEST_CASE("empirical mean of noisy rewards") {
  auto inst = linear_instance();
  GaussianStream s(NoiseModel{2024, 1.0});
  const Point x{0.25};
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_reward(*inst, s, x);
  CHECK(std::abs(sum / n - inst->mean(x)) < 0.01);
}

TEST_CASE("descriptor round trips") {
  std::vector<InstancePtr> insts{two_peak_instance(), linear_instance(), constant_instance(3),
                                 static_lower_bound_instance(2, 0.125, 3),
                                 adaptive_lower_bound_world(2, 80000, 3, 2, 1)};
  std::mt19937_64 rng(77);
  for (const auto& inst : insts) {
    auto back = instance_from_descriptor(inst->descriptor());
    CHECK(back->dim() == inst->dim());
    for (int t = 0; t < 20; ++t) {
      Point x = random_point(inst->dim(), rng);
      CHECK(back->mean(x) == inst->mean(x));
    }
  }
  CHECK_THROWS_AS(instance_from_descriptor(json{{"kind", "nope"}}), ConfigError);
}
