#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "medianlab/bounds.hpp"
#include "medianlab/mechanisms.hpp"
#include "medianlab/norms.hpp"
#include "medianlab/optfac.hpp"

using namespace medianlab;

namespace {

Instance make(std::vector<Point> pts) {
  Instance inst;
  inst.points = std::move(pts);
  return inst;
}

}  // namespace

TEST_CASE("coordinate_median order statistics") {
  CHECK(coordinate_median(make({{0}, {1}, {5}}), TieBreak::kLower) == Point{1});
  Instance even = make({{0, 0}, {2, 4}});
  CHECK(coordinate_median(even, TieBreak::kLower) == Point{0, 0});
  CHECK(coordinate_median(even, TieBreak::kUpper) == Point{2, 4});
  // output need not be an input point
  CHECK(coordinate_median(make({{1, 9}, {5, 2}, {3, 7}}), TieBreak::kLower) ==
        Point{3, 7});
  CHECK_THROWS(coordinate_median(make({})));
}

TEST_CASE("weighted median selection") {
  std::vector<std::pair<double, double>> vw = {{0.0, 1.0}, {2.0, 1.0}, {5.0, 2.0}};
  CHECK(weighted_median(vw, TieBreak::kLower) == 2.0);  // cum 2 of 4 at value 2
  vw = {{0.0, 1.0}, {2.0, 1.0}, {5.0, 2.0}};
  CHECK(weighted_median(vw, TieBreak::kUpper) == 5.0);
  vw = {{7.0, 3.0}};
  CHECK(weighted_median(vw, TieBreak::kLower) == 7.0);
}

TEST_CASE("cmp_median prediction weight") {
  // prediction weight c*n below the agents' mass: LOWER stays at agents
  Instance all_zero;
  all_zero.points.assign(100, Point{0.0});
  CHECK(cmp_median(all_zero, {7.0}, 0.99, TieBreak::kLower) == Point{0.0});

  // cumulative weights 2 vs 3 of 5: upper half crossed at 10
  Instance p = make({{0.0}, {0.0}, {10.0}});
  CHECK(cmp_median(p, {10.0}, 2.0 / 3.0, TieBreak::kLower) == Point{10.0});

  // c = 0 is exactly the plain median
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    Instance inst;
    int d = 1 + static_cast<int>(rng() % 4);
    int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      Point q(d);
      for (double& v : q) v = u(rng);
      inst.points.push_back(q);
    }
    Point pred(d, 0.25);
    CHECK(cmp_median(inst, pred, 0.0) == coordinate_median(inst));
  }
  CHECK_THROWS(cmp_median(p, {1.0}, 1.0));
  CHECK_THROWS(cmp_median(p, {1.0, 2.0}, 0.5));
}

TEST_CASE("deviation_cost_delta examples") {
  Instance p = make({{0.0}, {4.0}, {10.0}});
  NormOrder q2 = NormOrder::finite(2.0);
  Mechanism med = median_mechanism();
  CHECK(deviation_cost_delta(p, 1, {4.0}, med, q2) == doctest::Approx(0.0));
  CHECK(deviation_cost_delta(p, 0, {5.0}, med, q2) == doctest::Approx(1.0));
  CHECK(deviation_cost_delta(p, 2, {-1.0}, med, q2) == doctest::Approx(4.0));
  CHECK_THROWS(deviation_cost_delta(p, 9, {0.0}, med, q2));
}

TEST_CASE("median equivariance under translation and scaling") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int t = 0; t < 40; ++t) {
    int d = 1 + static_cast<int>(rng() % 5);
    int n = 1 + static_cast<int>(rng() % 7);
    Instance inst;
    for (int i = 0; i < n; ++i) {
      Point p(d);
      for (double& v : p) v = u(rng);
      inst.points.push_back(p);
    }
    Point shift(d);
    for (double& v : shift) v = u(rng);
    double alpha = 0.5 + std::fabs(u(rng));
    Instance shifted = inst, scaled = inst;
    for (auto& p : shifted.points)
      for (int j = 0; j < d; ++j) p[j] += shift[j];
    for (auto& p : scaled.points)
      for (double& v : p) v *= alpha;
    Point m = coordinate_median(inst);
    Point ms = coordinate_median(shifted);
    Point ma = coordinate_median(scaled);
    for (int j = 0; j < d; ++j) {
      CHECK(ms[j] == doctest::Approx(m[j] + shift[j]).epsilon(1e-14));
      CHECK(ma[j] == doctest::Approx(alpha * m[j]).epsilon(1e-14));
    }
  }
}

TEST_CASE("randomized strategy-proofness of median and CMP") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> dev(-0.5, 1.5);
  const std::vector<NormOrder> orders = {NormOrder::finite(1.0), NormOrder::finite(2.0),
                                         NormOrder::infinity()};
  for (const NormOrder& q : orders) {
    for (double c : {0.0, 0.25, 0.5, 0.75}) {
      for (int t = 0; t < 300; ++t) {
        int d = 1 + static_cast<int>(rng() % 5);
        int n = 1 + static_cast<int>(rng() % 7);
        Instance inst;
        for (int i = 0; i < n; ++i) {
          Point p(d);
          for (double& v : p) v = u(rng);
          inst.points.push_back(p);
        }
        Point pred(d, 0.5);
        Mechanism mech = c == 0.0 ? median_mechanism() : cmp_mechanism(pred, c);
        std::size_t agent = rng() % inst.n();
        Point report(d);
        for (double& v : report) v = dev(rng);
        CHECK(deviation_cost_delta(inst, agent, report, mech, q) >= -1e-9);
      }
    }
  }
}

TEST_CASE("the mean mechanism is manipulable (harness self-test)") {
  // 1-D counterexample: agent 2 pulls the mean toward itself by
  // exaggerating.
  Instance p = make({{0.0}, {0.0}, {3.0}});
  double delta =
      deviation_cost_delta(p, 2, {9.0}, mean_mechanism(), NormOrder::finite(2.0));
  CHECK(delta < -1e-9);
}

TEST_CASE("median optimality: d = 1, L1, and n <= 2") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<NormOrder> orders = {NormOrder::finite(1.0), NormOrder::finite(2.0),
                                         NormOrder::finite(3.0), NormOrder::infinity()};

  // d = 1: median beats a fine grid for any q
  for (const NormOrder& q : orders) {
    Instance inst;
    for (int i = 0; i < 7; ++i) inst.points.push_back({u(rng)});
    Point m = coordinate_median(inst);
    double mc = social_cost(inst, m, q);
    for (int g = 0; g <= 400; ++g) {
      Point f{g / 400.0};
      CHECK(mc <= social_cost(inst, f, q) + 1e-9);
    }
  }

  // q = 1, d <= 4: median matches the grid oracle
  for (int d = 2; d <= 4; ++d) {
    Instance inst;
    for (int i = 0; i < 5; ++i) {
      Point p(d);
      for (double& v : p) v = u(rng);
      inst.points.push_back(p);
    }
    NormOrder q1 = NormOrder::finite(1.0);
    Point m = coordinate_median(inst);
    auto oracle = optfac::grid_oracle(inst, q1, Point(d, -0.1), Point(d, 1.1), 0.02);
    CHECK(social_cost(inst, m, q1) <= oracle.cost + 1e-6);
  }

  // n = 1: median is the lone point, optimal in every norm
  for (const NormOrder& q : orders) {
    Instance inst;
    Point p(2);
    for (double& v : p) v = u(rng);
    inst.points.push_back(p);
    Point m = coordinate_median(inst);
    CHECK(social_cost(inst, m, q) == doctest::Approx(0.0).scale(1.0));
  }

  // n = 2 with componentwise-comparable points: the lower median is the
  // smaller point, which lies on the segment between the two and is
  // therefore optimal in every norm
  for (const NormOrder& q : orders) {
    Instance inst;
    Point a(2), b(2);
    for (int j = 0; j < 2; ++j) {
      double x = u(rng), y = u(rng);
      a[j] = std::min(x, y);
      b[j] = std::max(x, y);
    }
    inst.points.push_back(a);
    inst.points.push_back(b);
    Point m = coordinate_median(inst);
    auto oracle = optfac::grid_oracle(inst, q, Point(2, -0.1), Point(2, 1.1), 0.005);
    CHECK(social_cost(inst, m, q) <= oracle.cost + 1e-6);
  }

  // n = 2 with non-comparable points: the lower median mixes
  // coordinates from both agents and need not be optimal, but it stays
  // within the general approximation guarantee. With {(0,1),(1,0)} the
  // lower median is (0,0), cost 2 vs an optimum of 2^{1/q} at the
  // midpoint or either point.
  {
    Instance anti = make({{0.0, 1.0}, {1.0, 0.0}});
    Point m = coordinate_median(anti);
    CHECK(m[0] == 0.0);
    CHECK(m[1] == 0.0);
    for (const NormOrder& q : orders) {
      double mc = social_cost(anti, m, q);
      CHECK(mc == doctest::Approx(2.0));
      double opt = optfac::grid_oracle(anti, q, Point(2, -0.1), Point(2, 1.1),
                                       0.0025)
                       .cost;
      double cap = q.is_inf() ? 3.0 : (q.is_one() ? 1.0 : bounds::ub(q).ub);
      CHECK(mc <= cap * opt + 1e-2);
    }
  }
}

TEST_CASE("instance validation") {
  Instance bad = make({{1.0, 2.0}, {3.0}});
  CHECK_THROWS(bad.validate());
  Instance negw = make({{1.0}});
  negw.weights = {-1.0};
  CHECK_THROWS(negw.validate());
  Instance ok = make({{1.0}, {2.0}});
  ok.weights = {1.0, 2.5};
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.total_weight() == doctest::Approx(3.5));
}
