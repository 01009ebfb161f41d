#include <catch_amalgamated.hpp>

#include <cmath>

#include "gibbsconv/circle.hpp"
#include "gibbsconv/errors.hpp"
#include "gibbsconv/grid_function.hpp"

using namespace gibbsconv;
using Catch::Approx;

TEST_CASE("circle_add wraps modulo one", "[circle]") {
  CHECK(circle_add(CirclePoint(0.25), CirclePoint(0.5)).value() == 0.75);
  CHECK(circle_add(CirclePoint(0.75), CirclePoint(0.5)).value() == 0.25);
  CHECK(std::fabs(circle_add(CirclePoint(1.0 / 3), CirclePoint(1.0 / 3)).value() - 2.0 / 3) <= 1.2e-16);
  const CirclePoint x(0.7123);
  CHECK(circle_add(x, CirclePoint(0.0)) == x);
}

TEST_CASE("circle points reduce into [0,1)", "[circle]") {
  CHECK(CirclePoint(1.0).value() == 0.0);
  CHECK(CirclePoint(-0.25).value() == 0.75);
  CHECK(CirclePoint(3.5).value() == 0.5);
  CHECK(CirclePoint(-1e-18).value() < 1.0);
  CHECK(circle_sub(CirclePoint(0.1), CirclePoint(0.3)).value() == Approx(0.8).margin(1e-15));
}

TEST_CASE("circle_add is commutative and associative to an ulp", "[circle]") {
  const double xs[] = {0.0, 0.1, 1.0 / 3, 0.5, 0.77, 0.999999};
  for (double a : xs) {
    for (double b : xs) {
      CHECK(circle_add(CirclePoint(a), CirclePoint(b)) == circle_add(CirclePoint(b), CirclePoint(a)));
      for (double c : xs) {
        const double l = circle_add(circle_add(CirclePoint(a), CirclePoint(b)), CirclePoint(c)).value();
        const double r = circle_add(CirclePoint(a), circle_add(CirclePoint(b), CirclePoint(c))).value();
        CHECK(circle_distance(CirclePoint(l), CirclePoint(r)) <= 4.5e-16);
      }
    }
  }
}

TEST_CASE("doubling map and its preimages", "[circle]") {
  CHECK(doubling_map(CirclePoint(1.0 / 3)).value() == Approx(2.0 / 3).margin(1e-16));
  CHECK(doubling_map(CirclePoint(2.0 / 3)).value() == Approx(1.0 / 3).margin(1e-15));
  auto [a, b] = preimages(CirclePoint(0.0));
  CHECK(a.value() == 0.0);
  CHECK(b.value() == 0.5);
  auto [c, d] = preimages(CirclePoint(0.3));
  CHECK(c.value() == 0.15);
  CHECK(d.value() == 0.65);
  for (double y : {0.0, 0.125, 0.3, 0.7, 0.99}) {
    auto [p, q] = preimages(CirclePoint(y));
    CHECK(circle_distance(doubling_map(p), CirclePoint(y)) <= 2.3e-16);
    CHECK(circle_distance(doubling_map(q), CirclePoint(y)) <= 2.3e-16);
  }
  // dyadic points map back exactly
  auto [p, q] = preimages(CirclePoint(0.375));
  CHECK(doubling_map(p).value() == 0.375);
  CHECK(doubling_map(q).value() == 0.375);
}

TEST_CASE("circle distance is the arc metric", "[circle]") {
  CHECK(circle_distance(CirclePoint(0.1), CirclePoint(0.9)) == Approx(0.2));
  CHECK(circle_distance(CirclePoint(0.0), CirclePoint(0.5)) == 0.5);
  CHECK(circle_distance(CirclePoint(0.3), CirclePoint(0.3)) == 0.0);
}

TEST_CASE("grid function evaluation", "[grid]") {
  SECTION("constant") {
    const GridFunction f = GridFunction::constant(5, 0.37);
    for (double x : {0.0, 0.013, 0.5, 0.99}) CHECK(eval(f, CirclePoint(x)) == 0.37);
  }
  SECTION("cosine at 1/3") {
    const GridFunction f = GridFunction::sample(12, [](double x) { return std::cos(kTwoPi * x); });
    CHECK(std::fabs(eval(f, CirclePoint(1.0 / 3)) + 0.5) <= 2e-6);
  }
  SECTION("wrap-around segment") {
    const GridFunction f(1, {0.0, 1.0});
    CHECK(eval(f, CirclePoint(0.75)) == 0.5);
    CHECK(eval(f, CirclePoint(0.25)) == 0.5);
  }
  SECTION("exact at grid points") {
    const GridFunction f = GridFunction::sample(8, [](double x) { return std::exp(std::sin(kTwoPi * x)); });
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f.at(static_cast<double>(i) / 256.0) == f[i]);
  }
}

TEST_CASE("grid function validation", "[grid]") {
  CHECK_THROWS_AS(GridFunction(0, {1.0}), ValidationError);
  CHECK_THROWS_AS(GridFunction(2, {1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(GridFunction(1, {1.0, NAN}), ValidationError);
}

TEST_CASE("holder constant estimates", "[grid]") {
  CHECK(holder_constant(GridFunction::constant(10, 2.0), 1.0) == 0.0);
  const GridFunction c = GridFunction::sample(12, [](double x) { return std::cos(kTwoPi * x); });
  const double k = holder_constant(c, 1.0);
  CHECK(k <= kTwoPi);
  CHECK(k >= 0.99 * kTwoPi);
  SECTION("scale covariance") {
    const GridFunction c3 = c.map([](double v) { return -3.0 * v; });
    CHECK(holder_constant(c3, 0.5) == Approx(3.0 * holder_constant(c, 0.5)).epsilon(1e-15));
  }
  SECTION("exponent outside (0,1]") {
    CHECK_THROWS_AS(holder_constant(c, 0.0), ValidationError);
    CHECK_THROWS_AS(holder_constant(c, 1.5), ValidationError);
  }
  SECTION("a jump of height h over one cell") {
    // step 0 / 1 on halves: adjacent grid points differ by 1 at distance 1/N
    const GridFunction s = GridFunction::sample(6, [](double x) { return x < 0.5 ? 0.0 : 1.0; });
    CHECK(holder_constant(s, 1.0) == Approx(64.0));
    CHECK(holder_constant(s, 0.5) == Approx(8.0));
  }
  SECTION("thinned estimate on large grids stays close") {
    const GridFunction big = GridFunction::sample(14, [](double x) { return std::cos(kTwoPi * x); });
    const double kb = holder_constant(big, 1.0);
    CHECK(kb <= kTwoPi);
    CHECK(kb >= 0.99 * kTwoPi);
  }
}

TEST_CASE("sup distance", "[grid]") {
  const GridFunction f = GridFunction::sample(6, [](double x) { return x * x; });
  CHECK(sup_distance(f, f) == 0.0);
  CHECK(sup_distance(GridFunction::constant(4, 0.5), GridFunction::constant(4, 0.7)) == Approx(0.2));
  const GridFunction cosj = GridFunction::sample(12, [](double x) { return 0.5 + 0.4 * std::cos(kTwoPi * x); });
  CHECK(sup_distance(cosj, GridFunction::constant(12, 0.5)) == Approx(0.4).epsilon(1e-15));
  // mixed sizes: the coarse grid is resampled onto the fine one
  CHECK(sup_distance(GridFunction::constant(3, 1.0), GridFunction::constant(6, 1.25)) == 0.25);
}
