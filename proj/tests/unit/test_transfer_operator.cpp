#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gibbsconv/potentials.hpp"
#include "gibbsconv/transfer_operator.hpp"

using namespace gibbsconv;
using Catch::Approx;

namespace {

double sup_abs_minus(const GridFunction& f, double c) {
  double s = 0.0;
  for (double v : f.samples()) s = std::max(s, std::fabs(v - c));
  return s;
}

/// Dense N x N matrix of the interpolated operator, built entry by entry.
struct DenseOperator {
  std::size_t n;
  std::vector<double> m;
  explicit DenseOperator(const std::function<double(double)>& weight, int log2n)
      : n(std::size_t{1} << log2n), m(n * n, 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (int branch = 0; branch < 2; ++branch) {
        const double x = 0.5 * static_cast<double>(i) / static_cast<double>(n) + 0.5 * branch;
        const double t = x * static_cast<double>(n);
        const std::size_t lo = static_cast<std::size_t>(std::floor(t)) % n;
        const double th = t - std::floor(t);
        const double w_lo = weight(static_cast<double>(lo) / static_cast<double>(n));
        const double w_hi = weight(static_cast<double>((lo + 1) % n) / static_cast<double>(n));
        const double w = w_lo * (1 - th) + w_hi * th;
        m[i * n + lo] += w * (1 - th);
        m[i * n + (lo + 1) % n] += w * th;
      }
    }
  }
};

}  // namespace

TEST_CASE("Jacobian potential construction", "[transfer]") {
  SECTION("pairing is projected") {
    const GridFunction raw(2, {0.2, 0.3, 0.6, 0.3});
    const JacobianPotential j(raw);
    CHECK(j[0] == Approx(0.25));
    CHECK(j[2] == Approx(0.75));
    CHECK(j[1] == Approx(0.5));
    CHECK(j.pairing_residual() <= 2.3e-16);
  }
  SECTION("samples below the floor are rejected") {
    CHECK_THROWS_AS(JacobianPotential(GridFunction(1, {0.0, 1.0})), ValidationError);
    CHECK_THROWS_AS(JacobianPotential(GridFunction(1, {-0.1, 1.1})), ValidationError);
  }
}

TEST_CASE("ruelle_apply", "[transfer]") {
  for (const PotentialSpec& s : {PotentialSpec::cosine(0.3), PotentialSpec::third_symmetric(0.4),
                                 PotentialSpec::bernoulli(0.2)}) {
    const JacobianPotential j = make_jacobian(s, 10);
    CHECK(sup_abs_minus(ruelle_apply(j, GridFunction::constant(10, 1.0)), 1.0) <= 1e-12);
  }
  CHECK(sup_abs_minus(ruelle_apply(GridFunction::constant(8, 1.0), GridFunction::constant(8, 1.0)), 2.0) == 0.0);
  const GridFunction c = GridFunction::sample(12, [](double x) { return std::cos(kTwoPi * x); });
  CHECK(sup_abs_minus(ruelle_apply(GridFunction::constant(12, 0.5), c), 0.0) <= 1e-12);
  CHECK_THROWS_AS(ruelle_apply(GridFunction(1, {0.0, 1.0}), c), ValidationError);
}

TEST_CASE("power iteration", "[transfer]") {
  SECTION("normalized potentials are fixed") {
    const JacobianPotential j = make_jacobian(PotentialSpec::cosine(0.2), 12);
    const EigenData e = power_iterate(j.log());
    CHECK(e.lambda == Approx(1.0).margin(1e-12));
    CHECK(sup_abs_minus(e.phi, 1.0) <= 1e-12);
  }
  SECTION("zero potential doubles") {
    const EigenData e = power_iterate(GridFunction::constant(10, 0.0));
    CHECK(e.lambda == 2.0);
    CHECK(sup_abs_minus(e.phi, 1.0) == 0.0);
  }
  SECTION("matches a dense-matrix discretization") {
    auto a = [](double x) { return std::log(0.5) + 0.1 * std::cos(kTwoPi * x); };
    const int m = 9;
    const GridFunction logp = GridFunction::sample(m, a);
    const EigenData e = power_iterate(logp, 1e-13);
    CHECK(e.residual <= 1e-11);

    const DenseOperator op([&](double x) { return std::exp(a(x)); }, m);
    std::vector<double> v(op.n, 1.0);
    double lambda = 0.0;
    for (int it = 0; it < 400; ++it) {
      std::vector<double> w(op.n, 0.0);
      for (std::size_t i = 0; i < op.n; ++i) {
        for (std::size_t k = 0; k < op.n; ++k) w[i] += op.m[i * op.n + k] * v[k];
      }
      double mass = 0.0, prev = 0.0;
      for (std::size_t i = 0; i < op.n; ++i) {
        mass += w[i];
        prev += v[i];
      }
      lambda = mass / prev;
      for (std::size_t i = 0; i < op.n; ++i) v[i] = w[i] * static_cast<double>(op.n) / mass;
    }
    CHECK(std::fabs(e.lambda - lambda) <= 1e-6);
    double d = 0.0;
    for (std::size_t i = 0; i < op.n; ++i) d = std::max(d, std::fabs(e.phi[i] - v[i]));
    CHECK(d <= 1e-6);
  }
  SECTION("iteration budget exhausted") {
    const GridFunction logp = GridFunction::sample(8, [](double x) { return 0.3 * std::sin(kTwoPi * x); });
    try {
      power_iterate(logp, 1e-15, 3);
      FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
      CHECK(e.last_residual() > 0.0);
    }
  }
}

TEST_CASE("normalize_potential", "[transfer]") {
  SECTION("constant log 1/2") {
    const JacobianPotential j = normalize_potential(GridFunction::constant(8, std::log(0.5)));
    CHECK(sup_abs_minus(j.grid(), 0.5) <= 1e-15);
  }
  SECTION("idempotent on normalized potentials") {
    const JacobianPotential j = make_jacobian(PotentialSpec::cosine(0.3), 12);
    const JacobianPotential k = normalize_potential(j.log());
    CHECK(sup_distance(j.grid(), k.grid()) <= 1e-10);
  }
  SECTION("small perturbation of Lebesgue") {
    const double t = 1e-2;
    const GridFunction a =
        GridFunction::sample(12, [t](double x) { return std::log(0.5) + t * std::cos(kTwoPi * x); });
    const JacobianPotential j = normalize_potential(a);
    CHECK(j.pairing_residual() < 1e-12);
    const double dev = sup_abs_minus(j.grid(), 0.5);
    // first order: J = 1/2 + (t/2) cos(2 pi x) + O(t^2)
    CHECK(dev == Approx(t / 2).epsilon(0.05));
    const GridFunction a2 =
        GridFunction::sample(12, [t](double x) { return std::log(0.5) + 2 * t * std::cos(kTwoPi * x); });
    CHECK(sup_abs_minus(normalize_potential(a2).grid(), 0.5) == Approx(2 * dev).epsilon(0.02));
  }
}

TEST_CASE("gibbs atoms", "[transfer]") {
  SECTION("Lebesgue") {
    const AtomicMeasure m = gibbs_atoms(make_jacobian(PotentialSpec::constant_half(), 4), 3);
    REQUIRE(m.size() == 8);
    for (const Atom& a : m.atoms()) CHECK(a.weight == 0.125);
  }
  SECTION("bernoulli cylinder weights") {
    const AtomicMeasure m = gibbs_atoms(make_jacobian(PotentialSpec::bernoulli(0.3), 4), 2);
    REQUIRE(m.size() == 4);
    CHECK(m[0].position == 0.0);
    CHECK(m[0].weight == Approx(0.09));
    CHECK(m[1].weight == Approx(0.21));
    CHECK(m[2].weight == Approx(0.21));
    CHECK(m[3].weight == Approx(0.49));
  }
  SECTION("weights positive and summing to one") {
    for (int n : {1, 5, 12, 18}) {
      const AtomicMeasure m = gibbs_atoms(make_jacobian(PotentialSpec::cosine(0.45), 12), n);
      CHECK(m.total_mass() == Approx(1.0).margin(1e-10));
    }
  }
  SECTION("level out of range") {
    const JacobianPotential j = make_jacobian(PotentialSpec::cosine(0.1), 6);
    CHECK_THROWS_AS(gibbs_atoms(j, 0), ValidationError);
    CHECK_THROWS_AS(gibbs_atoms(j, 25), ValidationError);
  }
  SECTION("weak convergence along levels") {
    const JacobianPotential j = make_jacobian(PotentialSpec::cosine(0.3), 12);
    const GridFunction f = GridFunction::sample(12, [](double x) { return std::cos(kTwoPi * x); });
    double prev = 1.0;
    for (int n = 8; n <= 14; ++n) {
      const double d = std::fabs(integrate(gibbs_atoms(j, n), f) - integrate(gibbs_atoms(j, n + 2), f));
      CHECK(d <= prev);
      prev = d;
    }
  }
}

TEST_CASE("integrate_via_operator", "[transfer]") {
  const JacobianPotential half = make_jacobian(PotentialSpec::constant_half(), 12);
  const GridFunction c = GridFunction::sample(12, [](double x) { return std::cos(kTwoPi * x); });
  CHECK(integrate_via_operator(half, GridFunction::constant(12, 3.0), 5, CirclePoint(0.3)) == Approx(3.0));
  CHECK(std::fabs(integrate_via_operator(half, c, 1, CirclePoint(0.0))) <= 1e-10);
  const JacobianPotential j = make_jacobian(PotentialSpec::cosine(0.2), 12);
  const double via_op = integrate_via_operator(j, c, 14, CirclePoint(0.0));
  const double via_atoms = integrate(gibbs_atoms(j, 14), c);
  CHECK(std::fabs(via_op - via_atoms) <= 1e-6);
}

TEST_CASE("entropy of Gibbs measures", "[transfer]") {
  const double log2 = std::log(2.0);
  CHECK(std::fabs(entropy_gibbs(make_jacobian(PotentialSpec::constant_half(), 12), 14) - log2) <= 1e-10);
  const double binary = -0.3 * std::log(0.3) - 0.7 * std::log(0.7);
  for (int n : {1, 4, 14}) {
    CHECK(std::fabs(entropy_gibbs(make_jacobian(PotentialSpec::bernoulli(0.3), 14), n) - binary) <= 1e-9);
  }
  const JacobianPotential j = make_jacobian(PotentialSpec::cosine(0.2), 12);
  const double h14 = entropy_gibbs(j, 14);
  const double h16 = entropy_gibbs(j, 16);
  CHECK(h14 < log2);
  CHECK(std::fabs(h14 - h16) <= 1e-6);
  CHECK(h16 == Approx(0.6419426073).margin(1e-9));
  CHECK(entropy_gibbs(make_jacobian(PotentialSpec::cosine(1e-10), 12), 10) == Approx(log2).margin(1e-9));
}
