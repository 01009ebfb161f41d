#include <catch_amalgamated.hpp>

#include <cmath>

#include "gibbsconv/convolution.hpp"
#include "gibbsconv/potentials.hpp"

using namespace gibbsconv;
using Catch::Approx;

namespace {
double sup_abs_minus(const GridFunction& f, double c) {
  double s = 0.0;
  for (double v : f.samples()) s = std::max(s, std::fabs(v - c));
  return s;
}
}  // namespace

TEST_CASE("convolved Jacobian identities", "[convolution]") {
  const JacobianPotential j1 = make_jacobian(PotentialSpec::cosine(0.2), 12);
  SECTION("Dirac at zero returns J1") {
    const JacobianPotential jt = convolved_jacobian(j1, dirac(CirclePoint(0.0)));
    CHECK(sup_distance(jt.grid(), j1.grid()) <= 1e-15);
  }
  SECTION("Dirac at a dyadic point is a shift") {
    const JacobianPotential jt = convolved_jacobian(j1, dirac(CirclePoint(0.25)));
    for (std::size_t i = 0; i < jt.size(); ++i) {
      CHECK(std::fabs(jt[i] - j1[(i + jt.size() - 1024) % jt.size()]) <= 1e-15);
    }
  }
  SECTION("Lebesgue flattens to one half") {
    const JacobianPotential jt = convolved_jacobian(j1, lebesgue_level(12));
    CHECK(sup_abs_minus(jt.grid(), 0.5) <= 1e-12);
  }
  SECTION("pairing holds before projection") {
    const AtomicMeasure mu2 = gibbs_atoms(make_jacobian(PotentialSpec::cosine(0.3), 12), 12);
    CHECK(pairing_residual(convolved_samples(j1, mu2)) <= 1e-12);
  }
}

TEST_CASE("closed form for cosine potentials", "[convolution]") {
  const double a = 0.2;
  const JacobianPotential j1 = make_jacobian(PotentialSpec::cosine(a), 12);
  const AtomicMeasure mu2 = gibbs_atoms(make_jacobian(PotentialSpec::cosine(0.3), 12), 14);
  const JacobianPotential jt = convolved_jacobian(j1, mu2);
  double c = 0.0, s = 0.0;
  for (const Atom& x : mu2.atoms()) {
    c += x.weight * std::cos(kTwoPi * x.position);
    s += x.weight * std::sin(kTwoPi * x.position);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < jt.size(); ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(jt.size());
    const double expect = 0.5 + a * (c * std::cos(kTwoPi * u) + s * std::sin(kTwoPi * u));
    worst = std::max(worst, std::fabs(jt[i] - expect));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("period-two orbit acts on harmonics", "[convolution]") {
  // Its k-th Fourier coefficient is -1/2 unless 3 divides k, where it is 1.
  const JacobianPotential j1 = make_jacobian(PotentialSpec::cosine(0.3), 12);
  const JacobianPotential jt = convolved_jacobian(j1, periodic_third());
  double worst = 0.0;
  for (std::size_t i = 0; i < jt.size(); ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(jt.size());
    worst = std::max(worst, std::fabs(jt[i] - (0.5 - 0.15 * std::cos(kTwoPi * u))));
  }
  CHECK(worst <= 2e-6);
  const JacobianPotential j3 = make_jacobian(PotentialSpec::third_symmetric(0.3), 12);
  CHECK(sup_distance(convolved_jacobian(j3, periodic_third()).grid(), j3.grid()) <= 2e-6);
}

TEST_CASE("entropy of a convolution", "[convolution]") {
  const JacobianPotential j1 = make_jacobian(PotentialSpec::cosine(0.2), 12);
  const JacobianPotential j2 = make_jacobian(PotentialSpec::cosine(0.3), 12);
  const AtomicMeasure mu1 = gibbs_atoms(j1, 12);
  const AtomicMeasure mu2 = gibbs_atoms(j2, 12);
  const ConvolutionEntropyReport r = convolution_entropy_report(j1, mu1, mu2);
  CHECK(r.discrepancy <= 1e-10);
  CHECK(r.triple_sum == Approx(0.682862981264).margin(1e-9));
  CHECK(convolution_entropy(j1, mu1, mu2) == r.triple_sum);

  SECTION("at least the larger entropy, at most log 2") {
    const double h1 = entropy_gibbs(j1, 12);
    const double h2 = entropy_gibbs(j2, 12);
    CHECK(r.triple_sum >= std::max(h1, h2) - 1e-9);
    CHECK(r.triple_sum <= std::log(2.0) + 1e-12);
  }
  SECTION("Lebesgue factor gives log 2") {
    CHECK(convolution_entropy(j1, mu1, lebesgue_level(12)) == Approx(std::log(2.0)).margin(1e-12));
  }
  SECTION("Dirac factor gives back the entropy of mu1") {
    CHECK(convolution_entropy(j1, mu1, dirac(CirclePoint(0.0))) == Approx(entropy_gibbs(j1, 12)).margin(1e-12));
  }
  SECTION("the convolved Jacobian is not the Jacobian of the convolution") {
    // For a Jacobian J of nu, int (L_J f)(x) dnu = int f dnu. With J1 * mu2
    // this fails at the level of 1e-2 on the first harmonic, and exchanging
    // the roles of mu1 and mu2 changes the computed entropy.
    const JacobianPotential jt = convolved_jacobian(j1, mu2);
    const AtomicMeasure nu = convolve_atomic(mu1, mu2);
    const GridFunction c = GridFunction::sample(12, [](double x) { return std::cos(kTwoPi * x); });
    const double defect = integrate(nu, ruelle_apply(jt, c)) - integrate(nu, c);
    CHECK(std::fabs(defect) > 1e-3);
    const double swapped = convolution_entropy_report(j2, mu2, mu1).triple_sum;
    CHECK(std::fabs(swapped - r.triple_sum) > 1e-4);
  }
}

TEST_CASE("the two entropy routes off the lattice", "[convolution]") {
  const JacobianPotential j1 = make_jacobian(PotentialSpec::cosine(0.25), 10);
  const AtomicMeasure mu1 = gibbs_atoms(j1, 8);
  const AtomicMeasure mu2({{0.1, 0.3}, {1.0 / 3, 0.3}, {0.77, 0.4}});
  const ConvolutionEntropyReport r = convolution_entropy_report(j1, mu1, mu2);
  CHECK(r.discrepancy <= 1e-12);
  CHECK(r.triple_sum > entropy_gibbs(j1, 8) - 1e-9);
}

TEST_CASE("triple-sum guard", "[convolution]") {
  const JacobianPotential j1 = make_jacobian(PotentialSpec::cosine(0.1), 8);
  std::vector<Atom> a(4096);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = {(i + 0.3) / 4096.0, 1.0 / 4096};
  const AtomicMeasure off(a);  // non-dyadic positions
  std::vector<Atom> b(2048);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = {(i + 0.3) / 2048.0, 1.0 / 2048};
  CHECK_THROWS_AS(convolution_entropy_report(j1, AtomicMeasure(b), off), ResourceError);
}

TEST_CASE("Holder regularization", "[convolution]") {
  const JacobianPotential j1 = make_jacobian(PotentialSpec::cosine(0.4), 12);
  for (double alpha : {0.25, 0.5, 1.0}) {
    const HolderReport h = holder_regularization_check(j1, periodic_third(), alpha);
    CHECK(h.pass);
    CHECK(h.k_tilde == Approx(0.5 * h.k1).epsilon(1e-4));
  }
  const AtomicMeasure mu2 = gibbs_atoms(make_jacobian(PotentialSpec::cosine(0.3), 12), 12);
  const HolderReport h = holder_regularization_check(j1, mu2, 1.0);
  CHECK(h.pass);
  CHECK(h.k_tilde < h.k1);
}

TEST_CASE("iterated self-convolution", "[convolution]") {
  const JacobianPotential j = make_jacobian(PotentialSpec::cosine(0.4), 12);
  const SelfConvolutionReport r = iterate_self_convolution(j, 12, 10);
  REQUIRE(r.rows.size() == 11);
  CHECK(r.distances_non_increasing);
  CHECK(r.entropies_non_decreasing);
  CHECK(r.max_pairing_residual <= 1e-12);
  CHECK(r.contraction_ratio == Approx(2.0 / 3).margin(1e-3));
  // geometric contraction of the single harmonic
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    CHECK(r.rows[k].sup_dist_to_half / r.rows[k - 1].sup_dist_to_half ==
          Approx(r.contraction_ratio).margin(1e-6));
  }
  CHECK(r.rows.back().sup_dist_to_half == Approx(0.00694).margin(1e-5));
  CHECK_THROWS_AS(iterate_self_convolution(j, 12, 0), ValidationError);
}

TEST_CASE("dyadic crosscheck", "[convolution]") {
  const JacobianPotential j1 = make_jacobian(PotentialSpec::cosine(0.2), 10);
  const JacobianPotential j2 = make_jacobian(PotentialSpec::bernoulli(0.3), 10);
  CHECK(dyadic_proof_crosscheck(j1, j2, 8) <= 1e-13);
  CHECK_THROWS_AS(dyadic_proof_crosscheck(j1, j2, 15), ValidationError);
}
