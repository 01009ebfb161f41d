#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gibbsconv/scenarios.hpp"

namespace gibbsconv {

struct CriterionResult {
  int id;
  std::string title;
  bool pass;
  std::string details;
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline std::string fixed(double v, int digits = 9) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline JacobianPotential jac(const PotentialSpec& s, int grid = 12) { return make_jacobian(s, grid); }

}  // namespace detail

inline CriterionResult criterion_pairing() {
  using detail::jac;
  std::vector<JacobianPotential> js = {
      jac(PotentialSpec::constant_half()),        jac(PotentialSpec::cosine(0.2)),
      jac(PotentialSpec::cosine(0.3)),            jac(PotentialSpec::cosine(0.4)),
      jac(PotentialSpec::third_symmetric(0.3)),   jac(PotentialSpec::bernoulli(0.3), 14),
      jac(PotentialSpec::samples({0.2, 0.6, 0.9, 0.5, 0.7, 0.3, 0.1, 0.4}))};
  double worst = 0.0;
  int count = 0;
  for (const auto& j : js) {
    worst = std::max(worst, j.pairing_residual());
    ++count;
  }
  const std::vector<AtomicMeasure> measures = {
      gibbs_atoms(js[1], 12), gibbs_atoms(js[2], 12), gibbs_atoms(js[3], 12),
      periodic_third(),       lebesgue_level(14),     dirac(CirclePoint(0.0))};
  for (const auto& j : js) {
    for (const auto& mu : measures) {
      worst = std::max(worst, pairing_residual(convolved_samples(j, mu)));
      ++count;
    }
  }
  const SelfConvolutionReport it = iterate_self_convolution(js[3], 12, 10);
  worst = std::max(worst, it.max_pairing_residual);
  count += 10;
  for (int k = 0; k <= 20; ++k) {
    worst = std::max(worst, appendix_path(js[1], js[2], k / 20.0).pairing_residual());
    ++count;
  }
  return {1, "pairing conservation", worst <= 1e-12,
          "max |J(x)+J(x+1/2)-1| = " + detail::sci(worst) + " over " + std::to_string(count) +
              " Jacobians (bound 1e-12)"};
}

inline CriterionResult criterion_identity() {
  using detail::jac;
  const int n = 14;
  double dirac_worst = 0.0;
  double leb_ratio = 0.0;
  bool measure_identity = true;
  const AtomicMeasure delta0 = dirac(CirclePoint(0.0));
  const AtomicMeasure leb = lebesgue_level(n);
  for (const PotentialSpec& s : {PotentialSpec::cosine(0.2), PotentialSpec::cosine(0.3),
                                 PotentialSpec::cosine(0.4), PotentialSpec::third_symmetric(0.3)}) {
    const JacobianPotential j = jac(s);
    dirac_worst = std::max(dirac_worst, sup_distance(convolved_jacobian(j, delta0).grid(), j.grid()));
    const double k1 = holder_constant(j.grid(), 1.0);
    const double d = sup_distance(convolved_jacobian(j, leb).grid(), GridFunction::constant(12, 0.5));
    leb_ratio = std::max(leb_ratio, d / (std::ldexp(1.0, -n) * k1));
    const AtomicMeasure mu = gibbs_atoms(j, 10);
    const AtomicMeasure conv = convolve_atomic(mu, delta0);
    if (conv.size() != mu.size()) {
      measure_identity = false;
    } else {
      for (std::size_t i = 0; i < mu.size(); ++i) {
        if (conv[i].position != mu[i].position || conv[i].weight != mu[i].weight) measure_identity = false;
      }
    }
  }
  const bool pass = dirac_worst <= 1e-10 && leb_ratio <= 1.0 && measure_identity;
  return {2, "identity laws", pass,
          "sup|J*delta0 - J| = " + detail::sci(dirac_worst) + " (bound 1e-10); sup|J*Leb - 1/2| / (2^-14 K1) = " +
              detail::sci(leb_ratio) + " (bound 1); mu*delta0 == mu atom-for-atom: " +
              (measure_identity ? "yes" : "no")};
}

inline CriterionResult criterion_closed_form() {
  const double p = 0.3;
  const double exact = -p * std::log(p) - (1 - p) * std::log(1 - p);
  double worst = 0.0;
  for (int n : {1, 2, 3, 5, 8, 12, 14, 16}) {
    const JacobianPotential j = make_jacobian(PotentialSpec::bernoulli(p), std::max(12, n));
    worst = std::max(worst, std::fabs(entropy_gibbs(j, n) - exact));
  }
  const JacobianPotential half = make_jacobian(PotentialSpec::constant_half(), 12);
  const double leb = std::fabs(entropy_gibbs(half, 14) - kLog2);
  return {3, "closed-form entropy", worst <= 1e-9 && leb <= 1e-10,
          "bernoulli(0.3): max |h_n - " + detail::fixed(exact, 7) + "| over n in {1..16} = " +
              detail::sci(worst) + " (bound 1e-9); |h(Leb) - log 2| = " + detail::sci(leb) +
              " (bound 1e-10)"};
}

inline CriterionResult criterion_entropy_routes() {
  using detail::jac;
  const int n = 12;
  struct Pair {
    PotentialSpec s1;
    std::function<AtomicMeasure()> mu2;
    int grid;
  };
  const auto g = [n](PotentialSpec s, int grid = 12) {
    return [s, grid, n] { return gibbs_atoms(make_jacobian(s, grid), n); };
  };
  const std::vector<Pair> pairs = {
      {PotentialSpec::cosine(0.2), g(PotentialSpec::cosine(0.3)), 12},
      {PotentialSpec::cosine(0.3), g(PotentialSpec::cosine(0.2)), 12},
      {PotentialSpec::cosine(0.4), g(PotentialSpec::cosine(0.2)), 12},
      {PotentialSpec::third_symmetric(0.3), g(PotentialSpec::cosine(0.3)), 12},
      {PotentialSpec::cosine(0.2), g(PotentialSpec::bernoulli(0.3), 12), 12},
      {PotentialSpec::bernoulli(0.3), g(PotentialSpec::cosine(0.2)), 12},
      {PotentialSpec::third_symmetric(0.3), [] { return periodic_third(); }, 16},
      {PotentialSpec::bernoulli(0.3), [] { return periodic_third(); }, 14},
      {PotentialSpec::cosine(0.2), [] { return lebesgue_level(12); }, 12},
      {PotentialSpec::cosine(0.2), [] { return dirac(CirclePoint(0.0)); }, 12},
  };
  double worst = 0.0;
  for (const Pair& pr : pairs) {
    const JacobianPotential j = make_jacobian(pr.s1, pr.grid);
    const ConvolutionEntropyReport r = convolution_entropy_report(j, gibbs_atoms(j, n), pr.mu2());
    worst = std::max(worst, r.discrepancy);
  }
  double cross = 0.0;
  cross = std::max(cross, dyadic_proof_crosscheck(jac(PotentialSpec::cosine(0.2)), jac(PotentialSpec::cosine(0.3)), 10));
  cross = std::max(cross, dyadic_proof_crosscheck(jac(PotentialSpec::constant_half()), jac(PotentialSpec::cosine(0.3)), 10));
  cross = std::max(cross, dyadic_proof_crosscheck(jac(PotentialSpec::cosine(0.4)), jac(PotentialSpec::cosine(0.2)), 12));
  return {4, "convolved Jacobian entropy self-audit", worst <= 1e-8 && cross <= 1e-12,
          "max |triple sum - J-tilde route| = " + detail::sci(worst) + " over " +
              std::to_string(pairs.size()) + " pairs (bound 1e-8); dyadic cross-check = " +
              detail::sci(cross) + " (bound 1e-12)"};
}

inline CriterionResult criterion_holder() {
  using detail::jac;
  const std::vector<JacobianPotential> j1s = {
      jac(PotentialSpec::cosine(0.2)), jac(PotentialSpec::cosine(0.3)),
      jac(PotentialSpec::cosine(0.4)), jac(PotentialSpec::third_symmetric(0.3))};
  const std::vector<AtomicMeasure> mus = {
      gibbs_atoms(j1s[0], 12), gibbs_atoms(j1s[1], 12), gibbs_atoms(j1s[3], 12),
      lebesgue_level(10), periodic_third()};
  double worst = -1.0;
  int count = 0;
  for (double alpha : {0.5, 1.0}) {
    for (const auto& j : j1s) {
      for (const auto& mu : mus) {
        const HolderReport h = holder_regularization_check(j, mu, alpha);
        worst = std::max(worst, h.k_tilde - h.k1);
        ++count;
      }
    }
  }
  return {5, "convolution does not raise the Hoelder constant", worst <= 1e-9,
          "max (K_tilde - K1) = " + detail::sci(worst) + " over " + std::to_string(count) +
              " (J1, mu2, alpha) cases, alpha in {0.5, 1} (bound 1e-9)"};
}

inline CriterionResult criterion_entropy_inequality() {
  const int n = 12;
  struct Case {
    PotentialSpec s1, s2;
  };
  const std::vector<Case> cases = {
      {PotentialSpec::cosine(0.2), PotentialSpec::cosine(0.3)},
      {PotentialSpec::cosine(0.3), PotentialSpec::cosine(0.2)},
      {PotentialSpec::cosine(0.4), PotentialSpec::cosine(0.2)},
      {PotentialSpec::cosine(0.1), PotentialSpec::cosine(0.1)},
      {PotentialSpec::third_symmetric(0.3), PotentialSpec::cosine(0.3)},
      {PotentialSpec::cosine(0.3), PotentialSpec::third_symmetric(0.2)},
      {PotentialSpec::bernoulli(0.3), PotentialSpec::cosine(0.2)},
  };
  double worst_margin = 1e300;
  double worst_strict = 1e300;
  double worst_chain_upper = 1e300;
  double worst_chain_lower = 1e300;
  double worst_l0 = -1e300;
  bool strict_somewhere = true;
  int flat_cases = 0;
  for (const Case& c : cases) {
    const JacobianPotential j1 = make_jacobian(c.s1, 12);
    const JacobianPotential j2 = make_jacobian(c.s2, 12);
    const AtomicMeasure mu1 = gibbs_atoms(j1, n);
    const AtomicMeasure mu2 = gibbs_atoms(j2, n);
    const double h1 = entropy_against(j1, mu1);
    const double h2 = entropy_against(j2, mu2);
    const double hn = convolution_entropy(j1, mu1, mu2);
    const double margin = hn - std::max(h1, h2);
    worst_margin = std::min(worst_margin, margin);
    if (c.s1.holder() && c.s2.holder() && c.s1.amplitude() >= 0.1 && c.s2.amplitude() >= 0.1) {
      worst_strict = std::min(worst_strict, margin);
    }
    const VariationalCandidate u = variational_candidate(j1, mu1, mu2);
    worst_chain_upper = std::min(worst_chain_upper, hn - u.functional_value);
    worst_chain_lower = std::min(worst_chain_lower, u.functional_value - h2);
    worst_l0 = std::max(worst_l0, u.l0u_max);
    // A cosine J1 against a measure whose first Fourier coefficient vanishes
    // gives J-tilde = 1/2, and then L0 u = 1 everywhere.
    const GridFunction jt = convolved_jacobian(j1, mu2).grid();
    if (jt.max() - jt.min() > kJensenFlatOscillation) {
      strict_somewhere = strict_somewhere && u.strict_somewhere;
    } else {
      ++flat_cases;
    }
  }
  const bool pass = worst_margin >= -1e-6 && worst_strict >= 1e-4 && worst_chain_upper >= -1e-6 &&
                    worst_chain_lower >= -1e-6 && worst_l0 <= 1.0 + 1e-9 && strict_somewhere;
  return {6, "convolution raises entropy", pass,
          "min h(nu)-max h(mu_i) = " + detail::sci(worst_margin) + " (>= -1e-6); strict cases min margin = " +
              detail::sci(worst_strict) + " (>= 1e-4); min h(nu)-F(u) = " + detail::sci(worst_chain_upper) +
              ", min F(u)-h(mu2) = " + detail::sci(worst_chain_lower) + " (>= -1e-6); max L0u = " +
              detail::fixed(worst_l0, 12) + " (<= 1+1e-9), strict somewhere on non-flat J-tilde: " +
              (strict_somewhere ? "yes" : "no") + " (" + std::to_string(flat_cases) + " flat)"};
}

inline CriterionResult criterion_self_convolution() {
  const JacobianPotential j = make_jacobian(PotentialSpec::cosine(0.4), 12);
  const SelfConvolutionReport r = iterate_self_convolution(j, 12, 10);
  const auto& last = r.rows.back();
  const bool pass = r.distances_non_increasing && r.entropies_non_decreasing &&
                    last.sup_dist_to_half < 0.01 && kLog2 - last.entropy <= 1e-3;
  return {7, "iterated self-convolution flattens to Lebesgue", pass,
          "sup|J_10 - 1/2| = " + detail::sci(last.sup_dist_to_half) + " (< 0.01), log 2 - h_10 = " +
              detail::sci(kLog2 - last.entropy) + " (<= 1e-3), contraction ratio = " +
              detail::fixed(r.contraction_ratio, 6) + ", monotone: " +
              (r.distances_non_increasing && r.entropies_non_decreasing ? "yes" : "no")};
}

inline CriterionResult criterion_fixed_point() {
  Config cfg;
  cfg.j1 = "third_symmetric:0.3";
  const ScenarioResult r = cmd_periodic(cfg);
  const double sup = r.metrics["sup_jtilde_minus_j"].get<double>();
  const double dh = r.metrics["h_nu_minus_h_mu"].get<double>();
  return {8, "period-two convolution fixed point", r.ok(),
          "sup|J-tilde - J| = " + detail::sci(sup) + ", |h(nu) - h(mu)| = " + detail::sci(std::fabs(dh)) +
              " (both <= 1e-8, grid 2^16, level 14)"};
}

inline CriterionResult criterion_arc_identity() {
  Config cfg;
  cfg.j1 = "bernoulli:0.3";
  const ScenarioResult r = cmd_periodic(cfg);
  const double gap = r.metrics["arc_identity_gap"].get<double>();
  const double gain = r.metrics["h_gain"].get<double>();
  const bool pass = gap <= std::ldexp(1.0, -12) && gain > 1e-3;
  return {9, "arc-mass identity and entropy gain", pass,
          "|nu[0,1/2) - prediction| = " + detail::sci(gap) + " (<= 2^-12), h(nu) - h(mu) = " +
              detail::sci(gain) + " (> 1e-3)"};
}

inline CriterionResult criterion_variational() {
  struct Case {
    const char* name;
    PotentialSpec spec;
    int level;
    const char* v0;
  };
  const std::vector<Case> cases = {
      {"lebesgue", PotentialSpec::constant_half(), 12, "random"},
      {"bernoulli(0.3)", PotentialSpec::bernoulli(0.3), 14, "ones"},
      {"cosine(0.2)", PotentialSpec::cosine(0.2), 12, "ones"},
  };
  bool pass = true;
  std::string details;
  for (const Case& c : cases) {
    Config cfg;
    cfg.level = c.level;
    cfg.v0 = c.v0;
    cfg.j1 = c.spec.label();
    const ScenarioResult r = cmd_variational(cfg);
    const double gap = r.metrics["gap"].get<double>();
    const double audit = r.metrics["audit_min_F_minus_h"].get<double>();
    pass = pass && std::fabs(gap) <= 1e-3 && audit >= -1e-6;
    if (!details.empty()) details += "; ";
    details += std::string(c.name) + ": gap " + detail::sci(gap) + ", audit min " + detail::sci(audit);
  }
  return {10, "variational entropy formula", pass, details + " (gap <= 1e-3, audit >= -1e-6)"};
}

inline CriterionResult criterion_derivative() {
  Config cfg;
  cfg.level = 12;
  const ScenarioResult main = cmd_derivative(cfg);
  const double rel = main.metrics["relative_error"].get<double>();
  cfg.direction = "const";
  const ScenarioResult zero_dir = cmd_derivative(cfg);
  cfg.direction = "cos:2";
  cfg.j1 = "constant_half";
  const ScenarioResult lebesgue = cmd_derivative(cfg);
  auto mag = [](const ScenarioResult& r) {
    return std::max(std::fabs(r.metrics["formula_value"].get<double>()),
                    std::fabs(r.metrics["finite_difference_value"].get<double>()));
  };
  const bool pass = rel <= 1e-3 && mag(zero_dir) <= 1e-3 && mag(lebesgue) <= 1e-3;
  return {11, "entropy derivative along a Gibbs curve", pass,
          "formula " + detail::fixed(main.metrics["formula_value"].get<double>(), 8) + " vs FD " +
              detail::fixed(main.metrics["finite_difference_value"].get<double>(), 8) + ", rel err " +
              detail::sci(rel) + " (<= 1e-3); |d/dt| for z3=0: " + detail::sci(mag(zero_dir)) +
              ", for J1=1/2: " + detail::sci(mag(lebesgue)) + " (<= 1e-3)"};
}

inline CriterionResult criterion_appendix() {
  Config cfg;
  const ScenarioResult r = cmd_appendix(cfg);
  const double tan = r.metrics["max_abs_tangent_integral"].get<double>();
  const bool dom = r.metrics["dominance"].get<bool>();
  const bool mono = r.metrics["monotone"].get<bool>();
  const double logj = r.metrics["max_rel_error_logj_vs_fd"].get<double>();
  const double resp = r.metrics["max_rel_error_response_vs_fd"].get<double>();
  const bool pass = tan <= 1e-8 && dom && mono && logj <= 1e-3;
  return {12, "affine path identities and entropy monotonicity", pass,
          "max |tangent integral| = " + detail::sci(tan) + " (<= 1e-8); dominance " + (dom ? "yes" : "no") +
              ", monotone " + (mono ? "yes" : "no") + "; -int chi log J dmu vs sweep FD: max rel err " +
              detail::sci(logj) + " (<= 1e-3); with measure response: " + detail::sci(resp)};
}

inline CriterionResult criterion_invariance() {
  const JacobianPotential j1 = make_jacobian(PotentialSpec::cosine(0.2), 12);
  const JacobianPotential j2 = make_jacobian(PotentialSpec::cosine(0.3), 12);
  const AtomicMeasure mu = gibbs_atoms(j1, 16);
  const AtomicMeasure rho = gibbs_atoms(j2, 12);
  const double d_nu = trig_invariance_defect(convolve_atomic(mu, rho), 4);
  const double d_rho = trig_invariance_defect(rho, 4);
  const double d_mu = trig_invariance_defect(mu, 4);
  return {13, "invariance of mu * rho_n", d_nu <= 1e-6,
          "max trig-probe defect of nu_12 = " + detail::sci(d_nu) + " (<= 1e-6); rho_12 alone " +
              detail::sci(d_rho) + ", mu alone " + detail::sci(d_mu)};
}

inline std::vector<std::function<CriterionResult()>> all_criteria() {
  return {criterion_pairing,        criterion_identity,          criterion_closed_form,
          criterion_entropy_routes, criterion_holder,            criterion_entropy_inequality,
          criterion_self_convolution, criterion_fixed_point,     criterion_arc_identity,
          criterion_variational,    criterion_derivative,        criterion_appendix,
          criterion_invariance};
}

inline std::string format_criterion(const CriterionResult& r) {
  char head[16];
  std::snprintf(head, sizeof head, "%2d", r.id);
  return std::string("criterion ") + head + (r.pass ? " PASS  " : " FAIL  ") + r.title + ": " + r.details;
}

}  // namespace gibbsconv
