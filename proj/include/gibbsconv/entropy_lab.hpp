#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gibbsconv/atomic_measure.hpp"
#include "gibbsconv/convolution.hpp"
#include "gibbsconv/errors.hpp"
#include "gibbsconv/grid_function.hpp"
#include "gibbsconv/lattice.hpp"
#include "gibbsconv/transfer_operator.hpp"

namespace gibbsconv {

// ---------------------------------------------------------------------------
// Tangent directions

struct TangentVector {
  GridFunction z3;
};

/// eta minus its mean against mu1.
inline TangentVector tangent_project(const GridFunction& eta, const AtomicMeasure& mu1) {
  const double mean = integrate(mu1, eta);
  return {eta.map([mean](double v) { return v - mean; })};
}

// ---------------------------------------------------------------------------
// Variational characterization of entropy

namespace detail {

inline void require_positive(const GridFunction& v) {
  if (!(v.min() > 0.0)) throw ValidationError("variational argument must be positive");
}

}  // namespace detail

/// int log((v(s/2) + v(s/2 + 1/2)) / v(s)) dmu(s).
inline double variational_functional(const GridFunction& v, const AtomicMeasure& mu) {
  detail::require_positive(v);
  double s = 0.0;
  for (const Atom& a : mu.atoms()) {
    const double half = 0.5 * a.position;
    s += a.weight * std::log((v.at(half) + v.at(half + 0.5)) / v.at(a.position));
  }
  return s;
}

/// int log((v(s) + v(s + 1/2)) / v(s)) dmu(s).
///
/// Equal to variational_functional when mu is T-invariant. For cylinder
/// measures it is bounded below by their entropy even though they are not
/// invariant, which makes it the right target for numerical minimization.
inline double variational_functional_composed(const GridFunction& v, const AtomicMeasure& mu) {
  detail::require_positive(v);
  double s = 0.0;
  for (const Atom& a : mu.atoms()) {
    const double q = v.at(a.position);
    s += a.weight * std::log((q + v.at(a.position + 0.5)) / q);
  }
  return s;
}

struct VariationalCandidate {
  GridFunction u;
  double l0u_max;           ///< max over the grid of u(s/2) + u(s/2 + 1/2)
  double l0u_min;
  bool strict_somewhere;    ///< L0 u < 1 - 1e-9 at some grid point
  double neg_log_u_mu2;     ///< -int log u dmu2
  double functional_value;  ///< variational_functional(u, mu2)
};

/// u(s) = exp(int log J-tilde(r + s) dmu1(r)) with J-tilde = J1 convolved with mu2.
inline VariationalCandidate variational_candidate(const JacobianPotential& j1,
                                                  const AtomicMeasure& mu1,
                                                  const AtomicMeasure& mu2) {
  const int m = j1.log2_size();
  std::optional<int> level = detail::pair_lattice_level(mu1, mu2);
  if (level) {
    level = std::max(*level, m);
    if (*level > kMaxLatticeLevel) level.reset();
  }
  const detail::ConvolvedEvaluator jt(j1, mu2, level);

  auto log_u = [&](double s) {
    double acc = 0.0;
    for (const Atom& r : mu1.atoms()) acc += r.weight * jt.log_value(s + r.position);
    return acc;
  };

  std::vector<double> samples(j1.size());
  if (jt.tabulated()) {
    const std::vector<std::size_t> ir = detail::lattice_indices(mu1, *level);
    const std::size_t mask = (std::size_t{1} << *level) - 1;
    const std::size_t stride = std::size_t{1} << (*level - m);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      double acc = 0.0;
      for (std::size_t r = 0; r < mu1.size(); ++r) {
        acc += mu1[r].weight * jt.log_at_index((k * stride + ir[r]) & mask);
      }
      samples[k] = std::exp(acc);
    }
  } else {
    const double inv = std::ldexp(1.0, -m);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      samples[k] = std::exp(log_u(static_cast<double>(k) * inv));
    }
  }
  GridFunction u(m, std::move(samples));

  double lmax = -std::numeric_limits<double>::infinity();
  double lmin = std::numeric_limits<double>::infinity();
  const double inv = 1.0 / static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double half = 0.5 * static_cast<double>(i) * inv;
    const double l0 = u.at(half) + u.at(half + 0.5);
    lmax = std::max(lmax, l0);
    lmin = std::min(lmin, l0);
  }
  double nl = 0.0;
  for (const Atom& s : mu2.atoms()) nl += s.weight * log_u(s.position);
  const double fv = variational_functional(u, mu2);
  return {std::move(u), lmax, lmin, lmin < 1.0 - 1e-9, -nl, fv};
}

struct MinimizeResult {
  GridFunction v;
  double value;          ///< minimized composed functional
  double literal_value;  ///< variational_functional at the same v
  std::vector<double> trace;  ///< value after every accepted step, starting with v0
  int steps_taken;
  int accepted;
  double final_rate;
};

namespace detail {

/// Composed functional and its gradient with respect to theta = log v.
inline double composed_with_gradient(const std::vector<double>& theta, int m,
                                     const AtomicMeasure& mu, std::vector<double>& grad) {
  const std::size_t n = theta.size();
  const std::size_t mask = n - 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::exp(theta[i]);
  std::fill(grad.begin(), grad.end(), 0.0);
  const double scale = static_cast<double>(n);
  double f = 0.0;
  for (const Atom& a : mu.atoms()) {
    auto locate = [&](double x, std::size_t& i0, std::size_t& i1, double& th) {
      const double t = reduce_unit(x) * scale;
      const double fl = std::floor(t);
      i0 = static_cast<std::size_t>(fl) & mask;
      i1 = (i0 + 1) & mask;
      th = t - fl;
    };
    std::size_t a0, a1, b0, b1;
    double ta, tb;
    locate(a.position, a0, a1, ta);
    locate(a.position + 0.5, b0, b1, tb);
    const double q = v[a0] * (1.0 - ta) + v[a1] * ta;
    const double r = v[b0] * (1.0 - tb) + v[b1] * tb;
    const double p = q + r;
    f += a.weight * (std::log(p) - std::log(q));
    const double gp = a.weight / p;
    const double gq = a.weight / q;
    grad[a0] += (gp - gq) * (1.0 - ta);
    grad[a1] += (gp - gq) * ta;
    grad[b0] += gp * (1.0 - tb);
    grad[b1] += gp * tb;
  }
  for (std::size_t i = 0; i < n; ++i) grad[i] *= v[i];
  (void)m;
  return f;
}

}  // namespace detail

/// Gradient descent on log v with step halving on rejection.
///
/// Stops after `steps` trials or once ten trials in a row are rejected, which
/// at that point means the step has shrunk below what changes the value.
inline MinimizeResult minimize_variational(const AtomicMeasure& mu, const GridFunction& v0,
                                           int steps, double rate) {
  detail::require_positive(v0);
  if (steps < 0) throw ValidationError("steps must be non-negative");
  if (!(rate > 0.0)) throw ValidationError("rate must be positive");
  const int m = v0.log2_size();
  const std::size_t n = v0.size();
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = std::log(v0[i]);
  std::vector<double> grad(n);
  std::vector<double> trial_grad(n);
  double f = detail::composed_with_gradient(theta, m, mu, grad);
  if (!std::isfinite(f)) throw OptimizationError("variational functional is not finite at v0");
  MinimizeResult res{v0, f, 0.0, {f}, 0, 0, rate};
  std::vector<double> trial(n);
  int rejected_run = 0;
  int non_finite_run = 0;
  const double step_scale = static_cast<double>(n);
  for (int s = 0; s < steps; ++s) {
    ++res.steps_taken;
    for (std::size_t i = 0; i < n; ++i) trial[i] = theta[i] - rate * step_scale * grad[i];
    const double ft = detail::composed_with_gradient(trial, m, mu, trial_grad);
    if (std::isfinite(ft) && ft <= f) {
      theta.swap(trial);
      grad.swap(trial_grad);
      f = ft;
      res.trace.push_back(f);
      ++res.accepted;
      rejected_run = 0;
      non_finite_run = 0;
    } else {
      non_finite_run = std::isfinite(ft) ? 0 : non_finite_run + 1;
      if (non_finite_run >= 10) {
        throw OptimizationError("descent diverged: 10 consecutive non-finite trial values");
      }
      rate *= 0.5;
      if (++rejected_run >= 10) break;
    }
  }
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::exp(theta[i]);
  res.v = GridFunction(m, std::move(v));
  res.value = f;
  res.literal_value = variational_functional(res.v, mu);
  res.final_rate = rate;
  return res;
}

// ---------------------------------------------------------------------------
// Linear response of Gibbs measures

/// sum_{k >= 0} int psi * L^k (f - int f dmu) dmu for the normalized operator of J.
///
/// This is the derivative of t -> int f dmu_t along a curve of Gibbs measures
/// whose Jacobians satisfy d/dt log J_t = psi at t = 0. `psi_at` evaluates psi
/// at atom positions.
template <class Psi>
double linear_response(const JacobianPotential& j, Psi&& psi_at, const GridFunction& f,
                       const AtomicMeasure& mu, int max_terms = 10000) {
  const double mean = integrate(mu, f);
  GridFunction g = f.map([mean](double v) { return v - mean; });
  std::vector<double> psi(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) psi[i] = psi_at(mu[i].position);
  double scale = 0.0;
  for (double v : g.samples()) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) return 0.0;
  double total = 0.0;
  for (int k = 0; k < max_terms; ++k) {
    double term = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) term += mu[i].weight * psi[i] * g.at(mu[i].position);
    total += term;
    GridFunction next = ruelle_apply(j.grid(), g);
    double change = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) change = std::max(change, std::fabs(next[i] - g[i]));
    g = std::move(next);
    if (change < 1e-14 * scale) return total;
  }
  throw ConvergenceError("linear response series did not settle", std::fabs(total));
}

// ---------------------------------------------------------------------------
// Derivative of convolution entropy along a Gibbs curve

struct DerivativeConfig {
  double fd_step = 1e-4;
  double tol = 1e-12;
  double agreement = 1e-3;
};

struct DerivativeReport {
  double formula_value;             ///< Z-variation term plus measure-variation term
  double finite_difference_value;   ///< (h(nu_h) - h(nu_-h)) / 2h
  double fd_step;
  double lambda_prime;              ///< d/dt log lambda_t
  GridFunction phi_prime;           ///< d/dt log phi_t
  double z_variation_term;
  double measure_variation_term;    ///< -d/dt int Z0 dmu1_t by central difference
  double literal_measure_term;      ///< -int Z0 z3 dmu1
  double literal_formula_value;     ///< z_variation_term + literal_measure_term
  double response_measure_term;     ///< -(linear response of int Z0 dmu1_t)
  double response_formula_value;
  double entropy_nu;
  double entropy_nu_swapped;        ///< same convolution with the roles of mu1, mu2 exchanged
  double relative_error;
  bool agrees;
};

/// d/dt h(mu1_t * mu2) at t = 0 where log J1_t is the normalization of log J1 + t z3.
inline DerivativeReport entropy_derivative_formula(const JacobianPotential& j1,
                                                   const AtomicMeasure& mu1,
                                                   const JacobianPotential& j2,
                                                   const AtomicMeasure& mu2,
                                                   const TangentVector& z3,
                                                   const DerivativeConfig& cfg = {}) {
  const double h = cfg.fd_step;
  if (!(h > 0.0 && h <= 1e-2)) throw ValidationError("fd_step must lie in (0, 1e-2]");
  const int m = j1.log2_size();
  const GridFunction z = resample(z3.z3, m);
  const GridFunction log_j1 = j1.log();
  const std::size_t n = j1.size();
  const std::size_t mask = n - 1;

  auto shifted = [&](double t) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = log_j1[i] + t * z[i];
    return GridFunction(m, std::move(s));
  };
  const GridFunction a_plus = shifted(h);
  const GridFunction a_minus = shifted(-h);
  const EigenData e_plus = power_iterate(a_plus, cfg.tol);
  const EigenData e_minus = power_iterate(a_minus, cfg.tol);
  const JacobianPotential j_plus = jacobian_from_eigen(a_plus, e_plus);
  const JacobianPotential j_minus = jacobian_from_eigen(a_minus, e_minus);

  std::vector<double> dphi(n);
  for (std::size_t i = 0; i < n; ++i) {
    dphi[i] = (std::log(e_plus.phi[i]) - std::log(e_minus.phi[i])) / (2.0 * h);
  }
  const double dlam = (std::log(e_plus.lambda) - std::log(e_minus.lambda)) / (2.0 * h);
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) psi[i] = z[i] + dphi[i] - dphi[(2 * i) & mask] - dlam;
  const GridFunction psi_grid(m, psi);

  // Convolved Jacobian and the numerator of its logarithmic derivative.
  std::optional<int> level = detail::pair_lattice_level(mu1, mu2);
  if (level) {
    level = std::max(*level, m);
    if (*level > kMaxLatticeLevel) level.reset();
  }
  const detail::ConvolvedEvaluator jt(j1, mu2, level);
  auto numerator = [&](double u) {
    double s = 0.0;
    for (const Atom& x : mu2.atoms()) {
      const double y = u - x.position;
      s += x.weight * j1.at(y) * psi_grid.at(y);
    }
    return s;
  };
  std::vector<double> num_table;
  if (level) {
    std::vector<double> prod(n);
    for (std::size_t i = 0; i < n; ++i) prod[i] = j1[i] * psi[i];
    const GridFunction prod_grid(m, std::move(prod));
    const std::vector<double> table = detail::lattice_table(prod_grid, *level);
    const std::vector<std::size_t> idx = detail::lattice_indices(mu2, *level);
    const std::size_t lmask = table.size() - 1;
    num_table.assign(table.size(), 0.0);
    for (std::size_t i = 0; i < mu2.size(); ++i) {
      const double w = mu2[i].weight;
      for (std::size_t q = 0; q < table.size(); ++q) num_table[q] += w * table[(q - idx[i]) & lmask];
    }
  }
  auto ratio_at = [&](double u) {
    if (level) {
      const std::size_t q =
          static_cast<std::size_t>(std::ldexp(reduce_unit(u), *level)) & (num_table.size() - 1);
      return num_table[q] / jt(u);
    }
    return numerator(u) / jt(u);
  };
  // Z0(s) = int log J-tilde(r + s) dmu2(r)
  auto z0_at = [&](double s) {
    double acc = 0.0;
    for (const Atom& r : mu2.atoms()) acc += r.weight * jt.log_value(s + r.position);
    return acc;
  };

  double zvar = 0.0;
  for (const Atom& s : mu1.atoms()) {
    double inner = 0.0;
    for (const Atom& r : mu2.atoms()) inner += r.weight * ratio_at(s.position + r.position);
    zvar += s.weight * inner;
  }
  zvar = -zvar;

  double literal = 0.0;
  for (const Atom& s : mu1.atoms()) literal += s.weight * z0_at(s.position) * z.at(s.position);
  literal = -literal;

  const int level_n = [&] {
    const auto l = mu1.dyadic_level();
    return l ? std::max(*l, 1) : 14;
  }();
  const AtomicMeasure mu_plus = gibbs_atoms(j_plus, level_n);
  const AtomicMeasure mu_minus = gibbs_atoms(j_minus, level_n);
  const double mvar = -(integrate_fn(mu_plus, z0_at) - integrate_fn(mu_minus, z0_at)) / (2.0 * h);

  const GridFunction z0_grid = GridFunction::sample(m, z0_at);
  const double resp =
      -linear_response(j1, [&](double x) { return psi_grid.at(x); }, z0_grid, mu1);

  const double h_plus = convolution_entropy(j_plus, mu_plus, mu2);
  const double h_minus = convolution_entropy(j_minus, mu_minus, mu2);
  const double fd = (h_plus - h_minus) / (2.0 * h);

  const double formula = zvar + mvar;
  const double rel = std::fabs(formula - fd) / std::max(std::fabs(fd), 1e-6);
  return DerivativeReport{formula,
                          fd,
                          h,
                          dlam,
                          GridFunction(m, std::move(dphi)),
                          zvar,
                          mvar,
                          literal,
                          zvar + literal,
                          resp,
                          zvar + resp,
                          convolution_entropy(j1, mu1, mu2),
                          convolution_entropy(j2, mu2, mu1),
                          rel,
                          rel <= cfg.agreement};
}

// ---------------------------------------------------------------------------
// Affine path between two Jacobians

inline JacobianPotential appendix_path(const JacobianPotential& j1, const JacobianPotential& j2,
                                       double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("path parameter must lie in [0, 1]");
  const int m = std::max(j1.log2_size(), j2.log2_size());
  const GridFunction a = resample(j1.grid(), m);
  const GridFunction b = resample(j2.grid(), m);
  std::vector<double> s(a.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a[i] + t * (b[i] - a[i]);
  return JacobianPotential(GridFunction(m, std::move(s)), j1.floor_eps());
}

/// int (J2 - J1) / J^t dmu^t, with mu^t the Gibbs atoms of J^t at level n.
inline double appendix_tangent_integral(const JacobianPotential& j1, const JacobianPotential& j2,
                                        double t, int n) {
  const JacobianPotential jt = appendix_path(j1, j2, t);
  const AtomicMeasure mu = gibbs_atoms(jt, n);
  return integrate_fn(mu, [&](double x) { return (j2.at(x) - j1.at(x)) / jt.at(x); });
}

struct MonotoneReport {
  bool dominance;
  std::vector<double> t;
  std::vector<double> entropies;
  bool monotone;
  std::vector<double> tangent_integrals;
  std::vector<double> dh_dt_logj;      ///< -int chi log J^t dmu^t
  std::vector<double> dh_dt_response;  ///< full derivative including the measure response
  std::vector<double> dh_dt_fd;        ///< central differences of the sweep, interior points only (NaN at the ends)
  double max_rel_error_logj;
  double max_rel_error_response;
  bool logj_non_positive;              ///< every dh_dt_logj <= 1e-9
  bool logj_matches_fd;
  bool response_matches_fd;
  double max_abs_tangent_integral;
};

inline MonotoneReport entropy_monotone_check(const JacobianPotential& j1,
                                             const JacobianPotential& j2, int n, int t_steps,
                                             double agreement = 1e-3) {
  if (t_steps < 3) throw ValidationError("t_steps must be at least 3");
  MonotoneReport rep{};
  const int m = std::max(j1.log2_size(), j2.log2_size());
  const GridFunction a = resample(j1.grid(), m);
  const GridFunction b = resample(j2.grid(), m);
  rep.dominance = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((b[i] - a[i]) * (a[i] - 0.5) < -1e-12) {
      rep.dominance = false;
      break;
    }
  }
  const double dt = 1.0 / static_cast<double>(t_steps - 1);
  for (int k = 0; k < t_steps; ++k) {
    const double t = k == t_steps - 1 ? 1.0 : k * dt;
    const JacobianPotential jt = appendix_path(j1, j2, t);
    const AtomicMeasure mu = gibbs_atoms(jt, n);
    auto chi = [&](double x) { return (j2.at(x) - j1.at(x)) / jt.at(x); };
    const double h = entropy_against(jt, mu);
    rep.t.push_back(t);
    rep.entropies.push_back(h);
    rep.tangent_integrals.push_back(integrate_fn(mu, chi));
    rep.dh_dt_logj.push_back(
        -integrate_fn(mu, [&](double x) { return chi(x) * std::log(jt.at(x)); }));
    rep.dh_dt_response.push_back(-linear_response(jt, chi, jt.log(), mu));
  }
  rep.monotone = true;
  for (std::size_t k = 1; k < rep.entropies.size(); ++k) {
    if (rep.entropies[k] > rep.entropies[k - 1] + 1e-9) rep.monotone = false;
  }
  rep.logj_non_positive = std::all_of(rep.dh_dt_logj.begin(), rep.dh_dt_logj.end(),
                                      [](double v) { return v <= 1e-9; });
  rep.dh_dt_fd.assign(rep.entropies.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 1; k + 1 < rep.entropies.size(); ++k) {
    const double fd = (rep.entropies[k + 1] - rep.entropies[k - 1]) / (rep.t[k + 1] - rep.t[k - 1]);
    rep.dh_dt_fd[k] = fd;
    const double denom = std::max(std::fabs(fd), 1e-9);
    rep.max_rel_error_logj =
        std::max(rep.max_rel_error_logj, std::fabs(rep.dh_dt_logj[k] - fd) / denom);
    rep.max_rel_error_response =
        std::max(rep.max_rel_error_response, std::fabs(rep.dh_dt_response[k] - fd) / denom);
  }
  // A flat sweep gives zero on both sides; treat absolute agreement as a match.
  auto matches = [&](const std::vector<double>& v) {
    for (std::size_t k = 1; k + 1 < v.size(); ++k) {
      const double fd = rep.dh_dt_fd[k];
      if (std::fabs(v[k] - fd) > agreement * std::max(std::fabs(fd), 1e-9)) return false;
    }
    return true;
  };
  rep.logj_matches_fd = matches(rep.dh_dt_logj);
  rep.response_matches_fd = matches(rep.dh_dt_response);
  for (double v : rep.tangent_integrals) {
    rep.max_abs_tangent_integral = std::max(rep.max_abs_tangent_integral, std::fabs(v));
  }
  return rep;
}

}  // namespace gibbsconv
