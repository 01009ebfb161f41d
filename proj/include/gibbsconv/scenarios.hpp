#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gibbsconv/atomic_measure.hpp"
#include "gibbsconv/convolution.hpp"
#include "gibbsconv/entropy_lab.hpp"
#include "gibbsconv/errors.hpp"
#include "gibbsconv/grid_function.hpp"
#include "gibbsconv/potentials.hpp"
#include "gibbsconv/transfer_operator.hpp"

namespace gibbsconv {

using ojson = nlohmann::ordered_json;

inline const double kLog2 = std::log(2.0);

/// Below this oscillation of J-tilde the Jensen gap 1 - L0 u is second order
/// small and cannot be told apart from 1 at the 1e-9 resolution.
inline constexpr double kJensenFlatOscillation = 1e-3;

/// Resolved settings shared by every scenario.
struct Config {
  int grid = 12;
  int level = 14;
  double tol = 1e-12;
  double fd_step = 1e-4;
  std::uint64_t seed = 42;
  int steps = 2000;
  double rate = 1.0;
  int k_max = 10;
  int t_steps = 21;
  int audit = 100;
  std::string j1 = "cosine:0.2";
  std::string j2 = "cosine:0.3";
  std::string mu2;  ///< "", "periodic_third", "lebesgue" or "dirac"
  std::string direction = "cos:2";
  double p = std::numeric_limits<double>::quiet_NaN();
  double r = 1.0;
  std::string v0 = "ones";

  ojson to_json() const {
    ojson j;
    j["grid"] = grid;
    j["level"] = level;
    j["tol"] = tol;
    j["fd_step"] = fd_step;
    j["seed"] = seed;
    j["steps"] = steps;
    j["rate"] = rate;
    j["k_max"] = k_max;
    j["t_steps"] = t_steps;
    j["audit"] = audit;
    j["j1"] = j1;
    j["j2"] = j2;
    j["mu2"] = mu2.empty() ? ojson(nullptr) : ojson(mu2);
    j["direction"] = direction;
    j["p"] = std::isnan(p) ? ojson(nullptr) : ojson(p);
    j["r"] = r;
    j["v0"] = v0;
    return j;
  }
};

/// Shortest decimal string that reads back to the same double.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct ScenarioResult {
  std::string scenario;
  ojson config = ojson::object();
  ojson metrics = ojson::object();
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, bool>> checks;

  ScenarioResult() = default;
  ScenarioResult(std::string name, ojson cfg) : scenario(std::move(name)), config(std::move(cfg)) {}

  void check(std::string name, bool pass) { checks.emplace_back(std::move(name), pass); }

  bool ok() const {
    for (const auto& c : checks) {
      if (!c.second) return false;
    }
    return true;
  }

  ojson to_json() const {
    ojson out;
    out["scenario"] = scenario;
    out["config"] = config;
    ojson m = metrics;
    ojson c = ojson::object();
    for (const auto& [name, pass] : checks) c[name] = pass;
    m["checks"] = std::move(c);
    m["passed"] = ok();
    out["metrics"] = std::move(m);
    if (!columns.empty()) {
      ojson table = ojson::array();
      for (const auto& row : rows) {
        ojson r;
        for (std::size_t i = 0; i < columns.size(); ++i) {
          r[columns[i]] = std::isnan(row[i]) ? ojson(nullptr) : ojson(row[i]);
        }
        table.push_back(std::move(r));
      }
      out["table"] = std::move(table);
    }
    return out;
  }

  /// The table with a header row, or "key,value" lines of the scalar metrics
  /// when the scenario has no table.
  std::string to_csv() const {
    std::ostringstream os;
    if (!columns.empty()) {
      for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
      os << '\n';
      for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << '\n';
      }
      return os.str();
    }
    os << "key,value\n";
    const ojson full = to_json()["metrics"];
    flatten(os, "", full);
    return os.str();
  }

 private:
  static void flatten(std::ostringstream& os, const std::string& prefix, const ojson& j) {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it) {
        flatten(os, prefix.empty() ? it.key() : prefix + "." + it.key(), it.value());
      }
    } else if (j.is_number_float()) {
      os << prefix << ',' << format_number(j.get<double>()) << '\n';
    } else if (j.is_array()) {
      os << prefix << ",\"" << j.dump() << "\"\n";
    } else {
      os << prefix << ',' << j.dump() << '\n';
    }
  }
};

// ---------------------------------------------------------------------------
// Helpers

/// Deterministic uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// exp of a random trigonometric polynomial of degree 4 with decaying coefficients.
inline GridFunction random_positive_function(int m, std::mt19937_64& rng) {
  double a[5] = {};
  double b[5] = {};
  for (int k = 1; k <= 4; ++k) {
    a[k] = (2.0 * uniform01(rng) - 1.0) / k;
    b[k] = (2.0 * uniform01(rng) - 1.0) / k;
  }
  return GridFunction::sample(m, [&](double x) {
    double s = 0.0;
    for (int k = 1; k <= 4; ++k) s += a[k] * std::cos(kTwoPi * k * x) + b[k] * std::sin(kTwoPi * k * x);
    return std::exp(s);
  });
}

/// Parses "cos:k", "sin:k" (1 <= k <= 4) or "const".
inline GridFunction direction_function(const std::string& text, int m) {
  if (text == "const") return GridFunction::constant(m, 1.0);
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  int k = 0;
  if (colon != std::string::npos) {
    const std::string tail = text.substr(colon + 1);
    const auto res = std::from_chars(tail.data(), tail.data() + tail.size(), k);
    if (res.ec != std::errc() || res.ptr != tail.data() + tail.size()) k = 0;
  }
  if ((kind != "cos" && kind != "sin") || k < 1 || k > 4) {
    throw UsageError("direction must be cos:k, sin:k with 1 <= k <= 4, or const");
  }
  if (kind == "cos") return GridFunction::sample(m, [k](double x) { return std::cos(kTwoPi * k * x); });
  return GridFunction::sample(m, [k](double x) { return std::sin(kTwoPi * k * x); });
}

inline PotentialSpec spec_or_usage(const std::string& text) {
  try {
    return parse_potential(text);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
}

inline void require_level(const Config& cfg) {
  if (cfg.grid < 1 || cfg.grid > 20) throw UsageError("--grid must be in [1, 20]");
  if (cfg.level < 1 || cfg.level > 20) throw UsageError("--level must be in [1, 20]");
  if (!(cfg.tol > 0.0)) throw UsageError("--tol must be positive");
}

inline ojson holder_json(const HolderReport& h) {
  return ojson{{"k1", h.k1}, {"k_tilde", h.k_tilde}, {"pass", h.pass}};
}

// ---------------------------------------------------------------------------
// Scenarios

inline ScenarioResult cmd_entropy(const Config& cfg) {
  require_level(cfg);
  const PotentialSpec spec = spec_or_usage(cfg.j1);
  const int m = spec.effective_grid(cfg.grid, cfg.level + 2);
  const JacobianPotential j = make_jacobian(spec, m);
  ScenarioResult res{"entropy", cfg.to_json()};
  res.config["spec"] = spec.to_json();
  res.config["effective_grid"] = m;
  const double h = entropy_gibbs(j, cfg.level);
  const double h_next = entropy_gibbs(j, cfg.level + 2);
  const GridFunction half = GridFunction::constant(m, 0.5);
  res.metrics["entropy"] = h;
  res.metrics["entropy_level_plus_2"] = h_next;
  res.metrics["level_gap"] = std::fabs(h - h_next);
  res.metrics["log2_minus_entropy"] = kLog2 - h;
  res.metrics["sup_dist_to_half"] = sup_distance(j.grid(), half);
  res.metrics["pairing_residual"] = j.pairing_residual();
  if (spec.holder()) {
    res.metrics["holder_alpha_1"] = holder_constant(j.grid(), 1.0);
    res.metrics["holder_alpha_0.5"] = holder_constant(j.grid(), 0.5);
  } else {
    res.metrics["holder_note"] = "bernoulli Jacobians are discontinuous; no Hoelder estimate";
  }
  res.check("entropy_at_most_log2", h <= kLog2 + 1e-9);
  if (spec.family == Family::bernoulli) {
    const double p = spec.param;
    const double exact = -p * std::log(p) - (1 - p) * std::log(1 - p);
    res.metrics["closed_form"] = exact;
    res.check("closed_form_1e-9", std::fabs(h - exact) <= 1e-9);
  } else {
    res.check("level_stable_1e-6", std::fabs(h - h_next) <= 1e-6);
  }
  return res;
}

inline ScenarioResult cmd_convolve(const Config& cfg) {
  require_level(cfg);
  const PotentialSpec s1 = spec_or_usage(cfg.j1);
  const PotentialSpec s2 = spec_or_usage(cfg.j2);
  const int m1 = s1.effective_grid(cfg.grid, cfg.level);
  const JacobianPotential j1 = make_jacobian(s1, m1);
  const AtomicMeasure mu1 = gibbs_atoms(j1, cfg.level);
  ScenarioResult res{"convolve", cfg.to_json()};
  res.config["spec1"] = s1.to_json();

  std::optional<JacobianPotential> j2;
  std::optional<AtomicMeasure> mu2;
  if (cfg.mu2.empty()) {
    j2.emplace(make_jacobian(s2, s2.effective_grid(cfg.grid, cfg.level)));
    mu2.emplace(gibbs_atoms(*j2, cfg.level));
    res.config["spec2"] = s2.to_json();
  } else if (cfg.mu2 == "periodic_third") {
    mu2.emplace(periodic_third());
  } else if (cfg.mu2 == "lebesgue") {
    mu2.emplace(lebesgue_level(cfg.level));
  } else if (cfg.mu2 == "dirac") {
    mu2.emplace(dirac(CirclePoint(0.0)));
  } else {
    throw UsageError("--mu2 must be periodic_third, lebesgue or dirac");
  }

  const double h1 = entropy_against(j1, mu1);
  const GridFunction raw = convolved_samples(j1, *mu2);
  const JacobianPotential jt(raw, j1.floor_eps());
  const ConvolutionEntropyReport er = convolution_entropy_report(j1, mu1, *mu2);
  res.metrics["h_mu1"] = h1;
  if (j2) {
    res.metrics["h_mu2"] = entropy_against(*j2, *mu2);
  } else if (cfg.mu2 == "lebesgue") {
    res.metrics["h_mu2"] = kLog2;
  } else {
    res.metrics["h_mu2"] = 0.0;  // periodic orbits and Dirac masses carry no entropy
  }
  const double h2 = res.metrics["h_mu2"].get<double>();
  res.metrics["h_nu_triple_sum"] = er.triple_sum;
  res.metrics["h_nu_jtilde_route"] = er.jtilde_route;
  res.metrics["route_discrepancy"] = er.discrepancy;
  res.metrics["margin_mu1"] = er.triple_sum - h1;
  res.metrics["margin_mu2"] = er.triple_sum - h2;
  res.metrics["jtilde_pairing_residual"] = pairing_residual(raw);
  res.metrics["sup_jtilde_minus_j1"] = sup_distance(jt.grid(), j1.grid());
  res.metrics["sup_jtilde_minus_half"] = sup_distance(jt.grid(), GridFunction::constant(m1, 0.5));
  if (j2) {
    const ConvolutionEntropyReport swapped = convolution_entropy_report(*j2, *mu2, mu1);
    res.metrics["h_nu_roles_swapped"] = swapped.triple_sum;
    res.metrics["roles_swapped_gap"] = std::fabs(swapped.triple_sum - er.triple_sum);

    const VariationalCandidate u = variational_candidate(j1, mu1, *mu2);
    const bool flat = jt.grid().max() - jt.grid().min() <= kJensenFlatOscillation;
    res.metrics["candidate"] = ojson{{"functional_value", u.functional_value},
                                     {"neg_log_u_mu2", u.neg_log_u_mu2},
                                     {"l0u_max", u.l0u_max},
                                     {"l0u_min", u.l0u_min},
                                     {"jtilde_near_flat", flat}};
    res.check("candidate_chain", er.triple_sum - u.functional_value >= -1e-6 &&
                                     u.functional_value - h2 >= -1e-6 && u.l0u_max <= 1.0 + 1e-9);
    if (!flat) res.check("jensen_strict", u.strict_somewhere);
  }
  if (s1.holder()) {
    ojson hr;
    hr["alpha_1"] = holder_json(holder_regularization_check(j1, *mu2, 1.0));
    hr["alpha_0.5"] = holder_json(holder_regularization_check(j1, *mu2, 0.5));
    res.check("holder_regularization", hr["alpha_1"]["pass"].get<bool>() &&
                                           hr["alpha_0.5"]["pass"].get<bool>());
    res.metrics["holder"] = std::move(hr);
  } else {
    res.metrics["holder"] = "suppressed: bernoulli Jacobians are discontinuous";
  }
  res.check("routes_agree_1e-8", er.discrepancy <= kEntropyRouteTolerance);
  res.check("pairing_1e-12", pairing_residual(raw) <= 1e-12);
  res.check("entropy_inequality", er.triple_sum >= std::max(h1, h2) - 1e-6);
  return res;
}

inline ScenarioResult cmd_periodic(const Config& cfg) {
  require_level(cfg);
  if (cfg.r != 1.0) {
    throw UsageError("only the constant change of coordinates R = 1 is supported");
  }
  PotentialSpec spec = spec_or_usage(cfg.j1);
  if (!std::isnan(cfg.p)) {
    if (spec.family != Family::bernoulli) throw UsageError("--p applies to bernoulli specs only");
    spec = PotentialSpec::bernoulli(cfg.p);
  }
  if (spec.family != Family::bernoulli && spec.family != Family::third_symmetric) {
    throw UsageError("periodic expects a bernoulli or third_symmetric spec");
  }
  ScenarioResult res{"periodic", cfg.to_json()};
  res.config["spec"] = spec.to_json();
  const AtomicMeasure rho = periodic_third();

  if (spec.family == Family::third_symmetric) {
    // Off-grid shifts by 1/3 are interpolated, so a fine grid keeps the
    // identity J(x + 1/3) = J(x) visible at the 1e-8 level.
    const int m = std::max(cfg.grid, 16);
    res.config["effective_grid"] = m;
    const JacobianPotential j = make_jacobian(spec, m);
    const AtomicMeasure mu = gibbs_atoms(j, cfg.level);
    const JacobianPotential jt = convolved_jacobian(j, rho);
    const double h_mu = entropy_against(j, mu);
    const ConvolutionEntropyReport er = convolution_entropy_report(j, mu, rho);
    const double sup = sup_distance(jt.grid(), j.grid());
    res.metrics["sup_jtilde_minus_j"] = sup;
    res.metrics["h_mu"] = h_mu;
    res.metrics["h_nu"] = er.triple_sum;
    res.metrics["h_nu_minus_h_mu"] = er.triple_sum - h_mu;
    res.metrics["route_discrepancy"] = er.discrepancy;
    res.check("fixed_point_jacobian_1e-8", sup <= 1e-8);
    res.check("fixed_point_entropy_1e-8", std::fabs(er.triple_sum - h_mu) <= 1e-8);
    return res;
  }

  const double p1 = spec.param;
  const double p2 = 1.0 - p1;
  const int m = spec.effective_grid(cfg.grid, cfg.level);
  res.config["effective_grid"] = m;
  const JacobianPotential j = make_jacobian(spec, m);
  const AtomicMeasure mu = gibbs_atoms(j, cfg.level);
  const JacobianPotential jt = convolved_jacobian(j, rho);
  const AtomicMeasure nu = convolve_atomic(mu, rho);

  // Arc averages of J-tilde and J away from the jump points.
  auto arc_values = [&](const JacobianPotential& f, double a, double b) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const double inv = 1.0 / static_cast<double>(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double x = static_cast<double>(i) * inv;
      if (x > a + 1e-3 && x < b - 1e-3) {
        lo = std::min(lo, f[i]);
        hi = std::max(hi, f[i]);
      }
    }
    return std::pair{lo, hi};
  };
  auto case_json = [&](double a, double b, double claimed, const char* claim) {
    const auto [lo, hi] = arc_values(jt, a, b);
    const auto [jlo, jhi] = arc_values(j, a, b);
    ojson c;
    c["arc"] = {a, b};
    c["jtilde_min"] = lo;
    c["jtilde_max"] = hi;
    c["j_value"] = jlo == jhi ? ojson(jlo) : ojson(nullptr);
    c["claimed"] = claimed;
    c["claim"] = claim;
    c["matches_claim"] = std::fabs(lo - claimed) <= 1e-12 && std::fabs(hi - claimed) <= 1e-12;
    return c;
  };
  ojson cases;
  cases["a"] = case_json(0.0, 1.0 / 6.0, p1, "J-tilde = p1 on (0, 1/6)");
  cases["b"] = case_json(2.0 / 3.0, 5.0 / 6.0, p1, "J-tilde = p1 on (2/3, 5/6), where J = p2");
  cases["c"] = case_json(1.0 / 3.0, 2.0 / 3.0, 0.5 * (p1 + p2),
                         "J-tilde = (p1 + p2) / 2 = 1/2 on (1/3, 2/3)");

  // |J-tilde - 1/2| <= |J - 1/2| pointwise, and strictly on part of the circle.
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t strict = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const double d = std::fabs(jt[i] - 0.5) - std::fabs(j[i] - 0.5);
    worst = std::max(worst, d);
    if (d < -1e-12) ++strict;
  }

  const double nu_half = arc_mass(nu, CirclePoint(0.0), CirclePoint(0.5));
  const double mu_mid = arc_mass(mu, CirclePoint(1.0 / 3.0), CirclePoint(2.0 / 3.0));
  const double predicted = 0.5 * (1.0 + (p2 - p1) * mu_mid);
  const double h_mu = entropy_against(j, mu);
  const ConvolutionEntropyReport er = convolution_entropy_report(j, mu, rho);

  res.metrics["p1"] = p1;
  res.metrics["p2"] = p2;
  res.metrics["cases"] = cases;
  res.metrics["closer_to_half_worst"] = worst;
  res.metrics["closer_to_half_strict_fraction"] =
      static_cast<double>(strict) / static_cast<double>(j.size());
  res.metrics["nu_arc_0_half"] = nu_half;
  res.metrics["mu_arc_third_two_thirds"] = mu_mid;
  res.metrics["arc_identity_prediction"] = predicted;
  res.metrics["arc_identity_gap"] = std::fabs(nu_half - predicted);
  res.metrics["mu_arc_0_half"] = arc_mass(mu, CirclePoint(0.0), CirclePoint(0.5));
  res.metrics["h_mu"] = h_mu;
  res.metrics["h_nu"] = er.triple_sum;
  res.metrics["h_gain"] = er.triple_sum - h_mu;
  res.metrics["route_discrepancy"] = er.discrepancy;
  res.check("arc_identity_2^-12", std::fabs(nu_half - predicted) <= std::ldexp(1.0, -12));
  res.check("entropy_gain_1e-3", er.triple_sum - h_mu > 1e-3);
  res.check("closer_to_half", worst <= 1e-12 && strict > 0);
  res.check("case_a", cases["a"]["matches_claim"].get<bool>());
  res.check("case_b", cases["b"]["matches_claim"].get<bool>());
  res.check("case_c", cases["c"]["matches_claim"].get<bool>());
  return res;
}

inline ScenarioResult cmd_iterate(const Config& cfg) {
  require_level(cfg);
  if (cfg.k_max < 1 || cfg.k_max > 50) throw UsageError("--k-max must be in [1, 50]");
  const PotentialSpec spec = spec_or_usage(cfg.j1);
  const int m = spec.effective_grid(cfg.grid, cfg.level);
  const JacobianPotential j = make_jacobian(spec, m);
  const SelfConvolutionReport rep = iterate_self_convolution(j, cfg.level, cfg.k_max);
  ScenarioResult res{"iterate", cfg.to_json()};
  res.config["spec"] = spec.to_json();
  res.columns = {"k", "sup_dist_to_half", "entropy"};
  for (const auto& row : rep.rows) {
    res.rows.push_back({static_cast<double>(row.k), row.sup_dist_to_half, row.entropy});
  }
  res.metrics["contraction_ratio"] = rep.contraction_ratio;
  res.metrics["final_sup_dist"] = rep.rows.back().sup_dist_to_half;
  res.metrics["final_entropy"] = rep.rows.back().entropy;
  res.metrics["final_log2_gap"] = kLog2 - rep.rows.back().entropy;
  res.metrics["max_pairing_residual"] = rep.max_pairing_residual;
  res.check("sup_dist_non_increasing", rep.distances_non_increasing);
  res.check("entropy_non_decreasing", rep.entropies_non_decreasing);
  return res;
}

inline ScenarioResult cmd_variational(const Config& cfg) {
  require_level(cfg);
  if (cfg.steps < 0) throw UsageError("--steps must be non-negative");
  const PotentialSpec spec = spec_or_usage(cfg.j1);
  const int m = spec.effective_grid(cfg.grid, cfg.level);
  const JacobianPotential j = make_jacobian(spec, m);
  const AtomicMeasure mu = gibbs_atoms(j, cfg.level);
  const double h = entropy_against(j, mu);
  std::mt19937_64 rng(cfg.seed);
  GridFunction v0 = GridFunction::constant(m, 1.0);
  if (cfg.v0 == "random") {
    v0 = random_positive_function(m, rng);
  } else if (cfg.v0 != "ones") {
    throw UsageError("--v0 must be ones or random");
  }
  const MinimizeResult mr = minimize_variational(mu, v0, cfg.steps, cfg.rate);
  double audit_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.audit; ++i) {
    audit_min = std::min(audit_min, variational_functional(random_positive_function(m, rng), mu) - h);
  }
  ScenarioResult res{"variational", cfg.to_json()};
  res.config["spec"] = spec.to_json();
  res.config["effective_grid"] = m;
  res.metrics["entropy"] = h;
  res.metrics["final_value"] = mr.value;
  res.metrics["final_literal_value"] = mr.literal_value;
  res.metrics["gap"] = mr.value - h;
  res.metrics["initial_value"] = mr.trace.front();
  res.metrics["steps_taken"] = mr.steps_taken;
  res.metrics["accepted_steps"] = mr.accepted;
  res.metrics["final_rate"] = mr.final_rate;
  res.metrics["audit_min_F_minus_h"] = cfg.audit > 0 ? ojson(audit_min) : ojson(nullptr);
  bool monotone = true;
  for (std::size_t i = 1; i < mr.trace.size(); ++i) monotone = monotone && mr.trace[i] <= mr.trace[i - 1];
  res.columns = {"accepted_step", "value"};
  for (std::size_t i = 0; i < mr.trace.size(); ++i) {
    res.rows.push_back({static_cast<double>(i), mr.trace[i]});
  }
  res.check("gap_1e-3", std::fabs(mr.value - h) <= 1e-3);
  res.check("trace_non_increasing", monotone);
  if (cfg.audit > 0) res.check("audit_lower_bound", audit_min >= -1e-6);
  return res;
}

inline ScenarioResult cmd_derivative(const Config& cfg) {
  require_level(cfg);
  const PotentialSpec s1 = spec_or_usage(cfg.j1);
  const PotentialSpec s2 = spec_or_usage(cfg.j2);
  if (!(cfg.fd_step > 0.0 && cfg.fd_step <= 1e-2)) throw UsageError("--fd-step must lie in (0, 1e-2]");
  const int m = std::max(s1.effective_grid(cfg.grid, cfg.level), s2.effective_grid(cfg.grid, cfg.level));
  const JacobianPotential j1 = make_jacobian(s1, m);
  const JacobianPotential j2 = make_jacobian(s2, m);
  const AtomicMeasure mu1 = gibbs_atoms(j1, cfg.level);
  const AtomicMeasure mu2 = gibbs_atoms(j2, cfg.level);
  const TangentVector z3 = tangent_project(direction_function(cfg.direction, m), mu1);
  const DerivativeReport d =
      entropy_derivative_formula(j1, mu1, j2, mu2, z3, {cfg.fd_step, cfg.tol, 1e-3});
  ScenarioResult res{"derivative", cfg.to_json()};
  res.config["spec1"] = s1.to_json();
  res.config["spec2"] = s2.to_json();
  res.metrics["formula_value"] = d.formula_value;
  res.metrics["finite_difference_value"] = d.finite_difference_value;
  res.metrics["relative_error"] = d.relative_error;
  res.metrics["fd_step"] = d.fd_step;
  res.metrics["lambda_prime"] = d.lambda_prime;
  res.metrics["phi_prime_sup"] = std::max(std::fabs(d.phi_prime.min()), std::fabs(d.phi_prime.max()));
  res.metrics["z_variation_term"] = d.z_variation_term;
  res.metrics["measure_variation_term"] = d.measure_variation_term;
  res.metrics["literal_measure_term"] = d.literal_measure_term;
  res.metrics["literal_formula_value"] = d.literal_formula_value;
  res.metrics["response_measure_term"] = d.response_measure_term;
  res.metrics["response_formula_value"] = d.response_formula_value;
  res.metrics["h_nu"] = d.entropy_nu;
  res.metrics["h_nu_roles_swapped"] = d.entropy_nu_swapped;
  res.check("formula_matches_fd_1e-3", d.agrees);
  return res;
}

inline ScenarioResult cmd_appendix(const Config& cfg) {
  require_level(cfg);
  if (cfg.t_steps < 3) throw UsageError("--t-steps must be at least 3");
  const PotentialSpec s1 = spec_or_usage(cfg.j1);
  const PotentialSpec s2 = spec_or_usage(cfg.j2);
  const int m = std::max(s1.effective_grid(cfg.grid, cfg.level), s2.effective_grid(cfg.grid, cfg.level));
  const JacobianPotential j1 = make_jacobian(s1, m);
  const JacobianPotential j2 = make_jacobian(s2, m);
  const MonotoneReport rep = entropy_monotone_check(j1, j2, cfg.level, cfg.t_steps);
  ScenarioResult res{"appendix", cfg.to_json()};
  res.config["spec1"] = s1.to_json();
  res.config["spec2"] = s2.to_json();
  double max_path_pairing = 0.0;
  for (double t : rep.t) {
    max_path_pairing = std::max(max_path_pairing, pairing_residual(appendix_path(j1, j2, t).grid()));
  }
  res.columns = {"t", "entropy", "tangent_integral", "dh_dt_logj", "dh_dt_response", "dh_dt_fd"};
  for (std::size_t k = 0; k < rep.t.size(); ++k) {
    res.rows.push_back({rep.t[k], rep.entropies[k], rep.tangent_integrals[k], rep.dh_dt_logj[k],
                        rep.dh_dt_response[k], rep.dh_dt_fd[k]});
  }
  res.metrics["dominance"] = rep.dominance;
  res.metrics["monotone"] = rep.monotone;
  res.metrics["entropy_start"] = rep.entropies.front();
  res.metrics["entropy_end"] = rep.entropies.back();
  res.metrics["max_abs_tangent_integral"] = rep.max_abs_tangent_integral;
  res.metrics["max_path_pairing_residual"] = max_path_pairing;
  res.metrics["logj_non_positive"] = rep.logj_non_positive;
  res.metrics["max_rel_error_logj_vs_fd"] = rep.max_rel_error_logj;
  res.metrics["max_rel_error_response_vs_fd"] = rep.max_rel_error_response;
  res.metrics["response_matches_fd"] = rep.response_matches_fd;
  res.check("tangent_integrals_1e-8", rep.max_abs_tangent_integral <= 1e-8);
  if (rep.dominance) res.check("monotone_under_dominance", rep.monotone);
  res.check("logj_formula_matches_fd_1e-3", rep.logj_matches_fd);
  return res;
}

}  // namespace gibbsconv
