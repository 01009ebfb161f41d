#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gibbsconv/circle.hpp"
#include "gibbsconv/errors.hpp"
#include "gibbsconv/grid_function.hpp"

namespace gibbsconv {

struct Atom {
  double position;  ///< in [0, 1)
  double weight;    ///< > 0
};

/// Positions closer than this (in arc length) are merged by canonicalization.
inline constexpr double kMergeDistance = 1e-15;
/// Allowed deviation of the total mass from 1.
inline constexpr double kMassTolerance = 1e-10;
/// Largest product of atom counts convolve_atomic will materialize.
inline constexpr std::size_t kConvolutionGuard = std::size_t{1} << 26;
/// Largest dyadic level for which dense lattice tables are allocated.
inline constexpr int kMaxLatticeLevel = 24;

namespace detail {

/// Level of the coarsest dyadic lattice 2^-L Z containing x, or -1 if L > 30.
inline int dyadic_level_of(double x) noexcept {
  if (x == 0.0) return 0;
  const double scaled = std::ldexp(x, 30);
  if (scaled != std::floor(scaled)) return -1;
  auto bits = static_cast<std::uint64_t>(scaled);
  int level = 30;
  while (level > 0 && (bits & 1u) == 0) {
    bits >>= 1;
    --level;
  }
  return level;
}

inline std::vector<Atom> canonical_atoms(std::vector<Atom> atoms) {
  if (!std::is_sorted(atoms.begin(), atoms.end(),
                      [](const Atom& a, const Atom& b) { return a.position < b.position; })) {
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& a, const Atom& b) { return a.position < b.position; });
  }
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const Atom& a : atoms) {
    if (!out.empty() && a.position - out.back().position <= kMergeDistance) {
      out.back().weight += a.weight;
    } else {
      out.push_back(a);
    }
  }
  // wrap-around: an atom just below 1 coincides with one at 0
  if (out.size() > 1 && (1.0 - out.back().position) + out.front().position <= kMergeDistance) {
    out.front().weight += out.back().weight;
    out.pop_back();
  }
  return out;
}

}  // namespace detail

/// A probability measure on the circle with finitely many atoms.
///
/// Always held in canonical form: sorted by position, coincident atoms merged.
class AtomicMeasure {
 public:
  explicit AtomicMeasure(std::vector<Atom> atoms) {
    if (atoms.empty()) throw ValidationError("atomic measure needs at least one atom");
    double total = 0.0;
    for (Atom& a : atoms) {
      if (!std::isfinite(a.position)) throw ValidationError("atom position must be finite");
      if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
        throw ValidationError("atom weights must be positive and finite");
      }
      a.position = reduce_unit(a.position);
      total += a.weight;
    }
    if (std::fabs(total - 1.0) > kMassTolerance) {
      throw ValidationError("atom weights must sum to 1 (got " + std::to_string(total) + ")");
    }
    atoms_ = detail::canonical_atoms(std::move(atoms));
    int level = 0;
    for (const Atom& a : atoms_) {
      const int l = detail::dyadic_level_of(a.position);
      if (l < 0) {
        level = -1;
        break;
      }
      level = std::max(level, l);
    }
    dyadic_level_ = level;
  }

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const Atom& operator[](std::size_t i) const noexcept { return atoms_[i]; }

  double total_mass() const noexcept {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.weight;
    return s;
  }

  /// Smallest L with every position in 2^-L Z, if L <= 30.
  std::optional<int> dyadic_level() const noexcept {
    if (dyadic_level_ < 0) return std::nullopt;
    return dyadic_level_;
  }

 private:
  std::vector<Atom> atoms_;
  int dyadic_level_ = -1;
};

/// Sum of w_i f(x_i).
inline double integrate(const AtomicMeasure& mu, const GridFunction& f) {
  double s = 0.0;
  for (const Atom& a : mu.atoms()) s += a.weight * f.at(a.position);
  return s;
}

template <class F>
double integrate_fn(const AtomicMeasure& mu, F&& f) {
  double s = 0.0;
  for (const Atom& a : mu.atoms()) s += a.weight * f(a.position);
  return s;
}

/// The convolution eta * mu: atoms at x_i + y_j with weights w_i v_j.
///
/// When both measures sit on a common dyadic lattice the product is
/// accumulated into a dense lattice table instead of being materialized, so
/// the size guard only applies to the general case.
inline AtomicMeasure convolve_atomic(const AtomicMeasure& eta, const AtomicMeasure& mu) {
  const auto le = eta.dyadic_level();
  const auto lm = mu.dyadic_level();
  if (le && lm && std::max(*le, *lm) <= 22) {
    const int level = std::max(*le, *lm);
    const std::size_t n = std::size_t{1} << level;
    const std::size_t mask = n - 1;
    std::vector<double> mass(n, 0.0);
    for (const Atom& a : eta.atoms()) {
      const auto ia = static_cast<std::size_t>(std::ldexp(a.position, level));
      for (const Atom& b : mu.atoms()) {
        const auto ib = static_cast<std::size_t>(std::ldexp(b.position, level));
        mass[(ia + ib) & mask] += a.weight * b.weight;
      }
    }
    std::vector<Atom> out;
    const double inv = std::ldexp(1.0, -level);
    for (std::size_t k = 0; k < n; ++k) {
      if (mass[k] > 0.0) out.push_back({static_cast<double>(k) * inv, mass[k]});
    }
    return AtomicMeasure(std::move(out));
  }
  if (eta.size() * mu.size() > kConvolutionGuard) {
    throw ResourceError("convolution would materialize " + std::to_string(eta.size() * mu.size()) +
                        " atoms (guard is 2^26)");
  }
  std::vector<Atom> out;
  out.reserve(eta.size() * mu.size());
  for (const Atom& a : eta.atoms()) {
    for (const Atom& b : mu.atoms()) {
      out.push_back({reduce_unit(a.position + b.position), a.weight * b.weight});
    }
  }
  return AtomicMeasure(std::move(out));
}

/// Image of mu under T(x) = 2x mod 1.
inline AtomicMeasure pushforward_T(const AtomicMeasure& mu) {
  std::vector<Atom> out;
  out.reserve(mu.size());
  for (const Atom& a : mu.atoms()) out.push_back({doubling_map(CirclePoint(a.position)).value(), a.weight});
  return AtomicMeasure(std::move(out));
}

/// Mass of the half-open arc [a, b) traversed forward from a. a == b is the empty arc.
inline double arc_mass(const AtomicMeasure& mu, CirclePoint a, CirclePoint b) {
  const double lo = a.value();
  const double hi = b.value();
  double s = 0.0;
  for (const Atom& at : mu.atoms()) {
    const double x = at.position;
    const bool inside = lo <= hi ? (x >= lo && x < hi) : (x >= lo || x < hi);
    if (inside) s += at.weight;
  }
  return s;
}

inline AtomicMeasure dirac(CirclePoint x) { return AtomicMeasure({{x.value(), 1.0}}); }

/// 2^n equal atoms at j / 2^n.
inline AtomicMeasure lebesgue_level(int n) {
  if (n < 0 || n > kMaxLatticeLevel) throw ValidationError("lebesgue level out of range");
  const std::size_t count = std::size_t{1} << n;
  const double w = std::ldexp(1.0, -n);
  std::vector<Atom> atoms(count);
  for (std::size_t j = 0; j < count; ++j) atoms[j] = {static_cast<double>(j) * w, w};
  return AtomicMeasure(std::move(atoms));
}

/// (delta_{1/3} + delta_{2/3}) / 2, the measure on the period-two orbit of T.
inline AtomicMeasure periodic_third() {
  return AtomicMeasure({{1.0 / 3.0, 0.5}, {2.0 / 3.0, 0.5}});
}

/// max over f in {cos 2 pi k x, sin 2 pi k x : 1 <= k <= k_max} of
/// |int f o T dmu - int f dmu|, a probe of T-invariance.
inline double trig_invariance_defect(const AtomicMeasure& mu, int k_max) {
  double worst = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    double dc = 0.0;
    double ds = 0.0;
    for (const Atom& a : mu.atoms()) {
      const double th = kTwoPi * k * a.position;
      dc += a.weight * (std::cos(2.0 * th) - std::cos(th));
      ds += a.weight * (std::sin(2.0 * th) - std::sin(th));
    }
    worst = std::max({worst, std::fabs(dc), std::fabs(ds)});
  }
  return worst;
}

inline nlohmann::json to_json(const AtomicMeasure& mu) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const Atom& a : mu.atoms()) atoms.push_back({a.position, a.weight});
  return nlohmann::json{{"atoms", std::move(atoms)}};
}

inline AtomicMeasure atomic_measure_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array()) {
    throw ValidationError("atomic measure JSON must look like {\"atoms\": [[x, w], ...]}");
  }
  std::vector<Atom> atoms;
  for (const auto& pair : j["atoms"]) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      throw ValidationError("each atom must be a [position, weight] pair of numbers");
    }
    atoms.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return AtomicMeasure(std::move(atoms));
}

}  // namespace gibbsconv
