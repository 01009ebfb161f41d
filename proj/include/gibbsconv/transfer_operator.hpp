#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gibbsconv/atomic_measure.hpp"
#include "gibbsconv/circle.hpp"
#include "gibbsconv/errors.hpp"
#include "gibbsconv/grid_function.hpp"
#include "gibbsconv/lattice.hpp"

namespace gibbsconv {

inline constexpr double kDefaultFloor = 1e-8;

/// max_i |f_i + f_{i+N/2} - 1|.
inline double pairing_residual(const GridFunction& f) {
  const std::size_t half = f.size() / 2;
  double r = 0.0;
  for (std::size_t i = 0; i < half; ++i) r = std::max(r, std::fabs(f[i] + f[i + half] - 1.0));
  return r;
}

/// A positive grid function J with J(x) + J(x + 1/2) = 1 at every grid point.
///
/// The constructor rescales each antipodal pair (a, b) to (a, b) / (a + b).
/// Samples below the floor are rejected, never clamped.
class JacobianPotential {
 public:
  explicit JacobianPotential(const GridFunction& j, double floor_eps = kDefaultFloor)
      : j_(project(j, floor_eps)), floor_eps_(floor_eps) {}

  const GridFunction& grid() const noexcept { return j_; }
  double floor_eps() const noexcept { return floor_eps_; }
  int log2_size() const noexcept { return j_.log2_size(); }
  std::size_t size() const noexcept { return j_.size(); }
  double operator[](std::size_t i) const noexcept { return j_[i]; }
  double at(double x) const noexcept { return j_.at(x); }
  double operator()(CirclePoint x) const noexcept { return j_(x); }
  double pairing_residual() const { return gibbsconv::pairing_residual(j_); }

  GridFunction log() const {
    return j_.map([](double v) { return std::log(v); });
  }

 private:
  static GridFunction project(const GridFunction& j, double floor_eps) {
    if (!(floor_eps > 0.0)) throw ValidationError("floor_eps must be positive");
    auto check = [&](const std::vector<double>& s) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s[i] >= floor_eps)) {
          throw ValidationError("Jacobian sample " + std::to_string(i) + " = " +
                                std::to_string(s[i]) + " is below the floor");
        }
      }
    };
    std::vector<double> s(j.samples().begin(), j.samples().end());
    check(s);
    const std::size_t half = s.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
      const double total = s[i] + s[i + half];
      s[i] /= total;
      s[i + half] /= total;
    }
    check(s);
    return GridFunction(j.log2_size(), std::move(s));
  }

  GridFunction j_;
  double floor_eps_;
};

struct EigenData {
  GridFunction phi;
  double lambda;
  double residual;
  int iterations;
};

/// (L f)(y) = w(y/2) f(y/2) + w(y/2 + 1/2) f(y/2 + 1/2) on the grid of f.
inline GridFunction ruelle_apply(const GridFunction& weight, const GridFunction& f) {
  if (weight.min() <= 0.0) throw ValidationError("Ruelle weight must be positive");
  const std::size_t n = f.size();
  const double inv = 1.0 / static_cast<double>(n);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 0.5 * static_cast<double>(i) * inv;
    const double b = a + 0.5;
    out[i] = weight.at(a) * f.at(a) + weight.at(b) * f.at(b);
  }
  return GridFunction(f.log2_size(), std::move(out));
}

inline GridFunction ruelle_apply(const JacobianPotential& j, const GridFunction& f) {
  return ruelle_apply(j.grid(), f);
}

/// Perron eigendata of L_A for A = log_potential, by normalized power iteration.
inline EigenData power_iterate(const GridFunction& log_potential, double tol = 1e-12,
                               int max_iters = 100000) {
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (max_iters < 1) throw ValidationError("max_iters must be at least 1");
  const GridFunction weight = log_potential.map([](double a) { return std::exp(a); });
  GridFunction f = GridFunction::constant(log_potential.log2_size(), 1.0);
  double lambda = 0.0;
  double change = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    GridFunction g = ruelle_apply(weight, f);
    const double mass = g.mean();
    lambda = mass / f.mean();
    g = g.map([mass](double v) { return v / mass; });
    change = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) change = std::max(change, std::fabs(g[i] - f[i]));
    f = std::move(g);
    if (change < tol) {
      const GridFunction lf = ruelle_apply(weight, f);
      double residual = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        residual = std::max(residual, std::fabs(lf[i] - lambda * f[i]));
      }
      return EigenData{std::move(f), lambda, residual, it};
    }
  }
  throw ConvergenceError("power iteration did not converge in " + std::to_string(max_iters) +
                             " iterations",
                         change);
}

/// exp(A + log phi - log phi o T - log lambda), sampled on the grid of A.
inline JacobianPotential jacobian_from_eigen(const GridFunction& log_potential, const EigenData& e) {
  const std::size_t n = log_potential.size();
  const std::size_t mask = n - 1;
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::exp(log_potential[i] + std::log(e.phi[i]) - std::log(e.phi[(2 * i) & mask]) -
                    std::log(e.lambda));
  }
  return JacobianPotential(GridFunction(log_potential.log2_size(), std::move(s)));
}

inline JacobianPotential normalize_potential(const GridFunction& log_potential, double tol = 1e-12,
                                             int max_iters = 100000) {
  return jacobian_from_eigen(log_potential, power_iterate(log_potential, tol, max_iters));
}

/// Atoms at j / 2^n carrying the cylinder weight prod_{k<n} J(T^k(j / 2^n)).
inline AtomicMeasure gibbs_atoms(const JacobianPotential& j, int n) {
  if (n < 1 || n > kMaxLatticeLevel) {
    throw ValidationError("gibbs_atoms level must be in [1, 24], got " + std::to_string(n));
  }
  const std::vector<double> table = detail::lattice_table(j.grid(), n);
  const std::size_t count = table.size();
  const std::size_t mask = count - 1;
  const double inv = std::ldexp(1.0, -n);
  std::vector<Atom> atoms(count);
  for (std::size_t q = 0; q < count; ++q) {
    double w = 1.0;
    for (int k = 0; k < n; ++k) w *= table[(q << k) & mask];
    atoms[q] = {static_cast<double>(q) * inv, w};
  }
  return AtomicMeasure(std::move(atoms));
}

/// (L^n f)(x0) for the normalized operator of J.
inline double integrate_via_operator(const JacobianPotential& j, const GridFunction& f, int n,
                                     CirclePoint x0) {
  if (n < 1) throw ValidationError("operator power must be at least 1");
  GridFunction g = f;
  for (int k = 0; k < n; ++k) g = ruelle_apply(j.grid(), g);
  return g(x0);
}

/// -sum_i w_i log J(x_i) over an arbitrary measure.
inline double entropy_against(const JacobianPotential& j, const AtomicMeasure& mu) {
  double s = 0.0;
  for (const Atom& a : mu.atoms()) s += a.weight * std::log(j.at(a.position));
  return -s;
}

inline double entropy_gibbs(const JacobianPotential& j, int n) {
  return entropy_against(j, gibbs_atoms(j, n));
}

}  // namespace gibbsconv
