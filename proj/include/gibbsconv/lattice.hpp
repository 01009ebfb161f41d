#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "gibbsconv/atomic_measure.hpp"
#include "gibbsconv/grid_function.hpp"

namespace gibbsconv::detail {

/// f evaluated at every point of the dyadic lattice q / 2^level.
inline std::vector<double> lattice_table(const GridFunction& f, int level) {
  const std::size_t n = std::size_t{1} << level;
  std::vector<double> table(n);
  if (level <= f.log2_size()) {
    const std::size_t stride = f.size() >> level;
    for (std::size_t q = 0; q < n; ++q) table[q] = f[q * stride];
  } else {
    const double inv = std::ldexp(1.0, -level);
    for (std::size_t q = 0; q < n; ++q) table[q] = f.at(static_cast<double>(q) * inv);
  }
  return table;
}

/// Lattice index of every atom, assuming mu lives on 2^-level Z.
inline std::vector<std::size_t> lattice_indices(const AtomicMeasure& mu, int level) {
  std::vector<std::size_t> idx(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    idx[i] = static_cast<std::size_t>(std::ldexp(mu[i].position, level));
  }
  return idx;
}

/// Level of the common lattice on which u_k - x_i stays for grid points u_k
/// of a 2^m grid and atoms x_i of mu, if it is small enough to tabulate.
inline std::optional<int> shared_lattice_level(const AtomicMeasure& mu, int m) {
  const auto level = mu.dyadic_level();
  if (!level) return std::nullopt;
  const int l = std::max(*level, m);
  if (l > kMaxLatticeLevel) return std::nullopt;
  return l;
}

/// out[k] = sum_i w_i f(k * 2^-m - x_i) for k < 2^m.
///
/// Summation runs over atoms in canonical order for every k, independent of
/// which path is taken, so the result does not depend on the evaluation strategy.
template <class Eval>
std::vector<double> grid_convolution(Eval&& f_at, const GridFunction* f_grid,
                                     const AtomicMeasure& mu, int m) {
  const std::size_t n = std::size_t{1} << m;
  std::vector<double> out(n, 0.0);
  const auto level = f_grid ? shared_lattice_level(mu, m) : std::nullopt;
  if (level) {
    const std::vector<double> table = lattice_table(*f_grid, *level);
    const std::vector<std::size_t> idx = lattice_indices(mu, *level);
    const std::size_t mask = table.size() - 1;
    const std::size_t stride = table.size() >> m;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double w = mu[i].weight;
      for (std::size_t k = 0; k < n; ++k) out[k] += w * table[(k * stride - idx[i]) & mask];
    }
    return out;
  }
  const double inv = std::ldexp(1.0, -m);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double w = mu[i].weight;
    const double x = mu[i].position;
    for (std::size_t k = 0; k < n; ++k) out[k] += w * f_at(static_cast<double>(k) * inv - x);
  }
  return out;
}

inline std::vector<double> grid_convolution(const GridFunction& f, const AtomicMeasure& mu, int m) {
  return grid_convolution([&](double x) { return f.at(x); }, &f, mu, m);
}

}  // namespace gibbsconv::detail
