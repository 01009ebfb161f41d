#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gibbsconv/circle.hpp"
#include "gibbsconv/errors.hpp"

namespace gibbsconv {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// A function on the circle sampled at the N = 2^m points i/N and extended
/// by wrap-around linear interpolation.
class GridFunction {
 public:
  GridFunction(int log2_size, std::vector<double> samples)
      : log2_size_(log2_size), samples_(std::move(samples)) {
    if (log2_size_ < 1 || log2_size_ > 26) {
      throw ValidationError("grid log2 size must be in [1, 26], got " + std::to_string(log2_size_));
    }
    if (samples_.size() != (std::size_t{1} << log2_size_)) {
      throw ValidationError("grid expects " + std::to_string(std::size_t{1} << log2_size_) +
                            " samples, got " + std::to_string(samples_.size()));
    }
    for (double s : samples_) {
      if (!std::isfinite(s)) throw ValidationError("grid samples must be finite");
    }
  }

  static GridFunction constant(int log2_size, double c) {
    return GridFunction(log2_size, std::vector<double>(std::size_t{1} << log2_size, c));
  }

  /// Samples f(i/N) for i = 0..N-1.
  template <class F>
  static GridFunction sample(int log2_size, F&& f) {
    const std::size_t n = std::size_t{1} << log2_size;
    std::vector<double> v(n);
    const double inv = std::ldexp(1.0, -log2_size);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(static_cast<double>(i) * inv);
    return GridFunction(log2_size, std::move(v));
  }

  int log2_size() const noexcept { return log2_size_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const double> samples() const noexcept { return samples_; }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }

  /// Linear interpolation with wrap-around; exact at grid points.
  double at(double x) const noexcept {
    const std::size_t n = samples_.size();
    const double t = reduce_unit(x) * static_cast<double>(n);
    const double fl = std::floor(t);
    std::size_t i = static_cast<std::size_t>(fl);
    if (i >= n) i -= n;
    const double theta = t - fl;
    const std::size_t j = (i + 1) & (n - 1);
    return samples_[i] * (1.0 - theta) + samples_[j] * theta;
  }

  double operator()(CirclePoint x) const noexcept { return at(x.value()); }

  double min() const { return *std::min_element(samples_.begin(), samples_.end()); }
  double max() const { return *std::max_element(samples_.begin(), samples_.end()); }

  /// Mean over the uniform grid, i.e. the integral against the grid's Riemann measure.
  double mean() const noexcept {
    double s = 0.0;
    for (double v : samples_) s += v;
    return s / static_cast<double>(samples_.size());
  }

  template <class F>
  GridFunction map(F&& f) const {
    std::vector<double> v(samples_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(samples_[i]);
    return GridFunction(log2_size_, std::move(v));
  }

 private:
  int log2_size_;
  std::vector<double> samples_;
};

inline double eval(const GridFunction& f, CirclePoint x) noexcept { return f(x); }

/// Re-sample f on a grid of 2^log2_size points by interpolation.
inline GridFunction resample(const GridFunction& f, int log2_size) {
  if (log2_size == f.log2_size()) return f;
  return GridFunction::sample(log2_size, [&](double x) { return f.at(x); });
}

/// max_i |f_i - g_i|; the coarser grid is resampled onto the finer one.
inline double sup_distance(const GridFunction& f, const GridFunction& g) {
  if (f.log2_size() != g.log2_size()) {
    const int m = std::max(f.log2_size(), g.log2_size());
    return sup_distance(resample(f, m), resample(g, m));
  }
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) d = std::max(d, std::fabs(f[i] - g[i]));
  return d;
}

/// Grid estimate of the alpha-Hoelder constant in the arc metric.
///
/// Maximizes |f_i - f_j| / d(i/N, j/N)^alpha over grid pairs. For N <= 2^12 all
/// pairs are visited. Above that the base points are thinned to 2^9 (every
/// other point still serves as a partner), so the value is an estimate from below.
/// For the piecewise-linear interpolant the full-grid value equals the true
/// constant, since the ratio is quasi-convex on each linear piece.
inline double holder_constant(const GridFunction& f, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError("holder exponent must lie in (0, 1]");
  }
  const std::size_t n = f.size();
  const std::size_t mask = n - 1;
  const std::size_t stride = n > (std::size_t{1} << 12) ? n >> 9 : 1;
  const auto s = f.samples();
  double best = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double widest = 0.0;
    for (std::size_t i = 0; i < n; i += stride) {
      widest = std::max(widest, std::fabs(s[i] - s[(i + k) & mask]));
      if (stride > 1) widest = std::max(widest, std::fabs(s[i] - s[(i - k) & mask]));
    }
    if (widest == 0.0) continue;
    const double d = static_cast<double>(k) / static_cast<double>(n);
    const double denom = alpha == 1.0 ? d : std::pow(d, alpha);
    best = std::max(best, widest / denom);
  }
  return best;
}

}  // namespace gibbsconv
