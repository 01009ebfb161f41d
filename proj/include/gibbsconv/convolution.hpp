#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gibbsconv/atomic_measure.hpp"
#include "gibbsconv/errors.hpp"
#include "gibbsconv/grid_function.hpp"
#include "gibbsconv/lattice.hpp"
#include "gibbsconv/transfer_operator.hpp"

namespace gibbsconv {

/// Guard on |mu1| * |mu2|^2 for the triple sum when no lattice table applies.
inline constexpr double kTripleSumGuard = 17179869184.0;  // 2^34
/// Agreement demanded between the two entropy routes.
inline constexpr double kEntropyRouteTolerance = 1e-8;

/// Samples of u -> sum_i w_i J1(u - x_i) on the grid of J1, before any projection.
inline GridFunction convolved_samples(const JacobianPotential& j1, const AtomicMeasure& mu2) {
  return GridFunction(j1.log2_size(), detail::grid_convolution(j1.grid(), mu2, j1.log2_size()));
}

/// The Jacobian of mu1 * mu2 where J1 is the Jacobian of mu1.
inline JacobianPotential convolved_jacobian(const JacobianPotential& j1, const AtomicMeasure& mu2) {
  return JacobianPotential(convolved_samples(j1, mu2), j1.floor_eps());
}

namespace detail {

/// Exact values of u -> sum_x w2(x) J1(u - x) for any u, computed from the
/// defining sum. On a shared dyadic lattice they are tabulated once.
class ConvolvedEvaluator {
 public:
  ConvolvedEvaluator(const JacobianPotential& j1, const AtomicMeasure& mu2,
                     std::optional<int> lattice_level)
      : j1_(j1), mu2_(mu2) {
    if (lattice_level) {
      level_ = *lattice_level;
      const std::vector<double> table = lattice_table(j1.grid(), level_);
      const std::vector<std::size_t> idx = lattice_indices(mu2, level_);
      const std::size_t mask = table.size() - 1;
      values_.assign(table.size(), 0.0);
      for (std::size_t i = 0; i < mu2.size(); ++i) {
        const double w = mu2[i].weight;
        for (std::size_t q = 0; q < table.size(); ++q) values_[q] += w * table[(q - idx[i]) & mask];
      }
      logs_.resize(values_.size());
      for (std::size_t q = 0; q < values_.size(); ++q) logs_[q] = std::log(values_[q]);
    }
  }

  bool tabulated() const noexcept { return level_ >= 0; }
  int level() const noexcept { return level_; }
  double log_at_index(std::size_t q) const noexcept { return logs_[q]; }

  double operator()(double u) const {
    if (tabulated()) {
      return values_[static_cast<std::size_t>(std::ldexp(reduce_unit(u), level_)) &
                     (values_.size() - 1)];
    }
    double s = 0.0;
    for (const Atom& x : mu2_.atoms()) s += x.weight * j1_.at(u - x.position);
    return s;
  }

  double log_value(double u) const {
    if (tabulated()) {
      return logs_[static_cast<std::size_t>(std::ldexp(reduce_unit(u), level_)) &
                   (logs_.size() - 1)];
    }
    return std::log((*this)(u));
  }

 private:
  const JacobianPotential& j1_;
  const AtomicMeasure& mu2_;
  int level_ = -1;
  std::vector<double> values_;
  std::vector<double> logs_;
};

inline std::optional<int> pair_lattice_level(const AtomicMeasure& a, const AtomicMeasure& b) {
  const auto la = a.dyadic_level();
  const auto lb = b.dyadic_level();
  if (!la || !lb) return std::nullopt;
  const int l = std::max(*la, *lb);
  if (l > kMaxLatticeLevel) return std::nullopt;
  return l;
}

}  // namespace detail

struct ConvolutionEntropyReport {
  double triple_sum;
  double jtilde_route;
  double discrepancy;
};

/// Entropy of mu1 * mu2 evaluated twice: by the triple sum over (s, r, x) and
/// by integrating -log of the convolved Jacobian against the convolved measure.
inline ConvolutionEntropyReport convolution_entropy_report(const JacobianPotential& j1,
                                                           const AtomicMeasure& mu1,
                                                           const AtomicMeasure& mu2) {
  const auto level = detail::pair_lattice_level(mu1, mu2);
  if (!level) {
    const double work = static_cast<double>(mu1.size()) * static_cast<double>(mu2.size()) *
                        static_cast<double>(mu2.size());
    if (work > kTripleSumGuard) {
      throw ResourceError("triple sum over " + std::to_string(mu1.size()) + " x " +
                          std::to_string(mu2.size()) + "^2 atoms exceeds the 2^34 guard");
    }
  }
  const detail::ConvolvedEvaluator jt(j1, mu2, level);

  double triple = 0.0;
  if (jt.tabulated()) {
    const std::vector<std::size_t> is = detail::lattice_indices(mu1, *level);
    const std::vector<std::size_t> ir = detail::lattice_indices(mu2, *level);
    const std::size_t mask = (std::size_t{1} << *level) - 1;
    for (std::size_t s = 0; s < mu1.size(); ++s) {
      double inner = 0.0;
      for (std::size_t r = 0; r < mu2.size(); ++r) {
        inner += mu2[r].weight * jt.log_at_index((is[s] + ir[r]) & mask);
      }
      triple += mu1[s].weight * inner;
    }
  } else {
    for (const Atom& s : mu1.atoms()) {
      double inner = 0.0;
      for (const Atom& r : mu2.atoms()) inner += r.weight * jt.log_value(s.position + r.position);
      triple += s.weight * inner;
    }
  }
  triple = -triple;

  const AtomicMeasure nu = convolve_atomic(mu1, mu2);
  double route = 0.0;
  for (const Atom& a : nu.atoms()) route += a.weight * jt.log_value(a.position);
  route = -route;

  return {triple, route, std::fabs(triple - route)};
}

/// The triple-sum entropy; throws VerificationError if the J-tilde route disagrees.
inline double convolution_entropy(const JacobianPotential& j1, const AtomicMeasure& mu1,
                                  const AtomicMeasure& mu2) {
  const ConvolutionEntropyReport r = convolution_entropy_report(j1, mu1, mu2);
  if (!(r.discrepancy <= kEntropyRouteTolerance)) {
    throw VerificationError("entropy routes disagree by " + std::to_string(r.discrepancy));
  }
  return r.triple_sum;
}

struct HolderReport {
  double k1;
  double k_tilde;
  bool pass;
};

inline HolderReport holder_regularization_check(const JacobianPotential& j1,
                                                const AtomicMeasure& mu2, double alpha) {
  const double k1 = holder_constant(j1.grid(), alpha);
  const double kt = holder_constant(convolved_jacobian(j1, mu2).grid(), alpha);
  return {k1, kt, kt <= k1 + 1e-9};
}

struct SelfConvolutionRow {
  int k;
  double sup_dist_to_half;
  double entropy;
};

struct SelfConvolutionReport {
  std::vector<SelfConvolutionRow> rows;
  double contraction_ratio;  ///< |int e^{2 pi i x} dmu|
  bool distances_non_increasing;
  bool entropies_non_decreasing;
  double max_pairing_residual;  ///< over the convolved samples before projection
};

/// J_0 = J and J_{k+1} = J_k convolved with the fixed Gibbs measure of J.
inline SelfConvolutionReport iterate_self_convolution(const JacobianPotential& j, int n_atoms,
                                                      int k_max) {
  if (k_max < 1) throw ValidationError("k_max must be at least 1");
  const AtomicMeasure mu = gibbs_atoms(j, n_atoms);
  const GridFunction half = GridFunction::constant(j.log2_size(), 0.5);
  SelfConvolutionReport rep{{}, 0.0, true, true, 0.0};
  std::complex<double> c = 0.0;
  for (const Atom& a : mu.atoms()) c += a.weight * std::polar(1.0, kTwoPi * a.position);
  rep.contraction_ratio = std::abs(c);
  JacobianPotential current = j;
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) {
      const GridFunction raw = convolved_samples(current, mu);
      rep.max_pairing_residual = std::max(rep.max_pairing_residual, pairing_residual(raw));
      current = JacobianPotential(raw, j.floor_eps());
    }
    rep.rows.push_back({k, sup_distance(current.grid(), half), entropy_gibbs(current, n_atoms)});
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    if (rep.rows[i].sup_dist_to_half > rep.rows[i - 1].sup_dist_to_half + 1e-9) {
      rep.distances_non_increasing = false;
    }
    if (rep.rows[i].entropy < rep.rows[i - 1].entropy - 1e-9) rep.entropies_non_decreasing = false;
  }
  return rep;
}

/// Sup distance between convolved_jacobian(J1, gibbs_atoms(J2, n)) and the
/// atom sum over j = 1..2^n written out orbit by orbit.
inline double dyadic_proof_crosscheck(const JacobianPotential& j1, const JacobianPotential& j2,
                                      int n) {
  if (n < 1 || n > 14) throw ValidationError("crosscheck level must be in [1, 14]");
  const JacobianPotential jt = convolved_jacobian(j1, gibbs_atoms(j2, n));
  const std::size_t count = std::size_t{1} << n;
  std::vector<double> pos(count);
  std::vector<double> weight(count);
  for (std::size_t j = 1; j <= count; ++j) {
    CirclePoint x(std::ldexp(static_cast<double>(j), -n));
    pos[j - 1] = x.value();
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
      w *= j2(x);
      x = doubling_map(x);
    }
    weight[j - 1] = w;
  }
  double worst = 0.0;
  const double inv = 1.0 / static_cast<double>(j1.size());
  for (std::size_t i = 0; i < j1.size(); ++i) {
    const double u = static_cast<double>(i) * inv;
    double s = 0.0;
    for (std::size_t j = 0; j < count; ++j) s += weight[j] * j1.at(u - pos[j]);
    worst = std::max(worst, std::fabs(s - jt[i]));
  }
  return worst;
}

}  // namespace gibbsconv
