#pragma once

// Greedy best n-term approximation in the coefficient metric of a Gabor
// atomic decomposition, weak-l^p sizes, and decay-rate fits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbcoorbit/error.hpp"
#include "qbcoorbit/gabor.hpp"
#include "qbcoorbit/quasinorm.hpp"

namespace qbc {

/// Lattice index (time shift k, frequency channel j).
struct GridIndex {
  std::size_t k = 0;
  std::size_t j = 0;
  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

namespace detail {

/// Flat grid positions ordered by decreasing |c| m, ties by (j, k).
inline std::vector<std::size_t> greedy_order(std::span<const cplx> c, std::size_t M, std::span<const double> weight) {
  if (!weight.empty() && weight.size() != c.size()) throw Error(Errc::ShapeMismatch, "weight shape mismatch");
  std::vector<double> wm(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) wm[i] = std::abs(c[i]) * (weight.empty() ? 1.0 : weight[i]);
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (wm[a] != wm[b]) return wm[a] > wm[b];
    const std::size_t ja = a % M, jb = b % M;
    if (ja != jb) return ja < jb;
    return a / M < b / M;
  });
  return order;
}

}  // namespace detail

/// Indices of the n largest weighted magnitudes.
inline std::vector<GridIndex> greedy_select(const CoefficientGrid& c, std::span<const double> weight, std::size_t n) {
  if (n > c.size()) {
    throw Error(Errc::CountTooLarge, "n = " + std::to_string(n) + " exceeds " + std::to_string(c.size()) + " coefficients");
  }
  const auto order = detail::greedy_order(c.values(), c.M(), weight);
  std::vector<GridIndex> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({order[i] / c.M(), order[i] % c.M()});
  return out;
}

/// Weighted l^q norms of every greedy tail: entry n is the error after keeping
/// the top n coefficients, n = 0..size.
inline std::vector<double> tail_norms(const CoefficientGrid& c, double q, std::span<const double> weight) {
  if (!(q > 0.0)) throw Error(Errc::InvalidExponent, "q must be positive");
  const auto order = detail::greedy_order(c.values(), c.M(), weight);
  const std::size_t K = order.size();
  std::vector<double> sorted(K);
  for (std::size_t i = 0; i < K; ++i) {
    sorted[i] = std::abs(c.values()[order[i]]) * (weight.empty() ? 1.0 : weight[order[i]]);
  }
  std::vector<double> out(K + 1, 0.0);
  if (q == inf) {
    for (std::size_t n = 0; n < K; ++n) out[n] = sorted[n];
    return out;
  }
  // Suffix sums from the smallest entry upward, each tail scaled by its own
  // largest entry so that small q stays finite.
  double acc = 0.0;  // sum_{i >= n} (sorted[i] / sorted[n])^q, updated by rescaling
  for (std::size_t n = K; n-- > 0;) {
    if (sorted[n] == 0.0) {
      out[n] = 0.0;
      acc = 0.0;
      continue;
    }
    const double prev_scale = n + 1 < K ? sorted[n + 1] : 0.0;
    acc = (prev_scale > 0.0 ? acc * std::pow(prev_scale / sorted[n], q) : 0.0) + 1.0;
    out[n] = sorted[n] * std::pow(acc, 1.0 / q);
  }
  return out;
}

/// sigma_n in the coefficient metric: weighted l^q norm of all but the greedy top n.
inline double nterm_error(const CoefficientGrid& c, std::size_t n, double q, std::span<const double> weight) {
  if (n > c.size()) throw Error(Errc::CountTooLarge, "n exceeds coefficient count");
  return tail_norms(c, q, weight)[n];
}

/// Coefficients of f with respect to the canonical dual window.
inline CoefficientGrid dual_coefficients(const Signal& f, const GaborSystem& sys) {
  return dgt(f, sys.with_window(canonical_dual(sys)));
}

inline double nterm_error(const Signal& f, const GaborSystem& sys, std::size_t n, double q,
                          std::span<const double> weight) {
  return nterm_error(dual_coefficients(f, sys), n, q, weight);
}

/// sup_n n^{1/p} (c m)*(n).
inline double weak_norm(const CoefficientGrid& c, double p, std::span<const double> weight) {
  return lorentz_star_norm(c.values(), p, inf, weight);
}

struct NTermCurve {
  std::vector<std::size_t> n_values;
  std::vector<double> errors;
  double fitted_slope = 0.0;
  double reference_alpha = 0.0;
  double weak_norm = 0.0;
  double rate_constant = 0.0;  // C_impl = (q/p - 1)^{-1/q}
  std::size_t fit_lo = 0;
  std::size_t fit_hi = 0;
  std::size_t fit_points = 0;
  bool rate_bound_holds = true;
  double worst_rate_ratio = 0.0;  // max_n sigma_n n^alpha / (C_impl weak_norm)
};

/// Least-squares slope of log sigma_n against log n over the fit window
/// [fit_lo, fit_hi], skipping exact zeros. Requires p < q.
inline NTermCurve decay_curve(const CoefficientGrid& c, double p, double q, std::span<const double> weight,
                              std::vector<std::size_t> n_values, std::size_t fit_lo = 4, std::size_t fit_hi = 0) {
  if (!(p > 0.0) || !(p < q)) throw Error(Errc::InvalidFitWindow, "decay curve needs 0 < p < q (alpha > 0)");
  const std::size_t K = c.size();
  if (fit_hi == 0) fit_hi = K / 4;
  if (fit_lo < 1 || fit_hi < fit_lo) throw Error(Errc::InvalidFitWindow, "empty fit window");
  std::sort(n_values.begin(), n_values.end());
  n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
  for (auto n : n_values) {
    if (n > K) throw Error(Errc::InvalidFitWindow, "n = " + std::to_string(n) + " beyond grid size");
  }

  NTermCurve curve;
  curve.reference_alpha = 1.0 / p - (q == inf ? 0.0 : 1.0 / q);
  curve.weak_norm = weak_norm(c, p, weight);
  curve.rate_constant = q == inf ? 1.0 : std::pow(q / p - 1.0, -1.0 / q);
  curve.fit_lo = fit_lo;
  curve.fit_hi = fit_hi;
  const auto tails = tail_norms(c, q, weight);
  curve.n_values = n_values;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t used = 0;
  for (auto n : n_values) {
    const double e = tails[n];
    curve.errors.push_back(e);
    if (n >= 1) {
      const double bound = curve.rate_constant * curve.weak_norm * std::pow(static_cast<double>(n), -curve.reference_alpha);
      const double ratio = bound > 0.0 ? e / bound : (e > 0.0 ? inf : 0.0);
      curve.worst_rate_ratio = std::max(curve.worst_rate_ratio, ratio);
      if (e > bound + 1e-10 * std::max(1.0, bound)) curve.rate_bound_holds = false;
    }
    if (n >= fit_lo && n <= fit_hi && e > 0.0) {
      const double x = std::log(static_cast<double>(n)), y = std::log(e);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++used;
    }
  }
  curve.fit_points = used;
  if (used < 2) throw Error(Errc::InvalidFitWindow, "fewer than two nonzero errors inside the fit window");
  const double nn = static_cast<double>(used);
  const double denom = nn * sxx - sx * sx;
  if (denom == 0.0) throw Error(Errc::InvalidFitWindow, "degenerate fit window");
  curve.fitted_slope = (nn * sxy - sx * sy) / denom;
  return curve;
}

inline NTermCurve decay_curve(const Signal& f, const GaborSystem& sys, double p, double q,
                              std::span<const double> weight, std::vector<std::size_t> n_values) {
  return decay_curve(dual_coefficients(f, sys), p, q, weight, std::move(n_values));
}

/// Grid whose weighted rearrangement is exactly k^{-1/p} (k = 1..N*M), laid out
/// along the greedy tie order so that the k-th largest sits at position k.
inline CoefficientGrid power_law_grid(const Lattice& lat, double p, std::span<const double> weight = {}) {
  CoefficientGrid c(lat);
  const std::size_t M = lat.M, K = c.size();
  if (!weight.empty() && weight.size() != K) throw Error(Errc::ShapeMismatch, "weight shape mismatch");
  // Visit positions in (j, k) order; value k^{-1/p} / m.
  std::size_t rank = 1;
  for (std::size_t j = 0; j < M; ++j) {
    for (std::size_t k = 0; k < lat.time_shifts(); ++k, ++rank) {
      const std::size_t pos = k * M + j;
      c.values()[pos] = std::pow(static_cast<double>(rank), -1.0 / p) / (weight.empty() ? 1.0 : weight[pos]);
    }
  }
  return c;
}

}  // namespace qbc
