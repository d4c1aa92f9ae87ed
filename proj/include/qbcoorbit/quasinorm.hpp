#pragma once

// Solid quasi-norms on Z_L and on coefficient grids: weighted l^p, mixed
// l^{p,q}_m, Lorentz (star and maximal forms), control functions, Wiener
// amalgam norms W(l^inf, Y) and the discrete sequence spaces Y_d.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbcoorbit/error.hpp"
#include "qbcoorbit/grid.hpp"

namespace qbc {

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Symmetric window {-q, ..., q} mod L.
class Neighborhood {
 public:
  constexpr explicit Neighborhood(std::size_t radius = 0) noexcept : radius_(radius) {}

  constexpr std::size_t radius() const noexcept { return radius_; }
  constexpr std::size_t cardinality() const noexcept { return 2 * radius_ + 1; }

  void require_fits(std::size_t L) const {
    if (cardinality() > L) {
      throw Error(Errc::RadiusTooLarge, "2q+1 = " + std::to_string(cardinality()) + " exceeds L = " + std::to_string(L));
    }
  }

  friend constexpr bool operator==(Neighborhood, Neighborhood) = default;

 private:
  std::size_t radius_;
};

enum class NormKind { Mixed, WeightedLp, Lorentz };

/// Descriptor of a solid quasi-norm Y. An empty weight means m == 1.
struct QuasiNormSpec {
  NormKind kind = NormKind::WeightedLp;
  double p = 2.0;
  double q = 2.0;
  std::optional<double> r;  // Lorentz only: selects the maximal form ||.||^{(r)}_{p,q}
  std::vector<double> weight;
  std::size_t time_len = 0;  // Mixed only
  std::size_t freq_len = 0;  // Mixed only

  static QuasiNormSpec weighted_lp(double p, std::vector<double> weight = {}) {
    QuasiNormSpec s;
    s.kind = NormKind::WeightedLp;
    s.p = p;
    s.q = p;
    s.weight = std::move(weight);
    s.validate();
    return s;
  }

  static QuasiNormSpec mixed(double p, double q, std::size_t time_len, std::size_t freq_len,
                             std::vector<double> weight = {}) {
    QuasiNormSpec s;
    s.kind = NormKind::Mixed;
    s.p = p;
    s.q = q;
    s.time_len = time_len;
    s.freq_len = freq_len;
    s.weight = std::move(weight);
    s.validate();
    return s;
  }

  static QuasiNormSpec lorentz(double p, double q, std::vector<double> weight = {},
                               std::optional<double> r = std::nullopt) {
    QuasiNormSpec s;
    s.kind = NormKind::Lorentz;
    s.p = p;
    s.q = q;
    s.r = r;
    s.weight = std::move(weight);
    s.validate();
    return s;
  }

  void validate() const {
    if (!(p > 0.0) || !(q > 0.0)) throw Error(Errc::InvalidExponent, "exponents must be positive");
    if (kind == NormKind::Lorentz) {
      if (p == inf) throw Error(Errc::InvalidExponent, "Lorentz p must be finite");
      if (r && !(*r > 0.0 && *r <= 1.0 && *r < p && *r <= q)) {
        throw Error(Errc::InvalidExponent, "Lorentz maximal form needs 0 < r <= 1, r < p, r <= q");
      }
    }
    for (double w : weight) {
      if (!(w > 0.0)) throw Error(Errc::NonPositiveWeight, "norm weight must be positive");
    }
  }

  /// Exponent r for which N(f+g)^r <= N(f)^r + N(g)^r holds with constant 1.
  /// The Lorentz star form with p != q is only a quasi-norm; the exponent
  /// returned there is the one used with triangle_constant().
  double r_exponent() const {
    switch (kind) {
      case NormKind::WeightedLp: return std::min(1.0, p);
      case NormKind::Mixed: return std::min({1.0, p, q});
      case NormKind::Lorentz:
        if (r) return *r;
        if (q == p) return std::min(1.0, p);
        return std::min({1.0, q, p / 2.0});
    }
    return 1.0;
  }

  /// K in N(f+g)^r <= K^r (N(f)^r + N(g)^r), r = r_exponent().
  double triangle_constant() const {
    if (kind != NormKind::Lorentz || r || q == p) return 1.0;
    const double r0 = r_exponent();
    return std::pow(p / (p - r0), 1.0 / r0);
  }
};

namespace detail {

inline double weight_at(std::span<const double> w, std::size_t i) { return w.empty() ? 1.0 : w[i]; }

inline std::vector<double> weighted_magnitudes(std::span<const double> mags, std::span<const double> w) {
  if (!w.empty() && w.size() != mags.size()) throw Error(Errc::LengthMismatch, "weight length mismatch");
  std::vector<double> out(mags.size());
  for (std::size_t i = 0; i < mags.size(); ++i) {
#ifdef QBC_FAULT_DROP_WEIGHT
    out[i] = std::abs(mags[i]);
#else
    out[i] = std::abs(mags[i]) * weight_at(w, i);
#endif
  }
  return out;
}

/// (sum a_i^p)^{1/p} for a_i >= 0, summed in index order; max for p = inf.
/// Small p renormalizes by the largest entry first.
inline double power_sum_norm(std::span<const double> a, double p) {
  if (a.empty()) return 0.0;
  const double top = *std::max_element(a.begin(), a.end());
  if (p == inf || top == 0.0) return top;
  const double scale = p < 0.25 ? top : 1.0;
  double s = 0.0;
  for (double x : a) s += std::pow(x / scale, p);
  return scale * std::pow(s, 1.0 / p);
}

/// n^e - (n-1)^e without cancellation for large n.
inline double power_increment(std::size_t n, double e) {
  if (e == 1.0) return 1.0;
  const double dn = static_cast<double>(n);
  if (n == 1) return 1.0;
  return -std::pow(dn, e) * std::expm1(e * std::log1p(-1.0 / dn));
}

/// Lorentz-type functional of a nonincreasing step profile h(t) = h_n on
/// [n-1, n): (q/p) int h^q t^{q/p} dt/t, or sup t^{1/p} h(t) for q = inf.
inline double lorentz_profile_norm(std::span<const double> profile, double p, double q) {
  if (profile.empty()) return 0.0;
  if (q == inf) {
    double best = 0.0;
    for (std::size_t n = 1; n <= profile.size(); ++n) {
      best = std::max(best, std::pow(static_cast<double>(n), 1.0 / p) * profile[n - 1]);
    }
    return best;
  }
  const double top = *std::max_element(profile.begin(), profile.end());
  if (top == 0.0) return 0.0;
  const double scale = q < 0.25 ? top : 1.0;
  const double e = q / p;
  double s = 0.0;
  for (std::size_t n = 1; n <= profile.size(); ++n) {
    s += std::pow(profile[n - 1] / scale, q) * power_increment(n, e);
  }
  return scale * std::pow(s, 1.0 / q);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rearrangement and Lorentz norms

struct Rearrangement {
  std::vector<double> sorted;             // nonincreasing |lambda_i| m_i
  std::vector<std::size_t> permutation;   // sorted[k] comes from index permutation[k]
};

/// Nonincreasing rearrangement of |lambda_i| m_i; ties keep original order.
inline Rearrangement rearrange(std::span<const double> values, std::span<const double> weight = {}) {
  const auto wm = detail::weighted_magnitudes(values, weight);
  Rearrangement out;
  out.permutation.resize(wm.size());
  std::iota(out.permutation.begin(), out.permutation.end(), std::size_t{0});
  std::stable_sort(out.permutation.begin(), out.permutation.end(),
                   [&](std::size_t a, std::size_t b) { return wm[a] > wm[b]; });
  out.sorted.reserve(wm.size());
  for (auto i : out.permutation) out.sorted.push_back(wm[i]);
  return out;
}

inline Rearrangement rearrange(std::span<const cplx> values, std::span<const double> weight = {}) {
  return rearrange(std::span<const double>(magnitudes(values)), weight);
}

/// Discrete ||lambda m||*_{p,q}: the Lorentz functional of the step function
/// t -> (lambda m)*(ceil t) on counting measure.
inline double lorentz_star_norm(std::span<const double> values, double p, double q,
                                std::span<const double> weight = {}) {
  if (!(p > 0.0) || p == inf) throw Error(Errc::InvalidExponent, "Lorentz p must lie in (0, inf)");
  if (!(q > 0.0)) throw Error(Errc::InvalidExponent, "Lorentz q must be positive");
  const auto r = rearrange(values, weight);
  return detail::lorentz_profile_norm(r.sorted, p, q);
}

inline double lorentz_star_norm(std::span<const cplx> values, double p, double q,
                                std::span<const double> weight = {}) {
  return lorentz_star_norm(std::span<const double>(magnitudes(values)), p, q, weight);
}

/// F**(t, r) on [n-1, n) for n = 1..K: the largest r-mean over index sets of
/// size >= n. The best set of each size is a prefix of the rearrangement.
inline std::vector<double> maximal_profile(std::span<const double> sorted, double r) {
  const std::size_t K = sorted.size();
  std::vector<double> avg(K);
  double acc = 0.0;
  for (std::size_t N = 1; N <= K; ++N) {
    acc += std::pow(sorted[N - 1], r);
    avg[N - 1] = acc / static_cast<double>(N);
  }
  std::vector<double> out(K);
  double running = 0.0;
  for (std::size_t n = K; n >= 1; --n) {
    running = std::max(running, avg[n - 1]);
    out[n - 1] = std::pow(running, 1.0 / r);
  }
  return out;
}

/// Discrete ||lambda m||^{(r)}_{p,q}.
inline double lorentz_maximal_norm(std::span<const double> values, double p, double q, double r,
                                   std::span<const double> weight = {}) {
  if (!(p > 0.0) || p == inf || !(q > 0.0)) throw Error(Errc::InvalidExponent, "Lorentz exponents out of range");
  if (!(r > 0.0 && r <= 1.0 && r < p && r <= q)) {
    throw Error(Errc::InvalidExponent, "maximal Lorentz norm needs 0 < r <= 1, r < p, r <= q");
  }
  const auto sorted = rearrange(values, weight).sorted;
  return detail::lorentz_profile_norm(maximal_profile(sorted, r), p, q);
}

inline double lorentz_maximal_norm(std::span<const cplx> values, double p, double q, double r,
                                   std::span<const double> weight = {}) {
  return lorentz_maximal_norm(std::span<const double>(magnitudes(values)), p, q, r, weight);
}

// ---------------------------------------------------------------------------
// Y-norms

/// Mixed l^{p,q}_m of a time_len x freq_len array stored row-major with the
/// time index outer: inner p-sum over time, outer q-sum over frequency.
inline double mixed_norm(std::span<const double> mags, std::size_t time_len, std::size_t freq_len, double p, double q,
                         std::span<const double> weight = {}) {
  if (mags.size() != time_len * freq_len) throw Error(Errc::ShapeMismatch, "array is not time_len x freq_len");
  if (!weight.empty() && weight.size() != mags.size()) throw Error(Errc::ShapeMismatch, "weight shape mismatch");
  const auto wm = detail::weighted_magnitudes(mags, weight);
  std::vector<double> column(time_len);
  std::vector<double> inner(freq_len);
  for (std::size_t j = 0; j < freq_len; ++j) {
    for (std::size_t k = 0; k < time_len; ++k) column[k] = wm[k * freq_len + j];
    inner[j] = detail::power_sum_norm(column, p);
  }
  return detail::power_sum_norm(inner, q);
}

inline double weighted_lp_norm(std::span<const double> mags, double p, std::span<const double> weight = {}) {
  return detail::power_sum_norm(detail::weighted_magnitudes(mags, weight), p);
}

/// Y-norm of a nonnegative (or absolute-valued) array.
inline double y_norm(std::span<const double> values, const QuasiNormSpec& Y) {
  Y.validate();
  switch (Y.kind) {
    case NormKind::WeightedLp:
      if (!Y.weight.empty() && Y.weight.size() != values.size()) throw Error(Errc::ShapeMismatch, "weight shape");
      return weighted_lp_norm(values, Y.p, Y.weight);
    case NormKind::Mixed:
      return mixed_norm(values, Y.time_len, Y.freq_len, Y.p, Y.q, Y.weight);
    case NormKind::Lorentz:
      if (!Y.weight.empty() && Y.weight.size() != values.size()) throw Error(Errc::ShapeMismatch, "weight shape");
      if (Y.r) return lorentz_maximal_norm(values, Y.p, Y.q, *Y.r, Y.weight);
      return lorentz_star_norm(values, Y.p, Y.q, Y.weight);
  }
  return 0.0;
}

inline double y_norm(std::span<const cplx> values, const QuasiNormSpec& Y) {
  return y_norm(std::span<const double>(magnitudes(values)), Y);
}

inline double y_norm(const Signal& f, const QuasiNormSpec& Y) { return y_norm(f.values(), Y); }

// ---------------------------------------------------------------------------
// Control functions and amalgam norms

/// K(F, Q)(x) = max_{u in x+Q} |F[u]| on Z_L.
inline std::vector<double> control_function(std::span<const double> mags, Neighborhood Q) {
  const std::size_t L = mags.size();
  Q.require_fits(L);
  const std::size_t q = Q.radius();
  std::vector<double> out(L);
  for (std::size_t x = 0; x < L; ++x) {
    double m = 0.0;
    for (std::size_t k = 0; k < Q.cardinality(); ++k) m = std::max(m, std::abs(mags[(x + L + k - q) % L]));
    out[x] = m;
  }
  return out;
}

inline std::vector<double> control_function(const Signal& F, Neighborhood Q) {
  return control_function(std::span<const double>(magnitudes(F)), Q);
}

/// Periodic box maximum on a time_len x freq_len array (time index outer).
inline std::vector<double> control_function_2d(std::span<const double> mags, std::size_t time_len,
                                               std::size_t freq_len, Neighborhood time_q, Neighborhood freq_q) {
  if (mags.size() != time_len * freq_len) throw Error(Errc::ShapeMismatch, "array is not time_len x freq_len");
  time_q.require_fits(time_len);
  freq_q.require_fits(freq_len);
  // Separable: max over frequency first, then over time.
  std::vector<double> stage(mags.size());
  for (std::size_t k = 0; k < time_len; ++k) {
    for (std::size_t j = 0; j < freq_len; ++j) {
      double m = 0.0;
      for (std::size_t u = 0; u < freq_q.cardinality(); ++u) {
        m = std::max(m, std::abs(mags[k * freq_len + (j + freq_len + u - freq_q.radius()) % freq_len]));
      }
      stage[k * freq_len + j] = m;
    }
  }
  std::vector<double> out(mags.size());
  for (std::size_t k = 0; k < time_len; ++k) {
    for (std::size_t j = 0; j < freq_len; ++j) {
      double m = 0.0;
      for (std::size_t u = 0; u < time_q.cardinality(); ++u) {
        m = std::max(m, stage[((k + time_len + u - time_q.radius()) % time_len) * freq_len + j]);
      }
      out[k * freq_len + j] = m;
    }
  }
  return out;
}

/// ||F | W(l^inf, Y, Q)|| = Y-norm of the control function.
inline double amalgam_norm(std::span<const double> mags, Neighborhood Q, const QuasiNormSpec& Y) {
  if (Y.kind == NormKind::Mixed) throw Error(Errc::ShapeMismatch, "amalgam norm on Z_L needs an l^p or Lorentz Y");
  return y_norm(control_function(mags, Q), Y);
}

inline double amalgam_norm(const Signal& F, Neighborhood Q, const QuasiNormSpec& Y) {
  return amalgam_norm(std::span<const double>(magnitudes(F)), Q, Y);
}

/// P[y] = sum over i with y in x_i + Q of |lambda_i|.
inline std::vector<double> pileup(std::span<const double> lambda, std::span<const std::size_t> points, std::size_t L,
                                  Neighborhood Q) {
  if (lambda.size() != points.size()) throw Error(Errc::LengthMismatch, "one coefficient per point required");
  Q.require_fits(L);
  std::vector<double> P(L, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] >= L) throw Error(Errc::BadParams, "point outside Z_L");
    for (std::size_t k = 0; k < Q.cardinality(); ++k) {
      P[(points[i] + L + k - Q.radius()) % L] += std::abs(lambda[i]);
    }
  }
  return P;
}

/// Norm of lambda in the sequence space Y_d(X): ||sum_i |lambda_i| chi_{x_i+Q} | Y||.
inline double sequence_norm(std::span<const double> lambda, std::span<const std::size_t> points, std::size_t L,
                            Neighborhood Q, const QuasiNormSpec& Y) {
  return y_norm(pileup(lambda, points, L, Q), Y);
}

inline double sequence_norm(std::span<const cplx> lambda, std::span<const std::size_t> points, std::size_t L,
                            Neighborhood Q, const QuasiNormSpec& Y) {
  return sequence_norm(std::span<const double>(magnitudes(lambda)), points, L, Q, Y);
}

}  // namespace qbc
