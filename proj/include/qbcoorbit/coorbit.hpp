#pragma once

// Discretization machinery on Z_L: well-spread point sets, indicator BUPUs,
// the approximation operator T_Psi, U-oscillations, the gap bound for
// T - T_Psi, Neumann-series atomic decomposition and sampling norms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbcoorbit/error.hpp"
#include "qbcoorbit/grid.hpp"
#include "qbcoorbit/quasinorm.hpp"

namespace qbc {

class PointSet {
 public:
  PointSet(GridGroup group, std::vector<std::size_t> points) : group_(group), points_(std::move(points)) {
    if (points_.empty()) throw Error(Errc::BadParams, "point set is empty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (points_[i] >= group_.order()) throw Error(Errc::BadParams, "point outside Z_L");
      if (i > 0 && points_[i] <= points_[i - 1]) throw Error(Errc::BadParams, "points must be strictly increasing");
    }
    nearest_.assign(group_.order(), 0);
    density_radius_ = 0;
    const std::size_t L = group_.order();
    for (std::size_t x = 0; x < L; ++x) {
      std::size_t best = 0;
      std::size_t best_d = L;
      bool best_behind = false;
      for (std::size_t i = 0; i < points_.size(); ++i) {
        const std::size_t d = group_.distance(static_cast<std::int64_t>(x) - static_cast<std::int64_t>(points_[i]));
        const bool behind = (x + L - points_[i]) % L == d;
        // Equal distance: the point at x - d wins.
        if (d < best_d || (d == best_d && behind && !best_behind)) {
          best = i;
          best_d = d;
          best_behind = behind;
        }
      }
      nearest_[x] = best;
      density_radius_ = std::max(density_radius_, best_d);
    }
  }

  /// Every multiple of `step` below L.
  static PointSet regular(GridGroup group, std::size_t step) {
    if (step == 0) throw Error(Errc::BadParams, "step must be positive");
    std::vector<std::size_t> pts;
    for (std::size_t x = 0; x < group.order(); x += step) pts.push_back(x);
    return PointSet(group, std::move(pts));
  }

  const GridGroup& group() const noexcept { return group_; }
  std::span<const std::size_t> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t operator[](std::size_t i) const { return points_[i]; }

  /// Smallest V with the union of x_i + {-V..V} covering Z_L.
  std::size_t density_radius() const noexcept { return density_radius_; }

  /// Index of the circularly nearest point (ties to the point at x - d).
  std::size_t nearest(std::size_t x) const { return nearest_[x]; }

  /// max_j #{i : (x_i + Q) meets (x_j + Q)}.
  std::size_t separation(Neighborhood Q) const {
    std::size_t worst = 0;
    for (std::size_t j = 0; j < points_.size(); ++j) {
      std::size_t count = 0;
      for (std::size_t i = 0; i < points_.size(); ++i) {
        if (group_.distance(static_cast<std::int64_t>(points_[i]) - static_cast<std::int64_t>(points_[j])) <=
            2 * Q.radius()) {
          ++count;
        }
      }
      worst = std::max(worst, count);
    }
    return worst;
  }

  /// max_y #{i : y in x_i + Q}.
  std::size_t max_overlap(Neighborhood Q) const {
    std::vector<double> ones(points_.size(), 1.0);
    const auto P = pileup(ones, points_, group_.order(), Q);
    return static_cast<std::size_t>(*std::max_element(P.begin(), P.end()));
  }

 private:
  GridGroup group_;
  std::vector<std::size_t> points_;
  std::vector<std::size_t> nearest_;
  std::size_t density_radius_ = 0;
};

/// Nearest-point indicator partition of unity: psi_i(x) = 1 iff x_i is the
/// point assigned to x.
class Bupu {
 public:
  Bupu(PointSet points, Neighborhood U) : points_(std::move(points)), U_(U) {
    const std::size_t L = points_.group().order();
    U_.require_fits(L);
    if (points_.density_radius() > U_.radius()) {
      throw Error(Errc::NotDense, "density radius " + std::to_string(points_.density_radius()) + " exceeds U radius " +
                                      std::to_string(U_.radius()));
    }
    owner_.resize(L);
    members_.resize(points_.size());
    for (std::size_t x = 0; x < L; ++x) {
      owner_[x] = points_.nearest(x);
      members_[owner_[x]].push_back(x);
    }
  }

  const PointSet& points() const noexcept { return points_; }
  Neighborhood size() const noexcept { return U_; }
  std::size_t count() const noexcept { return points_.size(); }
  std::size_t owner(std::size_t x) const { return owner_[x]; }

  /// Support of psi_i in increasing order.
  std::span<const std::size_t> support(std::size_t i) const { return members_[i]; }

  std::vector<double> psi(std::size_t i) const {
    std::vector<double> v(points_.group().order(), 0.0);
    for (auto x : members_[i]) v[x] = 1.0;
    return v;
  }

  std::size_t max_support() const {
    std::size_t m = 0;
    for (const auto& s : members_) m = std::max(m, s.size());
    return m;
  }

  /// <F, psi_i> for every i.
  std::vector<cplx> coefficients(const Signal& F) const {
    require_same_group(F.group(), points_.group());
    std::vector<cplx> c(points_.size(), 0.0);
    for (std::size_t i = 0; i < members_.size(); ++i) {
      for (auto x : members_[i]) c[i] += F[x];
    }
    return c;
  }

 private:
  PointSet points_;
  Neighborhood U_;
  std::vector<std::size_t> owner_;
  std::vector<std::vector<std::size_t>> members_;
};

inline Bupu build_bupu(const PointSet& X, Neighborhood U) { return Bupu(X, U); }

/// G[x] = (1/L) sum_{|k| <= K} exp(2 pi i k x / L). Real, and idempotent under
/// convolution (G*G = G), so convolution with G is the identity on its range.
inline Signal band_limited_kernel(GridGroup group, std::size_t K) {
  const std::size_t L = group.order();
  if (2 * K + 1 > L) throw Error(Errc::BadParams, "band 2K+1 exceeds L");
  std::vector<double> v(L);
  for (std::size_t x = 0; x < L; ++x) {
    double s = 1.0;
    for (std::size_t k = 1; k <= K; ++k) {
      s += 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k * x % L) / static_cast<double>(L));
    }
    v[x] = s / static_cast<double>(L);
  }
  return Signal::from_real(group, v);
}

/// G#_U(x) = max_{u in U} |G[x+u] - G[x]|.
inline std::vector<double> oscillation(const Signal& G, Neighborhood U) {
  const std::size_t L = G.size();
  U.require_fits(L);
  std::vector<double> out(L, 0.0);
  for (std::size_t x = 0; x < L; ++x) {
    double m = 0.0;
    for (std::size_t k = 0; k < U.cardinality(); ++k) {
      m = std::max(m, std::abs(G[(x + L + k - U.radius()) % L] - G[x]));
    }
    out[x] = m;
  }
  return out;
}

/// sum_i lambda_i L_{x_i} G.
inline Signal synthesize(std::span<const cplx> lambda, const PointSet& X, const Signal& G) {
  require_same_group(X.group(), G.group());
  if (lambda.size() != X.size()) throw Error(Errc::LengthMismatch, "one coefficient per point required");
  const std::size_t L = G.size();
  Signal out(G.group());
  for (std::size_t y = 0; y < L; ++y) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) s += lambda[i] * G[(y + L - X[i]) % L];
    out[y] = s;
  }
  return out;
}

/// T_Psi F = sum_i <F, psi_i> L_{x_i} G.
inline Signal apply_tpsi(const Signal& F, const Signal& G, const Bupu& bupu) {
  require_same_group(F.group(), G.group());
  return synthesize(bupu.coefficients(F), bupu.points(), G);
}

/// ||G#_U | W(l^inf, Y, Q)||: bound on the quasi-norm of T - T_Psi on
/// W(l^inf, l^p_w) for p <= 1 and submultiplicative w.
inline double gap_bound(const Signal& G, Neighborhood U, const QuasiNormSpec& Y, Neighborhood Q) {
  if (Y.kind != NormKind::WeightedLp || Y.p > 1.0) {
    throw Error(Errc::BadParams, "gap bound needs a weighted l^p space with p <= 1");
  }
  if (!Y.weight.empty()) {
    const auto rep = check_submultiplicative(Weight(G.group(), Y.weight));
    if (!rep.ok) throw Error(Errc::BadParams, "gap bound needs a submultiplicative weight");
  }
  return amalgam_norm(std::span<const double>(oscillation(G, U)), Q, Y);
}

inline constexpr double kStallSlack = 1e-9;

struct DecomposeOptions {
  double tol = 1e-10;
  std::size_t max_iter = 1000;
  /// When set, residuals are also recorded in this amalgam norm.
  std::optional<std::pair<Neighborhood, QuasiNormSpec>> monitor;
};

struct Decomposition {
  std::vector<cplx> coefficients;   // lambda_i = <H, psi_i>
  Signal preimage;                  // H with T_Psi H ~ F
  std::vector<double> residual_history;  // ||F - T_Psi H_k||_inf
  std::vector<double> monitor_history;   // same residuals in the monitor norm
  std::size_t iterations = 0;

  /// Largest consecutive residual ratio from step `from` on.
  double max_ratio(std::size_t from = 2, bool use_monitor = false) const {
    const auto& h = use_monitor ? monitor_history : residual_history;
    double worst = 0.0;
    for (std::size_t k = std::max<std::size_t>(from, 1); k < h.size(); ++k) {
      if (h[k - 1] > 0.0) worst = std::max(worst, h[k] / h[k - 1]);
    }
    return worst;
  }
};

/// Neumann iteration H_{k+1} = F + H_k - T_Psi H_k, started at H_1 = F.
/// Stops once ||F - T_Psi H_k||_inf <= tol; reconstruction is then
/// F ~ sum_i lambda_i L_{x_i} G with lambda_i = <H_k, psi_i>.
inline Decomposition atomic_decompose(const Signal& F, const Signal& G, const Bupu& bupu,
                                      const DecomposeOptions& opts = {}) {
  require_same_group(F.group(), G.group());
  require_same_group(F.group(), bupu.points().group());
  Decomposition out{{}, F, {}, {}, 0};
  std::size_t non_decreasing = 0;
  for (std::size_t k = 1; k <= opts.max_iter; ++k) {
    const auto lambda = bupu.coefficients(out.preimage);
    const Signal residual = F - synthesize(lambda, bupu.points(), G);
    const double r = sup_norm(residual);
    if (opts.monitor) {
      out.monitor_history.push_back(amalgam_norm(residual, opts.monitor->first, opts.monitor->second));
    }
    out.iterations = k;
    // A step that shrinks the residual by less than kStallSlack counts as no decay:
    // rounding alone makes a stagnant residual wobble by a few ulps.
    if (!out.residual_history.empty() && r >= (1.0 - kStallSlack) * out.residual_history.back()) {
      ++non_decreasing;
    } else {
      non_decreasing = 0;
    }
    out.residual_history.push_back(r);
    if (r <= opts.tol) {
      out.coefficients = lambda;
      return out;
    }
    if (non_decreasing >= 5) {
      throw Error(Errc::NotContractive, "residual failed to decay over 5 consecutive Neumann steps");
    }
    out.preimage += residual;
  }
  throw Error(Errc::MaxIterExceeded,
              "Neumann decomposition did not reach tolerance in " + std::to_string(opts.max_iter) + " iterations");
}

/// Sequence-space norm of the samples (F(x_i))_i.
inline double sampled_norm(const Signal& F, const PointSet& X, Neighborhood Q, const QuasiNormSpec& Y) {
  require_same_group(F.group(), X.group());
  std::vector<double> samples(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) samples[i] = std::abs(F[X[i]]);
  return sequence_norm(std::span<const double>(samples), X.points(), F.size(), Q, Y);
}

/// C in sampled_norm <= C amalgam_norm(F, Q, Y): the largest pileup count of the
/// windows x_i + Q (1 when the windows are disjoint).
inline double sampling_constant(const PointSet& X, Neighborhood Q) { return static_cast<double>(X.max_overlap(Q)); }

/// C in sequence_norm(<F, psi_i>) <= C amalgam_norm(F, Q+U, Y).
inline double analysis_constant(const Bupu& bupu, Neighborhood Q) {
  return static_cast<double>(bupu.max_support() * bupu.points().max_overlap(Q));
}

/// C in amalgam_norm(sum lambda_i L_{x_i} G, Q, Y) <= C sequence_norm(lambda, X, Q, Y),
/// valid for Y = l^p_w, p <= 1, w submultiplicative.
inline double synthesis_constant(const Signal& G, Neighborhood Q, const QuasiNormSpec& Y) {
  if (Y.kind != NormKind::WeightedLp || Y.p > 1.0) {
    throw Error(Errc::BadParams, "synthesis constant needs a weighted l^p space with p <= 1");
  }
  return amalgam_norm(G, Q, Y);
}

}  // namespace qbc
