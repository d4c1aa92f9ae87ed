#pragma once

// Finite cyclic group Z_L: signals, translation/modulation/involution,
// group convolution and weight functions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "qbcoorbit/error.hpp"

namespace qbc {

using cplx = std::complex<double>;

class GridGroup {
 public:
  explicit GridGroup(std::size_t order) : order_(order) {
    if (order < 2) throw Error(Errc::BadParams, "group order must be >= 2");
  }

  std::size_t order() const noexcept { return order_; }
  std::size_t size() const noexcept { return order_; }

  std::size_t reduce(std::int64_t x) const noexcept {
    const auto L = static_cast<std::int64_t>(order_);
    const std::int64_t r = x % L;
    return static_cast<std::size_t>(r < 0 ? r + L : r);
  }

  /// Circular distance d(x, 0).
  std::size_t distance(std::int64_t x) const noexcept {
    const std::size_t r = reduce(x);
    return std::min(r, order_ - r);
  }

  std::size_t distance(std::int64_t x, std::int64_t y) const noexcept { return distance(x - y); }

  friend bool operator==(const GridGroup&, const GridGroup&) = default;

 private:
  std::size_t order_;
};

inline void require_same_group(const GridGroup& a, const GridGroup& b) {
  if (a != b) {
    throw Error(Errc::GroupMismatch, "Z_" + std::to_string(a.order()) + " vs Z_" + std::to_string(b.order()));
  }
}

/// Complex-valued function on Z_L.
class Signal {
 public:
  Signal(GridGroup group, std::vector<cplx> values) : group_(group), values_(std::move(values)) {
    if (values_.size() != group_.order()) {
      throw Error(Errc::LengthMismatch, "signal length " + std::to_string(values_.size()) + " != L");
    }
    for (const auto& v : values_) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw Error(Errc::BadParams, "signal entries must be finite");
      }
    }
  }

  explicit Signal(GridGroup group) : group_(group), values_(group.order()) {}

  static Signal zeros(GridGroup group) { return Signal(group); }

  static Signal delta(GridGroup group, std::int64_t at) {
    Signal s(group);
    s.values_[group.reduce(at)] = 1.0;
    return s;
  }

  static Signal from_real(GridGroup group, std::span<const double> values) {
    return Signal(group, std::vector<cplx>(values.begin(), values.end()));
  }

  const GridGroup& group() const noexcept { return group_; }
  std::size_t size() const noexcept { return values_.size(); }

  cplx operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }

  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }

  Signal& operator+=(const Signal& o) {
    require_same_group(group_, o.group_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  Signal& operator-=(const Signal& o) {
    require_same_group(group_, o.group_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  Signal& operator*=(cplx c) {
    for (auto& v : values_) v *= c;
    return *this;
  }

  friend Signal operator+(Signal a, const Signal& b) { return a += b; }
  friend Signal operator-(Signal a, const Signal& b) { return a -= b; }
  friend Signal operator*(cplx c, Signal a) { return a *= c; }
  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  GridGroup group_;
  std::vector<cplx> values_;
};

inline double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}
inline double norm2(const Signal& f) { return norm2(f.values()); }

inline double sup_norm(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}
inline double sup_norm(const Signal& f) { return sup_norm(f.values()); }

/// <f, g> = sum f conj(g).
inline cplx inner(std::span<const cplx> f, std::span<const cplx> g) {
  if (f.size() != g.size()) throw Error(Errc::LengthMismatch, "inner product of unequal lengths");
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::conj(g[i]);
  return s;
}
inline cplx inner(const Signal& f, const Signal& g) {
  require_same_group(f.group(), g.group());
  return inner(f.values(), g.values());
}

inline std::vector<double> magnitudes(std::span<const cplx> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](cplx z) { return std::abs(z); });
  return out;
}
inline std::vector<double> magnitudes(const Signal& f) { return magnitudes(f.values()); }

// ---------------------------------------------------------------------------
// Operators

/// result[y] = f[y - x].
inline Signal translate(const Signal& f, std::int64_t x) {
  const auto& G = f.group();
  Signal out(G);
  const std::size_t shift = G.reduce(x);
  const std::size_t L = G.order();
  for (std::size_t y = 0; y < L; ++y) out[(y + shift) % L] = f[y];
  return out;
}

/// result[t] = exp(2 pi i m t / L) f[t].
inline Signal modulate(const Signal& f, std::int64_t m) {
  const auto& G = f.group();
  const std::size_t L = G.order();
  const std::size_t freq = G.reduce(m);
  Signal out(G);
  for (std::size_t t = 0; t < L; ++t) {
    // (freq * t) mod L keeps the phase argument in [0, 2 pi) exactly.
    const std::size_t k = (freq * t) % L;
    out[t] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(L)) * f[t];
  }
  return out;
}

/// result[x] = sum_y F[y] G[x - y], inner sum in increasing y.
inline Signal convolve(const Signal& F, const Signal& G) {
  require_same_group(F.group(), G.group());
  const std::size_t L = F.size();
  Signal out(F.group());
  for (std::size_t x = 0; x < L; ++x) {
    cplx s = 0.0;
    for (std::size_t y = 0; y < L; ++y) s += F[y] * G[(x + L - y) % L];
    out[x] = s;
  }
  return out;
}

/// result[x] = conj(F[-x]).
inline Signal involution(const Signal& F) {
  const std::size_t L = F.size();
  Signal out(F.group());
  for (std::size_t x = 0; x < L; ++x) out[x] = std::conj(F[(L - x) % L]);
  return out;
}

// ---------------------------------------------------------------------------
// Weights

class Weight {
 public:
  Weight(GridGroup group, std::vector<double> values) : group_(group), values_(std::move(values)) {
    if (values_.size() != group_.order()) throw Error(Errc::LengthMismatch, "weight length != L");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
        throw Error(Errc::NonPositiveWeight, "weight at index " + std::to_string(i) + " is not positive");
      }
    }
  }

  static Weight one(GridGroup group) { return Weight(group, std::vector<double>(group.order(), 1.0)); }

  /// (1 + d(x,0))^s
  static Weight polynomial(GridGroup group, double s) {
    std::vector<double> v(group.order());
    for (std::size_t x = 0; x < v.size(); ++x) {
      v[x] = std::pow(1.0 + static_cast<double>(group.distance(static_cast<std::int64_t>(x))), s);
    }
    return Weight(group, std::move(v));
  }

  const GridGroup& group() const noexcept { return group_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  bool is_symmetric() const noexcept {
    const std::size_t L = values_.size();
    for (std::size_t x = 0; x < L; ++x) {
      if (values_[x] != values_[(L - x) % L]) return false;
    }
    return true;
  }

 private:
  GridGroup group_;
  std::vector<double> values_;
};

struct WeightCheck {
  bool ok = true;
  double worst_ratio = 0.0;
  std::pair<std::size_t, std::size_t> witness{0, 0};
  std::size_t pairs_checked = 0;
  bool exhaustive = true;
};

inline constexpr std::size_t kExhaustiveWeightLimit = 4096;
inline constexpr std::size_t kSampledWeightPairs = 1'000'000;
inline constexpr std::uint64_t kWeightSampleSeed = 0x5eed'c0de'2024ULL;

/// Worst ratio m(x+y) / (w(x) m(y)) over all pairs (or a seeded sample when
/// L exceeds the exhaustive limit). Submultiplicativity is the case m == w.
inline WeightCheck check_moderate(const Weight& m, const Weight& w) {
  require_same_group(m.group(), w.group());
  const std::size_t L = m.size();
  WeightCheck rep;
  rep.worst_ratio = -1.0;
  auto visit = [&](std::size_t x, std::size_t y) {
    const double ratio = m[(x + y) % L] / (w[x] * m[y]);
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.witness = {x, y};
    }
    ++rep.pairs_checked;
  };
  if (L <= kExhaustiveWeightLimit) {
    for (std::size_t x = 0; x < L; ++x)
      for (std::size_t y = 0; y < L; ++y) visit(x, y);
  } else {
    rep.exhaustive = false;
    std::mt19937_64 rng(kWeightSampleSeed);
    std::uniform_int_distribution<std::size_t> pick(0, L - 1);
    for (std::size_t k = 0; k < kSampledWeightPairs; ++k) {
      const std::size_t x = pick(rng);
      visit(x, pick(rng));
    }
  }
  rep.ok = rep.worst_ratio <= 1.0 + 1e-12;
  return rep;
}

inline WeightCheck check_submultiplicative(const Weight& w) { return check_moderate(w, w); }

}  // namespace qbc
