#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qbcoorbit/grid.hpp"
#include "qbcoorbit/quasinorm.hpp"

using namespace qbc;

namespace {

std::vector<double> abs_of(const std::vector<cplx>& v) {
  std::vector<double> out;
  for (auto z : v) out.push_back(std::abs(z));
  return out;
}

std::vector<double> random_magnitudes(std::mt19937_64& rng, std::size_t n) { return abs_of(oracle::random_complex(rng, n)); }

/// Heavy-tailed sparse-ish magnitudes so Lorentz tests see spread rearrangements.
std::vector<double> random_sparse(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng) < 0.3 ? 0.0 : std::pow(u(rng), 3.0) * 10.0;
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// control function / amalgam

TEST(ControlFunction, RadiusZeroIsModulus) {
  std::mt19937_64 rng(1);
  Signal F(GridGroup(12), oracle::random_complex(rng, 12));
  const auto K = control_function(F, Neighborhood(0));
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(K[i], std::abs(F[i]));
}

TEST(ControlFunction, DeltaWindow) {
  const auto K = control_function(Signal::delta(GridGroup(8), 0), Neighborhood(1));
  const std::vector<double> expect{1, 1, 0, 0, 0, 0, 0, 1};
  EXPECT_EQ(K, expect);
}

TEST(ControlFunction, MatchesBruteForceWindowMax) {
  std::mt19937_64 rng(32);
  const auto v = oracle::random_complex(rng, 32);
  const auto K = control_function(Signal(GridGroup(32), v), Neighborhood(3));
  EXPECT_EQ(K, oracle::window_max(v, 3));
}

TEST(ControlFunction, MonotoneInRadiusAndDominatesModulus) {
  std::mt19937_64 rng(4);
  Signal F(GridGroup(20), oracle::random_complex(rng, 20));
  auto prev = control_function(F, Neighborhood(0));
  for (std::size_t r = 1; r < 10; ++r) {
    const auto K = control_function(F, Neighborhood(r));
    for (std::size_t i = 0; i < 20; ++i) EXPECT_GE(K[i], prev[i]);
    prev = K;
  }
}

TEST(ControlFunction, RadiusTooLarge) {
  try {
    control_function(Signal(GridGroup(6)), Neighborhood(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RadiusTooLarge);
  }
}

TEST(AmalgamNorm, Examples) {
  std::mt19937_64 rng(9);
  Signal F(GridGroup(16), oracle::random_complex(rng, 16));
  const auto Y = QuasiNormSpec::weighted_lp(0.7);
  EXPECT_DOUBLE_EQ(amalgam_norm(F, Neighborhood(0), Y), y_norm(F, Y));
  EXPECT_DOUBLE_EQ(amalgam_norm(Signal::delta(GridGroup(8), 0), Neighborhood(1), QuasiNormSpec::weighted_lp(1.0)), 3.0);
}

TEST(AmalgamNorm, MatchesTwoStageOracle) {
  std::mt19937_64 rng(10);
  GridGroup G(40);
  const auto v = oracle::random_complex(rng, 40);
  const auto w = Weight::polynomial(G, 1.0);
  const std::vector<double> wv(w.values().begin(), w.values().end());
  const double got = amalgam_norm(Signal(G, v), Neighborhood(2), QuasiNormSpec::weighted_lp(0.5, wv));
  const double expect = oracle::weighted_p_sum(oracle::window_max(v, 2), wv, 0.5);
  EXPECT_NEAR(got, expect, 1e-12 * expect);
}

TEST(AmalgamNorm, RejectsMixedSpec) {
  EXPECT_THROW(amalgam_norm(Signal(GridGroup(4)), Neighborhood(0), QuasiNormSpec::mixed(1, 1, 2, 2)), Error);
}

TEST(AmalgamNorm, TranslationBoundAndInvolutionSymmetry) {
  std::mt19937_64 rng(12);
  GridGroup G(30);
  const auto w = Weight::polynomial(G, 2.0);
  const std::vector<double> wv(w.values().begin(), w.values().end());
  for (double p : {0.5, 1.0, 2.0}) {
    const auto Y = QuasiNormSpec::weighted_lp(p, wv);
    for (int t = 0; t < 30; ++t) {
      Signal F(G, oracle::random_complex(rng, 30));
      const int x = static_cast<int>(rng() % 30);
      const double base = amalgam_norm(F, Neighborhood(2), Y);
      EXPECT_LE(amalgam_norm(translate(F, x), Neighborhood(2), Y), w[G.reduce(-x)] * base * (1 + 1e-10));
      EXPECT_NEAR(amalgam_norm(involution(F), Neighborhood(2), Y), base, 1e-12 * base);
    }
  }
}

TEST(AmalgamNorm, QEquivalenceRatioIsStable) {
  std::mt19937_64 rng(13);
  GridGroup G(48);
  const auto Y = QuasiNormSpec::weighted_lp(0.5);
  const std::size_t q1 = 1, q2 = 4;
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    Signal F(G, oracle::random_complex(rng, 48));
    const double a1 = amalgam_norm(F, Neighborhood(q1), Y);
    const double a2 = amalgam_norm(F, Neighborhood(q2), Y);
    EXPECT_LE(a1, a2 * (1 + 1e-12));
    worst = std::max(worst, a2 / a1);
  }
  EXPECT_TRUE(std::isfinite(worst));
  EXPECT_LT(worst, 10.0 * std::pow(2.0 * q2 + 1.0, 1.0 / 0.5));
}

// ---------------------------------------------------------------------------
// y_norm

TEST(YNorm, EuclideanCase) {
  std::mt19937_64 rng(14);
  const auto v = oracle::random_complex(rng, 16);
  double e = 0;
  for (auto z : v) e += std::norm(z);
  EXPECT_NEAR(y_norm(std::span<const cplx>(v), QuasiNormSpec::mixed(2, 2, 4, 4)), std::sqrt(e), 1e-12);
}

TEST(YNorm, SingleEntryIsWeightedModulus) {
  std::mt19937_64 rng(15);
  const auto w = oracle::random_positive(rng, 12);
  for (double p : {0.3, 0.5, 1.0, 2.0, inf})
    for (double q : {0.4, 1.0, 3.0, inf}) {
      std::vector<cplx> v(12, 0.0);
      v[7] = cplx(-2.0, 1.5);
      EXPECT_NEAR(y_norm(std::span<const cplx>(v), QuasiNormSpec::mixed(p, q, 3, 4, w)), 2.5 * w[7], 1e-12);
    }
}

TEST(YNorm, MixedMatchesNestedLoopOracle) {
  std::mt19937_64 rng(16);
  const auto a = random_magnitudes(rng, 16);
  EXPECT_NEAR(y_norm(a, QuasiNormSpec::mixed(0.5, inf, 4, 4)), oracle::mixed(a, 4, 4, 0.5, inf),
              1e-12 * oracle::mixed(a, 4, 4, 0.5, inf));
  const auto w = oracle::random_positive(rng, 24);
  const auto b = random_magnitudes(rng, 24);
  for (double p : {0.5, 1.0, 2.0, inf})
    for (double q : {0.5, 1.0, 2.0, inf}) {
      const double expect = oracle::mixed(b, 6, 4, p, q, w);
      EXPECT_NEAR(y_norm(b, QuasiNormSpec::mixed(p, q, 6, 4, w)), expect, 1e-12 * expect) << p << " " << q;
    }
}

TEST(YNorm, ShapeMismatch) {
  try {
    y_norm(std::vector<double>(10, 1.0), QuasiNormSpec::mixed(1, 1, 3, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ShapeMismatch);
  }
}

TEST(YNorm, SmallExponentsStayFinite) {
  std::vector<double> v(64, 1e-300);
  v[3] = 2e-300;
  const double n = y_norm(v, QuasiNormSpec::weighted_lp(0.1));
  EXPECT_TRUE(std::isfinite(n));
  EXPECT_GT(n, 0.0);
  // (63 + 2^0.1)^10 * 1e-300
  EXPECT_NEAR(n / 1e-300, std::pow(63.0 + std::pow(2.0, 0.1), 10.0), 1e-9 * std::pow(64.0, 10.0));
}

TEST(YNorm, EmptyArrayIsZero) { EXPECT_EQ(y_norm(std::vector<double>{}, QuasiNormSpec::weighted_lp(0.5)), 0.0); }

TEST(QuasiNormSpec, ExponentValidation) {
  EXPECT_THROW(QuasiNormSpec::weighted_lp(0.0), Error);
  EXPECT_THROW(QuasiNormSpec::lorentz(inf, 2.0), Error);
  EXPECT_THROW(QuasiNormSpec::lorentz(2.0, 2.0, {}, 1.5), Error);
  EXPECT_THROW(QuasiNormSpec::lorentz(0.5, 2.0, {}, 0.5), Error);  // r < p violated
  EXPECT_NO_THROW(QuasiNormSpec::lorentz(2.0, inf, {}, 1.0));
  EXPECT_DOUBLE_EQ(QuasiNormSpec::mixed(0.5, 2, 1, 1).r_exponent(), 0.5);
  EXPECT_DOUBLE_EQ(QuasiNormSpec::mixed(3, inf, 1, 1).r_exponent(), 1.0);
}

// ---------------------------------------------------------------------------
// rearrangement and Lorentz

TEST(Rearrange, Examples) {
  const auto r = rearrange(std::vector<double>{0, 3, 1});
  EXPECT_EQ(r.sorted, (std::vector<double>{3, 1, 0}));
  EXPECT_EQ(r.permutation, (std::vector<std::size_t>{1, 2, 0}));

  const auto id = rearrange(std::vector<double>{5, 4, 4, 2, 1});
  EXPECT_EQ(id.permutation, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(Rearrange, MatchesInsertionSortOracle) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    const auto v = random_magnitudes(rng, 37);
    const auto m = oracle::random_positive(rng, 37);
    std::vector<double> prod(37);
    for (std::size_t i = 0; i < 37; ++i) prod[i] = v[i] * m[i];
    const auto r = rearrange(v, m);
    EXPECT_EQ(r.sorted, oracle::sort_desc(prod));
    for (std::size_t k = 0; k < 37; ++k) EXPECT_EQ(r.sorted[k], prod[r.permutation[k]]);
  }
}

TEST(Rearrange, LengthMismatch) {
  try {
    rearrange(std::vector<double>{1, 2}, std::vector<double>{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LengthMismatch);
  }
}

TEST(LorentzStar, Examples) {
  for (double p : {0.5, 1.0, 2.0}) {
    std::vector<double> v(50);
    for (std::size_t k = 1; k <= 50; ++k) v[50 - k] = std::pow(double(k), -1.0 / p);
    EXPECT_NEAR(lorentz_star_norm(v, p, inf), 1.0, 1e-14);
  }
  EXPECT_DOUBLE_EQ(lorentz_star_norm(std::vector<double>{2, 1}, 1.0, inf), 2.0);
  EXPECT_THROW(lorentz_star_norm(std::vector<double>{1}, 0.0, 1.0), Error);
  EXPECT_THROW(lorentz_star_norm(std::vector<double>{1}, -1.0, 1.0), Error);
}

TEST(LorentzStar, DiagonalEqualsWeightedLp) {
  std::mt19937_64 rng(18);
  for (double p : {0.5, 1.0, 2.0}) {
    for (int t = 0; t < 100; ++t) {
      const auto v = random_sparse(rng, 40);
      const auto m = oracle::random_positive(rng, 40);
      const double lp = y_norm(v, QuasiNormSpec::weighted_lp(p, m));
      EXPECT_NEAR(lorentz_star_norm(v, p, p, m), lp, 1e-12 * lp);
    }
  }
}

TEST(LorentzStar, MatchesDistributionFunctionOracle) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 40; ++t) {
    const auto v = random_sparse(rng, 9);
    const auto brute = oracle::lorentz_brute(v, 1.0);
    for (double p : {0.5, 1.5, 3.0})
      for (double q : {0.7, 2.0, inf}) {
        const double expect = oracle::profile_functional(brute.star, p, q);
        EXPECT_NEAR(lorentz_star_norm(v, p, q), expect, 1e-12 * std::max(1.0, expect));
      }
  }
}

TEST(LorentzMaximal, SingleSpikeExample) {
  std::vector<double> v(6, 0.0);
  v[0] = 1.0;
  EXPECT_NEAR(lorentz_maximal_norm(v, 2.0, inf, 1.0), 1.0, 1e-15);
}

TEST(LorentzMaximal, ConstantOnesAgainstSubsetOracle) {
  const std::vector<double> ones(8, 1.0);
  const auto brute = oracle::lorentz_brute(ones, 1.0);
  for (double m : brute.maximal) EXPECT_DOUBLE_EQ(m, 1.0);
  // sup_n n^{1/2} * 1 over n = 1..8
  EXPECT_NEAR(lorentz_maximal_norm(ones, 2.0, inf, 1.0), std::sqrt(8.0), 1e-14);
  EXPECT_NEAR(lorentz_maximal_norm(ones, 2.0, inf, 1.0), oracle::profile_functional(brute.maximal, 2.0, inf), 1e-14);
}

TEST(LorentzMaximal, MatchesSubsetOracle) {
  std::mt19937_64 rng(20);
  for (int t = 0; t < 60; ++t) {
    const std::size_t K = 1 + rng() % 8;
    const auto v = random_sparse(rng, K);
    for (double r : {0.5, 1.0}) {
      const auto brute = oracle::lorentz_brute(v, r);
      for (double p : {1.5, 2.0, 4.0})
        for (double q : {1.0, 2.5, inf}) {
          const double expect = oracle::profile_functional(brute.maximal, p, q);
          EXPECT_NEAR(lorentz_maximal_norm(v, p, q, r), expect, 1e-12 * std::max(1.0, expect));
        }
    }
  }
}

TEST(LorentzMaximal, HuntSandwich) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 300; ++t) {
    const std::size_t K = 1 + rng() % 64;
    const auto v = random_sparse(rng, K);
    for (auto [p, q, r] : {std::tuple{2.0, inf, 1.0}, {2.0, 2.0, 1.0}, {1.0, 1.0, 0.5}, {3.0, 0.8, 0.8}}) {
      const double star = lorentz_star_norm(v, p, q);
      const double maximal = lorentz_maximal_norm(v, p, q, r);
      EXPECT_LE(star, maximal * (1 + 1e-12));
      EXPECT_LE(maximal, std::pow(p / (p - r), 1.0 / r) * star * (1 + 1e-12));
    }
  }
}

TEST(LorentzMaximal, InvalidExponent) {
  try {
    lorentz_maximal_norm(std::vector<double>{1, 2}, 1.0, inf, 1.0);  // r < p violated
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidExponent);
  }
  EXPECT_THROW(lorentz_maximal_norm(std::vector<double>{1}, 2.0, 0.5, 1.0), Error);  // r <= q violated
}

TEST(LorentzStar, WeakLpIsNotANorm) {
  // (1, 1/2, 1/3) and its reversal both have weak-l^1 size 1; the sum has size 3.
  const std::vector<double> f{1.0, 0.5, 1.0 / 3}, g{1.0 / 3, 0.5, 1.0};
  std::vector<double> s(3);
  for (int i = 0; i < 3; ++i) s[i] = f[i] + g[i];
  EXPECT_NEAR(lorentz_star_norm(f, 1.0, inf), 1.0, 1e-15);
  EXPECT_NEAR(lorentz_star_norm(s, 1.0, inf), 3.0, 1e-15);
  const auto Y = QuasiNormSpec::lorentz(1.0, inf);
  const double r = Y.r_exponent(), K = Y.triangle_constant();
  EXPECT_LE(std::pow(y_norm(s, Y), r), std::pow(K, r) * (std::pow(y_norm(f, Y), r) + std::pow(y_norm(g, Y), r)));
}

// ---------------------------------------------------------------------------
// quasi-norm axioms, property style

namespace {

std::vector<QuasiNormSpec> spec_zoo(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const std::size_t n = rows * cols;
  const auto w = oracle::random_positive(rng, n, 0.5, 2.0);
  std::vector<QuasiNormSpec> out;
  for (double p : {0.3, 0.5, 1.0, 2.0, inf}) {
    out.push_back(QuasiNormSpec::weighted_lp(p, w));
    for (double q : {0.5, 1.0, inf}) out.push_back(QuasiNormSpec::mixed(p, q, rows, cols, w));
  }
  out.push_back(QuasiNormSpec::lorentz(0.5, 0.5, w));
  out.push_back(QuasiNormSpec::lorentz(2.0, 2.0, w));
  out.push_back(QuasiNormSpec::lorentz(2.0, inf, w, 1.0));
  out.push_back(QuasiNormSpec::lorentz(1.0, 2.0, w, 0.5));
  out.push_back(QuasiNormSpec::lorentz(1.0, inf, w));
  out.push_back(QuasiNormSpec::lorentz(0.5, 2.0, w));
  return out;
}

}  // namespace

TEST(QuasiNormAxioms, RTriangleSolidityHomogeneity) {
  std::mt19937_64 rng(23);
  const auto specs = spec_zoo(5, 4, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& Y : specs) {
    const double r = Y.r_exponent(), K = Y.triangle_constant();
    for (int t = 0; t < 200; ++t) {
      const auto f = oracle::random_complex(rng, 20);
      const auto g = oracle::random_complex(rng, 20);
      std::vector<cplx> s(20), shrunk(20);
      for (int i = 0; i < 20; ++i) {
        s[i] = f[i] + g[i];
        shrunk[i] = f[i] * u(rng);
      }
      const double nf = y_norm(std::span<const cplx>(f), Y), ng = y_norm(std::span<const cplx>(g), Y);
      const double ns = y_norm(std::span<const cplx>(s), Y);
      const double rhs = std::pow(K, r) * (std::pow(nf, r) + std::pow(ng, r));
      EXPECT_LE(std::pow(ns, r), rhs * (1 + 1e-10));
      EXPECT_LE(y_norm(std::span<const cplx>(shrunk), Y), nf * (1 + 1e-12));
      const cplx c(-1.7, 0.4);
      std::vector<cplx> scaled(f);
      for (auto& z : scaled) z *= c;
      EXPECT_NEAR(y_norm(std::span<const cplx>(scaled), Y), std::abs(c) * nf, 1e-12 * std::abs(c) * nf);
    }
  }
}

// ---------------------------------------------------------------------------
// sequence spaces

TEST(SequenceNorm, Examples) {
  const std::vector<std::size_t> X{0};
  EXPECT_DOUBLE_EQ(sequence_norm(std::vector<double>{1.0}, X, 10, Neighborhood(1), QuasiNormSpec::weighted_lp(1.0)), 3.0);
  const std::vector<std::size_t> X3{1, 5, 9};
  EXPECT_EQ(sequence_norm(std::vector<double>{0, 0, 0}, X3, 12, Neighborhood(1), QuasiNormSpec::weighted_lp(0.5)), 0.0);
}

TEST(SequenceNorm, DisjointSupportsDirectSum) {
  std::mt19937_64 rng(24);
  GridGroup G(60);
  const auto w = Weight::polynomial(G, 1.0);
  const std::vector<double> wv(w.values().begin(), w.values().end());
  const std::vector<std::size_t> X{0, 7, 14, 21, 28, 35, 42, 49};  // spacing 7 > 2q+1 = 5
  const std::size_t q = 2;
  for (double p : {0.5, 1.0, 2.0}) {
    const auto lam = random_magnitudes(rng, X.size());
    double expect = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      double chi = 0;
      for (int u = -2; u <= 2; ++u) chi += std::pow(wv[oracle::mod(static_cast<std::int64_t>(X[i]) + u, 60)], p);
      expect += std::pow(lam[i], p) * chi;
    }
    expect = std::pow(expect, 1.0 / p);
    EXPECT_NEAR(sequence_norm(lam, X, 60, Neighborhood(q), QuasiNormSpec::weighted_lp(p, wv)), expect, 1e-12 * expect);
  }
}
