#pragma once

// Property suites run by `qbc verify`. Each property draws seeded random
// inputs, records the worst value of its check metric and compares it with
// a fixed limit. The report is a deterministic function of (suite, seed).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <random>
#include <string>
#include <vector>

#include "qbcoorbit/coorbit.hpp"
#include "qbcoorbit/gabor.hpp"
#include "qbcoorbit/grid.hpp"
#include "qbcoorbit/nterm.hpp"
#include "qbcoorbit/quasinorm.hpp"

#ifndef QBC_VERSION
#define QBC_VERSION "0.0.0"
#endif

namespace qbc::verify {

using nlohmann::json;

struct Property {
  std::string name;
  std::string metric;  // what `worst` measures; passes iff worst <= limit
  double limit = 0.0;
  std::size_t trials = 0;
  double worst = -INFINITY;
  json extra = json::object();

  void record(double value) {
    ++trials;
    worst = std::isnan(value) ? INFINITY : std::max(worst, value);  // NaN counts as a failure
  }
  bool pass() const { return worst <= limit; }

  json to_json() const {
    json j{{"name", name}, {"metric", metric}, {"trials", trials}, {"limit", limit},
           {"worst", std::isfinite(worst) ? json(worst) : json(worst > 0 ? "inf" : "-inf")}, {"pass", pass()}};
    if (!extra.empty()) j["details"] = extra;
    return j;
  }
};

namespace detail {

using Rng = std::mt19937_64;

inline std::vector<cplx> random_complex(Rng& rng, std::size_t n) {
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& z : v) {
    const double re = d(rng);
    z = cplx(re, d(rng));
  }
  return v;
}

inline std::vector<double> random_positive(Rng& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline Signal random_signal(Rng& rng, std::size_t L) { return Signal(GridGroup(L), random_complex(rng, L)); }

inline double rel(double got, double expect) { return std::abs(got - expect) / std::max(std::abs(expect), 1e-300); }

/// lhs <= rhs expressed as a relative excess (<= 0 when it holds).
inline double excess(double lhs, double rhs) { return rhs > 0.0 ? lhs / rhs - 1.0 : (lhs > 0.0 ? INFINITY : 0.0); }

inline std::vector<QuasiNormSpec> spec_zoo(std::size_t rows, std::size_t cols, const std::vector<double>& w) {
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

inline std::string spec_label(const QuasiNormSpec& Y) {
  auto num = [](double x) { return std::isinf(x) ? std::string("inf") : json(x).dump(); };
  switch (Y.kind) {
    case NormKind::WeightedLp: return "lp(" + num(Y.p) + ")";
    case NormKind::Mixed: return "mixed(" + num(Y.p) + "," + num(Y.q) + ")";
    case NormKind::Lorentz:
      return "lorentz(" + num(Y.p) + "," + num(Y.q) + (Y.r ? "," + num(*Y.r) : std::string()) + ")";
  }
  return "?";
}

/// F**-based maximal norm by enumerating every subset (length <= 12).
inline double maximal_by_subsets(const std::vector<double>& v, double p, double q, double r) {
  const std::size_t K = v.size();
  std::vector<double> best(K, 0.0);
  for (std::uint32_t mask = 1; mask < (1u << K); ++mask) {
    double s = 0;
    std::size_t card = 0;
    for (std::size_t i = 0; i < K; ++i) {
      if (mask & (1u << i)) {
        s += std::pow(v[i], r);
        ++card;
      }
    }
    const double mean = std::pow(s / static_cast<double>(card), 1.0 / r);
    for (std::size_t n = 0; n < card; ++n) best[n] = std::max(best[n], mean);
  }
  if (std::isinf(q)) {
    double m = 0;
    for (std::size_t n = 1; n <= K; ++n) m = std::max(m, std::pow(double(n), 1.0 / p) * best[n - 1]);
    return m;
  }
  double s = 0;
  for (std::size_t n = 1; n <= K; ++n) s += std::pow(best[n - 1], q) * (std::pow(double(n), q / p) - std::pow(double(n - 1), q / p));
  return std::pow(s, 1.0 / q);
}

inline std::vector<std::size_t> random_dense_points(Rng& rng, std::size_t L, std::size_t radius) {
  std::uniform_int_distribution<std::size_t> gap(1, 2 * radius + 1);
  std::vector<std::size_t> pts;
  for (std::size_t x = gap(rng) - 1; x < L; x += gap(rng)) pts.push_back(x);
  while (pts.front() + L - pts.back() > 2 * radius + 1) pts.push_back(std::min(pts.back() + 2 * radius + 1, L - 1));
  return pts;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline std::vector<Property> norms_suite(std::uint64_t seed) {
  detail::Rng rng(seed);
  std::vector<Property> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t rows = 5, cols = 4, n = rows * cols;
  const auto w = detail::random_positive(rng, n, 0.5, 2.0);
  const auto zoo = detail::spec_zoo(rows, cols, w);

  Property tri{"p_triangle", "N(f+g)^r / (K^r (N(f)^r + N(g)^r)) - 1", 1e-10};
  Property solid{"solidity", "N(f') / N(f) - 1 for |f'| <= |f|", 1e-12};
  Property homog{"homogeneity", "|N(c f) - |c| N(f)| / (|c| N(f))", 1e-12};
  json configs = json::array();
  for (const auto& Y : zoo) {
    const double r = Y.r_exponent(), K = Y.triangle_constant();
    configs.push_back({{"spec", detail::spec_label(Y)}, {"r", r}, {"K", K}});
    for (int t = 0; t < 1000; ++t) {
      const auto f = detail::random_complex(rng, n);
      const auto g = detail::random_complex(rng, n);
      std::vector<cplx> s(n), shrunk(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = f[i] + g[i];
        shrunk[i] = f[i] * unit(rng);
      }
      const double nf = y_norm(std::span<const cplx>(f), Y), ng = y_norm(std::span<const cplx>(g), Y);
      tri.record(detail::excess(std::pow(y_norm(std::span<const cplx>(s), Y), r),
                                std::pow(K, r) * (std::pow(nf, r) + std::pow(ng, r))));
      solid.record(detail::excess(y_norm(std::span<const cplx>(shrunk), Y), nf));
      const cplx c(3.0 * unit(rng) + 0.01, -unit(rng));
      std::vector<cplx> scaled(f);
      for (auto& z : scaled) z *= c;
      homog.record(detail::rel(y_norm(std::span<const cplx>(scaled), Y), std::abs(c) * nf));
    }
  }
  tri.extra["configurations"] = configs;
  out.push_back(tri);
  out.push_back(solid);
  out.push_back(homog);

  // One nonzero entry c at position i: the norm equals |c| m(i) (maximal forms
  // spread a single entry over the whole profile and are left out).
  Property single{"weighted_single_entry", "relative error against |c| m(i)", 1e-12};
  for (const auto& Y : zoo) {
    if (Y.r) continue;
    for (int t = 0; t < 50; ++t) {
      const std::size_t i = rng() % n;
      std::vector<cplx> v(n, 0.0);
      v[i] = detail::random_complex(rng, 1)[0];
      single.record(detail::rel(y_norm(std::span<const cplx>(v), Y), std::abs(v[i]) * w[i]));
    }
  }
  out.push_back(single);

  Property ident{"lorentz_equals_lp", "relative gap between L(p,p) and weighted l^p", 1e-12};
  for (double p : {0.5, 1.0, 2.0}) {
    for (int t = 0; t < 1000; ++t) {
      const std::size_t len = 1 + rng() % 64;
      const auto v = detail::random_complex(rng, len);
      const auto m = detail::random_positive(rng, len, 0.5, 2.0);
      ident.record(detail::rel(lorentz_star_norm(std::span<const cplx>(v), p, p, m),
                               y_norm(std::span<const cplx>(v), QuasiNormSpec::weighted_lp(p, m))));
    }
  }
  out.push_back(ident);

  const double hunt = 2.0;  // (p/(p-r))^{1/r} at p = 2, r = 1
  Property sandwich{"hunt_sandwich", "max(star/maximal, maximal/(C star)) - 1, p=2 r=1 q=inf", 1e-12};
  Property brute{"maximal_subset_oracle", "relative error against subset enumeration (length <= 8)", 1e-12};
  for (int t = 0; t < 1000; ++t) {
    const std::size_t len = 1 + rng() % 64;
    const auto v = detail::random_positive(rng, len, 0.0, 1.0);
    const double star = lorentz_star_norm(std::span<const double>(v), 2.0, inf);
    const double maxi = lorentz_maximal_norm(std::span<const double>(v), 2.0, inf, 1.0);
    sandwich.record(std::max(detail::excess(star, maxi), detail::excess(maxi, hunt * star)));
    if (t < 300) {
      const std::size_t small = 1 + rng() % 8;
      const auto u = detail::random_positive(rng, small, 0.0, 1.0);
      brute.record(detail::rel(lorentz_maximal_norm(std::span<const double>(u), 2.0, inf, 1.0),
                               detail::maximal_by_subsets(u, 2.0, inf, 1.0)));
    }
  }
  sandwich.extra["constant"] = hunt;
  out.push_back(sandwich);
  out.push_back(brute);

  Property conv{"convolution_inequality", "||F*G|| / (||F|| ||G||) - 1 on Z_64, l^p_w", 1e-10};
  GridGroup Z(64);
  for (double s : {0.0, 2.0}) {
    const auto ws = Weight::polynomial(Z, s);
    const std::vector<double> wv(ws.values().begin(), ws.values().end());
    for (double p : {0.5, 0.8, 1.0}) {
      const auto Y = QuasiNormSpec::weighted_lp(p, wv);
      for (int t = 0; t < 1000; ++t) {
        const auto F = detail::random_signal(rng, 64), G = detail::random_signal(rng, 64);
        conv.record(detail::excess(y_norm(convolve(F, G), Y), y_norm(F, Y) * y_norm(G, Y)));
      }
    }
  }
  out.push_back(conv);

  Property weak{"weak_embedding", "weakNorm / ||.|l^p_m|| - 1", 1e-12};
  const Lattice lat{24, 3, 8};
  for (int t = 0; t < 200; ++t) {
    const CoefficientGrid c(lat, detail::random_complex(rng, lat.size()));
    const auto m = detail::random_positive(rng, lat.size(), 0.5, 2.0);
    for (double p : {0.4, 1.0, 1.7}) {
      weak.record(detail::excess(weak_norm(c, p, m), y_norm(c.values(), QuasiNormSpec::weighted_lp(p, m))));
    }
  }
  out.push_back(weak);
  return out;
}

inline std::vector<Property> frames_suite(std::uint64_t seed) {
  detail::Rng rng(seed);
  std::vector<Property> out;

  const GaborSystem sys(gaussian_window(128), 4, 16);
  const auto fd = frame_operator(sys);
  const auto dense = canonical_dual_dense(sys, fd);
  const auto dsys = sys.with_window(dense.dual);

  Property recon{"reconstruction", "||idgt_gamma(dgt_g f) - f|| / ||f||, L=128 a=4 M=16", 1e-10};
  for (int t = 0; t < 100; ++t) {
    const auto f = detail::random_signal(rng, 128);
    recon.record(norm2(idgt(dgt(f, sys), dsys) - f) / norm2(f));
  }
  recon.extra = {{"A", fd.lower}, {"B", fd.upper}};
  out.push_back(recon);

  Property neumann{"neumann_vs_dense_dual", "||gamma_neumann - gamma_dense|| / ||gamma_dense||", 1e-8};
  const auto nd = canonical_dual_neumann(sys, fd, {100000, 1e-13});
  neumann.record(norm2(nd.dual - dense.dual) / norm2(dense.dual));
  neumann.extra = {{"iterations", nd.iterations}, {"predicted_rate", fd.neumann_rate()}};
  out.push_back(neumann);

  Property bounds{"frame_bounds", "Rayleigh quotient outside [A, B], relative", 1e-8};
  for (int t = 0; t < 100; ++t) {
    const auto v = detail::random_signal(rng, 128);
    const double rq = std::pow(norm2(dgt(v, sys).values()), 2) / std::pow(norm2(v), 2);
    bounds.record(std::max(fd.lower / rq - 1.0, rq / fd.upper - 1.0));
  }
  out.push_back(bounds);

  Property twopath{"dgt_two_path", "relative difference FFT vs direct sum, all divisor pairs", 1e-10};
  for (std::size_t L : {60, 256}) {
    const auto f = detail::random_signal(rng, L), g = detail::random_signal(rng, L);
    for (std::size_t a = 1; a <= L; ++a) {
      if (L % a) continue;
      for (std::size_t M = 1; M <= L; ++M) {
        if (L % M) continue;
        const GaborSystem s(g, a, M);
        const auto c1 = dgt(f, s), c2 = dgt_direct(f, s);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < c1.size(); ++i) {
          num += std::norm(c1.values()[i] - c2.values()[i]);
          den += std::norm(c2.values()[i]);
        }
        twopath.record(std::sqrt(num / den));
      }
    }
  }
  out.push_back(twopath);

  Property indep{"window_independence", "max/min of modulation-norm ratio, Gaussian vs raised cosine", 50.0};
  const GaborSystem rc = sys.with_window(raised_cosine_window(128, 32));
  const auto rsys = rc.with_window(canonical_dual(rc));
  json brackets = json::array();
  const std::pair<double, double> pqs[] = {{0.5, 0.5}, {1.0, 2.0}, {2.0, inf}};
  std::vector<Signal> fs;
  for (int t = 0; t < 100; ++t) fs.push_back(detail::random_signal(rng, 128));
  for (auto [p, q] : pqs) {
    double lo = INFINITY, hi = 0;
    for (const auto& f : fs) {
      const double ratio = coefficient_norm(dgt(f, dsys), p, q) / coefficient_norm(dgt(f, rsys), p, q);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    indep.record(hi / lo);
    brackets.push_back({{"p", p}, {"q", std::isinf(q) ? json("inf") : json(q)}, {"min_ratio", lo}, {"max_ratio", hi}});
  }
  indep.trials = fs.size() * std::size(pqs);
  indep.extra["brackets"] = brackets;
  out.push_back(indep);
  return out;
}

inline std::vector<Property> coorbit_suite(std::uint64_t seed) {
  detail::Rng rng(seed);
  std::vector<Property> out;

  Property part{"bupu_partition", "max |sum_i psi_i - 1| plus support violations, Z_64", 0.0};
  for (int t = 0; t < 50; ++t) {
    const PointSet X(GridGroup(64), detail::random_dense_points(rng, 64, 3));
    const auto bupu = build_bupu(X, Neighborhood(3));
    std::vector<double> sum(64, 0.0);
    double bad = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      for (auto x : bupu.support(i)) {
        sum[x] += 1.0;
        if (X.group().distance(std::int64_t(x) - std::int64_t(X[i])) > 3) bad += 1;
      }
    }
    for (double s : sum) bad = std::max(bad, std::abs(s - 1.0));
    part.record(bad);
  }
  out.push_back(part);

  const std::size_t L = 256;
  GridGroup Z(L);
  const auto g = gaussian_window(L);
  const auto autocorr = convolve(g, involution(g));
  const auto Y08 = QuasiNormSpec::weighted_lp(0.8);

  Property decay{"oscillation_decay", "increase of ||G#_U|W|| along U = 8,4,2,1,0 plus value at 0", 0.0};
  json chain = json::array();
  double prev = INFINITY;
  for (std::size_t r : {8, 4, 2, 1, 0}) {
    const double v = amalgam_norm(std::span<const double>(oscillation(autocorr, Neighborhood(r))), Neighborhood(2), Y08);
    decay.record(std::isinf(prev) ? 0.0 : std::max(0.0, v - prev));
    chain.push_back({{"radius", r}, {"norm", v}});
    prev = v;
  }
  decay.record(prev);
  decay.extra["chain"] = chain;
  out.push_back(decay);

  Property gap{"gap_probe", "empirical ||(T - T_Psi)F|| / ||F|| over gapBound - 1", 1e-10};
  {
    const std::size_t Ls = 64;
    GridGroup Zs(Ls);
    const auto gs = gaussian_window(Ls);
    const auto G = convolve(gs, involution(gs));
    const auto wp = Weight::polynomial(Zs, 1.0);
    const auto Y = QuasiNormSpec::weighted_lp(0.8, {wp.values().begin(), wp.values().end()});
    for (std::size_t r : {1, 2, 4}) {
      const auto bupu = build_bupu(PointSet::regular(Zs, 2 * r + 1), Neighborhood(r));
      const double bound = gap_bound(G, Neighborhood(r), Y, Neighborhood(2));
      for (int t = 0; t < 100; ++t) {
        const auto F = detail::random_signal(rng, Ls);
        gap.record(detail::excess(amalgam_norm(convolve(F, G) - apply_tpsi(F, G, bupu), Neighborhood(2), Y),
                                  bound * amalgam_norm(F, Neighborhood(2), Y)));
      }
    }
  }
  out.push_back(gap);

  // Band-limited reproducing kernel: T = Id on its range, so T - T_Psi drives the Neumann residual.
  const auto G = band_limited_kernel(Z, 2);
  const Neighborhood U(2), Q(2);
  const auto bupu = build_bupu(PointSet::regular(Z, 5), U);
  const double bound = gap_bound(G, U, Y08, Q);
  Property ratio{"neumann_ratio", "measured residual ratio past step 2 minus (gapBound + 0.05)", 0.0};
  Property recon{"decomposition_residual", "sup |F - sum lambda_i L_{x_i} G|", 1e-8};
  std::size_t max_iter = 0;
  double worst_ratio = 0;
  for (int t = 0; t < 20; ++t) {
    Signal F(Z);
    for (int j = 0; j < 4; ++j) F += detail::random_complex(rng, 1)[0] * translate(G, std::int64_t(rng() % L));
    const auto dec = atomic_decompose(F, G, bupu, {1e-10, 200, std::make_pair(Q, Y08)});
    const double rmax = dec.max_ratio(2, true);
    worst_ratio = std::max(worst_ratio, rmax);
    ratio.record(rmax - (bound + 0.05));
    recon.record(sup_norm(synthesize(dec.coefficients, bupu.points(), G) - F));
    max_iter = std::max(max_iter, dec.iterations);
  }
  ratio.extra = {{"gap_bound", bound}, {"max_measured_ratio", worst_ratio}, {"max_iterations", max_iter}};
  out.push_back(ratio);
  out.push_back(recon);

  Property sampling{"sampling_bound", "sampledNorm / (C amalgamNorm) - 1", 1e-12};
  Property analysis{"analysis_bound", "sequenceNorm(<F,psi_i>) / (C amalgamNorm(F, Q+U)) - 1", 1e-12};
  Property synthesis{"synthesis_bound", "amalgamNorm(sum lambda_i L_{x_i} G) / (C sequenceNorm) - 1", 1e-12};
  {
    const std::size_t Ls = 48;
    GridGroup Zs(Ls);
    const auto wp = Weight::polynomial(Zs, 1.0);
    const auto Y = QuasiNormSpec::weighted_lp(0.7, {wp.values().begin(), wp.values().end()});
    const PointSet X(Zs, detail::random_dense_points(rng, Ls, 2));
    const Neighborhood Qs(1), Us(2);
    const auto b = build_bupu(X, Us);
    const auto gs = gaussian_window(Ls);
    const auto Gs = convolve(gs, involution(gs));
    const double Cs = sampling_constant(X, Qs), Ca = analysis_constant(b, Qs), Cy = synthesis_constant(Gs, Qs, Y);
    for (int t = 0; t < 1000; ++t) {
      const auto F = detail::random_signal(rng, Ls);
      sampling.record(detail::excess(sampled_norm(F, X, Qs, Y), Cs * amalgam_norm(F, Qs, Y)));
      if (t < 200) {
        const auto c = b.coefficients(F);
        analysis.record(detail::excess(sequence_norm(std::span<const cplx>(c), X.points(), Ls, Qs, Y),
                                       Ca * amalgam_norm(F, Neighborhood(Qs.radius() + Us.radius()), Y)));
        const auto lambda = detail::random_complex(rng, X.size());
        synthesis.record(detail::excess(amalgam_norm(synthesize(lambda, X, Gs), Qs, Y),
                                        Cy * sequence_norm(std::span<const cplx>(lambda), X.points(), Ls, Qs, Y)));
      }
    }
    sampling.extra["C"] = Cs;
    analysis.extra["C"] = Ca;
    synthesis.extra["C"] = Cy;
  }
  out.push_back(sampling);
  out.push_back(analysis);
  out.push_back(synthesis);
  return out;
}

inline std::vector<Property> nterm_suite(std::uint64_t seed) {
  detail::Rng rng(seed);
  std::vector<Property> out;

  const Lattice lat{128, 4, 16};
  const auto c = power_law_grid(lat, 0.5);
  std::vector<std::size_t> ns(lat.size() + 1);
  for (std::size_t i = 0; i < ns.size(); ++i) ns[i] = i;
  const auto curve = decay_curve(c, 0.5, 2.0, {}, ns);

  Property slope{"power_law_slope", "|fitted slope + 1.5|, k^{-1/p} grid, p=0.5 q=2", 0.1};
  slope.record(std::abs(curve.fitted_slope + 1.5));
  slope.extra = {{"slope", curve.fitted_slope}, {"alpha_ref", curve.reference_alpha}, {"fit_points", curve.fit_points}};
  out.push_back(slope);

  Property rate{"rate_bound", "sigma_n n^alpha / (C_impl weakNorm) - 1", 1e-10};
  Property mono{"monotone", "max_n sigma_{n+1} - sigma_n", 0.0};
  auto absorb = [&](const NTermCurve& cv) {
    rate.record(cv.worst_rate_ratio - 1.0);
    for (std::size_t i = 1; i < cv.errors.size(); ++i) mono.record(cv.errors[i] - cv.errors[i - 1]);
  };
  absorb(curve);
  const Lattice small{48, 4, 12};
  std::vector<std::size_t> ns2(small.size() + 1);
  for (std::size_t i = 0; i < ns2.size(); ++i) ns2[i] = i;
  const auto wl = lattice_weight(small, 0.5);
  for (int t = 0; t < 20; ++t) {
    const CoefficientGrid r(small, detail::random_complex(rng, small.size()));
    for (auto [p, q] : {std::pair{0.5, 2.0}, {1.0, 3.0}, {0.3, inf}}) absorb(decay_curve(r, p, q, wl, ns2));
  }
  rate.extra["C_impl"] = curve.rate_constant;
  out.push_back(rate);
  out.push_back(mono);

  Property greedy{"greedy_optimality", "greedy tail / best tail over all n-subsets - 1 (12 coefficients)", 1e-12};
  const Lattice tiny{12, 3, 3};
  for (int t = 0; t < 5; ++t) {
    const CoefficientGrid g(tiny, detail::random_complex(rng, 12));
    const auto m = detail::random_positive(rng, 12, 0.5, 2.0);
    for (double q : {0.5, 2.0}) {
      const auto tails = tail_norms(g, q, m);
      for (std::size_t n = 0; n < 12; ++n) {
        double best = INFINITY;
        for (std::uint32_t mask = 0; mask < (1u << 12); ++mask) {
          if (static_cast<std::size_t>(std::popcount(mask)) != n) continue;
          double s = 0;
          for (std::size_t i = 0; i < 12; ++i) {
            if (!(mask & (1u << i))) s += std::pow(std::abs(g.values()[i]) * m[i], q);
          }
          best = std::min(best, std::pow(s, 1.0 / q));
        }
        greedy.record(detail::excess(tails[n], best));
      }
    }
  }
  out.push_back(greedy);
  return out;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"norms", "frames", "coorbit", "nterm"};
  return names;
}

struct Report {
  json doc;
  bool pass = true;
};

/// suite is one of suite_names() or "all".
inline Report run(const std::string& suite, std::uint64_t seed) {
  std::vector<std::string> selected;
  if (suite == "all") {
    selected = suite_names();
  } else if (std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end()) {
    selected = {suite};
  } else {
    throw Error(Errc::BadParams, "unknown suite '" + suite + "'");
  }
  Report rep;
  rep.doc = {{"version", QBC_VERSION}, {"seed", seed}, {"config", {{"suite", suite}, {"seed", seed}}}};
  json suites = json::array();
  for (const auto& name : selected) {
    // each suite gets its own stream so "all" and a single suite agree
    std::vector<Property> props;
    if (name == "norms") props = norms_suite(seed);
    else if (name == "frames") props = frames_suite(seed);
    else if (name == "coorbit") props = coorbit_suite(seed);
    else props = nterm_suite(seed);
    json list = json::array();
    bool ok = true;
    for (const auto& p : props) {
      list.push_back(p.to_json());
      ok = ok && p.pass();
    }
    suites.push_back({{"name", name}, {"pass", ok}, {"properties", list}});
    rep.pass = rep.pass && ok;
  }
  rep.doc["suites"] = suites;
  rep.doc["pass"] = rep.pass;
  return rep;
}

}  // namespace qbc::verify
