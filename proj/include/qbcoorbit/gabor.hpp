#pragma once

// Discrete Gabor transform on Z_L over the separable lattice
// {(n a, m L/M)}, the frame operator, canonical dual windows, and
// modulation-space quasi-norms measured on coefficient grids.

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
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

struct Lattice {
  std::size_t L = 0;
  std::size_t a = 0;  // time step
  std::size_t M = 0;  // number of frequency channels

  std::size_t time_shifts() const noexcept { return L / a; }
  std::size_t freq_step() const noexcept { return L / M; }
  std::size_t size() const noexcept { return time_shifts() * M; }
  double redundancy() const noexcept { return static_cast<double>(M) / static_cast<double>(a); }

  void validate() const {
    if (L < 2 || a == 0 || M == 0) throw Error(Errc::BadParams, "lattice needs L >= 2, a >= 1, M >= 1");
    if (L % a != 0) throw Error(Errc::BadParams, "time step a must divide L");
    if (L % M != 0) throw Error(Errc::BadParams, "channel count M must divide L");
  }

  friend bool operator==(const Lattice&, const Lattice&) = default;
};

class GaborSystem {
 public:
  GaborSystem(Signal window, std::size_t a, std::size_t M)
      : window_(std::move(window)), lattice_{window_.size(), a, M} {
    lattice_.validate();
    if (norm2(window_) == 0.0) throw Error(Errc::BadParams, "window has zero energy");
  }

  const Signal& window() const noexcept { return window_; }
  const GridGroup& group() const noexcept { return window_.group(); }
  const Lattice& lattice() const noexcept { return lattice_; }
  std::size_t L() const noexcept { return lattice_.L; }
  std::size_t a() const noexcept { return lattice_.a; }
  std::size_t M() const noexcept { return lattice_.M; }
  std::size_t N() const noexcept { return lattice_.time_shifts(); }

  /// Same lattice, different window.
  GaborSystem with_window(Signal window) const { return GaborSystem(std::move(window), a(), M()); }

 private:
  Signal window_;
  Lattice lattice_;
};

/// N x M coefficients c[n, m], time index outer.
class CoefficientGrid {
 public:
  explicit CoefficientGrid(Lattice lattice)
      : lattice_(lattice), data_(lattice.time_shifts() * lattice.M) {
    lattice_.validate();
  }

  CoefficientGrid(Lattice lattice, std::vector<cplx> data) : lattice_(lattice), data_(std::move(data)) {
    lattice_.validate();
    if (data_.size() != lattice_.size()) throw Error(Errc::ShapeMismatch, "coefficient count != N*M");
  }

  const Lattice& lattice() const noexcept { return lattice_; }
  std::size_t N() const noexcept { return lattice_.time_shifts(); }
  std::size_t M() const noexcept { return lattice_.M; }
  std::size_t size() const noexcept { return data_.size(); }

  cplx operator()(std::size_t n, std::size_t m) const { return data_[n * lattice_.M + m]; }
  cplx& operator()(std::size_t n, std::size_t m) { return data_[n * lattice_.M + m]; }

  std::span<const cplx> values() const noexcept { return data_; }
  std::span<cplx> values() noexcept { return data_; }

  friend bool operator==(const CoefficientGrid&, const CoefficientGrid&) = default;

 private:
  Lattice lattice_;
  std::vector<cplx> data_;
};

namespace detail {

/// Length-n complex DFT plan with its own aligned buffers.
class FftPlan {
 public:
  FftPlan(std::size_t n, int sign) : n_(n) {
    in_ = fftw_alloc_complex(n_);
    out_ = fftw_alloc_complex(n_);
    plan_ = fftw_plan_dft_1d(static_cast<int>(n_), in_, out_, sign, FFTW_ESTIMATE);
    if (plan_ == nullptr) throw Error(Errc::BadParams, "FFT plan creation failed");
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }

  std::span<cplx> input() noexcept { return {reinterpret_cast<cplx*>(in_), n_}; }
  std::span<const cplx> output() const noexcept { return {reinterpret_cast<const cplx*>(out_), n_}; }
  void execute() noexcept { fftw_execute(plan_); }

 private:
  std::size_t n_;
  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

inline void require_on_system(const Signal& f, const GaborSystem& sys) {
  require_same_group(f.group(), sys.group());
}

}  // namespace detail

/// c[n,m] = sum_l f[l] conj(g[l - n a]) exp(-2 pi i m l / M) via folding each
/// windowed slice to length M followed by a length-M FFT.
inline CoefficientGrid dgt(const Signal& f, const GaborSystem& sys) {
  detail::require_on_system(f, sys);
  const std::size_t L = sys.L(), a = sys.a(), M = sys.M(), N = sys.N();
  const auto& g = sys.window();
  CoefficientGrid c(sys.lattice());
  detail::FftPlan plan(M, FFTW_FORWARD);
  auto buf = plan.input();
  for (std::size_t n = 0; n < N; ++n) {
    std::fill(buf.begin(), buf.end(), cplx{0.0});
    const std::size_t shift = n * a;
    for (std::size_t l = 0; l < L; ++l) buf[l % M] += f[l] * std::conj(g[(l + L - shift) % L]);
    plan.execute();
    auto out = plan.output();
    std::copy(out.begin(), out.end(), &c(n, 0));
  }
  return c;
}

/// Same coefficients by the O(L N M) double sum. Independent of the FFT path.
inline CoefficientGrid dgt_direct(const Signal& f, const GaborSystem& sys) {
  detail::require_on_system(f, sys);
  const std::size_t L = sys.L(), a = sys.a(), M = sys.M(), N = sys.N();
  const auto& g = sys.window();
  std::vector<cplx> twiddle(M);
  for (std::size_t k = 0; k < M; ++k) {
    twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(M));
  }
  CoefficientGrid c(sys.lattice());
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t m = 0; m < M; ++m) {
      cplx s = 0.0;
      for (std::size_t l = 0; l < L; ++l) s += f[l] * std::conj(g[(l + L - n * a) % L]) * twiddle[(m * l) % M];
      c(n, m) = s;
    }
  }
  return c;
}

/// f = sum_{n,m} c[n,m] M_{m L/M} T_{n a} g (adjoint of dgt).
inline Signal idgt(const CoefficientGrid& c, const GaborSystem& sys) {
  if (c.lattice() != sys.lattice()) throw Error(Errc::ShapeMismatch, "coefficient lattice differs from system");
  const std::size_t L = sys.L(), a = sys.a(), M = sys.M(), N = sys.N();
  const auto& g = sys.window();
  Signal f(sys.group());
  detail::FftPlan plan(M, FFTW_BACKWARD);
  auto buf = plan.input();
  for (std::size_t n = 0; n < N; ++n) {
    const auto row = c.values().subspan(n * M, M);
    std::copy(row.begin(), row.end(), buf.begin());
    plan.execute();
    auto u = plan.output();
    const std::size_t shift = n * a;
    for (std::size_t l = 0; l < L; ++l) f[l] += g[(l + L - shift) % L] * u[l % M];
  }
  return f;
}

// ---------------------------------------------------------------------------
// Frame operator and duals

struct FrameData {
  Eigen::MatrixXcd S;
  double lower = 0.0;  // A
  double upper = 0.0;  // B
  std::optional<Signal> dual;
  std::optional<Signal> tight_window;

  double neumann_rate() const noexcept { return (upper - lower) / (upper + lower); }
};

inline constexpr std::size_t kDenseFrameLimit = 4096;
inline constexpr double kNotAFrameRatio = 1e-10;

/// S[k,l] = M sum_n g[k - n a] conj(g[l - n a]) when k = l mod M, else 0.
inline Eigen::MatrixXcd frame_matrix(const GaborSystem& sys) {
  const std::size_t L = sys.L(), a = sys.a(), M = sys.M(), N = sys.N();
  if (L > kDenseFrameLimit) throw Error(Errc::BadParams, "dense frame operator limited to L <= 4096");
  const auto& g = sys.window();
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
  for (std::size_t k = 0; k < L; ++k) {
    for (std::size_t l = k % M; l < L; l += M) {
      cplx s = 0.0;
      for (std::size_t n = 0; n < N; ++n) s += g[(k + L - n * a) % L] * std::conj(g[(l + L - n * a) % L]);
      S(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = static_cast<double>(M) * s;
    }
  }
  return S;
}

inline Signal apply_frame_operator(const Signal& f, const GaborSystem& sys) { return idgt(dgt(f, sys), sys); }

/// Builds S and its extreme eigenvalues; also derives the canonical dual and
/// the canonical tight window S^{-1/2} g from the same eigendecomposition.
/// Throws NotAFrameError when A <= eps_ratio * B.
inline FrameData frame_operator(const GaborSystem& sys, double eps_ratio = kNotAFrameRatio) {
  FrameData fd;
  fd.S = frame_matrix(sys);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(fd.S);
  if (eig.info() != Eigen::Success) throw Error(Errc::BadParams, "eigensolver failed");
  const auto& ev = eig.eigenvalues();
  fd.lower = ev.minCoeff();
  fd.upper = ev.maxCoeff();
  if (!(fd.lower > eps_ratio * fd.upper)) {
    throw NotAFrameError(fd.lower, fd.upper,
                         "lower frame bound " + std::to_string(fd.lower) + " <= " + std::to_string(eps_ratio) +
                             " * upper bound " + std::to_string(fd.upper));
  }
  const auto L = static_cast<Eigen::Index>(sys.L());
  Eigen::VectorXcd g(L);
  for (Eigen::Index i = 0; i < L; ++i) g(i) = sys.window()[static_cast<std::size_t>(i)];
  const auto& V = eig.eigenvectors();
  const Eigen::VectorXcd coeffs = V.adjoint() * g;
  const Eigen::VectorXcd tight = V * (coeffs.array() / ev.array().sqrt()).matrix();
  Signal t(sys.group());
  for (Eigen::Index i = 0; i < L; ++i) t[static_cast<std::size_t>(i)] = tight(i);
  fd.tight_window = std::move(t);
  return fd;
}

enum class DualMethod { DenseSolve, Neumann };

struct NeumannOptions {
  std::size_t max_iter = 100000;
  double tol = 1e-10;
};

struct DualResult {
  Signal dual;
  std::size_t iterations = 0;
  double relative_residual = 0.0;  // ||S gamma - g|| / ||g||
  std::vector<double> residual_history;
};

/// gamma = S^{-1} g by Cholesky on the dense frame operator.
inline DualResult canonical_dual_dense(const GaborSystem& sys, const FrameData& fd) {
  const auto L = static_cast<Eigen::Index>(sys.L());
  Eigen::VectorXcd g(L);
  for (Eigen::Index i = 0; i < L; ++i) g(i) = sys.window()[static_cast<std::size_t>(i)];
  Eigen::LLT<Eigen::MatrixXcd> llt(fd.S);
  if (llt.info() != Eigen::Success) throw NotAFrameError(fd.lower, fd.upper, "frame operator is not positive definite");
  const Eigen::VectorXcd gamma = llt.solve(g);
  DualResult out{Signal(sys.group()), 0, 0.0, {}};
  for (Eigen::Index i = 0; i < L; ++i) out.dual[static_cast<std::size_t>(i)] = gamma(i);
  out.relative_residual = (fd.S * gamma - g).norm() / g.norm();
  return out;
}

/// Richardson / von Neumann iteration gamma_{k+1} = gamma_k + 2/(A+B) (g - S gamma_k),
/// with S applied matrix-free as idgt(dgt(.)).
/// Raises NeumannStalled when the residual misses the predicted contraction
/// (B-A)/(B+A) by more than 10% for 10 consecutive steps.
inline DualResult canonical_dual_neumann(const GaborSystem& sys, const FrameData& fd, NeumannOptions opts = {}) {
  const Signal& g = sys.window();
  const double relax = 2.0 / (fd.lower + fd.upper);
  const double predicted = fd.neumann_rate();
  const double gnorm = norm2(g);
  Signal gamma(sys.group());
  Signal residual = g;
  DualResult out{Signal(sys.group()), 0, 1.0, {1.0}};
  std::size_t misses = 0;
  for (std::size_t k = 1; k <= opts.max_iter; ++k) {
    gamma += relax * residual;
    residual = g - apply_frame_operator(gamma, sys);
    const double rel = norm2(residual) / gnorm;
    const double ratio = rel / out.residual_history.back();
    out.residual_history.push_back(rel);
    out.iterations = k;
    out.relative_residual = rel;
    if (rel <= opts.tol) {
      out.dual = std::move(gamma);
      return out;
    }
    misses = ratio > 1.1 * predicted ? misses + 1 : 0;
    if (misses >= 10) {
      throw Error(Errc::NeumannStalled, "residual ratio " + std::to_string(ratio) + " vs predicted " +
                                            std::to_string(predicted) + " at iteration " + std::to_string(k));
    }
  }
  throw Error(Errc::MaxIterExceeded, "Neumann dual did not reach tolerance in " + std::to_string(opts.max_iter) +
                                         " iterations");
}

inline Signal canonical_dual(const GaborSystem& sys, DualMethod method = DualMethod::DenseSolve,
                             NeumannOptions opts = {}) {
  const FrameData fd = frame_operator(sys);
  return method == DualMethod::DenseSolve ? canonical_dual_dense(sys, fd).dual
                                          : canonical_dual_neumann(sys, fd, opts).dual;
}

// ---------------------------------------------------------------------------
// Windows and lattice weights

/// Periodized exp(-pi (l - L/2)^2 / L), unit l^2 norm.
inline Signal gaussian_window(std::size_t L) {
  GridGroup G(L);
  const double dL = static_cast<double>(L);
  std::vector<double> v(L, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    double s = 0.0;
    // Periods beyond |k| = 3 are below double resolution for every L >= 2.
    for (int k = -3; k <= 3; ++k) {
      const double t = static_cast<double>(l) - dL / 2.0 + k * dL;
      s += std::exp(-std::numbers::pi * t * t / dL);
    }
    v[l] = s;
  }
  double e = 0.0;
  for (double x : v) e += x * x;
  for (double& x : v) x /= std::sqrt(e);
  return Signal::from_real(G, v);
}

/// cos^2 bump of the given width centred at L/2, unit l^2 norm.
inline Signal raised_cosine_window(std::size_t L, std::size_t width) {
  GridGroup G(L);
  if (width < 2 || width > L) throw Error(Errc::BadParams, "raised cosine width must lie in [2, L]");
  const double half = static_cast<double>(width) / 2.0;
  std::vector<double> v(L, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    const double t = static_cast<double>(l) - static_cast<double>(L) / 2.0;
    if (std::abs(t) < half) {
      const double c = std::cos(std::numbers::pi * t / static_cast<double>(width));
      v[l] = c * c;
    }
  }
  double e = 0.0;
  for (double x : v) e += x * x;
  for (double& x : v) x /= std::sqrt(e);
  return Signal::from_real(G, v);
}

/// m_s(ak, bj) = (1 + d(ak,0)^2 + d(bj,0)^2)^{s/2}, circular distances on Z_L,
/// laid out like a CoefficientGrid.
inline std::vector<double> lattice_weight(const Lattice& lat, double s) {
  lat.validate();
  GridGroup G(lat.L);
  const std::size_t N = lat.time_shifts(), M = lat.M, b = lat.freq_step();
  std::vector<double> w(N * M);
  for (std::size_t n = 0; n < N; ++n) {
    const double dt = static_cast<double>(G.distance(static_cast<std::int64_t>(n * lat.a)));
    for (std::size_t m = 0; m < M; ++m) {
      const double df = static_cast<double>(G.distance(static_cast<std::int64_t>(m * b)));
      w[n * M + m] = std::pow(1.0 + dt * dt + df * df, s / 2.0);
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Modulation-space norms

enum class AnalysisSide { WithDual, WithWindow };

/// Mixed l^{p,q}_m quasi-norm of a coefficient grid: inner p over time, outer q over frequency.
inline double coefficient_norm(const CoefficientGrid& c, double p, double q, std::span<const double> weight = {}) {
  return mixed_norm(magnitudes(c.values()), c.N(), c.M(), p, q, weight);
}

/// Analysis window used by modulation_norm: gamma for WithDual, g otherwise.
inline GaborSystem analysis_system(const GaborSystem& sys, AnalysisSide side) {
  return side == AnalysisSide::WithDual ? sys.with_window(canonical_dual(sys)) : sys;
}

/// ||f | M^{p,q}_m|| measured as the l^{p,q}_m norm of the Gabor coefficients.
inline double modulation_norm(const Signal& f, const GaborSystem& sys, double p, double q,
                              std::span<const double> weight, AnalysisSide side) {
  const GaborSystem an = analysis_system(sys, side);
  return coefficient_norm(dgt(f, an), p, q, weight);
}

struct AmalgamComparison {
  double plain = 0.0;
  double amalgam = 0.0;
  double ratio = 1.0;
};

/// Plain vs W(l^inf, l^{p,q}_m) norm of a coefficient grid with a periodic
/// box neighborhood (time radius, frequency radius).
inline AmalgamComparison amalgam_comparison(const CoefficientGrid& c, double p, double q,
                                            std::span<const double> weight, Neighborhood time_q,
                                            Neighborhood freq_q) {
  const auto mags = magnitudes(c.values());
  AmalgamComparison out;
  out.plain = mixed_norm(mags, c.N(), c.M(), p, q, weight);
  const auto ctrl = control_function_2d(mags, c.N(), c.M(), time_q, freq_q);
  out.amalgam = mixed_norm(ctrl, c.N(), c.M(), p, q, weight);
  out.ratio = out.plain > 0.0 ? out.amalgam / out.plain : 1.0;
  return out;
}

inline AmalgamComparison amalgam_comparison(const Signal& f, const GaborSystem& sys, double p, double q,
                                            std::span<const double> weight, Neighborhood time_q,
                                            Neighborhood freq_q, AnalysisSide side = AnalysisSide::WithWindow) {
  return amalgam_comparison(dgt(f, analysis_system(sys, side)), p, q, weight, time_q, freq_q);
}

}  // namespace qbc
