// qbc: command-line front end for the qbcoorbit library.
//
// Exit codes: 0 ok, 1 verify failure, 2 not a frame, 3 I/O, 4 validation.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qbcoorbit/coorbit.hpp"
#include "qbcoorbit/gabor.hpp"
#include "qbcoorbit/io.hpp"
#include "qbcoorbit/nterm.hpp"
#include "qbcoorbit/quasinorm.hpp"
#include "qbcoorbit/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qbc;

namespace {

enum Exit : int { kOk = 0, kVerifyFailed = 1, kNotAFrame = 2, kIo = 3, kValidation = 4 };

json envelope(const std::string& command, json config) {
  return {{"version", QBC_VERSION}, {"command", command}, {"config", std::move(config)}};
}

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    io::write_text_atomic(out, text);
  }
}

/// Signal from a QBG1 binary or an "index,re,im" CSV.
Signal load_signal(const fs::path& path) {
  const auto bytes = io::read_file(path);
  if (io::is_signal_file(bytes)) return io::decode_signal(bytes);
  if (io::is_grid_file(bytes)) throw Error(Errc::BadParams, path.string() + " holds a coefficient grid, not a signal");
  return io::signal_from_csv(std::string(bytes.begin(), bytes.end()));
}

CoefficientGrid load_grid(const fs::path& path, std::optional<Lattice> lattice) {
  const auto bytes = io::read_file(path);
  if (!lattice) lattice = io::lattice_from_json(json::parse(io::read_text(io::sidecar_path(path))));
  return io::decode_grid(bytes, *lattice);
}

void save_grid(const CoefficientGrid& c, const fs::path& path) {
  io::write_file_atomic(path, io::encode_grid(c));
  io::write_text_atomic(io::sidecar_path(path), io::lattice_to_json(c.lattice()).dump() + "\n");
}

Signal window_for(const std::string& window_path, std::size_t L) {
  if (window_path.empty() || window_path == "gaussian") return gaussian_window(L);
  auto g = load_signal(window_path);
  if (g.size() != L) throw Error(Errc::LengthMismatch, "window length differs from lattice L");
  return g;
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& row : io::detail::split_csv(text)) {
    for (auto cell : row) out.push_back(io::detail::parse_index(cell));
  }
  return out;
}

/// Largest divisor of L not above sqrt(L).
std::size_t balanced_divisor(std::size_t L) {
  std::size_t best = 1;
  for (std::size_t d = 1; d * d <= L; ++d) {
    if (L % d == 0) best = d;
  }
  return best;
}

struct Options {
  std::string input, output, lattice, spec, suite = "all", n_list, window, kind, method = "dense";
  std::string weight;
  std::uint64_t seed = 0;
  std::optional<std::size_t> radius;
  std::size_t length = 0, atoms = 1;
  double p = 0.5, q = 2.0;
  bool dual = false;
  std::string reference;
};

int cmd_generate(const Options& o) {
  if (o.kind == "power-law") {
    if (o.lattice.empty()) throw Error(Errc::BadParams, "power-law needs --lattice");
    const auto lat = io::parse_lattice(o.lattice);
    save_grid(power_law_grid(lat, o.p), o.output);
    return kOk;
  }
  std::size_t L = o.length;
  std::optional<Lattice> lat;
  if (!o.lattice.empty()) {
    lat = io::parse_lattice(o.lattice);
    if (L != 0 && L != lat->L) throw Error(Errc::BadParams, "--length and --lattice disagree");
    L = lat->L;
  }
  if (L < 2) throw Error(Errc::BadParams, "signal length must be >= 2");
  std::mt19937_64 rng(o.seed);
  Signal out(GridGroup{L});
  if (o.kind == "gaussian") {
    out = gaussian_window(L);
  } else if (o.kind == "raised-cosine") {
    out = raised_cosine_window(L, std::max<std::size_t>(2, L / 4));
  } else if (o.kind == "random") {
    std::normal_distribution<double> d;
    for (std::size_t i = 0; i < L; ++i) {
      const double re = d(rng);
      out[i] = cplx(re, d(rng));
    }
  } else if (o.kind == "sparse-atoms") {
    if (!lat) {
      const std::size_t a = balanced_divisor(L);
      lat = Lattice{L, a, L / a};
    }
    const GaborSystem sys(gaussian_window(L), lat->a, lat->M);
    if (o.atoms > lat->size()) throw Error(Errc::CountTooLarge, "more atoms than lattice points");
    std::vector<std::size_t> slots(lat->size());
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    for (std::size_t i = 0; i < o.atoms; ++i) std::swap(slots[i], slots[i + rng() % (slots.size() - i)]);
    CoefficientGrid c(*lat);
    for (std::size_t i = 0; i < o.atoms; ++i) c.values()[slots[i]] = 1.0;
    out = idgt(c, sys);
  } else {
    throw Error(Errc::BadParams, "unknown kind '" + o.kind + "'");
  }
  io::write_file_atomic(o.output, io::encode_signal(out));
  return kOk;
}

int cmd_dgt(const Options& o) {
  const auto f = load_signal(o.input);
  const auto lat = io::parse_lattice(o.lattice);
  if (lat.L != f.size()) throw Error(Errc::LengthMismatch, "signal length differs from lattice L");
  GaborSystem sys(window_for(o.window, lat.L), lat.a, lat.M);
  if (o.dual) sys = sys.with_window(canonical_dual(sys, o.method == "neumann" ? DualMethod::Neumann : DualMethod::DenseSolve));
  save_grid(dgt(f, sys), o.output);
  return kOk;
}

int cmd_idgt(const Options& o) {
  const auto c = load_grid(o.input, o.lattice.empty() ? std::nullopt : std::optional(io::parse_lattice(o.lattice)));
  const auto& lat = c.lattice();
  GaborSystem sys(window_for(o.window, lat.L), lat.a, lat.M);
  if (o.dual) sys = sys.with_window(canonical_dual(sys, o.method == "neumann" ? DualMethod::Neumann : DualMethod::DenseSolve));
  const auto f = idgt(c, sys);
  io::write_file_atomic(o.output, io::encode_signal(f));
  if (!o.reference.empty()) {
    const auto ref = load_signal(o.reference);
    require_same_group(ref.group(), f.group());
    json rep = envelope("idgt", {{"lattice", io::lattice_to_json(lat)}, {"dual", o.dual}});
    rep["relative_error"] = norm2(f - ref) / norm2(ref);
    emit(rep, "");
  }
  return kOk;
}

int cmd_dual(const Options& o) {
  const auto lat = io::parse_lattice(o.lattice);
  const GaborSystem sys(window_for(o.window, lat.L), lat.a, lat.M);
  const auto fd = frame_operator(sys);
  const auto res = o.method == "neumann" ? canonical_dual_neumann(sys, fd) : canonical_dual_dense(sys, fd);
  io::write_file_atomic(o.output, io::encode_signal(res.dual));
  json rep = envelope("dual", {{"lattice", io::lattice_to_json(lat)}, {"method", o.method}});
  rep["A"] = fd.lower;
  rep["B"] = fd.upper;
  rep["iterations"] = res.iterations;
  rep["relative_residual"] = res.relative_residual;
  emit(rep, "");
  return kOk;
}

int cmd_norm(const Options& o) {
  const auto specfile = io::read_norm_spec(o.spec);
  const fs::path base = fs::path(o.spec).parent_path();
  const auto bytes = io::read_file(o.input);
  json rep = envelope("norm", {{"input", o.input}, {"spec", specfile.raw}});
  rep["spec"] = specfile.raw;
  if (io::is_grid_file(bytes)) {
    const auto c = load_grid(o.input, o.lattice.empty() ? std::nullopt : std::optional(io::parse_lattice(o.lattice)));
    const auto Y = specfile.resolve(c.size(), c.N(), c.M(), base);
    const auto mags = magnitudes(c.values());
    const double n = y_norm(std::span<const double>(mags), Y);
    rep["norm"] = n;
    if (o.radius) {
      const auto ctrl = control_function_2d(mags, c.N(), c.M(), Neighborhood(*o.radius), Neighborhood(*o.radius));
      const double a = y_norm(std::span<const double>(ctrl), Y);
      rep["amalgam"] = a;
      rep["ratio"] = n > 0 ? a / n : 1.0;
    }
  } else {
    const auto f = load_signal(o.input);
    const auto Y = specfile.resolve(f.size(), 0, 0, base);
    const double n = y_norm(f, Y);
    rep["norm"] = n;
    if (o.radius) {
      const double a = amalgam_norm(f, Neighborhood(*o.radius), Y);
      rep["amalgam"] = a;
      rep["ratio"] = n > 0 ? a / n : 1.0;
    }
  }
  emit(rep, o.output);
  return kOk;
}

int cmd_nterm_curve(const Options& o) {
  if (!(o.p < o.q)) throw Error(Errc::InvalidFitWindow, "nterm-curve needs p < q");
  const auto bytes = io::read_file(o.input);
  std::optional<CoefficientGrid> c;
  if (io::is_grid_file(bytes)) {
    c = load_grid(o.input, o.lattice.empty() ? std::nullopt : std::optional(io::parse_lattice(o.lattice)));
  } else {
    if (o.lattice.empty()) throw Error(Errc::BadParams, "a signal input needs --lattice");
    const auto lat = io::parse_lattice(o.lattice);
    const auto f = load_signal(o.input);
    if (f.size() != lat.L) throw Error(Errc::LengthMismatch, "signal length differs from lattice L");
    c = dual_coefficients(f, GaborSystem(window_for(o.window, lat.L), lat.a, lat.M));
  }
  std::vector<double> w;
  if (!o.weight.empty()) {
    w = io::weights_from_csv(io::read_text(o.weight));
    if (w.size() != c->size()) throw Error(Errc::ShapeMismatch, "weight file size differs from grid size");
  }
  std::vector<std::size_t> ns;
  if (o.n_list.empty()) {
    ns.resize(c->size() + 1);
    std::iota(ns.begin(), ns.end(), std::size_t{0});
  } else {
    ns = parse_n_list(o.n_list);
  }
  const auto curve = decay_curve(*c, o.p, o.q, w, ns);
  std::string csv = "n,sigma\n";
  for (std::size_t i = 0; i < curve.n_values.size(); ++i) {
    csv += std::to_string(curve.n_values[i]) + "," + io::detail::format_double(curve.errors[i]) + "\n";
  }
  json summary = envelope("nterm-curve", {{"input", o.input},
                                          {"p", o.p},
                                          {"q", io::exponent_to_json(o.q)},
                                          {"weight", o.weight.empty() ? "one" : o.weight},
                                          {"lattice", io::lattice_to_json(c->lattice())}});
  summary["alpha_ref"] = curve.reference_alpha;
  summary["slope"] = curve.fitted_slope;
  summary["C_impl"] = curve.rate_constant;
  summary["weak_norm"] = curve.weak_norm;
  summary["fit_window"] = {curve.fit_lo, curve.fit_hi};
  summary["rate_bound_holds"] = curve.rate_bound_holds;
  if (o.output.empty()) {
    std::cout << csv;
  } else {
    io::write_text_atomic(o.output, csv);
    io::write_text_atomic(o.output + ".json", summary.dump(2) + "\n");
  }
  std::cout << summary.dump(2) << "\n";
  return kOk;
}

int cmd_verify(const Options& o) {
  const auto rep = verify::run(o.suite, o.seed);
  emit(rep.doc, o.output);
  if (!o.output.empty()) std::cout << (rep.pass ? "PASS" : "FAIL") << "\n";
  return rep.pass ? kOk : kVerifyFailed;
}

/// QBG_THREADS caps worker threads. Every command runs single-threaded, so the
/// value is only validated.
void check_thread_cap() {
  if (const char* env = std::getenv("QBG_THREADS")) {
    const std::string s(env);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || std::stoul(s) == 0) {
      throw Error(Errc::BadParams, "QBG_THREADS must be a positive integer");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qbc: Gabor frames, quasi-Banach norms and coorbit discretization on Z_L"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QBC_VERSION);
  Options o;

  auto* gen = app.add_subcommand("generate", "write a test signal (or a power-law coefficient grid)");
  gen->add_option("kind", o.kind, "gaussian | raised-cosine | random | sparse-atoms | power-law")
      ->required()
      ->check(CLI::IsMember({"gaussian", "raised-cosine", "random", "sparse-atoms", "power-law"}));
  gen->add_option("-n,--length", o.length, "signal length L");
  gen->add_option("--lattice", o.lattice, "L,a,M");
  gen->add_option("--seed", o.seed);
  gen->add_option("--atoms", o.atoms, "number of atoms for sparse-atoms");
  gen->add_option("--p", o.p, "exponent of the k^{-1/p} power law");
  gen->add_option("-o,--output", o.output)->required();

  auto* dg = app.add_subcommand("dgt", "discrete Gabor transform");
  dg->add_option("-i,--input", o.input)->required();
  dg->add_option("-o,--output", o.output)->required();
  dg->add_option("--lattice", o.lattice)->required();
  dg->add_option("--window", o.window, "window signal file (default: periodized Gaussian)");
  dg->add_flag("--dual", o.dual, "analyse with the canonical dual window");
  dg->add_option("--method", o.method)->check(CLI::IsMember({"dense", "neumann"}));

  auto* ig = app.add_subcommand("idgt", "Gabor synthesis from a coefficient grid");
  ig->add_option("-i,--input", o.input)->required();
  ig->add_option("-o,--output", o.output)->required();
  ig->add_option("--lattice", o.lattice, "overrides the grid sidecar");
  ig->add_option("--window", o.window);
  ig->add_flag("--dual", o.dual, "synthesize with the canonical dual window");
  ig->add_option("--method", o.method)->check(CLI::IsMember({"dense", "neumann"}));
  ig->add_option("--reference", o.reference, "print the relative l2 error against this signal");

  auto* du = app.add_subcommand("dual", "canonical dual window and frame bounds");
  du->add_option("--lattice", o.lattice)->required();
  du->add_option("--window", o.window);
  du->add_option("--method", o.method)->check(CLI::IsMember({"dense", "neumann"}));
  du->add_option("-o,--output", o.output)->required();

  auto* nm = app.add_subcommand("norm", "evaluate a quasi-norm (and its amalgam version)");
  nm->add_option("-i,--input", o.input)->required();
  nm->add_option("--spec", o.spec)->required();
  nm->add_option("--radius", o.radius);
  nm->add_option("--lattice", o.lattice, "overrides the grid sidecar");
  nm->add_option("-o,--output", o.output);

  auto* nt = app.add_subcommand("nterm-curve", "greedy n-term error curve and decay fit");
  nt->add_option("-i,--input", o.input)->required();
  nt->add_option("--lattice", o.lattice);
  nt->add_option("--window", o.window);
  nt->add_option("--p", o.p)->required();
  nt->add_option("--q", o.q)->required();
  nt->add_option("--weight", o.weight, "index,value CSV on the grid");
  nt->add_option("--n-list", o.n_list, "n1,n2,...");
  nt->add_option("-o,--output", o.output);

  auto* vf = app.add_subcommand("verify", "run the property suites");
  vf->add_option("--suite", o.suite)->check(CLI::IsMember({"norms", "frames", "coorbit", "nterm", "all"}));
  vf->add_option("--seed", o.seed);
  vf->add_option("-o,--output", o.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    check_thread_cap();
    if (*gen) return cmd_generate(o);
    if (*dg) return cmd_dgt(o);
    if (*ig) return cmd_idgt(o);
    if (*du) return cmd_dual(o);
    if (*nm) return cmd_norm(o);
    if (*nt) return cmd_nterm_curve(o);
    if (*vf) return cmd_verify(o);
  } catch (const NotAFrameError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "A = " << e.lower() << "\nB = " << e.upper() << "\n";
    return kNotAFrame;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::IoError ? kIo : kValidation;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kValidation;
}
