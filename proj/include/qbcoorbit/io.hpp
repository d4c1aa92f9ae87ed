#pragma once

// File formats:
//   signal  "QBG1" | u32 L | L x (f64 re, f64 im)            little-endian
//   grid    "QBC1" | u32 N | u32 M | N*M x (f64 re, f64 im)  row-major, n outer
//   CSV     signal rows "index,re,im"; weights "index,value"; point sets one index per line
//   lattice sidecar JSON {"L":..,"a":..,"M":..}
//   norm spec JSON {"kind":"mixed"|"lp"|"lorentz","p":x|"inf","q":x|"inf","r":x,"weight":path|"one"}

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qbcoorbit/error.hpp"
#include "qbcoorbit/gabor.hpp"
#include "qbcoorbit/grid.hpp"
#include "qbcoorbit/quasinorm.hpp"

namespace qbc::io {

namespace fs = std::filesystem;
using Bytes = std::vector<std::uint8_t>;

inline constexpr std::array<char, 4> kSignalMagic{'Q', 'B', 'G', '1'};
inline constexpr std::array<char, 4> kGridMagic{'Q', 'B', 'C', '1'};

namespace detail {

inline void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64(Bytes& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const Bytes& b) : bytes_(b) {}

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw Error(Errc::IoError, "truncated file");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return std::bit_cast<double>(v);
  }
  bool magic(const std::array<char, 4>& m) {
    need(4);
    const bool ok = std::memcmp(bytes_.data() + pos_, m.data(), 4) == 0;
    pos_ += 4;
    return ok;
  }
  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  const Bytes& bytes_;
  std::size_t pos_ = 0;
};

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error(Errc::IoError, "number formatting failed");
  return std::string(buf.data(), ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(Errc::IoError, "cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::vector<std::string_view>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string_view>> rows;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    while (true) {
      const auto comma = line.find(',');
      cells.push_back(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

inline std::size_t parse_index(std::string_view s) {
  const double v = parse_double(s);
  if (v < 0 || v != std::floor(v)) throw Error(Errc::IoError, "bad index '" + std::string(s) + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Raw file access

inline Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

inline std::string read_text(const fs::path& path) {
  const auto b = read_file(path);
  return std::string(b.begin(), b.end());
}

/// Writes to a sibling temporary file and renames it into place.
inline void write_file_atomic(const fs::path& path, const Bytes& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(Errc::IoError, "rename to " + path.string() + " failed: " + ec.message());
}

inline void write_text_atomic(const fs::path& path, std::string_view text) {
  write_file_atomic(path, Bytes(text.begin(), text.end()));
}

// ---------------------------------------------------------------------------
// Signals

inline Bytes encode_signal(const Signal& f) {
  Bytes out;
  out.reserve(8 + 16 * f.size());
  out.insert(out.end(), kSignalMagic.begin(), kSignalMagic.end());
  detail::put_u32(out, static_cast<std::uint32_t>(f.size()));
  for (const auto& z : f.values()) {
    detail::put_f64(out, z.real());
    detail::put_f64(out, z.imag());
  }
  return out;
}

inline Signal decode_signal(const Bytes& bytes) {
  detail::Reader r(bytes);
  if (!r.magic(kSignalMagic)) throw Error(Errc::IoError, "not a QBG1 signal file");
  const std::size_t L = r.u32();
  r.need(16 * L);
  std::vector<cplx> v(L);
  for (auto& z : v) {
    const double re = r.f64();
    z = cplx(re, r.f64());
  }
  if (!r.done()) throw Error(Errc::IoError, "trailing bytes after signal");
  return Signal(GridGroup(L), std::move(v));
}

inline std::string signal_to_csv(const Signal& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    out += std::to_string(i) + "," + detail::format_double(f[i].real()) + "," + detail::format_double(f[i].imag()) + "\n";
  }
  return out;
}

inline Signal signal_from_csv(std::string_view text) {
  const auto rows = detail::split_csv(text);
  std::vector<cplx> v(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (const auto& row : rows) {
    if (row.size() != 3) throw Error(Errc::IoError, "signal CSV rows must be index,re,im");
    const std::size_t i = detail::parse_index(row[0]);
    if (i >= v.size() || seen[i]) throw Error(Errc::IoError, "signal CSV indices must be 0..L-1 once each");
    seen[i] = true;
    v[i] = cplx(detail::parse_double(row[1]), detail::parse_double(row[2]));
  }
  const std::size_t L = v.size();
  return Signal(GridGroup(L), std::move(v));
}

// ---------------------------------------------------------------------------
// Coefficient grids

inline Bytes encode_grid(const CoefficientGrid& c) {
  Bytes out;
  out.reserve(12 + 16 * c.size());
  out.insert(out.end(), kGridMagic.begin(), kGridMagic.end());
  detail::put_u32(out, static_cast<std::uint32_t>(c.N()));
  detail::put_u32(out, static_cast<std::uint32_t>(c.M()));
  for (const auto& z : c.values()) {
    detail::put_f64(out, z.real());
    detail::put_f64(out, z.imag());
  }
  return out;
}

/// The binary grid carries only N and M; the lattice comes from the sidecar.
inline CoefficientGrid decode_grid(const Bytes& bytes, const Lattice& lattice) {
  detail::Reader r(bytes);
  if (!r.magic(kGridMagic)) throw Error(Errc::IoError, "not a QBC1 grid file");
  const std::size_t N = r.u32();
  const std::size_t M = r.u32();
  if (N != lattice.time_shifts() || M != lattice.M) throw Error(Errc::ShapeMismatch, "grid shape differs from lattice");
  r.need(16 * N * M);
  std::vector<cplx> v(N * M);
  for (auto& z : v) {
    const double re = r.f64();
    z = cplx(re, r.f64());
  }
  if (!r.done()) throw Error(Errc::IoError, "trailing bytes after grid");
  return CoefficientGrid(lattice, std::move(v));
}

/// Grid shape (N, M) from the header alone.
inline std::pair<std::size_t, std::size_t> peek_grid_shape(const Bytes& bytes) {
  detail::Reader r(bytes);
  if (!r.magic(kGridMagic)) throw Error(Errc::IoError, "not a QBC1 grid file");
  const std::size_t N = r.u32();
  return {N, r.u32()};
}

inline bool is_signal_file(const Bytes& b) { return b.size() >= 4 && std::memcmp(b.data(), kSignalMagic.data(), 4) == 0; }
inline bool is_grid_file(const Bytes& b) { return b.size() >= 4 && std::memcmp(b.data(), kGridMagic.data(), 4) == 0; }

inline nlohmann::json lattice_to_json(const Lattice& lat) { return {{"L", lat.L}, {"a", lat.a}, {"M", lat.M}}; }

inline Lattice lattice_from_json(const nlohmann::json& j) {
  try {
    Lattice lat{j.at("L").get<std::size_t>(), j.at("a").get<std::size_t>(), j.at("M").get<std::size_t>()};
    lat.validate();
    return lat;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::IoError, std::string("bad lattice sidecar: ") + e.what());
  }
}

/// "L,a,M"
inline Lattice parse_lattice(std::string_view text) {
  const auto rows = detail::split_csv(text);
  if (rows.size() != 1 || rows[0].size() != 3) throw Error(Errc::BadParams, "lattice must be given as L,a,M");
  Lattice lat{detail::parse_index(rows[0][0]), detail::parse_index(rows[0][1]), detail::parse_index(rows[0][2])};
  lat.validate();
  return lat;
}

inline fs::path sidecar_path(const fs::path& grid_path) {
  fs::path p = grid_path;
  p += ".json";
  return p;
}

// ---------------------------------------------------------------------------
// Weights and point sets

inline std::vector<double> weights_from_csv(std::string_view text) {
  const auto rows = detail::split_csv(text);
  std::vector<double> w(rows.size(), 0.0);
  std::vector<bool> seen(rows.size(), false);
  for (const auto& row : rows) {
    if (row.size() != 2) throw Error(Errc::IoError, "weight CSV rows must be index,value");
    const std::size_t i = detail::parse_index(row[0]);
    if (i >= w.size() || seen[i]) throw Error(Errc::IoError, "weight CSV indices must be 0..n-1 once each");
    seen[i] = true;
    w[i] = detail::parse_double(row[1]);
  }
  return w;
}

inline std::string weights_to_csv(std::span<const double> w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) out += std::to_string(i) + "," + detail::format_double(w[i]) + "\n";
  return out;
}

inline std::vector<std::size_t> points_from_csv(std::string_view text) {
  std::vector<std::size_t> pts;
  for (const auto& row : detail::split_csv(text)) {
    if (row.size() != 1) throw Error(Errc::IoError, "point set CSV has one index per line");
    pts.push_back(detail::parse_index(row[0]));
  }
  return pts;
}

inline std::string points_to_csv(std::span<const std::size_t> pts) {
  std::string out;
  for (auto p : pts) out += std::to_string(p) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Norm specs

inline double exponent_from_json(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return inf;
    throw Error(Errc::BadParams, std::string("exponent '") + key + "' must be a number or \"inf\"");
  }
  if (!v.is_number()) throw Error(Errc::BadParams, std::string("exponent '") + key + "' must be a number or \"inf\"");
  return v.get<double>();
}

inline nlohmann::json exponent_to_json(double v) { return v == inf ? nlohmann::json("inf") : nlohmann::json(v); }

/// Parsed spec JSON; `weight` stays symbolic ("one" or a path) until the
/// array shape is known.
struct NormSpecFile {
  NormKind kind = NormKind::WeightedLp;
  double p = 2.0;
  double q = 2.0;
  std::optional<double> r;
  std::string weight = "one";
  nlohmann::json raw;

  /// Materialize against an array of `count` entries; mixed specs need the grid shape.
  QuasiNormSpec resolve(std::size_t count, std::size_t time_len = 0, std::size_t freq_len = 0,
                        const fs::path& base = {}) const {
    std::vector<double> w;
    if (weight != "one") {
      fs::path wp(weight);
      if (wp.is_relative() && !base.empty()) wp = base / wp;
      w = weights_from_csv(read_text(wp));
      if (w.size() != count) throw Error(Errc::ShapeMismatch, "weight file has " + std::to_string(w.size()) + " entries, data has " + std::to_string(count));
    }
    switch (kind) {
      case NormKind::WeightedLp: return QuasiNormSpec::weighted_lp(p, std::move(w));
      case NormKind::Lorentz: return QuasiNormSpec::lorentz(p, q, std::move(w), r);
      case NormKind::Mixed:
        if (time_len * freq_len != count) throw Error(Errc::ShapeMismatch, "mixed norm needs a coefficient grid");
        return QuasiNormSpec::mixed(p, q, time_len, freq_len, std::move(w));
    }
    throw Error(Errc::BadParams, "unknown norm kind");
  }
};

inline NormSpecFile parse_norm_spec(const nlohmann::json& j) {
  NormSpecFile s;
  s.raw = j;
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "mixed") s.kind = NormKind::Mixed;
    else if (kind == "lp") s.kind = NormKind::WeightedLp;
    else if (kind == "lorentz") s.kind = NormKind::Lorentz;
    else throw Error(Errc::BadParams, "unknown norm kind '" + kind + "'");
    s.p = exponent_from_json(j, "p");
    s.q = j.contains("q") ? exponent_from_json(j, "q") : s.p;
    if (j.contains("r")) {
      if (s.kind != NormKind::Lorentz) throw Error(Errc::BadParams, "\"r\" is only meaningful for lorentz specs");
      s.r = j.at("r").get<double>();
    }
    if (j.contains("weight")) s.weight = j.at("weight").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadParams, std::string("bad norm spec: ") + e.what());
  }
  // Exponent validation without a weight.
  QuasiNormSpec probe;
  probe.kind = s.kind;
  probe.p = s.p;
  probe.q = s.q;
  probe.r = s.r;
  probe.validate();
  return s;
}

inline NormSpecFile read_norm_spec(const fs::path& path) {
  try {
    return parse_norm_spec(nlohmann::json::parse(read_text(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::BadParams, std::string("spec is not valid JSON: ") + e.what());
  }
}

}  // namespace qbc::io
