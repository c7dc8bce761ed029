#ifndef GYROBENCH_INPUTS_HPP
#define GYROBENCH_INPUTS_HPP

// Benchmark-input catalog and the shape arithmetic derived from it: the
// six-dimensional grid, the batched 2D FFT extents implied by dealiasing,
// and the collision-constant memory estimator.

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gyrobench/common.hpp"

namespace gyrobench {

// Six positional grid dimensions. The conventional reading is
// d1 radial, d2 theta, d3 toroidal, d4 energy, d5 pitch angle, d6 species,
// but nothing downstream attaches meaning beyond position.
struct GridShape {
  std::int64_t d1 = 1;
  std::int64_t d2 = 1;
  std::int64_t d3 = 1;
  std::int64_t d4 = 1;
  std::int64_t d5 = 1;
  std::int64_t d6 = 1;

  std::uint64_t total() const {
    std::uint64_t t = 1;
    for (auto d : dims()) t = checked_mul(t, std::uint64_t(d));
    return t;
  }

  std::array<std::int64_t, 6> dims() const noexcept {
    return {d1, d2, d3, d4, d5, d6};
  }

  void validate() const {
    for (auto d : dims())
      if (d < 1) throw DataError("grid dimension must be >= 1");
    // the 3/2 dealiasing extent (3*d1/2) must be integral
    if (d1 % 2 != 0) throw DataError("d1 must be even, got " + std::to_string(d1));
  }

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

// Extents of the batched dealiased 2D transform attached to a grid.
struct FftShape {
  std::int64_t fft_x = 0;   // extended extent of dim 1 (slow)
  std::int64_t fft_y = 0;   // extended extent of dim 3 (fast)
  std::int64_t batch = 0;   // independent transforms per execution

  friend bool operator==(const FftShape&, const FftShape&) = default;
};

enum class CollisionKind { Full, Simplified };

struct CollisionMode {
  CollisionKind kind = CollisionKind::Simplified;
  int entry_bytes = 8;  // bytes per stored constant, Full mode only; 4 or 8

  static CollisionMode full(int entry_bytes) {
    if (entry_bytes != 4 && entry_bytes != 8)
      throw DataError("entry_bytes must be 4 or 8, got " + std::to_string(entry_bytes));
    return {CollisionKind::Full, entry_bytes};
  }
  static CollisionMode simplified() { return {CollisionKind::Simplified, 8}; }

  friend bool operator==(const CollisionMode&, const CollisionMode&) = default;
};

struct BenchmarkInput {
  std::string name;
  GridShape grid;
  CollisionMode collision;
  Rational scale{1, 1};  // factor already applied relative to the catalog entry

  friend bool operator==(const BenchmarkInput&, const BenchmarkInput&) = default;
};

// Dealiased transform extents: 3/2 padding on dim 1, 3x on dim 3, all
// remaining dimensions folded into the batch.
inline FftShape derive_fft_shape(const GridShape& g) {
  if (g.d1 % 2 != 0)
    throw DataError("derive_fft_shape requires even d1, got " + std::to_string(g.d1));
  return FftShape{
      .fft_x = 3 * g.d1 / 2,
      .fft_y = 3 * g.d3,
      .batch = g.d2 * g.d4 * g.d5 * g.d6,
  };
}

// Bytes needed to materialize the full collision constants:
// one dense Nv x Nv matrix per spatial point, Nv = d4*d5*d6.
// Simplified mode stores no matrices and reports 0.
inline std::uint64_t estimate_collision_memory(const GridShape& g,
                                               const CollisionMode& mode) {
  if (mode.kind == CollisionKind::Simplified) return 0;
  const std::uint64_t spatial =
      checked_mul(checked_mul(std::uint64_t(g.d1), std::uint64_t(g.d2)), std::uint64_t(g.d3));
  const std::uint64_t nv =
      checked_mul(checked_mul(std::uint64_t(g.d4), std::uint64_t(g.d5)), std::uint64_t(g.d6));
  return checked_mul(checked_mul(spatial, checked_mul(nv, nv)),
                     std::uint64_t(mode.entry_bytes));
}

// The six benchmark inputs, in catalog order.
inline std::vector<BenchmarkInput> catalog() {
  return {
      {"n102", {192, 24, 32, 16, 8, 2}, CollisionMode::full(4), {1, 1}},
      {"sh03s", {480, 32, 48, 24, 8, 3}, CollisionMode::full(4), {1, 1}},
      {"n103", {512, 32, 64, 24, 8, 3}, CollisionMode::simplified(), {1, 1}},
      {"bg03n", {864, 24, 96, 18, 8, 2}, CollisionMode::simplified(), {1, 1}},
      {"sh04n", {1152, 16, 128, 16, 8, 3}, CollisionMode::simplified(), {1, 1}},
      {"bg04n", {1344, 16, 192, 16, 4, 2}, CollisionMode::simplified(), {1, 1}},
  };
}

inline std::optional<BenchmarkInput> find_input(std::string_view name) {
  for (auto& entry : catalog())
    if (entry.name == name) return entry;
  return std::nullopt;
}

// Shrink (or keep) an input by an exact rational factor. Dims 1, 3 and 4
// scale; dims 2, 5 and 6 are left alone so the batch keeps its structure.
inline BenchmarkInput scale_input(const BenchmarkInput& input, Rational factor) {
  if (!factor.leq_one())
    throw DataError("scale factor must be <= 1, got " + factor.str());

  BenchmarkInput out = input;
  const struct { const char* name; std::int64_t* dim; } scaled[] = {
      {"d1", &out.grid.d1}, {"d3", &out.grid.d3}, {"d4", &out.grid.d4}};
  for (auto& [name, dim] : scaled) {
    const std::int64_t v = factor.apply_exact(*dim);
    if (v < 1)
      throw DataError(std::string("scaling ") + name + "=" + std::to_string(*dim) +
                      " by " + factor.str() + " does not give a positive integer");
    *dim = v;
  }
  if (out.grid.d1 % 2 != 0)
    throw DataError("scaling d1=" + std::to_string(input.grid.d1) + " by " +
                    factor.str() + " gives odd d1=" + std::to_string(out.grid.d1));
  out.grid.validate();
  out.scale = Rational::make(input.scale.num * factor.num, input.scale.den * factor.den);
  return out;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

// Catalog file format: one KEY=VALUE per line, keys NAME, D1..D6,
// COLLISION (FULL or SIMPLIFIED) and ENTRY_BYTES (FULL only). A NAME line
// opens a new entry. Blank lines and '#' comments are skipped; anything
// else is rejected.
inline std::vector<BenchmarkInput> load_catalog(std::istream& in) {
  std::vector<BenchmarkInput> out;

  struct Pending {
    std::string name;
    std::array<std::optional<std::int64_t>, 6> dims;
    std::optional<std::string> collision;
    std::optional<int> entry_bytes;
    std::size_t line = 0;
  };
  std::optional<Pending> cur;

  auto finish = [&](const Pending& p) {
    for (std::size_t i = 0; i < 6; ++i)
      if (!p.dims[i])
        throw ParseError("entry '" + p.name + "' missing D" + std::to_string(i + 1), p.line);
    if (!p.collision)
      throw ParseError("entry '" + p.name + "' missing COLLISION", p.line);

    BenchmarkInput entry;
    entry.name = p.name;
    entry.grid = {*p.dims[0], *p.dims[1], *p.dims[2], *p.dims[3], *p.dims[4], *p.dims[5]};
    try {
      entry.grid.validate();
    } catch (const DataError& e) {
      throw ParseError("entry '" + p.name + "': " + e.what(), p.line);
    }
    if (*p.collision == "FULL") {
      if (!p.entry_bytes)
        throw ParseError("entry '" + p.name + "': FULL collision needs ENTRY_BYTES", p.line);
      entry.collision = CollisionMode::full(*p.entry_bytes);
    } else if (*p.collision == "SIMPLIFIED") {
      if (p.entry_bytes)
        throw ParseError("entry '" + p.name + "': ENTRY_BYTES is only valid with FULL", p.line);
      entry.collision = CollisionMode::simplified();
    } else {
      throw ParseError("entry '" + p.name + "': COLLISION must be FULL or SIMPLIFIED", p.line);
    }
    for (auto& existing : out)
      if (existing.name == entry.name)
        throw ParseError("duplicate entry name '" + entry.name + "'", p.line);
    out.push_back(std::move(entry));
  };

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected KEY=VALUE, got '" + line + "'", lineno);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (value.empty()) throw ParseError("empty value for key " + key, lineno);

    auto parse_count = [&](const std::string& v) -> std::int64_t {
      try {
        std::size_t used = 0;
        const std::int64_t n = std::stoll(v, &used);
        if (used != v.size() || n < 1) throw std::invalid_argument(v);
        return n;
      } catch (const std::exception&) {
        throw ParseError("value for " + key + " must be a positive integer, got '" + v + "'",
                         lineno);
      }
    };

    if (key == "NAME") {
      if (cur) finish(*cur);
      cur = Pending{};
      cur->name = value;
      cur->line = lineno;
      continue;
    }
    if (!cur) throw ParseError("key " + key + " before any NAME", lineno);

    if (key.size() == 2 && key[0] == 'D' && key[1] >= '1' && key[1] <= '6') {
      cur->dims[key[1] - '1'] = parse_count(value);
    } else if (key == "COLLISION") {
      cur->collision = value;
    } else if (key == "ENTRY_BYTES") {
      cur->entry_bytes = int(parse_count(value));
    } else {
      throw ParseError("unknown key '" + key + "'", lineno);
    }
  }
  if (cur) finish(*cur);
  return out;
}

inline std::vector<BenchmarkInput> load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open catalog file", path);
  return load_catalog(in);
}

}  // namespace gyrobench

#endif  // GYROBENCH_INPUTS_HPP
