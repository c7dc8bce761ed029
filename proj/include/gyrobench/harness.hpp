#ifndef GYROBENCH_HARNESS_HPP
#define GYROBENCH_HARNESS_HPP

// Step-loop driver: runs the eight section kernels per step, times each
// section on the orchestrator with a monotonic clock, exchanges data
// between workers for the comm section, snapshots state for the io
// section, and appends one timing record per reporting step.

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "gyrobench/common.hpp"
#include "gyrobench/fftplan.hpp"
#include "gyrobench/inputs.hpp"
#include "gyrobench/kernels.hpp"

namespace gyrobench::harness {

using fft::Complex;

// ---- section timing -------------------------------------------------------

enum class Section : int { Nl = 0, Coll, Str, Field, Shear, Mem, Io, Comm };

inline constexpr std::array<const char*, 8> kSectionNames{
    "nl", "coll", "str", "field", "shear", "mem", "io", "comm"};

inline const char* section_name(Section s) { return kSectionNames[std::size_t(int(s))]; }

// Seconds spent in each section over one reporting step.
struct SectionTiming {
  double nl = 0.0;
  double coll = 0.0;
  double str = 0.0;
  double field = 0.0;
  double shear = 0.0;
  double mem = 0.0;
  double io = 0.0;
  double comm = 0.0;

  double& operator[](Section s) noexcept {
    switch (s) {
      case Section::Nl: return nl;
      case Section::Coll: return coll;
      case Section::Str: return str;
      case Section::Field: return field;
      case Section::Shear: return shear;
      case Section::Mem: return mem;
      case Section::Io: return io;
      default: return comm;
    }
  }
  double operator[](Section s) const noexcept {
    return const_cast<SectionTiming&>(*this)[s];
  }

  double total() const noexcept {
    return nl + coll + str + field + shear + mem + io + comm;
  }
  bool non_negative() const noexcept {
    for (int i = 0; i < 8; ++i)
      if ((*this)[Section(i)] < 0.0) return false;
    return true;
  }
};

// ---- worker partitioning --------------------------------------------------

// Near-equal split of [0, n) into `workers` ranges; range w is
// [(n*w)/workers, (n*(w+1))/workers).
inline std::int64_t chunk_lo(std::int64_t n, int workers, int w) {
  return n * w / workers;
}
inline std::int64_t chunk_hi(std::int64_t n, int workers, int w) {
  return n * (w + 1) / workers;
}

// Run fn(worker, lo, hi) over a near-equal partition of [0, n). Worker 0 is
// the calling thread; the rest are spawned and joined here. The first
// exception wins and is rethrown on the caller.
template <class Fn>
void parallel_over(std::int64_t n, int workers, Fn&& fn) {
  if (workers <= 1) {
    fn(0, std::int64_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers - 1));
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 1; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        fn(w, chunk_lo(n, workers, w), chunk_hi(n, workers, w));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  try {
    fn(0, chunk_lo(n, workers, 0), chunk_hi(n, workers, 0));
  } catch (...) {
    std::lock_guard<std::mutex> lock(error_mutex);
    if (!first_error) first_error = std::current_exception();
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---- comm: all-to-all transpose exchange ----------------------------------

// Block w is split into `workers` chunks at offsets (len_w * u) / workers;
// after the exchange, output block u holds chunk u of every input block,
// in worker order. Loopback (workers = 1) is the identity.
struct CommLayout {
  std::vector<std::int64_t> block_len;

  int workers() const noexcept { return int(block_len.size()); }
  std::int64_t chunk_begin(int w, int u) const {
    return block_len[std::size_t(w)] * u / workers();
  }
  std::int64_t chunk_end(int w, int u) const {
    return block_len[std::size_t(w)] * (u + 1) / workers();
  }
};

inline void check_blocks(const CommLayout& layout,
                         const std::vector<std::vector<Complex>>& blocks) {
  if (int(blocks.size()) != layout.workers())
    throw DataError("block count does not match the layout");
  for (int w = 0; w < layout.workers(); ++w)
    if (std::int64_t(blocks[std::size_t(w)].size()) != layout.block_len[std::size_t(w)])
      throw DataError("block length does not match the layout");
}

inline std::vector<std::vector<Complex>> comm_scatter(
    const CommLayout& layout, const std::vector<std::vector<Complex>>& blocks) {
  check_blocks(layout, blocks);
  const int W = layout.workers();
  std::vector<std::vector<Complex>> out(static_cast<std::size_t>(W));
  for (int u = 0; u < W; ++u) {
    std::int64_t len = 0;
    for (int w = 0; w < W; ++w) len += layout.chunk_end(w, u) - layout.chunk_begin(w, u);
    out[std::size_t(u)].reserve(std::size_t(len));
    for (int w = 0; w < W; ++w) {
      const auto& src = blocks[std::size_t(w)];
      out[std::size_t(u)].insert(out[std::size_t(u)].end(),
                                 src.begin() + layout.chunk_begin(w, u),
                                 src.begin() + layout.chunk_end(w, u));
    }
  }
  return out;
}

// Exact inverse of comm_scatter for the same layout.
inline std::vector<std::vector<Complex>> comm_gather(
    const CommLayout& layout, const std::vector<std::vector<Complex>>& scattered) {
  const int W = layout.workers();
  if (int(scattered.size()) != W)
    throw DataError("block count does not match the layout");
  std::vector<std::vector<Complex>> out(static_cast<std::size_t>(W));
  for (int w = 0; w < W; ++w)
    out[std::size_t(w)].resize(std::size_t(layout.block_len[std::size_t(w)]));
  for (int u = 0; u < W; ++u) {
    const auto& src = scattered[std::size_t(u)];
    std::int64_t pos = 0;
    for (int w = 0; w < W; ++w) {
      const std::int64_t lo = layout.chunk_begin(w, u);
      const std::int64_t n = layout.chunk_end(w, u) - lo;
      if (pos + n > std::int64_t(src.size()))
        throw DataError("scattered block shorter than the layout requires");
      std::copy_n(src.begin() + pos, std::size_t(n), out[std::size_t(w)].begin() + lo);
      pos += n;
    }
    if (pos != std::int64_t(src.size()))
      throw DataError("scattered block longer than the layout requires");
  }
  return out;
}

// One all-to-all pass (the scatter half); with equal block lengths divisible
// by the worker count this is the chunk-matrix transpose.
inline std::vector<std::vector<Complex>> comm_exchange(
    const CommLayout& layout, const std::vector<std::vector<Complex>>& blocks) {
  return comm_scatter(layout, blocks);
}

// ---- io: binary snapshots ---------------------------------------------------

namespace detail_io {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (unsigned char)(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (unsigned char)(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4] = {};
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return v;
}

inline std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8] = {};
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

inline double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace detail_io

inline constexpr std::uint32_t kSnapshotMagic = 0x434e4247u;  // "GBNC" little-endian
inline constexpr std::uint32_t kSnapshotVersion = 1;

// Header (44 bytes): magic, version, d1..d6, batch, seed; then f, g,
// velocity, field_weights as little-endian 8-byte reals. Returns bytes
// written.
inline std::uint64_t io_snapshot(const kernels::SpectralState& state,
                                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open snapshot for writing", path.string());

  using namespace detail_io;
  put_u32(out, kSnapshotMagic);
  put_u32(out, kSnapshotVersion);
  const auto dims = state.grid.dims();
  for (auto d : dims) put_u32(out, std::uint32_t(d));
  put_u32(out, std::uint32_t(state.batch()));
  put_u64(out, state.seed);

  for (const auto& c : state.f_modes) {
    put_f64(out, c.real());
    put_f64(out, c.imag());
  }
  for (const auto& c : state.g_modes) {
    put_f64(out, c.real());
    put_f64(out, c.imag());
  }
  for (double v : state.velocity) put_f64(out, v);
  for (double w : state.field_weights) put_f64(out, w);

  out.flush();
  if (!out) throw IoError("snapshot write failed", path.string());
  const std::uint64_t payload =
      16 * (state.f_modes.size() + state.g_modes.size()) +
      8 * (state.velocity.size() + state.field_weights.size());
  return 44 + payload;
}

inline kernels::SpectralState io_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot for reading", path.string());

  using namespace detail_io;
  if (get_u32(in) != kSnapshotMagic) throw DataError("bad snapshot magic");
  const std::uint32_t version = get_u32(in);
  if (version != kSnapshotVersion)
    throw DataError("unsupported snapshot version " + std::to_string(version));

  kernels::SpectralState st;
  st.grid.d1 = get_u32(in);
  st.grid.d2 = get_u32(in);
  st.grid.d3 = get_u32(in);
  st.grid.d4 = get_u32(in);
  st.grid.d5 = get_u32(in);
  st.grid.d6 = get_u32(in);
  const std::uint32_t batch = get_u32(in);
  st.seed = get_u64(in);
  if (!in) throw DataError("snapshot truncated in header");
  if (std::int64_t(batch) != st.batch())
    throw DataError("snapshot batch count disagrees with its grid");

  st.f_modes.resize(std::size_t(st.batch() * st.plane_size()));
  st.g_modes.resize(std::size_t(st.batch() * st.plane_size()));
  st.velocity.resize(std::size_t(st.spatial() * st.nv()));
  st.field_weights.resize(std::size_t(st.nv()));
  for (auto& c : st.f_modes) {
    const double re = get_f64(in);
    c = Complex(re, get_f64(in));
  }
  for (auto& c : st.g_modes) {
    const double re = get_f64(in);
    c = Complex(re, get_f64(in));
  }
  for (auto& v : st.velocity) v = get_f64(in);
  for (auto& w : st.field_weights) w = get_f64(in);
  if (!in) throw DataError("snapshot truncated in payload");
  return st;
}

// ---- record output ----------------------------------------------------------

inline constexpr const char* kRecordHeader =
    "system,xpu_type,n_xpu,n_nodes,input,nl,coll,str,field,shear,mem,io,comm,"
    "steps_per_report,seed";

inline void write_record_header(std::ostream& out) { out << kRecordHeader << '\n'; }

inline void write_record(std::ostream& out, const std::string& system,
                         const std::string& xpu_type, int n_xpu, int n_nodes,
                         const std::string& input, const SectionTiming& t,
                         int steps_per_report, std::uint64_t seed) {
  char times[8][32];
  const double vals[8] = {t.nl, t.coll, t.str, t.field, t.shear, t.mem, t.io, t.comm};
  for (int i = 0; i < 8; ++i) std::snprintf(times[i], sizeof times[i], "%.6f", vals[i]);
  out << system << ',' << xpu_type << ',' << n_xpu << ',' << n_nodes << ',' << input;
  for (int i = 0; i < 8; ++i) out << ',' << times[i];
  out << ',' << steps_per_report << ',' << seed << '\n';
}

// ---- run --------------------------------------------------------------------

struct RunConfig {
  BenchmarkInput input;
  int steps_per_report = 10;
  int reports = 1;
  fft::BackendSemantics semantics = fft::BackendSemantics::natural();
  int workers = 1;
  std::uint64_t seed = 0;
  std::string out_path;       // empty: no record file
  std::string snapshot_path;  // empty: derive from out_path or use a temp file
  std::uint64_t budget_bytes = kernels::CollisionOperator::kDefaultBudget;
  std::string system = "local";
  std::string xpu_type = "reference";

  void validate(std::int64_t batch) const {
    if (steps_per_report < 1) throw DataError("steps_per_report must be at least 1");
    if (reports < 1) throw DataError("reports must be at least 1");
    if (workers < 1) throw DataError("workers must be at least 1");
    if (batch % workers != 0)
      throw DataError("workers (" + std::to_string(workers) +
                      ") must divide the batch count (" + std::to_string(batch) + ")");
  }
};

struct RunResult {
  std::vector<SectionTiming> reports;
  double final_checksum = 0.0;
};

inline RunResult run(const RunConfig& config) {
  using clock = std::chrono::steady_clock;
  const GridShape& grid = config.input.grid;
  grid.validate();

  kernels::SpectralState state = kernels::make_state(grid, config.seed);
  const std::int64_t batch = state.batch();
  const std::int64_t spatial = state.spatial();
  config.validate(batch);
  const int W = config.workers;

  const auto collision = kernels::CollisionOperator::materialize(
      grid, config.input.collision, config.seed, config.budget_bytes);

  // plan once per worker slice; every slice has the same shape since W | batch
  std::vector<kernels::PlanSet> plans;
  plans.reserve(std::size_t(W));
  for (int w = 0; w < W; ++w)
    plans.push_back(kernels::PlanSet::make(grid, batch / W, config.semantics,
                                           fft::reference_backend()));

  std::vector<double> field(static_cast<std::size_t>(spatial));
  std::vector<Complex> shift_scratch(state.f_modes.size());
  std::vector<kernels::MemBuffers> mem_buffers(static_cast<std::size_t>(W));
  const std::uint64_t mem_total_bytes = std::clamp<std::uint64_t>(
      state.f_modes.size() * sizeof(Complex), 1u << 20, 16u << 20);

  CommLayout comm_layout;
  comm_layout.block_len.assign(std::size_t(W), (batch / W) * state.plane_size());

  // record sink
  std::ofstream record_file;
  if (!config.out_path.empty()) {
    record_file.open(config.out_path, std::ios::trunc);
    if (!record_file) throw IoError("cannot open output file", config.out_path);
    write_record_header(record_file);
  }

  // snapshot target for the io section
  std::filesystem::path snap_path;
  bool snap_is_temp = false;
  if (!config.snapshot_path.empty()) {
    snap_path = config.snapshot_path;
  } else if (!config.out_path.empty()) {
    snap_path = config.out_path + ".snap";
  } else {
    const auto tag = std::chrono::duration_cast<std::chrono::nanoseconds>(
                         clock::now().time_since_epoch())
                         .count();
    snap_path = std::filesystem::temp_directory_path() /
                ("gyrobench-" + std::to_string(tag) + "-" +
                 std::to_string(config.seed) + ".snap");
    snap_is_temp = true;
  }

  auto timed = [&](SectionTiming& t, Section s, auto&& body) {
    const auto start = clock::now();
    body();
    t[s] += std::chrono::duration<double>(clock::now() - start).count();
  };

  RunResult result;
  result.reports.reserve(std::size_t(config.reports));

  for (int report = 0; report < config.reports; ++report) {
    SectionTiming t;
    const auto report_start = clock::now();

    for (int step = 0; step < config.steps_per_report; ++step) {
      timed(t, Section::Nl, [&] {
        parallel_over(batch, W, [&](int w, std::int64_t b0, std::int64_t b1) {
          kernels::nl_step(state, plans[std::size_t(w)], b0, b1);
        });
        // keep magnitudes bounded across steps; the bracket is quadratic
        double peak = 0.0;
        for (const auto& c : state.f_modes) {
          peak = std::max(peak, std::fabs(c.real()));
          peak = std::max(peak, std::fabs(c.imag()));
        }
        if (peak > 1.0) {
          const double s = 1.0 / peak;
          for (auto& c : state.f_modes) c *= s;
        }
      });

      timed(t, Section::Coll, [&] {
        parallel_over(spatial, W, [&](int, std::int64_t s0, std::int64_t s1) {
          kernels::coll_step(state, collision, s0, s1);
        });
      });

      timed(t, Section::Str, [&] {
        parallel_over(batch, W, [&](int, std::int64_t b0, std::int64_t b1) {
          kernels::str_shift_into(state, shift_scratch, 1, b0, b1);
        });
        state.f_modes.swap(shift_scratch);
      });

      timed(t, Section::Field, [&] {
        parallel_over(spatial, W, [&](int, std::int64_t s0, std::int64_t s1) {
          kernels::field_reduce(state, field, s0, s1);
        });
        parallel_over(batch, W, [&](int, std::int64_t b0, std::int64_t b1) {
          kernels::field_broadcast(state, field, b0, b1);
        });
      });

      timed(t, Section::Shear, [&] {
        parallel_over(batch, W, [&](int, std::int64_t b0, std::int64_t b1) {
          kernels::shear_step(state, +1, b0, b1);
        });
      });

      timed(t, Section::Mem, [&] {
        parallel_over(std::int64_t(W), W, [&](int w, std::int64_t, std::int64_t) {
          kernels::mem_pass(mem_buffers[std::size_t(w)],
                            std::max<std::uint64_t>(1, mem_total_bytes / std::uint64_t(W)));
        });
      });

      timed(t, Section::Comm, [&] {
        if (W > 1) {
          std::vector<std::vector<Complex>> blocks(static_cast<std::size_t>(W));
          const std::int64_t per = comm_layout.block_len[0];
          for (int w = 0; w < W; ++w)
            blocks[std::size_t(w)].assign(state.f_modes.begin() + w * per,
                                          state.f_modes.begin() + (w + 1) * per);
          auto scattered = comm_scatter(comm_layout, blocks);
          auto gathered = comm_gather(comm_layout, scattered);
          for (int w = 0; w < W; ++w)
            std::copy(gathered[std::size_t(w)].begin(), gathered[std::size_t(w)].end(),
                      state.f_modes.begin() + w * per);
        }
      });

      timed(t, Section::Io, [&] { io_snapshot(state, snap_path); });
    }

    const double wall =
        std::chrono::duration<double>(clock::now() - report_start).count();
    (void)wall;  // sections are sub-intervals; total() <= wall by construction

    if (record_file.is_open()) {
      write_record(record_file, config.system, config.xpu_type, W, 1,
                   config.input.name, t, config.steps_per_report, config.seed);
      record_file.flush();
    }
    result.reports.push_back(t);
  }

  if (snap_is_temp) {
    std::error_code ec;
    std::filesystem::remove(snap_path, ec);
  }

  result.final_checksum = kernels::checksum(state);
  return result;
}

}  // namespace gyrobench::harness

#endif  // GYROBENCH_HARNESS_HPP
