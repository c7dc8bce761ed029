#ifndef GYROBENCH_FFTPLAN_HPP
#define GYROBENCH_FFTPLAN_HPP

// Backend-agnostic planning for batched 2D c2r/r2c transforms.
//
// A LogicalPlanSpec captures the transform every backend has to perform;
// normalize() lowers it to the PlanDescriptor a concrete library family
// expects. Two descriptor conventions exist in the wild: the cuFFT/hipFFT
// one (rank array in natural slow-to-fast order) and the oneMKL-offload
// one (rank array reversed, embed arrays filled per dimension, execution
// behind a dispatch region). The math never changes, only the descriptor.
//
// Array layout, shared by all backends:
//   complex half-spectrum  [nffts][nx][ny2]   member stride = idist = nx*ny2
//   real field             [nffts][nx][2*ny2] rows padded to complex pitch,
//                          first ny values per row are meaningful
// idist/odist count complex-element pitches, so the real member stride in
// doubles is 2*odist.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gyrobench/common.hpp"
#include "gyrobench/inputs.hpp"

namespace gyrobench::fft {

using Complex = std::complex<double>;

enum class Direction { C2R, R2C };

struct LogicalPlanSpec {
  Direction direction = Direction::C2R;
  std::int64_t nx = 0;     // slow logical dim (= fft_x)
  std::int64_t ny = 0;     // fast logical dim (= fft_y)
  std::int64_t ny2 = 0;    // complex extent of the fast dim, ny/2 + 1
  std::int64_t nffts = 0;  // batch
  std::int64_t idist = 0;  // elements between consecutive input members
  std::int64_t odist = 0;  // elements between consecutive output members

  static LogicalPlanSpec make(Direction dir, std::int64_t nx, std::int64_t ny,
                              std::int64_t nffts) {
    LogicalPlanSpec s;
    s.direction = dir;
    s.nx = nx;
    s.ny = ny;
    s.ny2 = ny / 2 + 1;
    s.nffts = nffts;
    s.idist = s.odist = s.ny2 * nx;
    return s;
  }

  static LogicalPlanSpec for_grid(const GridShape& grid, Direction dir) {
    const FftShape f = derive_fft_shape(grid);
    return make(dir, f.fft_x, f.fft_y, f.batch);
  }

  void validate() const {
    if (nx < 1 || ny < 1 || nffts < 1)
      throw DataError("plan spec dims must be positive");
    if (ny2 != ny / 2 + 1)
      throw DataError("plan spec ny2 must be ny/2+1, got " + std::to_string(ny2));
    if (idist != ny2 * nx || odist != ny2 * nx)
      throw DataError("plan spec requires idist = odist = ny2*nx");
  }

  std::size_t complex_elems() const { return std::size_t(nffts) * std::size_t(idist); }
  std::size_t real_elems() const { return std::size_t(nffts) * 2 * std::size_t(odist); }
  std::int64_t real_row_pitch() const { return 2 * ny2; }  // doubles per padded row

  friend bool operator==(const LogicalPlanSpec&, const LogicalPlanSpec&) = default;
};

enum class RankOrder { Natural, Reversed };
enum class EmbedStyle { FastDimOnly, FullPerDim };
enum class DispatchStyle { DevicePointerRegion, DispatchRegion };

// The two observed library profiles. Reversed rank order comes with
// per-dimension embed arrays and dispatch-region execution; natural order
// with fast-dim-only embeds and device-pointer regions.
struct BackendSemantics {
  RankOrder rank_order = RankOrder::Natural;
  EmbedStyle embed_style = EmbedStyle::FastDimOnly;
  DispatchStyle dispatch = DispatchStyle::DevicePointerRegion;

  static BackendSemantics natural() {
    return {RankOrder::Natural, EmbedStyle::FastDimOnly, DispatchStyle::DevicePointerRegion};
  }
  static BackendSemantics reversed() {
    return {RankOrder::Reversed, EmbedStyle::FullPerDim, DispatchStyle::DispatchRegion};
  }

  void validate() const {
    const bool rev = rank_order == RankOrder::Reversed;
    if (rev != (embed_style == EmbedStyle::FullPerDim) ||
        rev != (dispatch == DispatchStyle::DispatchRegion))
      throw DataError("inconsistent backend semantics profile");
  }

  friend bool operator==(const BackendSemantics&, const BackendSemantics&) = default;
};

// What a vendor planning call would receive.
struct PlanDescriptor {
  std::array<std::int64_t, 2> ndim{};
  std::array<std::int64_t, 2> inembed{};
  std::array<std::int64_t, 2> onembed{};
  std::int64_t idist = 0;
  std::int64_t odist = 0;
  std::int64_t nffts = 0;

  std::string str() const {
    return "ndim=(" + std::to_string(ndim[0]) + "," + std::to_string(ndim[1]) +
           ") inembed=(" + std::to_string(inembed[0]) + "," + std::to_string(inembed[1]) +
           ") idist=" + std::to_string(idist) + " odist=" + std::to_string(odist) +
           " nffts=" + std::to_string(nffts);
  }

  friend bool operator==(const PlanDescriptor&, const PlanDescriptor&) = default;
};

inline PlanDescriptor normalize(const LogicalPlanSpec& spec, const BackendSemantics& sem) {
  spec.validate();
  sem.validate();
  PlanDescriptor d;
  d.idist = spec.idist;
  d.odist = spec.odist;
  d.nffts = spec.nffts;
  if (sem.rank_order == RankOrder::Natural) {
    d.ndim = {spec.nx, spec.ny};
    // whole-array assignment; only the fast-dim entry is meaningful
    d.inembed = {spec.ny2, spec.ny2};
    d.onembed = {spec.ny2, spec.ny2};
  } else {
    d.ndim = {spec.ny, spec.nx};
    d.inembed = {spec.ny2, spec.nx};
    d.onembed = {spec.ny2, spec.nx};
  }
  return d;
}

class PlanError : public Error {
public:
  PlanError(const std::string& what, const PlanDescriptor& desc)
      : Error(what + " [" + desc.str() + "]"), descriptor_(desc) {}
  const PlanDescriptor& descriptor() const noexcept { return descriptor_; }

private:
  PlanDescriptor descriptor_;
};

class ExecutionError : public Error {
public:
  using Error::Error;
};

// Adapter contract for transform libraries. plan -> opaque token,
// execute with caller-owned buffers, destroy. Implementations must keep
// execute const-safe: plans are shared across threads and concurrent
// executions on disjoint buffers are allowed.
class FftBackend {
public:
  virtual ~FftBackend() = default;
  virtual std::string_view name() const noexcept = 0;
  virtual bool supports(Direction dir) const noexcept = 0;
  virtual void* create_plan(const LogicalPlanSpec& spec, const PlanDescriptor& desc) = 0;
  virtual void execute_c2r(const void* token, std::span<const Complex> in,
                           std::span<double> out) const = 0;
  virtual void execute_r2c(const void* token, std::span<const double> in,
                           std::span<Complex> out) const = 0;
  virtual void destroy_plan(void* token) noexcept = 0;
};

// Reusable plan. Planning happens once; executions may be repeated and
// always produce identical output for identical input.
class PlanHandle {
public:
  PlanHandle() = default;
  PlanHandle(FftBackend& backend, const LogicalPlanSpec& spec, const BackendSemantics& sem)
      : backend_(&backend), spec_(spec), desc_(normalize(spec, sem)) {
    if (!backend.supports(spec.direction))
      throw PlanError("backend '" + std::string(backend.name()) +
                          "' does not support the requested direction",
                      desc_);
    token_ = backend.create_plan(spec_, desc_);
  }

  PlanHandle(PlanHandle&& other) noexcept { swap(other); }
  PlanHandle& operator=(PlanHandle&& other) noexcept {
    if (this != &other) {
      reset();
      swap(other);
    }
    return *this;
  }
  PlanHandle(const PlanHandle&) = delete;
  PlanHandle& operator=(const PlanHandle&) = delete;
  ~PlanHandle() { reset(); }

  bool valid() const noexcept { return token_ != nullptr; }
  const LogicalPlanSpec& spec() const noexcept { return spec_; }
  const PlanDescriptor& descriptor() const noexcept { return desc_; }
  const FftBackend& backend() const noexcept { return *backend_; }
  const void* token() const noexcept { return token_; }

private:
  void swap(PlanHandle& other) noexcept {
    std::swap(backend_, other.backend_);
    std::swap(spec_, other.spec_);
    std::swap(desc_, other.desc_);
    std::swap(token_, other.token_);
  }
  void reset() noexcept {
    if (token_) backend_->destroy_plan(token_);
    token_ = nullptr;
  }

  FftBackend* backend_ = nullptr;
  LogicalPlanSpec spec_;
  PlanDescriptor desc_;
  void* token_ = nullptr;
};

inline PlanHandle plan(const LogicalPlanSpec& spec, const BackendSemantics& sem,
                       FftBackend& backend) {
  return PlanHandle(backend, spec, sem);
}

inline void execute_c2r(const PlanHandle& h, std::span<const Complex> in,
                        std::span<double> out) {
  const auto& s = h.spec();
  if (s.direction != Direction::C2R)
    throw ExecutionError("plan was built for r2c, not c2r");
  if (in.size() != s.complex_elems() || out.size() != s.real_elems())
    throw ExecutionError("c2r buffer sizes do not match the plan");
  h.backend().execute_c2r(h.token(), in, out);
}

inline void execute_r2c(const PlanHandle& h, std::span<const double> in,
                        std::span<Complex> out) {
  const auto& s = h.spec();
  if (s.direction != Direction::R2C)
    throw ExecutionError("plan was built for c2r, not r2c");
  if (in.size() != s.real_elems() || out.size() != s.complex_elems())
    throw ExecutionError("r2c buffer sizes do not match the plan");
  h.backend().execute_r2c(h.token(), in, out);
}

inline std::vector<double> execute_c2r(const PlanHandle& h, std::span<const Complex> in) {
  std::vector<double> out(h.spec().real_elems());
  execute_c2r(h, in, out);
  return out;
}

inline std::vector<Complex> execute_r2c(const PlanHandle& h, std::span<const double> in) {
  std::vector<Complex> out(h.spec().complex_elems());
  execute_r2c(h, in, out);
  return out;
}

namespace detail {

// Mixed-radix out-of-place complex FFT for one fixed length. Twiddles are
// precomputed at plan time, so run() is const and reentrant. Works for any
// length; prime factors fall back to a direct p-point combine.
class Radix1d {
public:
  Radix1d() = default;

  explicit Radix1d(std::int64_t n) : n_(n) {
    std::int64_t rest = n;
    for (std::int64_t p = 2; p * p <= rest;) {
      if (rest % p == 0) {
        factors_.push_back(p);
        rest /= p;
      } else {
        ++p;
      }
    }
    if (rest > 1) factors_.push_back(rest);
    max_factor_ = 1;
    for (auto f : factors_) max_factor_ = std::max(max_factor_, f);

    roots_.resize(std::size_t(n));
    for (std::int64_t j = 0; j < n; ++j) {
      const double phase = -2.0 * std::numbers::pi * double(j) / double(n);
      roots_[std::size_t(j)] = Complex(std::cos(phase), std::sin(phase));
    }
  }

  std::int64_t length() const noexcept { return n_; }
  std::int64_t max_factor() const noexcept { return max_factor_; }

  // sign -1: forward, +1: unnormalized inverse. in and out must not alias;
  // scratch holds at least max_factor() elements.
  void run(const Complex* in, Complex* out, int sign, Complex* scratch) const {
    rec(out, in, n_, 1, 0, sign, scratch);
  }

private:
  Complex twiddle(std::int64_t index, int sign) const {
    const Complex w = roots_[std::size_t(index)];
    return sign < 0 ? w : std::conj(w);
  }

  void rec(Complex* out, const Complex* in, std::int64_t n, std::int64_t stride,
           std::size_t depth, int sign, Complex* scratch) const {
    if (n == 1) {
      out[0] = in[0];
      return;
    }
    const std::int64_t p = factors_[depth];
    const std::int64_t m = n / p;
    for (std::int64_t q = 0; q < p; ++q)
      rec(out + q * m, in + q * stride, m, stride * p, depth + 1, sign, scratch);

    // stride == n_/n, so roots of order n live at that spacing in roots_
    const std::int64_t step_n = stride;
    const std::int64_t step_p = stride * m;
    for (std::int64_t k1 = 0; k1 < m; ++k1) {
      for (std::int64_t q = 0; q < p; ++q)
        scratch[q] = out[q * m + k1] * twiddle(((q * k1) % n) * step_n, sign);
      for (std::int64_t q1 = 0; q1 < p; ++q1) {
        Complex acc{0.0, 0.0};
        for (std::int64_t q = 0; q < p; ++q)
          acc += scratch[q] * twiddle(((q * q1) % p) * step_p, sign);
        out[q1 * m + k1] = acc;
      }
    }
  }

  std::int64_t n_ = 1;
  std::vector<std::int64_t> factors_;
  std::int64_t max_factor_ = 1;
  std::vector<Complex> roots_;
};

}  // namespace detail

// Portable CPU executor behind the adapter contract. Unnormalized in both
// directions: r2c(c2r(S)) = (nx*ny) * S.
class ReferenceBackend final : public FftBackend {
public:
  std::string_view name() const noexcept override { return "reference"; }
  bool supports(Direction) const noexcept override { return true; }

  void* create_plan(const LogicalPlanSpec& spec, const PlanDescriptor& desc) override {
    try {
      auto plan = std::make_unique<RefPlan>();
      plan->spec = spec;
      plan->along_x = detail::Radix1d(spec.nx);
      plan->along_y = detail::Radix1d(spec.ny);
      return plan.release();
    } catch (const std::bad_alloc&) {
      throw PlanError("out of memory while planning", desc);
    }
  }

  void execute_c2r(const void* token, std::span<const Complex> in,
                   std::span<double> out) const override {
    const auto& plan = *static_cast<const RefPlan*>(token);
    const auto& s = plan.spec;
    Workspace ws(plan);

    const std::int64_t pitch = s.real_row_pitch();
    for (std::int64_t b = 0; b < s.nffts; ++b) {
      const Complex* src = in.data() + b * s.idist;
      double* dst = out.data() + b * 2 * s.odist;

      // inverse along the slow dim, one column per retained ky
      for (std::int64_t ky = 0; ky < s.ny2; ++ky) {
        for (std::int64_t i = 0; i < s.nx; ++i) ws.col[std::size_t(i)] = src[i * s.ny2 + ky];
        plan.along_x.run(ws.col.data(), ws.col2.data(), +1, ws.radix.data());
        for (std::int64_t i = 0; i < s.nx; ++i)
          ws.plane[std::size_t(i * s.ny2 + ky)] = ws.col2[std::size_t(i)];
      }

      // per row: Hermitian extension along the fast dim, inverse, real part
      for (std::int64_t i = 0; i < s.nx; ++i) {
        const Complex* row = ws.plane.data() + i * s.ny2;
        for (std::int64_t k = 0; k < s.ny2; ++k) ws.row[std::size_t(k)] = row[k];
        for (std::int64_t k = 1; k < (s.ny + 1) / 2; ++k)
          ws.row[std::size_t(s.ny - k)] = std::conj(row[k]);
        plan.along_y.run(ws.row.data(), ws.row2.data(), +1, ws.radix.data());
        double* out_row = dst + i * pitch;
        for (std::int64_t y = 0; y < s.ny; ++y) out_row[y] = ws.row2[std::size_t(y)].real();
        for (std::int64_t y = s.ny; y < pitch; ++y) out_row[y] = 0.0;
      }
    }
  }

  void execute_r2c(const void* token, std::span<const double> in,
                   std::span<Complex> out) const override {
    const auto& plan = *static_cast<const RefPlan*>(token);
    const auto& s = plan.spec;
    Workspace ws(plan);

    const std::int64_t pitch = s.real_row_pitch();
    for (std::int64_t b = 0; b < s.nffts; ++b) {
      const double* src = in.data() + b * 2 * s.odist;
      Complex* dst = out.data() + b * s.idist;

      // forward along the fast dim, keep the half spectrum
      for (std::int64_t i = 0; i < s.nx; ++i) {
        const double* in_row = src + i * pitch;
        for (std::int64_t y = 0; y < s.ny; ++y) ws.row[std::size_t(y)] = Complex(in_row[y], 0.0);
        plan.along_y.run(ws.row.data(), ws.row2.data(), -1, ws.radix.data());
        for (std::int64_t k = 0; k < s.ny2; ++k)
          ws.plane[std::size_t(i * s.ny2 + k)] = ws.row2[std::size_t(k)];
      }

      // forward along the slow dim
      for (std::int64_t ky = 0; ky < s.ny2; ++ky) {
        for (std::int64_t i = 0; i < s.nx; ++i)
          ws.col[std::size_t(i)] = ws.plane[std::size_t(i * s.ny2 + ky)];
        plan.along_x.run(ws.col.data(), ws.col2.data(), -1, ws.radix.data());
        for (std::int64_t i = 0; i < s.nx; ++i) dst[i * s.ny2 + ky] = ws.col2[std::size_t(i)];
      }
    }
  }

  void destroy_plan(void* token) noexcept override {
    delete static_cast<RefPlan*>(token);
  }

private:
  struct RefPlan {
    LogicalPlanSpec spec;
    detail::Radix1d along_x;
    detail::Radix1d along_y;
  };

  // Per-call scratch, so concurrent executions never share state.
  struct Workspace {
    explicit Workspace(const RefPlan& p)
        : col(std::size_t(p.spec.nx)),
          col2(std::size_t(p.spec.nx)),
          row(std::size_t(p.spec.ny)),
          row2(std::size_t(p.spec.ny)),
          plane(std::size_t(p.spec.nx * p.spec.ny2)),
          radix(std::size_t(std::max(p.along_x.max_factor(), p.along_y.max_factor()))) {}
    std::vector<Complex> col, col2, row, row2, plane, radix;
  };
};

inline ReferenceBackend& reference_backend() {
  static ReferenceBackend backend;
  return backend;
}

// ---- dealiasing --------------------------------------------------------

// Place [d1 x d3] modes into the padded [fft_x x ny2] half spectrum:
// non-negative radial wavenumbers (rows 0..d1/2) stay at the front,
// negative ones wrap to the tail, toroidal modes fill the first d3 slots.
inline void dealias_pad_into(std::span<const Complex> modes, const GridShape& grid,
                             std::span<Complex> padded) {
  const FftShape f = derive_fft_shape(grid);
  const std::int64_t ny2 = f.fft_y / 2 + 1;
  if (std::int64_t(modes.size()) != grid.d1 * grid.d3)
    throw DataError("mode array size does not match the grid");
  if (grid.d3 > ny2 || grid.d1 > f.fft_x)
    throw DataError("mode counts exceed the padded extents");
  if (std::int64_t(padded.size()) != f.fft_x * ny2)
    throw DataError("padded array size does not match the fft shape");

  std::fill(padded.begin(), padded.end(), Complex{0.0, 0.0});
  for (std::int64_t j = 0; j < grid.d1; ++j) {
    const std::int64_t row = j <= grid.d1 / 2 ? j : f.fft_x - grid.d1 + j;
    for (std::int64_t k = 0; k < grid.d3; ++k)
      padded[std::size_t(row * ny2 + k)] = modes[std::size_t(j * grid.d3 + k)];
  }
}

// Exact left inverse of dealias_pad_into.
inline void truncate_into(std::span<const Complex> padded, const GridShape& grid,
                          std::span<Complex> modes) {
  const FftShape f = derive_fft_shape(grid);
  const std::int64_t ny2 = f.fft_y / 2 + 1;
  if (std::int64_t(padded.size()) != f.fft_x * ny2)
    throw DataError("padded array size does not match the fft shape");
  if (std::int64_t(modes.size()) != grid.d1 * grid.d3)
    throw DataError("mode array size does not match the grid");

  for (std::int64_t j = 0; j < grid.d1; ++j) {
    const std::int64_t row = j <= grid.d1 / 2 ? j : f.fft_x - grid.d1 + j;
    for (std::int64_t k = 0; k < grid.d3; ++k)
      modes[std::size_t(j * grid.d3 + k)] = padded[std::size_t(row * ny2 + k)];
  }
}

inline std::vector<Complex> dealias_pad(std::span<const Complex> modes,
                                        const GridShape& grid) {
  const FftShape f = derive_fft_shape(grid);
  std::vector<Complex> padded(std::size_t(f.fft_x * (f.fft_y / 2 + 1)));
  dealias_pad_into(modes, grid, padded);
  return padded;
}

inline std::vector<Complex> truncate(std::span<const Complex> padded,
                                     const GridShape& grid) {
  std::vector<Complex> modes(std::size_t(grid.d1 * grid.d3));
  truncate_into(padded, grid, modes);
  return modes;
}

// Signed radial wavenumber for a mode row index in FFT storage order.
inline std::int64_t signed_kx(std::int64_t index, std::int64_t d1) noexcept {
  return index <= d1 / 2 ? index : index - d1;
}

}  // namespace gyrobench::fft

#endif  // GYROBENCH_FFTPLAN_HPP
