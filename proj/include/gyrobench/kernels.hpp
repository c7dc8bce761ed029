#ifndef GYROBENCH_KERNELS_HPP
#define GYROBENCH_KERNELS_HPP

// Surrogate kernels, one per timed code section. Each preserves the
// performance shape of the section it stands in for (transform-bound,
// matvec-bound, bandwidth-bound, ...) while computing something small
// enough to verify exactly.
//
// Index conventions, used throughout:
//   batch member b   <-> (i2, i4, i5, i6), d2 slowest
//   spatial point s  <-> (i1, i2, i3)
//   velocity index j <-> (i4, i5, i6)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <span>
#include <variant>
#include <vector>

#include "gyrobench/common.hpp"
#include "gyrobench/fftplan.hpp"
#include "gyrobench/inputs.hpp"

namespace gyrobench::kernels {

using fft::Complex;

// Seeded spectral state: two mode planes per batch member plus velocity
// vectors per spatial point. Mode planes are kept consistent with a real
// field (the ky=0 column is Hermitian in kx), so c2r/r2c round trips are
// exact.
struct SpectralState {
  GridShape grid{0, 0, 0, 0, 0, 0};
  std::uint64_t seed = 0;
  std::vector<Complex> f_modes;       // [batch][d1][d3]
  std::vector<Complex> g_modes;       // [batch][d1][d3]
  std::vector<double> velocity;       // [spatial][nv]
  std::vector<double> field_weights;  // [nv], fixed for the life of the state

  std::int64_t batch() const noexcept { return grid.d2 * grid.d4 * grid.d5 * grid.d6; }
  std::int64_t plane_size() const noexcept { return grid.d1 * grid.d3; }
  std::int64_t spatial() const noexcept { return grid.d1 * grid.d2 * grid.d3; }
  std::int64_t nv() const noexcept { return grid.d4 * grid.d5 * grid.d6; }
  bool empty() const noexcept { return f_modes.empty() && velocity.empty(); }

  std::span<Complex> f_plane(std::int64_t b) noexcept {
    return {f_modes.data() + b * plane_size(), std::size_t(plane_size())};
  }
  std::span<const Complex> f_plane(std::int64_t b) const noexcept {
    return {f_modes.data() + b * plane_size(), std::size_t(plane_size())};
  }
  std::span<Complex> g_plane(std::int64_t b) noexcept {
    return {g_modes.data() + b * plane_size(), std::size_t(plane_size())};
  }
  std::span<const Complex> g_plane(std::int64_t b) const noexcept {
    return {g_modes.data() + b * plane_size(), std::size_t(plane_size())};
  }

  // d2 index of a batch member
  std::int64_t theta_of(std::int64_t b) const noexcept {
    return b / (grid.d4 * grid.d5 * grid.d6);
  }
};

// Force the ky=0 column of a mode plane to the structure a real field has:
// plane[(d1-j) % d1][0] = conj(plane[j][0]).
inline void enforce_real_field_symmetry(std::span<Complex> plane, std::int64_t d1,
                                        std::int64_t d3) {
  plane[0] = Complex(plane[0].real(), 0.0);
  for (std::int64_t j = 1; j <= d1 / 2; ++j) {
    if (j == d1 - j) {
      plane[std::size_t(j * d3)] = Complex(plane[std::size_t(j * d3)].real(), 0.0);
    } else {
      plane[std::size_t((d1 - j) * d3)] = std::conj(plane[std::size_t(j * d3)]);
    }
  }
}

inline SpectralState make_state(const GridShape& grid, std::uint64_t seed) {
  grid.validate();
  SpectralState st;
  st.grid = grid;
  st.seed = seed;

  const std::size_t planes = std::size_t(st.batch() * st.plane_size());
  st.f_modes.resize(planes);
  st.g_modes.resize(planes);
  st.velocity.resize(std::size_t(st.spatial() * st.nv()));
  st.field_weights.resize(std::size_t(st.nv()));

  detail::SplitMix64 rf(seed ^ 0x66696c64756c65ull);
  detail::SplitMix64 rg(seed ^ 0x676669656c6473ull);
  for (auto& c : st.f_modes) c = Complex(rf.next_double(-0.5, 0.5), rf.next_double(-0.5, 0.5));
  for (auto& c : st.g_modes) c = Complex(rg.next_double(-0.5, 0.5), rg.next_double(-0.5, 0.5));
  for (std::int64_t b = 0; b < st.batch(); ++b) {
    enforce_real_field_symmetry(st.f_plane(b), grid.d1, grid.d3);
    enforce_real_field_symmetry(st.g_plane(b), grid.d1, grid.d3);
  }

  detail::SplitMix64 rv(seed ^ 0x76656c6f63697ull);
  for (auto& v : st.velocity) v = rv.next_double(-1.0, 1.0);

  detail::SplitMix64 rw(seed ^ 0x77656967687473ull);
  double norm = 0.0;
  for (auto& w : st.field_weights) {
    w = rw.next_double(0.05, 1.0);
    norm += w;
  }
  for (auto& w : st.field_weights) w /= norm;

  return st;
}

// Order-fixed absolute sum over the whole state; bitwise reproducible for
// a given seed and step history.
inline double checksum(const SpectralState& st) {
  double sum = 0.0;
  for (const auto& c : st.f_modes) sum += std::fabs(c.real()) + std::fabs(c.imag());
  for (const auto& c : st.g_modes) sum += std::fabs(c.real()) + std::fabs(c.imag());
  for (double v : st.velocity) sum += std::fabs(v);
  return sum;
}

// ---- spectral derivatives ----------------------------------------------

// d/dx in mode space: multiply by i*kx. The radial Nyquist mode has no
// representable derivative and is zeroed, the usual pseudo-spectral rule.
inline void radial_derivative(std::span<const Complex> plane, std::int64_t d1,
                              std::int64_t d3, std::span<Complex> out) {
  for (std::int64_t j = 0; j < d1; ++j) {
    const std::int64_t kx = (2 * j == d1) ? 0 : fft::signed_kx(j, d1);
    for (std::int64_t k = 0; k < d3; ++k) {
      const Complex v = plane[std::size_t(j * d3 + k)];
      out[std::size_t(j * d3 + k)] = Complex(-double(kx) * v.imag(), double(kx) * v.real());
    }
  }
}

inline void toroidal_derivative(std::span<const Complex> plane, std::int64_t d1,
                                std::int64_t d3, std::span<Complex> out) {
  for (std::int64_t j = 0; j < d1; ++j)
    for (std::int64_t k = 0; k < d3; ++k) {
      const Complex v = plane[std::size_t(j * d3 + k)];
      out[std::size_t(j * d3 + k)] = Complex(-double(k) * v.imag(), double(k) * v.real());
    }
}

// ---- nl: dealiased Poisson bracket --------------------------------------

struct PlanSet {
  fft::PlanHandle c2r;
  fft::PlanHandle r2c;

  // Plans covering `nffts` batch members of the grid's fft shape
  // (nffts = full batch for single-worker use, a slice for partitioned use).
  static PlanSet make(const GridShape& grid, std::int64_t nffts,
                      const fft::BackendSemantics& sem, fft::FftBackend& backend) {
    const FftShape f = derive_fft_shape(grid);
    PlanSet p;
    p.c2r = fft::plan(fft::LogicalPlanSpec::make(fft::Direction::C2R, f.fft_x, f.fft_y, nffts),
                      sem, backend);
    p.r2c = fft::plan(fft::LogicalPlanSpec::make(fft::Direction::R2C, f.fft_x, f.fft_y, nffts),
                      sem, backend);
    return p;
  }
};

// F <- {F, G} = dF/dx dG/dy - dF/dy dG/dx on members [b0, b1), computed
// pseudo-spectrally: derivative, pad, four c2r, pointwise products, one
// r2c, truncate. The plans must cover exactly b1-b0 members.
inline void nl_step(SpectralState& st, const PlanSet& plans, std::int64_t b0,
                    std::int64_t b1) {
  const GridShape& g = st.grid;
  const auto& spec = plans.c2r.spec();
  const std::int64_t nb = b1 - b0;
  if (spec.nffts != nb || plans.r2c.spec().nffts != nb)
    throw fft::ExecutionError("plan batch does not match the member range");
  const FftShape f = derive_fft_shape(g);
  if (spec.nx != f.fft_x || spec.ny != f.fft_y)
    throw fft::ExecutionError("plan shape does not match the state grid");

  const std::int64_t ny2 = spec.ny2;
  const std::size_t cstride = std::size_t(spec.idist);
  const std::size_t rstride = std::size_t(2 * spec.odist);

  std::vector<Complex> spec_a(std::size_t(nb) * cstride);
  std::vector<Complex> spec_b(std::size_t(nb) * cstride);
  std::vector<double> real_a(std::size_t(nb) * rstride);
  std::vector<double> real_b(std::size_t(nb) * rstride);
  std::vector<double> product(std::size_t(nb) * rstride);
  std::vector<Complex> deriv(std::size_t(st.plane_size()));

  auto fill_spectra = [&](bool x_of_f) {
    // x_of_f: (dF/dx, dG/dy); otherwise (dF/dy, dG/dx)
    for (std::int64_t b = 0; b < nb; ++b) {
      const auto fp = st.f_plane(b0 + b);
      const auto gp = st.g_plane(b0 + b);
      std::span<Complex> pad_a{spec_a.data() + b * cstride, cstride};
      std::span<Complex> pad_b{spec_b.data() + b * cstride, cstride};
      if (x_of_f) {
        radial_derivative(fp, g.d1, g.d3, deriv);
        fft::dealias_pad_into(deriv, g, pad_a);
        toroidal_derivative(gp, g.d1, g.d3, deriv);
        fft::dealias_pad_into(deriv, g, pad_b);
      } else {
        toroidal_derivative(fp, g.d1, g.d3, deriv);
        fft::dealias_pad_into(deriv, g, pad_a);
        radial_derivative(gp, g.d1, g.d3, deriv);
        fft::dealias_pad_into(deriv, g, pad_b);
      }
    }
  };

  fill_spectra(true);
  fft::execute_c2r(plans.c2r, spec_a, real_a);
  fft::execute_c2r(plans.c2r, spec_b, real_b);
  for (std::size_t i = 0; i < product.size(); ++i) product[i] = real_a[i] * real_b[i];

  fill_spectra(false);
  fft::execute_c2r(plans.c2r, spec_a, real_a);
  fft::execute_c2r(plans.c2r, spec_b, real_b);
  for (std::size_t i = 0; i < product.size(); ++i) product[i] -= real_a[i] * real_b[i];

  fft::execute_r2c(plans.r2c, product, spec_a);

  const double scale = 1.0 / (double(spec.nx) * double(spec.ny));
  for (std::int64_t b = 0; b < nb; ++b) {
    fft::truncate_into({spec_a.data() + b * cstride, cstride}, g, deriv);
    auto fp = st.f_plane(b0 + b);
    for (std::size_t i = 0; i < fp.size(); ++i) fp[i] = deriv[i] * scale;
  }

  // the padded ny2 column can hold ky = d3 content from the products;
  // it is outside the retained band and was dropped by truncate
  (void)ny2;
}

inline void nl_step(SpectralState& st, const PlanSet& plans) {
  nl_step(st, plans, 0, st.batch());
}

// ---- coll: velocity-space collision operator -----------------------------

// Full mode holds one dense nv x nv matrix per spatial point, stored at the
// precision the mode's entry size asks for; simplified mode holds a single
// diagonal. Materialization refuses to exceed the memory budget.
class CollisionOperator {
public:
  static constexpr std::uint64_t kDefaultBudget = 1ull << 30;

  static CollisionOperator materialize(const GridShape& grid, const CollisionMode& mode,
                                       std::uint64_t seed,
                                       std::uint64_t budget_bytes = kDefaultBudget) {
    CollisionOperator op;
    op.nv_ = grid.d4 * grid.d5 * grid.d6;
    op.spatial_ = grid.d1 * grid.d2 * grid.d3;
    op.kind_ = mode.kind;

    if (mode.kind == CollisionKind::Simplified) {
      detail::SplitMix64 rng(seed ^ 0x73696d706cull);
      op.diagonal_.resize(std::size_t(op.nv_));
      for (auto& d : op.diagonal_) d = rng.next_double(0.85, 1.0);
      return op;
    }

    const std::uint64_t estimate = estimate_collision_memory(grid, mode);
    if (estimate > budget_bytes) throw BudgetError(estimate, budget_bytes);

    const std::size_t total = std::size_t(op.spatial_) * std::size_t(op.nv_ * op.nv_);
    detail::SplitMix64 rng(seed ^ 0x636f6c6c66756cull);
    // near-identity, infinity norm <= 1, so repeated application stays bounded
    const double off = 0.03 / double(op.nv_);
    auto entry = [&](std::size_t idx) {
      const std::int64_t i = std::int64_t(idx / std::size_t(op.nv_)) % op.nv_;
      const std::int64_t j = std::int64_t(idx % std::size_t(op.nv_));
      const double base = (i == j) ? 0.97 : 0.0;
      return base + rng.next_double(-off, off);
    };
    if (mode.entry_bytes == 4) {
      op.mats32_.resize(total);
      for (std::size_t idx = 0; idx < total; ++idx) op.mats32_[idx] = float(entry(idx));
    } else {
      op.mats64_.resize(total);
      for (std::size_t idx = 0; idx < total; ++idx) op.mats64_[idx] = entry(idx);
    }
    return op;
  }

  // explicit operators, mostly for tests and custom drivers
  static CollisionOperator full_from_matrices(std::int64_t spatial, std::int64_t nv,
                                              std::vector<double> matrices) {
    if (std::int64_t(matrices.size()) != spatial * nv * nv)
      throw DataError("matrix array size must be spatial * nv^2");
    CollisionOperator op;
    op.kind_ = CollisionKind::Full;
    op.spatial_ = spatial;
    op.nv_ = nv;
    op.mats64_ = std::move(matrices);
    return op;
  }

  static CollisionOperator simplified_from_diagonal(std::vector<double> diagonal) {
    CollisionOperator op;
    op.kind_ = CollisionKind::Simplified;
    op.nv_ = std::int64_t(diagonal.size());
    op.spatial_ = 0;  // diagonal applies to any spatial extent
    op.diagonal_ = std::move(diagonal);
    return op;
  }

  CollisionKind kind() const noexcept { return kind_; }
  std::int64_t nv() const noexcept { return nv_; }

  // v[s] <- A_s v[s] (full) or v[s] <- d o v[s] (simplified), s in [s0, s1)
  void apply(std::span<double> velocity, std::int64_t nv, std::int64_t s0,
             std::int64_t s1) const {
    if (nv != nv_) throw DataError("velocity dimension does not match the operator");
    if (kind_ == CollisionKind::Simplified) {
      for (std::int64_t s = s0; s < s1; ++s) {
        double* row = velocity.data() + s * nv;
        for (std::int64_t j = 0; j < nv; ++j) row[j] *= diagonal_[std::size_t(j)];
      }
      return;
    }
    std::vector<double> tmp(static_cast<std::size_t>(nv));
    for (std::int64_t s = s0; s < s1; ++s) {
      double* row = velocity.data() + s * nv;
      const std::size_t mat = std::size_t(s) * std::size_t(nv * nv);
      for (std::int64_t i = 0; i < nv; ++i) {
        double acc = 0.0;
        if (!mats32_.empty()) {
          const float* a = mats32_.data() + mat + std::size_t(i * nv);
          for (std::int64_t j = 0; j < nv; ++j) acc += double(a[j]) * row[j];
        } else {
          const double* a = mats64_.data() + mat + std::size_t(i * nv);
          for (std::int64_t j = 0; j < nv; ++j) acc += a[j] * row[j];
        }
        tmp[std::size_t(i)] = acc;
      }
      std::memcpy(row, tmp.data(), std::size_t(nv) * sizeof(double));
    }
  }

private:
  CollisionKind kind_ = CollisionKind::Simplified;
  std::int64_t spatial_ = 0;
  std::int64_t nv_ = 0;
  std::vector<float> mats32_;
  std::vector<double> mats64_;
  std::vector<double> diagonal_;
};

inline void coll_step(SpectralState& st, const CollisionOperator& op, std::int64_t s0,
                      std::int64_t s1) {
  op.apply(st.velocity, st.nv(), s0, s1);
}

inline void coll_step(SpectralState& st, const CollisionOperator& op) {
  coll_step(st, op, 0, st.spatial());
}

// ---- field: velocity reduction + broadcast -------------------------------

// field[s] = sum_j w_j v[s][j], exactly linear in v
inline void field_reduce(const SpectralState& st, std::span<double> field, std::int64_t s0,
                         std::int64_t s1) {
  const std::int64_t nv = st.nv();
  for (std::int64_t s = s0; s < s1; ++s) {
    const double* row = st.velocity.data() + s * nv;
    double acc = 0.0;
    for (std::int64_t j = 0; j < nv; ++j) acc += st.field_weights[std::size_t(j)] * row[j];
    field[std::size_t(s)] = acc;
  }
}

// F[b][a][c] *= field[(a, theta(b), c)]
inline void field_broadcast(SpectralState& st, std::span<const double> field,
                            std::int64_t b0, std::int64_t b1) {
  const GridShape& g = st.grid;
  for (std::int64_t b = b0; b < b1; ++b) {
    const std::int64_t i2 = st.theta_of(b);
    auto fp = st.f_plane(b);
    for (std::int64_t a = 0; a < g.d1; ++a)
      for (std::int64_t c = 0; c < g.d3; ++c)
        fp[std::size_t(a * g.d3 + c)] *= field[std::size_t((a * g.d2 + i2) * g.d3 + c)];
  }
}

inline std::vector<double> field_step(SpectralState& st) {
  std::vector<double> field(std::size_t(st.spatial()));
  field_reduce(st, field, 0, st.spatial());
  field_broadcast(st, field, 0, st.batch());
  return field;
}

// ---- str: periodic shift along the theta grouping ------------------------

// dst rows [b0, b1) get F from the member `offset` steps back along d2;
// a delta at theta index k lands at k + offset. Pure permutation, so the
// sum over all members is conserved exactly.
inline void str_shift_into(const SpectralState& st, std::span<Complex> dst,
                           std::int64_t offset, std::int64_t b0, std::int64_t b1) {
  const GridShape& g = st.grid;
  const std::int64_t inner = g.d4 * g.d5 * g.d6;
  const std::int64_t plane = st.plane_size();
  for (std::int64_t b = b0; b < b1; ++b) {
    const std::int64_t i2 = b / inner;
    const std::int64_t rest = b % inner;
    const std::int64_t src_i2 = ((i2 - offset) % g.d2 + g.d2) % g.d2;
    const std::int64_t src = src_i2 * inner + rest;
    std::copy_n(st.f_modes.data() + src * plane, std::size_t(plane), dst.data() + b * plane);
  }
}

inline void str_step(SpectralState& st, std::int64_t offset = 1) {
  std::vector<Complex> shifted(st.f_modes.size());
  str_shift_into(st, shifted, offset, 0, st.batch());
  st.f_modes.swap(shifted);
}

// ---- shear: radial index shift -------------------------------------------

// Shift mode rows by one index along d1 (per member, in place). dir=+1
// drops the last row and zero-fills the first; dir=-1 mirrors that.
inline void shear_step(SpectralState& st, int dir, std::int64_t b0, std::int64_t b1) {
  const GridShape& g = st.grid;
  const std::size_t rowbytes = std::size_t(g.d3) * sizeof(Complex);
  for (std::int64_t b = b0; b < b1; ++b) {
    auto fp = st.f_plane(b);
    if (dir >= 0) {
      for (std::int64_t a = g.d1 - 1; a >= 1; --a)
        std::memcpy(&fp[std::size_t(a * g.d3)], &fp[std::size_t((a - 1) * g.d3)], rowbytes);
      std::fill_n(fp.begin(), std::size_t(g.d3), Complex{0.0, 0.0});
    } else {
      for (std::int64_t a = 0; a + 1 < g.d1; ++a)
        std::memcpy(&fp[std::size_t(a * g.d3)], &fp[std::size_t((a + 1) * g.d3)], rowbytes);
      std::fill_n(fp.begin() + (g.d1 - 1) * g.d3, std::size_t(g.d3), Complex{0.0, 0.0});
    }
  }
}

inline void shear_step(SpectralState& st, int dir = +1) {
  shear_step(st, dir, 0, st.batch());
}

// ---- mem: bandwidth sweep -------------------------------------------------

struct MemBuffers {
  std::vector<unsigned char> src;
  std::vector<unsigned char> dst;
};

// Full read+write sweep of `bytes` bytes; returns achieved bytes moved per
// second (reads + writes). The copy itself is byte-exact; the rate is
// hardware-dependent and only sanity-bounded by callers.
inline double mem_pass(MemBuffers& buffers, std::uint64_t bytes) {
  if (bytes == 0) throw DataError("mem_pass needs a positive byte count");
  if (buffers.src.size() < bytes) {
    const std::size_t old = buffers.src.size();
    buffers.src.resize(bytes);
    for (std::size_t i = old; i < bytes; ++i)
      buffers.src[i] = static_cast<unsigned char>(i * 131u + 17u);
  }
  if (buffers.dst.size() < bytes) buffers.dst.resize(bytes);

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  std::uint64_t reps = 0;
  double elapsed = 0.0;
  do {
    std::memcpy(buffers.dst.data(), buffers.src.data(), bytes);
    ++reps;
    elapsed = std::chrono::duration<double>(clock::now() - start).count();
  } while (elapsed < 1e-4 && reps < 1000);

  if (elapsed <= 0.0) elapsed = 1e-9;  // clock floor
  return double(2 * bytes * reps) / elapsed;
}

}  // namespace gyrobench::kernels

#endif  // GYROBENCH_KERNELS_HPP
