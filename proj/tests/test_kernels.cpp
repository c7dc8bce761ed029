#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "gyrobench/kernels.hpp"
#include "oracles.hpp"

using namespace gyrobench;
using fft::Complex;
using kernels::SpectralState;

namespace {

SpectralState small_state(const GridShape& g, std::uint64_t seed) {
  return kernels::make_state(g, seed);
}

kernels::PlanSet plans_for(const SpectralState& st) {
  return kernels::PlanSet::make(st.grid, st.batch(), fft::BackendSemantics::natural(),
                                fft::reference_backend());
}

double max_abs(std::span<const Complex> v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST_CASE("make_state is seed-deterministic and real-field consistent") {
  const GridShape g{8, 3, 4, 2, 2, 1};
  const auto a = small_state(g, 42);
  const auto b = small_state(g, 42);
  const auto c = small_state(g, 43);

  CHECK(a.f_modes == b.f_modes);
  CHECK(a.g_modes == b.g_modes);
  CHECK(a.velocity == b.velocity);
  CHECK(a.field_weights == b.field_weights);
  CHECK(a.f_modes != c.f_modes);
  CHECK(kernels::checksum(a) == kernels::checksum(b));

  // ky=0 column of every member is Hermitian in kx
  for (std::int64_t b_i = 0; b_i < a.batch(); ++b_i) {
    const auto plane = a.f_plane(b_i);
    CHECK(plane[0].imag() == 0.0);
    CHECK(plane[std::size_t(g.d1 / 2 * g.d3)].imag() == 0.0);
    for (std::int64_t j = 1; j < g.d1 / 2; ++j)
      CHECK(plane[std::size_t((g.d1 - j) * g.d3)] ==
            std::conj(plane[std::size_t(j * g.d3)]));
  }

  double wsum = 0.0;
  for (double w : a.field_weights) {
    CHECK(w > 0.0);
    wsum += w;
  }
  CHECK(wsum == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bracket of a field with itself vanishes") {
  auto st = small_state({8, 1, 8, 1, 1, 1}, 7);
  st.g_modes = st.f_modes;
  kernels::nl_step(st, plans_for(st));
  CHECK(max_abs(st.f_modes) <= 1e-10);
}

TEST_CASE("bracket is antisymmetric") {
  const GridShape g{8, 1, 8, 1, 1, 1};
  auto ab = small_state(g, 11);
  auto ba = small_state(g, 11);
  std::swap(ba.f_modes, ba.g_modes);
  // both swapped planes keep the real-field symmetry, so the pipelines match
  kernels::nl_step(ab, plans_for(ab));
  kernels::nl_step(ba, plans_for(ba));
  double worst = 0.0;
  for (std::size_t i = 0; i < ab.f_modes.size(); ++i)
    worst = std::max(worst, std::abs(ab.f_modes[i] + ba.f_modes[i]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("bracket matches the direct convolution oracle") {
  for (const GridShape& g : {GridShape{4, 1, 4, 1, 1, 1}, GridShape{8, 1, 8, 1, 1, 1},
                             GridShape{4, 2, 4, 2, 1, 1}}) {
    auto st = small_state(g, 1234 + g.d1);
    const auto f0 = st.f_modes;
    const auto g0 = st.g_modes;
    kernels::nl_step(st, plans_for(st));

    for (std::int64_t b = 0; b < st.batch(); ++b) {
      const auto expect = oracle::bracket(
          {f0.data() + b * st.plane_size(), std::size_t(st.plane_size())},
          {g0.data() + b * st.plane_size(), std::size_t(st.plane_size())}, g);
      double worst = 0.0;
      for (std::int64_t i = 0; i < st.plane_size(); ++i)
        worst = std::max(worst,
                         std::abs(st.f_plane(b)[std::size_t(i)] - expect[std::size_t(i)]));
      INFO("grid d1=" << g.d1 << " d3=" << g.d3 << " member " << b);
      CHECK(worst <= 1e-9);
    }
  }
}

TEST_CASE("nl_step validates plan shape and range") {
  auto st = small_state({4, 1, 4, 1, 1, 1}, 3);
  auto wrong = kernels::PlanSet::make({8, 1, 8, 1, 1, 1}, 1, fft::BackendSemantics::natural(),
                                      fft::reference_backend());
  CHECK_THROWS_AS(kernels::nl_step(st, wrong), fft::ExecutionError);
}

TEST_CASE("collision operator") {
  SECTION("identity matrices leave velocity unchanged") {
    auto st = small_state({4, 1, 2, 3, 1, 1}, 5);
    const std::int64_t nv = st.nv(), spatial = st.spatial();
    std::vector<double> mats(std::size_t(spatial * nv * nv), 0.0);
    for (std::int64_t s = 0; s < spatial; ++s)
      for (std::int64_t i = 0; i < nv; ++i)
        mats[std::size_t(s * nv * nv + i * nv + i)] = 1.0;
    const auto op = kernels::CollisionOperator::full_from_matrices(spatial, nv, mats);
    const auto before = st.velocity;
    kernels::coll_step(st, op);
    CHECK(st.velocity == before);
  }

  SECTION("3x3 matvec matches hand arithmetic") {
    const std::vector<double> a = {1.0, 2.0,  3.0,  //
                                   0.5, -1.0, 0.0,  //
                                   2.0, 0.0,  1.5};
    const auto op = kernels::CollisionOperator::full_from_matrices(1, 3, a);
    SpectralState st;
    st.grid = {1, 1, 1, 3, 1, 1};  // d1 odd is fine here: no transforms involved
    st.velocity = {2.0, -1.0, 4.0};
    kernels::coll_step(st, op, 0, 1);
    CHECK(st.velocity[0] == Catch::Approx(2.0 - 2.0 + 12.0));
    CHECK(st.velocity[1] == Catch::Approx(1.0 + 1.0 + 0.0));
    CHECK(st.velocity[2] == Catch::Approx(4.0 + 0.0 + 6.0));
  }

  SECTION("simplified with unit diagonal is the identity") {
    auto st = small_state({4, 1, 2, 2, 2, 1}, 6);
    const auto op =
        kernels::CollisionOperator::simplified_from_diagonal(std::vector<double>(4, 1.0));
    const auto before = st.velocity;
    kernels::coll_step(st, op);
    CHECK(st.velocity == before);
  }

  SECTION("materialized full operator is seeded and budget-checked") {
    const GridShape g{4, 2, 2, 2, 2, 1};
    const auto mode = CollisionMode::full(8);
    auto a = kernels::CollisionOperator::materialize(g, mode, 9);
    auto b = kernels::CollisionOperator::materialize(g, mode, 9);
    auto st1 = small_state(g, 21);
    auto st2 = st1;
    kernels::coll_step(st1, a);
    kernels::coll_step(st2, b);
    CHECK(st1.velocity == st2.velocity);

    // repeated application must not blow up (infinity norm <= 1)
    double peak0 = 0.0;
    for (double v : st1.velocity) peak0 = std::max(peak0, std::fabs(v));
    for (int i = 0; i < 50; ++i) kernels::coll_step(st1, a);
    double peak = 0.0;
    for (double v : st1.velocity) peak = std::max(peak, std::fabs(v));
    CHECK(peak <= peak0 + 1e-12);
    CHECK(std::isfinite(peak));
  }

  SECTION("budget refusal carries the estimate") {
    const auto n102 = *find_input("n102");
    try {
      kernels::CollisionOperator::materialize(n102.grid, n102.collision, 1);
      FAIL("expected BudgetError");
    } catch (const BudgetError& e) {
      CHECK(e.estimate() == 38'654'705'664ull);
      CHECK(e.budget() == (1ull << 30));
    }
  }

  SECTION("fp32 storage differs from fp64 storage only at float precision") {
    const GridShape g{2, 1, 1, 2, 1, 1};
    auto st32 = small_state(g, 33);
    auto st64 = st32;
    kernels::coll_step(st32, kernels::CollisionOperator::materialize(g, CollisionMode::full(4), 2));
    kernels::coll_step(st64, kernels::CollisionOperator::materialize(g, CollisionMode::full(8), 2));
    for (std::size_t i = 0; i < st32.velocity.size(); ++i)
      CHECK(st32.velocity[i] == Catch::Approx(st64.velocity[i]).margin(1e-5));
  }

  SECTION("velocity dimension mismatch is rejected") {
    auto st = small_state({4, 1, 2, 2, 1, 1}, 5);
    const auto op =
        kernels::CollisionOperator::simplified_from_diagonal(std::vector<double>(3, 1.0));
    CHECK_THROWS_AS(kernels::coll_step(st, op), DataError);
  }
}

TEST_CASE("field step") {
  const GridShape g{4, 3, 2, 2, 2, 1};

  SECTION("zero velocity gives a zero field") {
    auto st = small_state(g, 8);
    std::fill(st.velocity.begin(), st.velocity.end(), 0.0);
    const auto field = kernels::field_step(st);
    for (double v : field) CHECK(v == 0.0);
    for (const auto& c : st.f_modes) CHECK(c == Complex{0.0, 0.0});
  }

  SECTION("basis weight selects one velocity slice") {
    auto st = small_state(g, 9);
    std::fill(st.field_weights.begin(), st.field_weights.end(), 0.0);
    st.field_weights[2] = 1.0;
    std::vector<double> field(std::size_t(st.spatial()));
    kernels::field_reduce(st, field, 0, st.spatial());
    for (std::int64_t s = 0; s < st.spatial(); ++s)
      CHECK(field[std::size_t(s)] == st.velocity[std::size_t(s * st.nv() + 2)]);
  }

  SECTION("random case matches the direct sum and broadcast") {
    auto st = small_state(g, 10);
    const auto f0 = st.f_modes;
    const auto field = kernels::field_step(st);

    for (std::int64_t s = 0; s < st.spatial(); ++s) {
      double acc = 0.0;
      for (std::int64_t j = 0; j < st.nv(); ++j)
        acc += st.field_weights[std::size_t(j)] * st.velocity[std::size_t(s * st.nv() + j)];
      CHECK(field[std::size_t(s)] == Catch::Approx(acc).margin(1e-12));
    }

    const std::int64_t inner = g.d4 * g.d5 * g.d6;
    for (std::int64_t b = 0; b < st.batch(); ++b) {
      const std::int64_t i2 = b / inner;
      for (std::int64_t a = 0; a < g.d1; ++a)
        for (std::int64_t c = 0; c < g.d3; ++c) {
          const auto expect = f0[std::size_t(b * st.plane_size() + a * g.d3 + c)] *
                              field[std::size_t((a * g.d2 + i2) * g.d3 + c)];
          const auto got = st.f_plane(b)[std::size_t(a * g.d3 + c)];
          CHECK(std::abs(got - expect) <= 1e-12);
        }
    }
  }
}

TEST_CASE("streaming shift") {
  const GridShape g{4, 5, 2, 1, 2, 1};

  SECTION("full period is the identity") {
    auto st = small_state(g, 12);
    const auto before = st.f_modes;
    kernels::str_step(st, g.d2);
    CHECK(st.f_modes == before);
  }

  SECTION("shift is a pure permutation of the stored values") {
    auto st = small_state(g, 13);
    auto sorted = [](std::vector<Complex> v) {
      std::sort(v.begin(), v.end(), [](const Complex& a, const Complex& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
      });
      return v;
    };
    const auto before = sorted(st.f_modes);
    kernels::str_step(st, 1);
    CHECK(sorted(st.f_modes) == before);
  }

  SECTION("a delta moves to the next theta index, wrapping") {
    auto st = small_state(g, 14);
    std::fill(st.f_modes.begin(), st.f_modes.end(), Complex{0.0, 0.0});
    const std::int64_t inner = g.d4 * g.d5 * g.d6;
    const std::int64_t rest = 1;  // arbitrary inner member
    const std::int64_t src_theta = g.d2 - 1;
    st.f_plane(src_theta * inner + rest)[3] = Complex{2.5, -1.0};
    kernels::str_step(st, 1);
    for (std::int64_t b = 0; b < st.batch(); ++b)
      for (std::int64_t i = 0; i < st.plane_size(); ++i) {
        const Complex c = st.f_plane(b)[std::size_t(i)];
        if (b == 0 * inner + rest && i == 3) {
          CHECK(c == Complex{2.5, -1.0});
        } else {
          CHECK(c == Complex{0.0, 0.0});
        }
      }
  }
}

TEST_CASE("shear shift") {
  const GridShape g{6, 2, 3, 1, 1, 2};

  SECTION("zero stays zero") {
    auto st = small_state(g, 15);
    std::fill(st.f_modes.begin(), st.f_modes.end(), Complex{0.0, 0.0});
    kernels::shear_step(st, +1);
    for (const auto& c : st.f_modes) CHECK(c == Complex{0.0, 0.0});
  }

  SECTION("single row moves up by one") {
    auto st = small_state(g, 16);
    std::fill(st.f_modes.begin(), st.f_modes.end(), Complex{0.0, 0.0});
    st.f_plane(1)[std::size_t(2 * g.d3 + 1)] = Complex{1.0, 1.0};
    kernels::shear_step(st, +1);
    CHECK(st.f_plane(1)[std::size_t(3 * g.d3 + 1)] == Complex{1.0, 1.0});
    CHECK(st.f_plane(1)[std::size_t(2 * g.d3 + 1)] == Complex{0.0, 0.0});
  }

  SECTION("up then down restores interior rows") {
    auto st = small_state(g, 17);
    const auto before = st.f_modes;
    kernels::shear_step(st, +1);
    kernels::shear_step(st, -1);
    for (std::int64_t b = 0; b < st.batch(); ++b)
      for (std::int64_t a = 0; a < g.d1; ++a)
        for (std::int64_t c = 0; c < g.d3; ++c) {
          const auto got = st.f_plane(b)[std::size_t(a * g.d3 + c)];
          if (a == g.d1 - 1) {
            CHECK(got == Complex{0.0, 0.0});
          } else {
            CHECK(got == before[std::size_t(b * st.plane_size() + a * g.d3 + c)]);
          }
        }
  }
}

TEST_CASE("memory sweep") {
  kernels::MemBuffers buffers;

  SECTION("copies are byte-identical and the rate is sane") {
    constexpr std::size_t n = std::size_t(1) << 16;
    const double rate = kernels::mem_pass(buffers, n);
    CHECK(rate > 0.0);
    CHECK(std::isfinite(rate));
    bool same = true;
    for (std::size_t i = 0; i < n; ++i) same = same && buffers.dst[i] == buffers.src[i];
    CHECK(same);
  }

  SECTION("zero bytes is refused") {
    CHECK_THROWS_AS(kernels::mem_pass(buffers, 0), DataError);
  }
}

TEST_CASE("checksum covers both mode planes and velocity") {
  auto st = small_state({4, 1, 2, 2, 1, 1}, 20);
  const double base = kernels::checksum(st);
  st.f_modes[0] += Complex{0.5, 0.0};
  CHECK(kernels::checksum(st) != base);
  auto st2 = small_state({4, 1, 2, 2, 1, 1}, 20);
  st2.velocity[0] += 0.5;
  CHECK(kernels::checksum(st2) != base);
  auto st3 = small_state({4, 1, 2, 2, 1, 1}, 20);
  st3.g_modes[1] *= 2.0;
  CHECK(kernels::checksum(st3) != base);
}
