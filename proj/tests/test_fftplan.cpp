#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <thread>
#include <vector>

#include "gyrobench/fftplan.hpp"
#include "oracles.hpp"

using namespace gyrobench;
using fft::Complex;

namespace {

std::vector<Complex> random_spectrum(const fft::LogicalPlanSpec& s, std::uint64_t seed) {
  detail::SplitMix64 rng(seed);
  std::vector<Complex> out(s.complex_elems());
  for (auto& c : out) c = Complex(rng.next_double(-1.0, 1.0), rng.next_double(-1.0, 1.0));
  return out;
}

std::vector<double> random_field(const fft::LogicalPlanSpec& s, std::uint64_t seed) {
  detail::SplitMix64 rng(seed);
  std::vector<double> out(s.real_elems(), -7.5);  // sentinel in the pad region
  for (std::int64_t b = 0; b < s.nffts; ++b)
    for (std::int64_t x = 0; x < s.nx; ++x)
      for (std::int64_t y = 0; y < s.ny; ++y)
        out[std::size_t(b * 2 * s.odist + x * s.real_row_pitch() + y)] =
            rng.next_double(-1.0, 1.0);
  return out;
}

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("logical plan spec for a grid") {
  const auto spec =
      fft::LogicalPlanSpec::for_grid(find_input("n102")->grid, fft::Direction::C2R);
  CHECK(spec.nx == 288);
  CHECK(spec.ny == 96);
  CHECK(spec.ny2 == 49);
  CHECK(spec.nffts == 6144);
  CHECK(spec.idist == 49 * 288);
  CHECK(spec.odist == 49 * 288);
  CHECK(spec.real_row_pitch() == 98);
}

TEST_CASE("descriptor normalization follows the backend profile") {
  for (const auto& input : catalog()) {
    const FftShape f = derive_fft_shape(input.grid);
    const auto spec = fft::LogicalPlanSpec::for_grid(input.grid, fft::Direction::C2R);
    const std::int64_t ny2 = f.fft_y / 2 + 1;

    const auto nat = fft::normalize(spec, fft::BackendSemantics::natural());
    const auto rev = fft::normalize(spec, fft::BackendSemantics::reversed());

    CHECK(nat.ndim == std::array<std::int64_t, 2>{f.fft_x, f.fft_y});
    CHECK(rev.ndim == std::array<std::int64_t, 2>{f.fft_y, f.fft_x});
    CHECK(nat.ndim[0] == rev.ndim[1]);
    CHECK(nat.ndim[1] == rev.ndim[0]);

    CHECK(nat.inembed[0] == ny2);
    CHECK(rev.inembed == std::array<std::int64_t, 2>{ny2, f.fft_x});
    CHECK(rev.onembed == std::array<std::int64_t, 2>{ny2, f.fft_x});

    for (const auto& d : {nat, rev}) {
      CHECK(d.idist == ny2 * f.fft_x);
      CHECK(d.odist == ny2 * f.fft_x);
      CHECK(d.nffts == f.batch);
    }
  }
}

TEST_CASE("semantics profiles are internally consistent") {
  CHECK_NOTHROW(fft::BackendSemantics::natural().validate());
  CHECK_NOTHROW(fft::BackendSemantics::reversed().validate());
  fft::BackendSemantics franken = fft::BackendSemantics::natural();
  franken.rank_order = fft::RankOrder::Reversed;
  CHECK_THROWS_AS(franken.validate(), DataError);
}

TEST_CASE("reference backend matches the brute-force DFT oracle") {
  const std::int64_t nxs[] = {1, 2, 3, 4, 5, 8, 12, 16, 31, 32};
  const std::int64_t nys[] = {1, 2, 3, 4, 7, 8, 9, 12, 27, 32};
  auto& backend = fft::reference_backend();

  for (std::int64_t nx : nxs)
    for (std::int64_t ny : nys) {
      const std::int64_t batch = (nx + ny) % 8 + 1;
      const std::uint64_t seed = std::uint64_t(1000 * nx + ny);

      // c2r against the oracle, arbitrary (not necessarily consistent) input
      const auto cspec = fft::LogicalPlanSpec::make(fft::Direction::C2R, nx, ny, batch);
      auto cplan = fft::plan(cspec, fft::BackendSemantics::natural(), backend);
      const auto spectrum = random_spectrum(cspec, seed);
      const auto real = fft::execute_c2r(cplan, spectrum);
      for (std::int64_t b = 0; b < batch; ++b) {
        const auto expect = oracle::c2r_2d(
            {spectrum.data() + b * cspec.idist, std::size_t(cspec.idist)}, nx, ny);
        double m = 0.0;
        for (std::int64_t x = 0; x < nx; ++x)
          for (std::int64_t y = 0; y < ny; ++y)
            m = std::max(m, std::fabs(real[std::size_t(b * 2 * cspec.odist +
                                                       x * cspec.real_row_pitch() + y)] -
                                      expect[std::size_t(x * ny + y)]));
        INFO("c2r nx=" << nx << " ny=" << ny << " member " << b);
        CHECK(m <= 1e-10);
        // pad region must be zeroed
        bool pad_ok = true;
        for (std::int64_t x = 0; x < nx; ++x)
          for (std::int64_t y = ny; y < cspec.real_row_pitch(); ++y)
            pad_ok = pad_ok &&
                     real[std::size_t(b * 2 * cspec.odist + x * cspec.real_row_pitch() + y)] ==
                         0.0;
        CHECK(pad_ok);
      }

      // r2c against the oracle; pad-region sentinels must be ignored
      const auto rspec = fft::LogicalPlanSpec::make(fft::Direction::R2C, nx, ny, batch);
      auto rplan = fft::plan(rspec, fft::BackendSemantics::reversed(), backend);
      const auto field = random_field(rspec, seed ^ 0xabcdef);
      const auto spec_out = fft::execute_r2c(rplan, field);
      for (std::int64_t b = 0; b < batch; ++b) {
        std::vector<double> tight(std::size_t(nx * ny));
        for (std::int64_t x = 0; x < nx; ++x)
          for (std::int64_t y = 0; y < ny; ++y)
            tight[std::size_t(x * ny + y)] =
                field[std::size_t(b * 2 * rspec.odist + x * rspec.real_row_pitch() + y)];
        const auto expect = oracle::r2c_2d(tight, nx, ny);
        const double m = max_abs_diff(
            {spec_out.data() + b * rspec.idist, std::size_t(rspec.idist)}, expect);
        INFO("r2c nx=" << nx << " ny=" << ny << " member " << b);
        CHECK(m <= 1e-10);
      }
    }
}

TEST_CASE("round trip scales by nx*ny and Parseval holds") {
  auto& backend = fft::reference_backend();
  const std::int64_t shapes[][2] = {{4, 4}, {6, 12}, {12, 24}, {16, 9}, {31, 8}};

  for (const auto& shape : shapes) {
    const std::int64_t nx = shape[0], ny = shape[1], batch = 3;
    const auto rspec = fft::LogicalPlanSpec::make(fft::Direction::R2C, nx, ny, batch);
    const auto cspec = fft::LogicalPlanSpec::make(fft::Direction::C2R, nx, ny, batch);
    auto rplan = fft::plan(rspec, fft::BackendSemantics::natural(), backend);
    auto cplan = fft::plan(cspec, fft::BackendSemantics::natural(), backend);

    const auto field = random_field(rspec, std::uint64_t(nx * 100 + ny));
    const auto spectrum = fft::execute_r2c(rplan, field);  // consistent by construction
    const auto back = fft::execute_c2r(cplan, spectrum);
    const auto spectrum2 = fft::execute_r2c(rplan, back);

    const double scale = double(nx * ny);
    double worst = 0.0;
    double energy_x = 0.0, energy_k = 0.0;
    for (std::int64_t b = 0; b < batch; ++b) {
      for (std::int64_t x = 0; x < nx; ++x)
        for (std::int64_t y = 0; y < ny; ++y) {
          const std::size_t i = std::size_t(b * 2 * rspec.odist + x * rspec.real_row_pitch() + y);
          worst = std::max(worst, std::fabs(back[i] - scale * field[i]));
          energy_x += field[i] * field[i];
        }
      for (std::int64_t j = 0; j < cspec.idist; ++j) {
        const std::size_t i = std::size_t(b * cspec.idist + j);
        worst = std::max(worst, std::abs(spectrum2[i] - scale * spectrum[i]) / scale);
      }
      energy_k += oracle::spectrum_energy(
          {spectrum.data() + b * cspec.idist, std::size_t(cspec.idist)}, nx, ny);
    }
    INFO("shape " << nx << "x" << ny);
    CHECK(worst / scale <= 1e-9);
    CHECK(std::fabs(energy_x - energy_k / scale) <= 1e-9 * std::max(1.0, energy_x));
  }
}

TEST_CASE("dealias padding round trip and placement") {
  const GridShape g{8, 1, 4, 1, 1, 1};  // fft 12 x 12, ny2 = 7
  const FftShape f = derive_fft_shape(g);
  REQUIRE(f.fft_x == 12);
  REQUIRE(f.fft_y == 12);

  detail::SplitMix64 rng(5);
  std::vector<Complex> modes(std::size_t(g.d1 * g.d3));
  for (auto& c : modes) c = Complex(rng.next_double(-1, 1), rng.next_double(-1, 1));

  const auto padded = fft::dealias_pad(modes, g);
  CHECK(fft::truncate(padded, g) == modes);

  const std::int64_t ny2 = f.fft_y / 2 + 1;
  // row 0..4 stay, rows 5..7 (kx -3..-1) land at the tail
  CHECK(padded[std::size_t(0 * ny2 + 0)] == modes[0]);
  CHECK(padded[std::size_t(4 * ny2 + 2)] == modes[std::size_t(4 * g.d3 + 2)]);
  CHECK(padded[std::size_t(9 * ny2 + 1)] == modes[std::size_t(5 * g.d3 + 1)]);
  CHECK(padded[std::size_t(11 * ny2 + 3)] == modes[std::size_t(7 * g.d3 + 3)]);
  // everything else is zero
  CHECK(padded[std::size_t(5 * ny2 + 0)] == Complex{0.0, 0.0});
  CHECK(padded[std::size_t(0 * ny2 + 4)] == Complex{0.0, 0.0});

  CHECK(fft::signed_kx(0, 8) == 0);
  CHECK(fft::signed_kx(4, 8) == 4);
  CHECK(fft::signed_kx(5, 8) == -3);
  CHECK(fft::signed_kx(7, 8) == -1);

  std::vector<Complex> wrong(3);
  CHECK_THROWS_AS(fft::dealias_pad(wrong, g), DataError);
  CHECK_THROWS_AS(fft::truncate(wrong, g), DataError);
}

TEST_CASE("execution guards") {
  auto& backend = fft::reference_backend();
  const auto cspec = fft::LogicalPlanSpec::make(fft::Direction::C2R, 4, 4, 1);
  auto cplan = fft::plan(cspec, fft::BackendSemantics::natural(), backend);

  std::vector<Complex> spectrum(cspec.complex_elems());
  std::vector<double> real(cspec.real_elems());

  SECTION("direction mismatch") {
    CHECK_THROWS_AS(fft::execute_r2c(cplan, real, spectrum), fft::ExecutionError);
  }
  SECTION("bad buffer sizes") {
    std::vector<double> small(3);
    CHECK_THROWS_AS(fft::execute_c2r(cplan, spectrum, small), fft::ExecutionError);
  }
  SECTION("unsupported direction is a planning error with the descriptor attached") {
    struct NoC2r final : fft::FftBackend {
      std::string_view name() const noexcept override { return "no-c2r"; }
      bool supports(fft::Direction d) const noexcept override {
        return d != fft::Direction::C2R;
      }
      void* create_plan(const fft::LogicalPlanSpec&, const fft::PlanDescriptor&) override {
        return new int(0);
      }
      void execute_c2r(const void*, std::span<const Complex>,
                       std::span<double>) const override {}
      void execute_r2c(const void*, std::span<const double>,
                       std::span<Complex>) const override {}
      void destroy_plan(void* t) noexcept override { delete static_cast<int*>(t); }
    } stub;
    try {
      fft::plan(cspec, fft::BackendSemantics::natural(), stub);
      FAIL("expected PlanError");
    } catch (const fft::PlanError& e) {
      CHECK(e.descriptor().nffts == 1);
      CHECK(std::string(e.what()).find("ndim") != std::string::npos);
    }
  }
}

TEST_CASE("plans can be executed repeatedly and concurrently with identical output") {
  auto& backend = fft::reference_backend();
  const auto cspec = fft::LogicalPlanSpec::make(fft::Direction::C2R, 12, 24, 4);
  auto cplan = fft::plan(cspec, fft::BackendSemantics::natural(), backend);
  const auto spectrum = random_spectrum(cspec, 99);

  const auto first = fft::execute_c2r(cplan, spectrum);
  for (int i = 0; i < 3; ++i) CHECK(fft::execute_c2r(cplan, spectrum) == first);

  std::vector<std::vector<double>> results(4);
  std::vector<std::thread> pool;
  for (auto& r : results)
    pool.emplace_back([&, out = &r] { *out = fft::execute_c2r(cplan, spectrum); });
  for (auto& t : pool) t.join();
  for (const auto& r : results) CHECK(r == first);
}
