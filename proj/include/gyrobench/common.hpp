#ifndef GYROBENCH_COMMON_HPP
#define GYROBENCH_COMMON_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <sstream>

namespace gyrobench {

// Base for everything thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed user input: bad files, unknown names, invalid values.
// The CLI maps this to exit code 2.
class DataError : public Error {
public:
  using Error::Error;
};

// DataError with a 1-based source line attached.
class ParseError : public DataError {
public:
  ParseError(const std::string& what, std::size_t line)
      : DataError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class IoError : public Error {
public:
  IoError(const std::string& what, const std::string& path)
      : Error(what + ": " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

class OverflowError : public Error {
public:
  using Error::Error;
};

// Thrown when a materialization would exceed the configured memory budget.
// Carries the estimate so callers can report it.
class BudgetError : public Error {
public:
  BudgetError(std::uint64_t estimate, std::uint64_t budget)
      : Error("memory estimate " + std::to_string(estimate) +
              " B exceeds budget " + std::to_string(budget) + " B"),
        estimate_(estimate), budget_(budget) {}
  std::uint64_t estimate() const noexcept { return estimate_; }
  std::uint64_t budget() const noexcept { return budget_; }

private:
  std::uint64_t estimate_;
  std::uint64_t budget_;
};

// Exact scale factors for desk-size reductions of the catalog grids.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den) {
    if (den == 0) throw DataError("rational with zero denominator");
    if (num <= 0 || den < 0) throw DataError("scale factor must be positive");
    const std::int64_t g = std::gcd(num, den);
    return Rational{num / g, den / g};
  }

  // Accepts "3", "1/8", "3/4".
  static Rational parse(const std::string& text) {
    const auto slash = text.find('/');
    try {
      if (slash == std::string::npos)
        return make(std::stoll(text), 1);
      return make(std::stoll(text.substr(0, slash)),
                  std::stoll(text.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
      throw DataError("cannot parse rational: '" + text + "'");
    } catch (const std::out_of_range&) {
      throw DataError("rational out of range: '" + text + "'");
    }
  }

  bool is_one() const noexcept { return num == den; }
  bool leq_one() const noexcept { return num <= den; }
  double value() const noexcept { return double(num) / double(den); }

  // n * num / den when that is an exact integer, otherwise nullopt-style -1.
  std::int64_t apply_exact(std::int64_t n) const noexcept {
    const std::int64_t scaled = n * num;
    if (scaled % den != 0) return -1;
    return scaled / den;
  }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  friend bool operator==(const Rational&, const Rational&) = default;
};

// a*b with overflow detection; dimension products can reach the TB range.
inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out))
    throw OverflowError("64-bit overflow computing " + std::to_string(a) +
                        " * " + std::to_string(b));
  return out;
}

namespace detail {

// splitmix64: tiny, portable, identical stream on every platform.
// std::mt19937_64 would do, but the standard leaves distribution output
// unspecified, and checksums here must be bit-stable across toolchains.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() noexcept {
    return double(next() >> 11) * 0x1.0p-53;
  }

  // uniform in [lo, hi)
  double next_double(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_double();
  }

private:
  std::uint64_t state_;
};

}  // namespace detail

inline std::string format_gib(std::uint64_t bytes) {
  std::ostringstream os;
  const double gib = double(bytes) / double(1ull << 30);
  if (gib >= 1.0) {
    os.precision(1);
    os << std::fixed << gib << " GiB";
  } else {
    os << bytes << " B";
  }
  return os.str();
}

}  // namespace gyrobench

#endif  // GYROBENCH_COMMON_HPP
