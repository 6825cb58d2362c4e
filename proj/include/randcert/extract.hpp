#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "randcert/bitstream.hpp"

namespace randcert {

enum class TagKind { Timestamps, Interarrivals };

TagKind parse_tag_kind(std::string_view name);
const char* to_string(TagKind kind);

struct TimeTagSeries {
  std::vector<std::uint64_t> values;
  std::string unit = "ps";
  TagKind kind = TagKind::Interarrivals;

  friend bool operator==(const TimeTagSeries&, const TimeTagSeries&) = default;
};

// Differences of consecutive event times. Input must be timestamps with at
// least two entries; a decreasing step throws DataError naming its index.
TimeTagSeries interarrivals(const TimeTagSeries& series);

// bit_k = floor(values[k] / divisor) mod 2: 0 for even, 1 for odd. The
// divisor selects which digit counts as least significant. Input must be
// interarrivals; divisor 0 throws ContractError.
BitSequence timetags_to_bits(const TimeTagSeries& series, std::uint64_t divisor = 1);

// Text format: one unsigned integer per line. Spaces between digit groups are
// dropped ("592 342 ps" -> 592342); an optional trailing unit token must be a
// known time unit and, if `expected_unit` is given, match it. Blank lines are
// skipped.
TimeTagSeries read_timetags_text(std::istream& in, TagKind kind,
                                 std::optional<std::string> expected_unit = std::nullopt);
TimeTagSeries read_timetags_text(const std::filesystem::path& path, TagKind kind,
                                 std::optional<std::string> expected_unit = std::nullopt);
// Binary format: consecutive 64-bit little-endian unsigned integers.
TimeTagSeries read_timetags_binary(const std::filesystem::path& path, TagKind kind,
                                   std::string unit = "ps");

void write_timetags_text(const std::filesystem::path& path, const TimeTagSeries& series);
void write_timetags_binary(const std::filesystem::path& path, const TimeTagSeries& series);

// A probability density on (a, b). Construction checks that it integrates to
// one within 1e-8. Without an explicit derivative, rho' is a central
// difference with step (b - a) * 1e-6 (one-sided at the support edges).
class DensitySpec {
 public:
  using Fn = std::function<double(double)>;

  DensitySpec(double a, double b, Fn density, Fn derivative = nullptr);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double operator()(double x) const { return density_(x); }
  double derivative(double x) const;

 private:
  double a_;
  double b_;
  Fn density_;
  Fn derivative_;
};

// Integral of a density over [lo, hi] by adaptive Gauss-Kronrod quadrature.
// Throws NumericError when the error estimate stays above tolerance.
double integrate_density(const DensitySpec& density, double lo, double hi);

struct ParityBias {
  double exact_odd = 0.0;   // mass of the odd bins [x_{2i+1}, x_{2i+2}]
  double exact_even = 0.0;  // 1 - exact_odd
  double approx_odd = 0.0;  // 1/2 + 1/2 sum rho'(x_{2i}) ((b-a)/2L)^2
};

// Odd-parity probability when (a, b) is cut into 2L equal bins
// x_i = a + i (b - a) / 2L that alternate even/odd parity.
ParityBias parity_bias_estimate(const DensitySpec& density, unsigned L);

}  // namespace randcert
