#include "randcert/extract.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "randcert/errors.hpp"

namespace randcert {

namespace {

std::string fmt_g(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

constexpr std::array<std::string_view, 7> kUnits = {"fs", "ps", "ns", "us", "\xC2\xB5s", "ms", "s"};

bool is_known_unit(std::string_view u) {
  for (auto k : kUnits) {
    if (k == u) return true;
  }
  return false;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

std::uint64_t parse_u64(std::string_view digits, std::size_t offset) {
  std::uint64_t v = 0;
  for (char c : digits) {
    const std::uint64_t d = static_cast<std::uint64_t>(c - '0');
    if (v > (UINT64_MAX - d) / 10) throw FormatError("time tag overflows 64 bits", offset);
    v = v * 10 + d;
  }
  return v;
}

}  // namespace

TagKind parse_tag_kind(std::string_view name) {
  if (name == "timestamps") return TagKind::Timestamps;
  if (name == "interarrivals") return TagKind::Interarrivals;
  throw ConfigError("unknown time-tag kind '" + std::string(name) +
                    "' (expected timestamps or interarrivals)");
}

const char* to_string(TagKind kind) {
  return kind == TagKind::Timestamps ? "timestamps" : "interarrivals";
}

TimeTagSeries interarrivals(const TimeTagSeries& series) {
  if (series.kind != TagKind::Timestamps) {
    throw ContractError("interarrivals() expects timestamps; series is already differenced");
  }
  if (series.values.size() < 2) {
    throw EmptyInputError("need at least two timestamps to form an interarrival");
  }
  TimeTagSeries out;
  out.unit = series.unit;
  out.kind = TagKind::Interarrivals;
  out.values.reserve(series.values.size() - 1);
  for (std::size_t k = 1; k < series.values.size(); ++k) {
    if (series.values[k] < series.values[k - 1]) throw DataError("timestamps decrease", k);
    out.values.push_back(series.values[k] - series.values[k - 1]);
  }
  return out;
}

BitSequence timetags_to_bits(const TimeTagSeries& series, std::uint64_t divisor) {
  if (divisor == 0) throw ContractError("parity divisor must be positive");
  if (series.kind != TagKind::Interarrivals) {
    throw ContractError("timetags_to_bits() expects interarrivals; difference timestamps first");
  }
  BitSequenceBuilder builder;
  builder.reserve_bits(series.values.size());
  for (auto v : series.values) builder.push_bit(static_cast<int>((v / divisor) & 1));
  return std::move(builder).finish();
}

TimeTagSeries read_timetags_text(std::istream& in, TagKind kind,
                                 std::optional<std::string> expected_unit) {
  TimeTagSeries out;
  out.kind = kind;
  if (expected_unit) out.unit = *expected_unit;
  std::string line;
  std::size_t offset = 0;
  std::optional<std::string> seen_unit;
  while (std::getline(in, line)) {
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::istringstream tokens(line);
    std::string token, digits;
    std::optional<std::string> unit;
    while (tokens >> token) {
      if (unit) throw FormatError("unexpected token after unit '" + *unit + "'", line_offset);
      if (all_digits(token)) {
        digits += token;
      } else if (!digits.empty() && is_known_unit(token)) {
        unit = token;
      } else {
        throw FormatError("invalid time-tag token '" + token + "'", line_offset);
      }
    }
    if (digits.empty()) continue;
    if (unit) {
      if (expected_unit && *unit != *expected_unit) {
        throw FormatError("unit '" + *unit + "' does not match declared unit '" + *expected_unit + "'",
                          line_offset);
      }
      if (seen_unit && *seen_unit != *unit) {
        throw FormatError("mixed units '" + *seen_unit + "' and '" + *unit + "'", line_offset);
      }
      seen_unit = unit;
    }
    out.values.push_back(parse_u64(digits, line_offset));
  }
  if (in.bad()) throw IoError("read failed while parsing time tags");
  if (!expected_unit && seen_unit) out.unit = *seen_unit;
  return out;
}

TimeTagSeries read_timetags_text(const std::filesystem::path& path, TagKind kind,
                                 std::optional<std::string> expected_unit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return read_timetags_text(in, kind, std::move(expected_unit));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

TimeTagSeries read_timetags_binary(const std::filesystem::path& path, TagKind kind, std::string unit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() % 8 != 0) {
    throw FormatError(path.string() + ": binary time-tag file length is not a multiple of 8",
                      data.size() - data.size() % 8);
  }
  TimeTagSeries out;
  out.kind = kind;
  out.unit = std::move(unit);
  out.values.reserve(data.size() / 8);
  for (std::size_t p = 0; p < data.size(); p += 8) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | data[p + static_cast<std::size_t>(b)];
    out.values.push_back(v);
  }
  return out;
}

void write_timetags_text(const std::filesystem::path& path, const TimeTagSeries& series) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  for (auto v : series.values) out << v << ' ' << series.unit << '\n';
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

void write_timetags_binary(const std::filesystem::path& path, const TimeTagSeries& series) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  std::array<char, 8> buf{};
  for (auto v : series.values) {
    for (std::size_t b = 0; b < 8; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xFF);
    out.write(buf.data(), 8);
  }
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

DensitySpec::DensitySpec(double a, double b, Fn density, Fn derivative)
    : a_(a), b_(b), density_(std::move(density)), derivative_(std::move(derivative)) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ContractError("density support must be a finite interval a < b");
  }
  if (!density_) throw ContractError("density function is required");
  const double mass = integrate_density(*this, a_, b_);
  if (std::abs(mass - 1.0) > 1e-8) {
    throw ContractError("density integrates to " + std::to_string(mass) + ", not 1");
  }
}

double DensitySpec::derivative(double x) const {
  if (derivative_) return derivative_(x);
  const double h = (b_ - a_) * 1e-6;
  if (x - h < a_) return (-3.0 * density_(x) + 4.0 * density_(x + h) - density_(x + 2 * h)) / (2 * h);
  if (x + h > b_) return (3.0 * density_(x) - 4.0 * density_(x - h) + density_(x - 2 * h)) / (2 * h);
  return (density_(x + h) - density_(x - h)) / (2 * h);
}

double integrate_density(const DensitySpec& density, double lo, double hi) {
  // Integrate over [-1, 1] so that Boost's error estimate, which it reports in
  // the units of the reference interval, stays comparable with the tolerance.
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double error = 0.0;
  double l1 = 0.0;
  const double value = half * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                                  [&](double t) { return density(mid + half * t); }, -1.0, 1.0, 15, 1e-13, &error,
                                  &l1);
  error *= half;
  l1 *= half;
  if (!std::isfinite(value) || error > 1e-11 * std::max(1.0, l1)) {
    throw NumericError("quadrature did not converge on [" + fmt_g(lo) + ", " + fmt_g(hi) + "] (error estimate " +
                       fmt_g(error) + ")");
  }
  return value;
}

ParityBias parity_bias_estimate(const DensitySpec& density, unsigned L) {
  if (L < 1) throw ContractError("need at least one pair of bins (L >= 1)");
  const double a = density.a();
  const double width = (density.b() - a) / (2.0 * L);
  auto grid = [&](unsigned i) { return i == 2 * L ? density.b() : a + i * width; };

  ParityBias out;
  double slope_sum = 0.0;
  for (unsigned i = 0; i < L; ++i) {
    out.exact_odd += integrate_density(density, grid(2 * i + 1), grid(2 * i + 2));
    slope_sum += density.derivative(grid(2 * i));
  }
  out.exact_even = 1.0 - out.exact_odd;
  out.approx_odd = 0.5 + 0.5 * slope_sum * width * width;
  return out;
}

}  // namespace randcert
