#include "randcert/borel.hpp"

#include <algorithm>
#include <cmath>

#include "randcert/errors.hpp"

namespace randcert {

double BorelLevelReport::max_abs_deviation() const {
  double m = 0.0;
  for (double d : deviations) m = std::max(m, std::abs(d));
  return m;
}

double borel_bound(std::uint64_t n) {
  if (n < 2) throw DomainError("Borel bound needs n >= 2, got " + std::to_string(n));
  const double nd = static_cast<double>(n);
  return std::sqrt(std::log2(nd) / nd);
}

std::vector<double> borel_deviations(const BlockCounts& counts) {
  if (counts.total == 0) throw EmptyInputError("no complete blocks at level " + std::to_string(counts.level));
  const double total = static_cast<double>(counts.total);
  const double expected = std::ldexp(1.0, -static_cast<int>(counts.level));
  std::vector<double> d(counts.counts.size());
  for (std::size_t j = 0; j < d.size(); ++j) {
    d[j] = static_cast<double>(counts.counts[j]) / total - expected;
  }
  return d;
}

BorelLevelReport borel_level_report(const BlockCounts& counts, std::uint64_t n) {
  BorelLevelReport r;
  r.level = counts.level;
  r.deviations = borel_deviations(counts);
  r.bound = borel_bound(n);
  r.passes = r.max_abs_deviation() < r.bound;
  return r;
}

unsigned resolve_max_level(std::uint64_t n, std::optional<unsigned> requested) {
  const unsigned imax = max_borel_level(n);
  if (!requested) return imax;
  if (*requested < 1) throw DomainError("level must be at least 1");
  if (*requested > imax) {
    throw DomainError("level " + std::to_string(*requested) + " exceeds i_max = " +
                      std::to_string(imax) + " for n = " + std::to_string(n) +
                      " (level i needs n >= 2^(2^i))");
  }
  return *requested;
}

std::vector<BorelLevelReport> borel_test(const BitSequence& seq, std::optional<unsigned> max_level) {
  const unsigned top = resolve_max_level(seq.size(), max_level);
  std::vector<BorelLevelReport> out;
  for (unsigned i = 1; i <= top; ++i) {
    out.push_back(borel_level_report(count_blocks(seq, i), seq.size()));
  }
  return out;
}

std::vector<BorelLevelReport> borel_test(std::span<const BlockCounts> counts, std::uint64_t n) {
  std::vector<BorelLevelReport> out;
  out.reserve(counts.size());
  for (const auto& c : counts) out.push_back(borel_level_report(c, n));
  return out;
}

bool all_pass(std::span<const BorelLevelReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passes; });
}

void to_json(nlohmann::json& j, const BorelLevelReport& r) {
  j = nlohmann::json{{"i", r.level}, {"bound", r.bound}, {"deviations", r.deviations}, {"passes", r.passes}};
}

void from_json(const nlohmann::json& j, BorelLevelReport& r) {
  j.at("i").get_to(r.level);
  j.at("bound").get_to(r.bound);
  j.at("deviations").get_to(r.deviations);
  j.at("passes").get_to(r.passes);
}

}  // namespace randcert
