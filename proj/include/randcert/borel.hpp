#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "randcert/bitstream.hpp"
#include "randcert/blockstats.hpp"

namespace randcert {

// Borel-normality result for one substring length.
struct BorelLevelReport {
  unsigned level = 0;
  // Signed N_j/|l|_i - 2^-i for every substring j (big-endian index).
  std::vector<double> deviations;
  double bound = 0.0;
  bool passes = false;

  double max_abs_deviation() const;

  friend bool operator==(const BorelLevelReport&, const BorelLevelReport&) = default;
};

// sqrt(log2(n) / n). Throws DomainError for n < 2.
double borel_bound(std::uint64_t n);

// Signed frequency deviations from 2^-level. Throws EmptyInputError when total is 0.
std::vector<double> borel_deviations(const BlockCounts& counts);

// Evaluates one level against the bound for a sequence of n bits. The test
// is strict: a deviation equal to the bound fails.
BorelLevelReport borel_level_report(const BlockCounts& counts, std::uint64_t n);

// Reports for levels 1..max_level (default: max_borel_level(n)).
// Throws DomainError if max_level exceeds max_borel_level(n).
std::vector<BorelLevelReport> borel_test(const BitSequence& seq,
                                         std::optional<unsigned> max_level = std::nullopt);

// Same as borel_test for counts produced elsewhere (e.g. streamed).
std::vector<BorelLevelReport> borel_test(std::span<const BlockCounts> counts, std::uint64_t n);

bool all_pass(std::span<const BorelLevelReport> reports);

// Checks a requested level against max_borel_level(n); returns the effective
// maximum level.
unsigned resolve_max_level(std::uint64_t n, std::optional<unsigned> requested);

void to_json(nlohmann::json& j, const BorelLevelReport& r);
void from_json(const nlohmann::json& j, BorelLevelReport& r);

}  // namespace randcert
