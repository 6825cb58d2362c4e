#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library's numeric paths.

#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

// Counts non-overlapping blocks of a '0'/'1' string by direct substring parsing.
std::vector<std::uint64_t> count_blocks(const std::string& bits, unsigned level);

// ln P(data | partition model) by numerical integration over the
// Dirichlet(1/2, ..., 1/2) prior: stick-breaking turns the simplex integral
// into a product of one-dimensional Beta expectations, each evaluated as a
// ratio of tanh-sinh quadratures after v = sin^2(phi) (no gamma functions involved).
double log_marginal(const std::vector<std::uint64_t>& counts, const std::vector<std::uint8_t>& rgs);

// All set partitions of {0..N-1} by recursive insertion, returned as
// canonical restricted-growth strings (sorted).
std::vector<std::vector<std::uint8_t>> all_partitions(unsigned N, unsigned max_blocks);

// FNV-1a over bytes.
std::uint64_t fnv1a(const std::uint8_t* data, std::size_t size);

}  // namespace oracle
