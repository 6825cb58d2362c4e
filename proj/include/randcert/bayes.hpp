#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "randcert/bitstream.hpp"
#include "randcert/blockstats.hpp"
#include "randcert/partitions.hpp"

namespace randcert {

// ln P(data | model) with a Jeffreys (Dirichlet(1/2, ..., 1/2)) prior over the
// block probabilities; each substring in block k gets probability theta_k / s_k.
// Closed form:
//   -sum_k m_k ln s_k + lnG(K/2) - K lnG(1/2) + sum_k lnG(m_k + 1/2) - lnG(T + K/2)
// with m_k the counts falling in block k and T their sum.
// Throws ContractError if the model does not partition the counts' index space.
double log_marginal(const BlockCounts& counts, const PartitionModel& model);

// The same closed form evaluated on (possibly non-integer) per-block totals.
double log_marginal_block_totals(std::span<const double> block_totals,
                                 std::span<const std::uint64_t> block_sizes);

struct PosteriorTable {
  unsigned level = 0;
  std::vector<PartitionModel> models;
  std::vector<double> log_marginals;  // nats
  std::vector<double> log_prior;      // nats
  std::vector<double> posteriors;
  std::size_t best_index = 0;
  // Posterior of the one-block (maximally random) model, if it is in the list.
  std::optional<double> symmetric_posterior;

  friend bool operator==(const PosteriorTable&, const PosteriorTable&) = default;
};

// Bayes' rule over `models` with a flat prior on the supplied list. Evaluated
// in log space with max-shift; the normalizer uses compensated summation.
PosteriorTable posterior(const BlockCounts& counts, std::span<const PartitionModel> models);

// Enumerates all partitions of the counts' level (optionally capped at
// max_blocks blocks) and computes the posterior over them.
PosteriorTable posterior_over_partitions(const BlockCounts& counts,
                                         std::optional<unsigned> max_blocks = std::nullopt);

// argmax of the posteriors, ties to the lowest index.
std::size_t best_model(const PosteriorTable& table);

// ln of the Gamma-ratio inside the coupled Bayesian frequency bound:
//   ln[ 2^-n G(1/2)^(2^i) G(2^(i-1) + n/i) / (G(2^(i-1)) G(1/2 + n/(i 2^i))^(2^i)) ]
// which equals ln P(one-block) - ln P(fully distinct) at perfectly symmetric counts.
double bayes_bound_log_ratio(std::uint64_t n, unsigned level);

// Right-hand side of the coupled bound:
//   sqrt( i^2 / (n^2 psi_1(1/2 + n/(i 2^i))) * bayes_bound_log_ratio(n, i) ).
// Requires 1 <= i <= 8 and n >= i 2^i; throws NumericError on a non-finite or
// negative radicand.
double bayes_bound_rhs(std::uint64_t n, unsigned level);

// Left-hand side: sqrt(sum_{1 <= j <= j' <= 2^i - 1} d_j d_j'), i.e.
// sqrt((S^2 + Q) / 2) over deviations d_1..d_{2^i-1} (substring 0 excluded).
double bayes_bound_lhs(const BlockCounts& counts);

struct BayesBoundReport {
  unsigned level = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool passes = false;

  friend bool operator==(const BayesBoundReport&, const BayesBoundReport&) = default;
};

BayesBoundReport bayes_bound_report(const BlockCounts& counts, std::uint64_t n);
std::vector<BayesBoundReport> bayes_bound_test(const BitSequence& seq,
                                               std::optional<unsigned> max_level = std::nullopt);
std::vector<BayesBoundReport> bayes_bound_test(std::span<const BlockCounts> counts, std::uint64_t n);
bool all_pass(std::span<const BayesBoundReport> reports);

void to_json(nlohmann::json& j, const BayesBoundReport& r);
void from_json(const nlohmann::json& j, BayesBoundReport& r);
void to_json(nlohmann::json& j, const PosteriorTable& t);
void from_json(const nlohmann::json& j, PosteriorTable& t);

}  // namespace randcert
