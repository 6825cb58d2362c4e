#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "randcert/bayes.hpp"
#include "randcert/bitstream.hpp"
#include "randcert/blockstats.hpp"
#include "randcert/borel.hpp"

namespace randcert {

struct AnalysisOptions {
  std::optional<unsigned> max_level;
  bool posterior = false;
  // Block cap for level-4 posteriors. Level 4 is only analysed when set.
  std::optional<unsigned> max_blocks;
  unsigned threads = 1;
};

struct AnalysisReport {
  std::string path;
  std::string format;
  std::uint64_t n = 0;
  std::vector<BorelLevelReport> borel;
  std::vector<BayesBoundReport> bayes_bound;
  std::vector<PosteriorTable> posteriors;
  bool borel_pass = false;
  bool bayes_bound_pass = false;
  // Set when posteriors were requested: the one-block model wins at every level.
  std::optional<bool> posterior_pass;
  bool overall = false;

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

// Levels that analyze() counts before it knows n: 1..min(requested, 6).
std::vector<unsigned> candidate_levels(std::optional<unsigned> requested);

// Builds a report from counts at levels 1..k (k >= the effective max level).
// Throws DomainError if the requested level exceeds max_borel_level(n).
AnalysisReport analyze_counts(std::span<const BlockCounts> counts, std::uint64_t n,
                              const AnalysisOptions& options, std::string path = {},
                              std::string format = {});

AnalysisReport analyze(const BitSequence& seq, const AnalysisOptions& options,
                       std::string path = {}, std::string format = {});

// Single streaming pass over the file: every level is counted per chunk.
AnalysisReport analyze_file(const std::filesystem::path& path, BitFormat format,
                            const AnalysisOptions& options,
                            std::optional<std::uint64_t> n = std::nullopt);

void to_json(nlohmann::json& j, const AnalysisReport& r);
void from_json(const nlohmann::json& j, AnalysisReport& r);

// One row per substring: level,substring,deviation,borel_bound,bayes_rhs
void write_csv(std::ostream& out, const AnalysisReport& r);

}  // namespace randcert
