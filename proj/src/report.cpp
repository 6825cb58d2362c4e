#include "randcert/report.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>

#include "randcert/errors.hpp"

namespace randcert {

namespace {

// i_max never exceeds 6 for a 64-bit n.
constexpr unsigned kMaxAnyLevel = 6;
constexpr unsigned kFullEnumerationLevel = 3;
constexpr unsigned kCappedEnumerationLevel = 4;

}  // namespace

std::vector<unsigned> candidate_levels(std::optional<unsigned> requested) {
  const unsigned top = std::min(requested.value_or(kMaxAnyLevel), kMaxAnyLevel);
  std::vector<unsigned> levels(top);
  std::iota(levels.begin(), levels.end(), 1u);
  return levels;
}

AnalysisReport analyze_counts(std::span<const BlockCounts> counts, std::uint64_t n,
                              const AnalysisOptions& options, std::string path, std::string format) {
  const unsigned top = resolve_max_level(n, options.max_level);
  if (counts.size() < top) throw ContractError("counts missing for requested levels");

  AnalysisReport r;
  r.path = std::move(path);
  r.format = std::move(format);
  r.n = n;
  const auto used = counts.first(top);
  r.borel = borel_test(used, n);
  r.bayes_bound = bayes_bound_test(used, n);
  r.borel_pass = all_pass(std::span<const BorelLevelReport>(r.borel));
  r.bayes_bound_pass = all_pass(std::span<const BayesBoundReport>(r.bayes_bound));
  r.overall = r.borel_pass && r.bayes_bound_pass;

  if (options.posterior) {
    bool ok = true;
    for (const auto& c : used) {
      std::optional<unsigned> cap;
      if (c.level > kFullEnumerationLevel) {
        if (c.level > kCappedEnumerationLevel || !options.max_blocks) break;
        cap = options.max_blocks;
      }
      r.posteriors.push_back(posterior_over_partitions(c, cap));
      ok = ok && r.posteriors.back().models[r.posteriors.back().best_index].is_one_block();
    }
    r.posterior_pass = ok;
    r.overall = r.overall && ok;
  }
  return r;
}

AnalysisReport analyze(const BitSequence& seq, const AnalysisOptions& options, std::string path,
                       std::string format) {
  const unsigned top = resolve_max_level(seq.size(), options.max_level);
  std::vector<BlockCounts> counts;
  for (unsigned i = 1; i <= top; ++i) counts.push_back(count_blocks_parallel(seq, i, options.threads));
  return analyze_counts(counts, seq.size(), options, std::move(path), std::move(format));
}

AnalysisReport analyze_file(const std::filesystem::path& path, BitFormat format,
                            const AnalysisOptions& options, std::optional<std::uint64_t> n) {
  if (options.max_level && (*options.max_level < 1 || *options.max_level > kMaxAnyLevel)) {
    throw DomainError("level " + std::to_string(*options.max_level) +
                      " exceeds i_max for any 64-bit sequence length");
  }
  if (format == BitFormat::Packed) {
    // n is known before reading, so level errors surface without a pass over the data.
    const auto bits = n.value_or(8 * std::filesystem::file_size(path));
    resolve_max_level(bits, options.max_level);
  }
  const auto levels = candidate_levels(options.max_level);
  const unsigned lcm = std::accumulate(levels.begin(), levels.end(), 1u,
                                       [](unsigned a, unsigned b) { return std::lcm(a, b); });
  BitChunkReader reader(path, format, lcm, std::uint64_t{1} << 23, n);
  auto counts = count_blocks_stream(reader, levels);
  return analyze_counts(counts, reader.bits_read(), options, path.string(), to_string(format));
}

void to_json(nlohmann::json& j, const AnalysisReport& r) {
  j = nlohmann::json{
      {"input", {{"path", r.path}, {"format", r.format}, {"n", r.n}}},
      {"borel", {{"n", r.n}, {"levels", r.borel}, {"overall", r.borel_pass}}},
      {"bayes_bound", {{"n", r.n}, {"levels", r.bayes_bound}, {"overall", r.bayes_bound_pass}}},
      {"overall", r.overall},
  };
  if (r.posterior_pass) {
    j["posterior"] = {{"tables", r.posteriors}, {"overall", *r.posterior_pass}};
  }
}

void from_json(const nlohmann::json& j, AnalysisReport& r) {
  const auto& in = j.at("input");
  in.at("path").get_to(r.path);
  in.at("format").get_to(r.format);
  in.at("n").get_to(r.n);
  j.at("borel").at("levels").get_to(r.borel);
  j.at("borel").at("overall").get_to(r.borel_pass);
  j.at("bayes_bound").at("levels").get_to(r.bayes_bound);
  j.at("bayes_bound").at("overall").get_to(r.bayes_bound_pass);
  j.at("overall").get_to(r.overall);
  r.posteriors.clear();
  r.posterior_pass.reset();
  if (j.contains("posterior")) {
    j.at("posterior").at("tables").get_to(r.posteriors);
    r.posterior_pass = j.at("posterior").at("overall").get<bool>();
  }
}

void write_csv(std::ostream& out, const AnalysisReport& r) {
  out << "level,substring,deviation,borel_bound,bayes_rhs\n";
  out << std::setprecision(17);
  for (const auto& level : r.borel) {
    double rhs = 0.0;
    for (const auto& b : r.bayes_bound) {
      if (b.level == level.level) rhs = b.rhs;
    }
    for (std::size_t j = 0; j < level.deviations.size(); ++j) {
      out << level.level << ',' << substring_bits(j, level.level) << ',' << level.deviations[j] << ','
          << level.bound << ',' << rhs << '\n';
    }
  }
}

}  // namespace randcert
