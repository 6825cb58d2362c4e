// randcert: Borel-normality and Bayesian randomness certification for bit
// streams, time-tag parity extraction and synthetic detector data.
//
// Exit codes: 0 all requested criteria pass, 1 a criterion fails,
// 2 usage, I/O or data error.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "randcert/bayes.hpp"
#include "randcert/bitstream.hpp"
#include "randcert/blockstats.hpp"
#include "randcert/borel.hpp"
#include "randcert/errors.hpp"
#include "randcert/extract.hpp"
#include "randcert/report.hpp"
#include "randcert/simgen.hpp"

namespace {

using namespace randcert;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kError = 2;

const std::map<std::string, BitFormat> kBitFormats{{"ascii", BitFormat::Ascii},
                                                   {"packed", BitFormat::Packed}};

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed on '" + path + "'");
}

struct AnalyzeArgs {
  std::string input;
  BitFormat format = BitFormat::Packed;
  std::optional<std::uint64_t> bits;
  std::optional<unsigned> max_level;
  bool posterior = false;
  std::optional<unsigned> max_blocks;
  std::string json;
  std::string csv;
};

int run_analyze(const AnalyzeArgs& a) {
  AnalysisOptions opt;
  opt.max_level = a.max_level;
  opt.posterior = a.posterior;
  opt.max_blocks = a.max_blocks;
  opt.threads = configured_threads();
  const auto report = analyze_file(a.input, a.format, opt, a.bits);

  std::cout << "input " << report.path << " (" << report.format << "), n = " << report.n << "\n";
  std::cout << std::scientific << std::setprecision(5);
  for (std::size_t k = 0; k < report.borel.size(); ++k) {
    const auto& b = report.borel[k];
    const auto& y = report.bayes_bound[k];
    std::cout << "level " << b.level << ": borel max|d| " << b.max_abs_deviation() << " < " << b.bound
              << (b.passes ? " pass" : " FAIL") << "; bayes lhs " << y.lhs << " < " << y.rhs
              << (y.passes ? " pass" : " FAIL") << "\n";
  }
  for (const auto& t : report.posteriors) {
    std::cout << "posterior level " << t.level << ": " << t.models.size() << " models, best "
              << t.models[t.best_index].id() << " (" << t.posteriors[t.best_index] << ")";
    if (t.symmetric_posterior) std::cout << ", one-block " << *t.symmetric_posterior;
    std::cout << "\n";
  }
  std::cout << "overall: " << (report.overall ? "pass" : "FAIL") << "\n";

  if (!a.json.empty()) write_json_file(a.json, report);
  if (!a.csv.empty()) {
    std::ofstream out(a.csv, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + a.csv + "' for writing");
    write_csv(out, report);
  }
  return report.overall ? kPass : kFail;
}

int run_bounds(std::uint64_t n, std::optional<unsigned> levels, bool json) {
  const unsigned top = resolve_max_level(n, levels);
  nlohmann::json rows = nlohmann::json::array();
  for (unsigned i = 1; i <= top; ++i) {
    rows.push_back({{"i", i}, {"borel_bound", borel_bound(n)}, {"bayes_rhs", bayes_bound_rhs(n, i)}});
  }
  if (json) {
    std::cout << nlohmann::json{{"n", n}, {"levels", rows}}.dump(2) << "\n";
  } else {
    std::cout << "n = " << n << "\n" << std::scientific << std::setprecision(6);
    std::cout << "level  borel_bound   bayes_rhs\n";
    for (const auto& r : rows) {
      std::cout << std::setw(5) << r["i"].get<unsigned>() << "  " << r["borel_bound"].get<double>() << "  "
                << r["bayes_rhs"].get<double>() << "\n";
    }
  }
  return kPass;
}

struct ExtractArgs {
  std::string input;
  std::string in_format = "text";
  std::string kind;
  std::string unit = "ps";
  std::uint64_t divisor = 1;
  std::string output;
  BitFormat out_format = BitFormat::Ascii;
};

int run_extract(const ExtractArgs& a) {
  const TagKind kind = parse_tag_kind(a.kind);
  TimeTagSeries series = a.in_format == "binary" ? read_timetags_binary(a.input, kind, a.unit)
                                                 : read_timetags_text(a.input, kind, a.unit);
  if (series.values.empty()) throw EmptyInputError("no time tags in '" + a.input + "'");
  if (kind == TagKind::Timestamps) series = interarrivals(series);
  const auto bits = timetags_to_bits(series, a.divisor);
  if (!a.output.empty()) write_bits(a.output, bits, a.out_format);
  const double ones = bits.empty() ? 0.0 : static_cast<double>(bits.popcount()) / static_cast<double>(bits.size());
  std::cout << "n=" << bits.size() << " ones=" << bits.popcount() << " fraction=" << ones;
  if (bits.size() <= 64) std::cout << " bits=" << bits.to_string();
  std::cout << "\n";
  return kPass;
}

struct GenerateArgs {
  GeneratorConfig cfg;
  std::string kind = "bernoulli";
  std::optional<double> afterpulse_delay;
  std::string output;
  BitFormat format = BitFormat::Packed;
  std::string tags_output;
  std::string tags_format = "text";
};

int run_generate(GenerateArgs a) {
  a.cfg.kind = parse_generator_kind(a.kind);
  a.cfg.detector.afterpulse_delay = a.afterpulse_delay;
  BitSequence bits;
  switch (a.cfg.kind) {
    case GeneratorKind::Bernoulli: bits = gen_bernoulli(a.cfg); break;
    case GeneratorKind::Markov: bits = gen_markov(a.cfg); break;
    case GeneratorKind::Detector: {
      auto out = gen_detector(a.cfg);
      if (!a.tags_output.empty()) {
        if (a.tags_format == "binary") {
          write_timetags_binary(a.tags_output, out.tags);
        } else {
          write_timetags_text(a.tags_output, out.tags);
        }
      }
      bits = std::move(out.bits);
      break;
    }
  }
  write_bits(a.output, bits, a.format);
  std::cout << "wrote " << bits.size() << " bits (" << bits.popcount() << " ones) to " << a.output << "\n";
  return kPass;
}

struct PosteriorArgs {
  std::string input;
  BitFormat format = BitFormat::Packed;
  std::optional<std::uint64_t> bits;
  unsigned level = 1;
  std::optional<unsigned> max_blocks;
  std::string json;
  std::size_t top = 5;
};

int run_posterior(const PosteriorArgs& a) {
  const auto seq = load_bits(a.input, a.format, a.bits);
  resolve_max_level(seq.size(), a.level);
  const auto counts = count_blocks_parallel(seq, a.level, configured_threads());
  const auto table = posterior_over_partitions(counts, a.max_blocks);

  std::vector<std::size_t> order(table.models.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](auto x, auto y) { return table.posteriors[x] > table.posteriors[y]; });
  std::cout << "level " << a.level << ", n = " << seq.size() << ", " << table.models.size() << " models\n";
  std::cout << std::scientific << std::setprecision(6);
  for (std::size_t r = 0; r < std::min(a.top, order.size()); ++r) {
    const auto k = order[r];
    std::cout << "  " << table.models[k].id() << "  posterior " << table.posteriors[k] << "  log-evidence "
              << table.log_marginals[k] << "\n";
  }
  if (table.symmetric_posterior) std::cout << "one-block posterior " << *table.symmetric_posterior << "\n";
  if (!a.json.empty()) write_json_file(a.json, table);
  return table.models[table.best_index].is_one_block() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randcert: randomness certification for binary sequences"};
  app.require_subcommand(1);
  std::function<int()> command;

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "Borel-normality and Bayesian bound tests on a bit file");
  an->add_option("-i,--input", analyze.input, "bit file")->required()->check(CLI::ExistingFile);
  an->add_option("-f,--format", analyze.format, "ascii or packed")
      ->required()
      ->transform(CLI::CheckedTransformer(kBitFormats));
  an->add_option("--bits", analyze.bits, "use only the first N bits");
  an->add_option("--max-level", analyze.max_level, "highest Borel level (default i_max)");
  an->add_flag("--bayes-posterior", analyze.posterior, "compute model posteriors (levels 1-3, 4 with --max-blocks)");
  an->add_option("--max-blocks", analyze.max_blocks, "block cap for the level-4 posterior");
  an->add_option("--json", analyze.json, "write JSON report");
  an->add_option("--csv", analyze.csv, "write per-substring CSV");
  an->callback([&] { command = [&] { return run_analyze(analyze); }; });

  std::uint64_t bounds_n = 0;
  std::optional<unsigned> bounds_levels;
  bool bounds_json = false;
  auto* bo = app.add_subcommand("bounds", "print Borel and Bayesian bounds for a sequence length");
  bo->add_option("-n,--n", bounds_n, "sequence length in bits")->required();
  bo->add_option("--levels", bounds_levels, "highest level (default i_max)");
  bo->add_flag("--json", bounds_json, "print JSON");
  bo->callback([&] { command = [&] { return run_bounds(bounds_n, bounds_levels, bounds_json); }; });

  ExtractArgs extract;
  auto* ex = app.add_subcommand("extract", "derive bits from time-tag parity");
  ex->add_option("-i,--input", extract.input, "time-tag file")->required()->check(CLI::ExistingFile);
  ex->add_option("--in-format", extract.in_format, "text or binary")->check(CLI::IsMember({"text", "binary"}));
  ex->add_option("--kind", extract.kind, "timestamps or interarrivals")
      ->required()
      ->check(CLI::IsMember({"timestamps", "interarrivals"}));
  ex->add_option("--unit", extract.unit, "time unit label");
  ex->add_option("--divisor", extract.divisor, "parity of floor(value / divisor)")->check(CLI::PositiveNumber);
  ex->add_option("-o,--output", extract.output, "output bit file");
  ex->add_option("--out-format", extract.out_format, "ascii or packed")
      ->transform(CLI::CheckedTransformer(kBitFormats));
  ex->callback([&] { command = [&] { return run_extract(extract); }; });

  GenerateArgs gen;
  auto* ge = app.add_subcommand("generate", "write synthetic bits from a seeded generator");
  ge->add_option("--kind", gen.kind, "bernoulli, markov or detector")
      ->check(CLI::IsMember({"bernoulli", "markov", "detector"}));
  ge->add_option("-n,--n", gen.cfg.n, "number of bits / recorded events")->required();
  ge->add_option("--seed", gen.cfg.seed, "64-bit seed");
  ge->add_option("--theta", gen.cfg.theta, "P(1) for bernoulli");
  ge->add_option("--stay-prob", gen.cfg.stay_prob, "repeat probability for markov");
  ge->add_option("--mean-interarrival", gen.cfg.detector.mean_interarrival, "detector: mean photon gap");
  ge->add_option("--dead-time", gen.cfg.detector.dead_time, "detector: dead time");
  ge->add_option("--afterpulse-prob", gen.cfg.detector.afterpulse_prob, "detector: after-pulse probability");
  ge->add_option("--afterpulse-delay", gen.afterpulse_delay, "detector: after-pulse delay");
  ge->add_option("-o,--output", gen.output, "output bit file")->required();
  ge->add_option("-f,--format", gen.format, "ascii or packed")->transform(CLI::CheckedTransformer(kBitFormats));
  ge->add_option("--tags-output", gen.tags_output, "detector: time-tag output file");
  ge->add_option("--tags-format", gen.tags_format, "text or binary")->check(CLI::IsMember({"text", "binary"}));
  ge->callback([&] { command = [&] { return run_generate(gen); }; });

  PosteriorArgs post;
  auto* po = app.add_subcommand("posterior", "posterior over partition models at one level");
  po->add_option("-i,--input", post.input, "bit file")->required()->check(CLI::ExistingFile);
  po->add_option("-f,--format", post.format, "ascii or packed")
      ->required()
      ->transform(CLI::CheckedTransformer(kBitFormats));
  po->add_option("--bits", post.bits, "use only the first N bits");
  po->add_option("--level", post.level, "Borel level")->required();
  po->add_option("--max-blocks", post.max_blocks, "only models with at most this many blocks");
  po->add_option("--json", post.json, "write the posterior table as JSON");
  po->add_option("--top", post.top, "number of models to print");
  po->callback([&] { command = [&] { return run_posterior(post); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kError;
  }

  try {
    return command();
  } catch (const randcert::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}
