#include "randcert/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "randcert/borel.hpp"
#include "randcert/errors.hpp"
#include "randcert/special.hpp"

namespace randcert {

namespace {

constexpr unsigned kMaxBoundLevel = 8;

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

const double kLogGammaHalf = 0.5 * std::log(std::numbers::pi);

}  // namespace

double log_marginal_block_totals(std::span<const double> block_totals,
                                 std::span<const std::uint64_t> block_sizes) {
  if (block_totals.size() != block_sizes.size() || block_totals.empty()) {
    throw ContractError("block totals and block sizes must be non-empty and of equal length");
  }
  const double K = static_cast<double>(block_totals.size());
  CompensatedSum acc;
  double T = 0.0;
  for (std::size_t k = 0; k < block_totals.size(); ++k) {
    const double m = block_totals[k];
    if (m < 0.0) throw ContractError("negative block total");
    T += m;
    // Gamma ratios are paired so that empty blocks contribute exactly zero.
    if (m > 0.0) {
      acc.add(-m * std::log(static_cast<double>(block_sizes[k])));
      acc.add(log_gamma(m + 0.5));
      acc.add(-kLogGammaHalf);
    }
  }
  if (T > 0.0) {
    acc.add(log_gamma(0.5 * K));
    acc.add(-log_gamma(T + 0.5 * K));
  }
  return acc.value();
}

double log_marginal(const BlockCounts& counts, const PartitionModel& model) {
  if (model.rgs.size() != counts.counts.size()) {
    throw ContractError("model over " + std::to_string(model.rgs.size()) +
                        " substrings does not match counts at level " + std::to_string(counts.level));
  }
  std::vector<double> totals(model.num_blocks, 0.0);
  for (std::size_t j = 0; j < counts.counts.size(); ++j) {
    totals[model.rgs[j]] += static_cast<double>(counts.counts[j]);
  }
  return log_marginal_block_totals(totals, model.block_sizes);
}

PosteriorTable posterior(const BlockCounts& counts, std::span<const PartitionModel> models) {
  if (models.empty()) throw ContractError("posterior needs at least one model");
  PosteriorTable t;
  t.level = counts.level;
  t.models.assign(models.begin(), models.end());
  const double log_prior = -std::log(static_cast<double>(models.size()));
  t.log_prior.assign(models.size(), log_prior);
  t.log_marginals.reserve(models.size());
  for (const auto& m : models) t.log_marginals.push_back(log_marginal(counts, m));

  std::vector<double> log_joint(models.size());
  for (std::size_t a = 0; a < models.size(); ++a) log_joint[a] = t.log_marginals[a] + t.log_prior[a];
  const double shift = *std::max_element(log_joint.begin(), log_joint.end());
  t.posteriors.resize(models.size());
  CompensatedSum norm;
  for (std::size_t a = 0; a < models.size(); ++a) {
    t.posteriors[a] = std::exp(log_joint[a] - shift);
    norm.add(t.posteriors[a]);
  }
  const double z = norm.value();
  for (auto& p : t.posteriors) p /= z;

  t.best_index = best_model(t);
  for (std::size_t a = 0; a < models.size(); ++a) {
    if (t.models[a].is_one_block()) {
      t.symmetric_posterior = t.posteriors[a];
      break;
    }
  }
  return t;
}

PosteriorTable posterior_over_partitions(const BlockCounts& counts, std::optional<unsigned> max_blocks) {
  auto models = enumerate_partitions(static_cast<unsigned>(counts.counts.size()), max_blocks);
  return posterior(counts, models);
}

std::size_t best_model(const PosteriorTable& table) {
  if (table.posteriors.empty()) throw ContractError("empty posterior table");
  return static_cast<std::size_t>(
      std::max_element(table.posteriors.begin(), table.posteriors.end()) - table.posteriors.begin());
}

double bayes_bound_log_ratio(std::uint64_t n, unsigned level) {
  if (level < 1 || level > kMaxBoundLevel) {
    throw DomainError("Bayesian bound supports levels 1.." + std::to_string(kMaxBoundLevel));
  }
  const std::uint64_t K = std::uint64_t{1} << level;
  if (n < level * K) {
    throw DomainError("Bayesian bound at level " + std::to_string(level) + " needs n >= " +
                      std::to_string(level * K) + ", got " + std::to_string(n));
  }
  const double nd = static_cast<double>(n);
  const double Kd = static_cast<double>(K);
  const double blocks = nd / level;         // n / i
  const double per_substring = blocks / Kd;  // n / (i 2^i)
  const double half_K = 0.5 * Kd;           // 1 / 2^(1-i)

  CompensatedSum acc;
  acc.add(-nd * std::numbers::ln2);
  acc.add(Kd * kLogGammaHalf);
  acc.add(log_gamma(half_K + blocks));
  acc.add(-log_gamma(half_K));
  acc.add(-Kd * log_gamma(0.5 + per_substring));
  const double v = acc.value();
  if (!std::isfinite(v)) throw NumericError("non-finite log ratio in Bayesian bound");
  return v;
}

double bayes_bound_rhs(std::uint64_t n, unsigned level) {
  const double log_ratio = bayes_bound_log_ratio(n, level);
  const double nd = static_cast<double>(n);
  const double per_substring = nd / level / std::ldexp(1.0, static_cast<int>(level));
  const double trigamma = polygamma1(0.5 + per_substring);
  const double radicand = static_cast<double>(level) * level / (nd * nd * trigamma) * log_ratio;
  if (!std::isfinite(radicand) || radicand <= 0.0) {
    throw NumericError("Bayesian bound radicand is not a positive finite number (" +
                       std::to_string(radicand) + ")");
  }
  return std::sqrt(radicand);
}

double bayes_bound_lhs(const BlockCounts& counts) {
  if (counts.total == 0) throw EmptyInputError("no complete blocks at level " + std::to_string(counts.level));
  if (counts.level < 1) throw ContractError("level must be at least 1");
  const auto d = borel_deviations(counts);
  CompensatedSum s, q;
  for (std::size_t j = 1; j < d.size(); ++j) {
    s.add(d[j]);
    q.add(d[j] * d[j]);
  }
  const double S = s.value();
  double radicand = 0.5 * (S * S + q.value());
  if (radicand < 0.0) {
    if (radicand < -1e-15) throw NumericError("negative radicand in Bayesian bound lhs");
    radicand = 0.0;
  }
  return std::sqrt(radicand);
}

BayesBoundReport bayes_bound_report(const BlockCounts& counts, std::uint64_t n) {
  BayesBoundReport r;
  r.level = counts.level;
  r.lhs = bayes_bound_lhs(counts);
  r.rhs = bayes_bound_rhs(n, counts.level);
  r.passes = r.lhs < r.rhs;
  return r;
}

std::vector<BayesBoundReport> bayes_bound_test(const BitSequence& seq, std::optional<unsigned> max_level) {
  const unsigned top = resolve_max_level(seq.size(), max_level);
  std::vector<BayesBoundReport> out;
  for (unsigned i = 1; i <= top; ++i) out.push_back(bayes_bound_report(count_blocks(seq, i), seq.size()));
  return out;
}

std::vector<BayesBoundReport> bayes_bound_test(std::span<const BlockCounts> counts, std::uint64_t n) {
  std::vector<BayesBoundReport> out;
  out.reserve(counts.size());
  for (const auto& c : counts) out.push_back(bayes_bound_report(c, n));
  return out;
}

bool all_pass(std::span<const BayesBoundReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passes; });
}

void to_json(nlohmann::json& j, const BayesBoundReport& r) {
  j = nlohmann::json{{"i", r.level}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"passes", r.passes}};
}

void from_json(const nlohmann::json& j, BayesBoundReport& r) {
  j.at("i").get_to(r.level);
  j.at("lhs").get_to(r.lhs);
  j.at("rhs").get_to(r.rhs);
  j.at("passes").get_to(r.passes);
}

void to_json(nlohmann::json& j, const PosteriorTable& t) {
  std::vector<std::string> ids;
  ids.reserve(t.models.size());
  for (const auto& m : t.models) ids.push_back(m.id());
  j = nlohmann::json{{"i", t.level},
                     {"models", ids},
                     {"log_marginals", t.log_marginals},
                     {"log_prior", t.log_prior},
                     {"posteriors", t.posteriors},
                     {"best_index", t.best_index},
                     {"best_model", t.models.at(t.best_index).id()}};
  j["symmetric_posterior"] = t.symmetric_posterior ? nlohmann::json(*t.symmetric_posterior) : nlohmann::json();
}

void from_json(const nlohmann::json& j, PosteriorTable& t) {
  j.at("i").get_to(t.level);
  t.models.clear();
  for (const auto& id : j.at("models")) t.models.push_back(PartitionModel::from_id(id.get<std::string>()));
  j.at("log_marginals").get_to(t.log_marginals);
  j.at("log_prior").get_to(t.log_prior);
  j.at("posteriors").get_to(t.posteriors);
  j.at("best_index").get_to(t.best_index);
  const auto& sym = j.at("symmetric_posterior");
  t.symmetric_posterior = sym.is_null() ? std::nullopt : std::optional<double>(sym.get<double>());
}

}  // namespace randcert
