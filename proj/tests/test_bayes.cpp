#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "randcert/bayes.hpp"
#include "randcert/errors.hpp"
#include "randcert/simgen.hpp"

using namespace randcert;

namespace {

BlockCounts make_counts(unsigned level, std::vector<std::uint64_t> counts) {
  BlockCounts c;
  c.level = level;
  c.total = std::reduce(counts.begin(), counts.end(), std::uint64_t{0});
  c.counts = std::move(counts);
  return c;
}

BitSequence repeat(const std::string& unit, std::size_t n) {
  std::string s;
  while (s.size() < n) s += unit;
  s.resize(n);
  return BitSequence::from_string(s);
}

}  // namespace

TEST_SUITE("bayes") {
  TEST_CASE("log_marginal on two 1-bit blocks") {
    auto c = make_counts(1, {1, 1});
    auto models = enumerate_partitions(2);
    CHECK(log_marginal(c, models[0]) == doctest::Approx(std::log(0.25)).epsilon(1e-14));
    CHECK(log_marginal(c, models[1]) == doctest::Approx(std::log(0.125)).epsilon(1e-14));
    // Quadrature of the Jeffreys-prior integral gives the same 1/8.
    CHECK(oracle::log_marginal({1, 1}, {0, 1}) == doctest::Approx(std::log(0.125)).epsilon(1e-10));
  }

  TEST_CASE("one-block model is the uniform distribution") {
    for (unsigned level = 1; level <= 4; ++level) {
      std::mt19937 gen(level);
      std::vector<std::uint64_t> counts(std::size_t{1} << level);
      for (auto& v : counts) v = gen() % 1000;
      auto c = make_counts(level, counts);
      const double expected = -static_cast<double>(c.total) * level * std::log(2.0);
      auto one = PartitionModel::from_rgs(std::vector<std::uint8_t>(counts.size(), 0));
      CHECK(log_marginal(c, one) == doctest::Approx(expected).epsilon(1e-14));
    }
  }

  TEST_CASE("log_marginal matches Dirichlet quadrature on sample counts") {
    auto c = make_counts(2, {3, 0, 0, 1});
    for (const auto& m : enumerate_partitions(4)) {
      const double ref = oracle::log_marginal(c.counts, m.rgs);
      CHECK(std::abs(std::expm1(log_marginal(c, m) - ref)) < 1e-6);
    }
  }

  TEST_CASE("model/count mismatch") {
    auto c = make_counts(2, {1, 2, 3, 4});
    CHECK_THROWS_AS(log_marginal(c, enumerate_partitions(2)[0]), ContractError);
  }

  TEST_CASE("posterior examples") {
    auto models = enumerate_partitions(2);
    auto t = posterior(make_counts(1, {1, 1}), models);
    CHECK(t.posteriors[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    CHECK(t.posteriors[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(t.best_index == 0);
    CHECK(best_model(t) == 0);
    REQUIRE(t.symmetric_posterior);
    CHECK(*t.symmetric_posterior == t.posteriors[0]);
    CHECK(t.log_prior == std::vector<double>{std::log(0.5), std::log(0.5)});

    auto biased = posterior(make_counts(1, {1000, 0}), models);
    CHECK(biased.posteriors[1] > 0.999);
    CHECK(biased.best_index == 1);

    auto empty = posterior(make_counts(1, {0, 0}), models);
    CHECK(empty.posteriors[0] == 0.5);
    CHECK(empty.posteriors[1] == 0.5);
    CHECK(empty.best_index == 0);  // tie goes to the lower index

    CHECK_THROWS_AS(posterior(make_counts(1, {1, 1}), {}), ContractError);
  }

  TEST_CASE("posterior without the one-block model") {
    std::vector<PartitionModel> models{PartitionModel::from_id("01")};
    auto t = posterior(make_counts(1, {5, 2}), models);
    CHECK_FALSE(t.symmetric_posterior);
    CHECK(t.posteriors[0] == 1.0);
  }

  TEST_CASE("posteriors normalize and follow permutations of the model list") {
    std::mt19937 gen(7);
    auto all = enumerate_partitions(8);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<std::uint64_t> counts(8);
      for (auto& v : counts) v = gen() % (trial < 20 ? 50 : 100000);
      auto c = make_counts(3, counts);
      std::vector<PartitionModel> subset;
      std::sample(all.begin(), all.end(), std::back_inserter(subset), 1 + gen() % 300, gen);
      auto t = posterior(c, subset);
      const double sum = std::accumulate(t.posteriors.begin(), t.posteriors.end(), 0.0);
      CHECK(std::abs(sum - 1.0) < 1e-12);

      std::vector<std::size_t> perm(subset.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), gen);
      std::vector<PartitionModel> shuffled;
      for (auto k : perm) shuffled.push_back(subset[k]);
      auto u = posterior(c, shuffled);
      for (std::size_t k = 0; k < perm.size(); ++k) {
        CHECK(u.posteriors[k] == doctest::Approx(t.posteriors[perm[k]]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("coupled bound right-hand side reproduces the published n = 2^32 values") {
    const std::uint64_t n = 4'294'967'296ull;
    const double expected[] = {3.62956e-5, 6.08097e-5, 7.82572e-5, 9.11726e-5, 1.01069e-4};
    for (unsigned i = 1; i <= 5; ++i) {
      CHECK(bayes_bound_rhs(n, i) == doctest::Approx(expected[i - 1]).epsilon(1e-5));
    }
  }

  TEST_CASE("bound preconditions") {
    CHECK_THROWS_AS(bayes_bound_rhs(1 << 20, 0), DomainError);
    CHECK_THROWS_AS(bayes_bound_rhs(1 << 20, 9), DomainError);
    CHECK_THROWS_AS(bayes_bound_rhs(23, 3), DomainError);  // needs n >= 3 * 8
    CHECK_NOTHROW(bayes_bound_rhs(24, 3));
  }

  TEST_CASE("log ratio equals the marginal difference at symmetric counts") {
    for (std::uint64_t n : {1ull << 12, 1ull << 20, 1ull << 32}) {
      for (unsigned i = 1; i <= 5; ++i) {
        const std::size_t K = std::size_t{1} << i;
        const double m = static_cast<double>(n) / i / static_cast<double>(K);
        std::vector<double> distinct(K, m);
        std::vector<std::uint64_t> ones(K, 1);
        const double one_block = log_marginal_block_totals(std::vector<double>{m * K}, std::vector<std::uint64_t>{K});
        const double diff = one_block - log_marginal_block_totals(distinct, ones);
        CHECK(diff == doctest::Approx(bayes_bound_log_ratio(n, i)).epsilon(n > (1ull << 30) ? 1e-5 : 1e-8));
      }
    }
  }

  TEST_CASE("bound scale behaviour on the published grid") {
    for (unsigned i = 1; i <= 5; ++i) {
      double prev = INFINITY;
      for (unsigned e = 20; e <= 32; e += 4) {
        const double r = bayes_bound_rhs(std::uint64_t{1} << e, i);
        CHECK(r < prev);
        prev = r;
      }
    }
    for (unsigned e = 20; e <= 32; e += 4) {
      for (unsigned i = 1; i < 5; ++i) {
        CHECK(bayes_bound_rhs(std::uint64_t{1} << e, i) < bayes_bound_rhs(std::uint64_t{1} << e, i + 1));
      }
    }
  }

  TEST_CASE("bound left-hand side") {
    CHECK(bayes_bound_lhs(make_counts(2, {5, 5, 5, 5})) == 0.0);
    CHECK(bayes_bound_lhs(make_counts(1, {3, 1})) == doctest::Approx(0.25));
    CHECK_THROWS_AS(bayes_bound_lhs(BlockCounts::zero(2)), EmptyInputError);

    std::mt19937 gen(3);
    for (int trial = 0; trial < 50; ++trial) {
      const unsigned level = 1 + gen() % 5;
      std::vector<std::uint64_t> counts(std::size_t{1} << level);
      for (auto& v : counts) v = 1 + gen() % 200;
      auto c = make_counts(level, counts);
      // Direct double sum over 1 <= j <= j' <= 2^i - 1.
      const double total = static_cast<double>(c.total);
      const double p = std::ldexp(1.0, -static_cast<int>(level));
      double sum = 0.0;
      for (std::size_t j = 1; j < counts.size(); ++j) {
        for (std::size_t jp = j; jp < counts.size(); ++jp) {
          sum += (counts[j] / total - p) * (counts[jp] / total - p);
        }
      }
      CHECK(bayes_bound_lhs(c) == doctest::Approx(std::sqrt(std::max(0.0, sum))).epsilon(1e-10));
    }
  }

  TEST_CASE("bound test on structured sequences") {
    auto uniform = bayes_bound_test(repeat("00011011", 1 << 16), 2);
    REQUIRE(uniform.size() == 2);
    CHECK(uniform[1].lhs == 0.0);
    CHECK(uniform[1].passes);

    auto ones = bayes_bound_test(repeat("1", 1 << 16));
    CHECK(ones[0].lhs == doctest::Approx(0.5));
    CHECK_FALSE(ones[0].passes);
    CHECK_FALSE(all_pass(std::span<const BayesBoundReport>(ones)));
  }

  TEST_CASE("posterior table json round trip") {
    auto t = posterior_over_partitions(make_counts(2, {10, 3, 7, 12}));
    nlohmann::json j = t;
    CHECK(j["models"][0] == "0000");
    CHECK(j.get<PosteriorTable>() == t);

    auto no_sym = posterior(make_counts(1, {1, 2}), std::vector<PartitionModel>{PartitionModel::from_id("01")});
    nlohmann::json k = no_sym;
    CHECK(k["symmetric_posterior"].is_null());
    CHECK(k.get<PosteriorTable>() == no_sym);
  }

  TEST_CASE("pinned bernoulli fixture") {
    // theta = 1/2, n = 2^20, seed = 42; verdicts recorded at build time.
    GeneratorConfig cfg;
    cfg.n = 1 << 20;
    cfg.seed = 42;
    const auto seq = gen_bernoulli(cfg);
    const auto reports = bayes_bound_test(seq);
    REQUIRE(reports.size() == 4);
    for (const auto& r : reports) CHECK(r.lhs < r.rhs);
    const double one_block[] = {0.999084, 0.990248, 0.354762};
    for (unsigned i = 1; i <= 3; ++i) {
      const auto table = posterior_over_partitions(count_blocks(seq, i));
      CHECK(best_model(table) == 0);
      CHECK(table.models[0].is_one_block());
      CHECK(table.posteriors[0] == doctest::Approx(one_block[i - 1]).epsilon(1e-5));
    }
  }
}
