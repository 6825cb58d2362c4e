#include "randcert/blockstats.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "randcert/errors.hpp"

namespace randcert {

namespace {

void check_level(unsigned level) {
  if (level < 1 || level > kMaxCountLevel) {
    throw DomainError("block level " + std::to_string(level) + " outside supported range 1.." +
                      std::to_string(kMaxCountLevel));
  }
}

// Streams blocks of `level` bits out of the packed bytes, MSB-first, keeping a
// left-aligned 64-bit accumulator.
void count_range_into(std::span<const std::uint8_t> bytes, unsigned level, std::uint64_t first_block,
                      std::uint64_t last_block, std::uint64_t* counts) {
  if (first_block >= last_block) return;
  const std::uint64_t start_bit = first_block * level;
  std::size_t pos = static_cast<std::size_t>(start_bit >> 3);
  std::uint64_t acc = 0;
  unsigned avail = 0;
  auto refill = [&] {
    while (avail <= 56 && pos < bytes.size()) {
      acc |= static_cast<std::uint64_t>(bytes[pos++]) << (56 - avail);
      avail += 8;
    }
  };
  refill();
  const unsigned skip = static_cast<unsigned>(start_bit & 7);
  acc <<= skip;
  avail -= skip;

  const unsigned shift = 64 - level;
  for (std::uint64_t b = first_block; b < last_block; ++b) {
    if (avail < level) refill();
    ++counts[acc >> shift];
    acc <<= level;
    avail -= level;
  }
}

}  // namespace

BlockCounts BlockCounts::zero(unsigned level) {
  check_level(level);
  BlockCounts c;
  c.level = level;
  c.counts.assign(std::size_t{1} << level, 0);
  return c;
}

unsigned max_borel_level(std::uint64_t n) {
  if (n < 4) {
    throw DomainError("no admissible Borel level for n = " + std::to_string(n) + " (need n >= 4)");
  }
  // 2^(2^i) <= n  <=>  2^i <= floor(log2 n) = bit_width(n) - 1.
  const unsigned log2n = static_cast<unsigned>(std::bit_width(n)) - 1;
  unsigned level = 0;
  while ((2u << level) <= log2n) ++level;
  return level;
}

BlockCounts count_blocks_range(const BitSequence& seq, unsigned level, std::uint64_t first_block,
                               std::uint64_t last_block) {
  auto out = BlockCounts::zero(level);
  const std::uint64_t blocks = seq.size() / level;
  if (first_block > last_block || last_block > blocks) {
    throw RangeError("block range [" + std::to_string(first_block) + ", " +
                     std::to_string(last_block) + ") exceeds " + std::to_string(blocks) +
                     " blocks");
  }
  out.total = last_block - first_block;
  if (level == 1 && first_block == 0 && last_block == seq.size()) {
    out.counts[1] = seq.popcount();
    out.counts[0] = out.total - out.counts[1];
    return out;
  }
  count_range_into(seq.bytes(), level, first_block, last_block, out.counts.data());
  return out;
}

BlockCounts count_blocks(const BitSequence& seq, unsigned level) {
  check_level(level);
  if (seq.size() < level) {
    throw EmptyInputError("sequence of " + std::to_string(seq.size()) +
                          " bits holds no complete block of length " + std::to_string(level));
  }
  return count_blocks_range(seq, level, 0, seq.size() / level);
}

BlockCounts count_blocks_parallel(const BitSequence& seq, unsigned level, unsigned threads) {
  check_level(level);
  if (seq.size() < level) return count_blocks(seq, level);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t blocks = seq.size() / level;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));

  std::vector<BlockCounts> partial(threads);
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t lo = blocks * t / threads;
      const std::uint64_t hi = blocks * (t + 1) / threads;
      workers.emplace_back([&, t, lo, hi] { partial[t] = count_blocks_range(seq, level, lo, hi); });
    }
  }
  return std::reduce(partial.begin() + 1, partial.end(), partial.front(), merge_counts);
}

std::vector<BlockCounts> count_blocks_stream(BitChunkReader& reader,
                                             std::span<const unsigned> levels) {
  std::vector<BlockCounts> out;
  out.reserve(levels.size());
  for (unsigned level : levels) {
    if (reader.chunk_bits() % level != 0) {
      throw ContractError("reader chunk length " + std::to_string(reader.chunk_bits()) +
                          " is not a multiple of level " + std::to_string(level));
    }
    out.push_back(BlockCounts::zero(level));
  }
  while (auto chunk = reader.next()) {
    for (auto& acc : out) {
      const std::uint64_t blocks = chunk->size() / acc.level;
      count_range_into(chunk->bytes(), acc.level, 0, blocks, acc.counts.data());
      acc.total += blocks;
    }
  }
  return out;
}

BlockCounts merge_counts(const BlockCounts& a, const BlockCounts& b) {
  if (a.level != b.level || a.counts.size() != b.counts.size()) {
    throw ContractError("cannot merge counts of level " + std::to_string(a.level) + " and " +
                        std::to_string(b.level));
  }
  BlockCounts out = a;
  out.total += b.total;
  std::transform(out.counts.begin(), out.counts.end(), b.counts.begin(), out.counts.begin(),
                 std::plus<>());
  return out;
}

unsigned configured_threads() {
  if (const char* env = std::getenv("RANDCERT_THREADS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string substring_bits(std::uint64_t j, unsigned level) {
  std::string s(level, '0');
  for (unsigned b = 0; b < level; ++b) {
    if ((j >> (level - 1 - b)) & 1) s[b] = '1';
  }
  return s;
}

void to_json(nlohmann::json& j, const BlockCounts& c) {
  j = nlohmann::json{{"level", c.level}, {"total", c.total}, {"counts", c.counts}};
}

void from_json(const nlohmann::json& j, BlockCounts& c) {
  j.at("level").get_to(c.level);
  j.at("total").get_to(c.total);
  j.at("counts").get_to(c.counts);
  if (c.level < 1 || c.level > kMaxCountLevel || c.counts.size() != (std::size_t{1} << c.level)) {
    throw ContractError("BlockCounts JSON: counts length does not match 2^level");
  }
  if (std::reduce(c.counts.begin(), c.counts.end(), std::uint64_t{0}) != c.total) {
    throw ContractError("BlockCounts JSON: counts do not sum to total");
  }
}

}  // namespace randcert
