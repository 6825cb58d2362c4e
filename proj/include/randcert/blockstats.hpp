#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "randcert/bitstream.hpp"

namespace randcert {

// Largest level count_blocks accepts; the count vector is dense (2^level entries).
inline constexpr unsigned kMaxCountLevel = 24;

// Occurrence counts of every i-bit substring over the non-overlapping blocks
// seq[0,i), seq[i,2i), ... Index j is the block read as a big-endian integer,
// so "10" is j = 2.
struct BlockCounts {
  unsigned level = 0;
  std::uint64_t total = 0;
  std::vector<std::uint64_t> counts;

  // All-zero counts at `level` (identity of merge_counts).
  static BlockCounts zero(unsigned level);

  friend bool operator==(const BlockCounts&, const BlockCounts&) = default;
};

// floor(log2(log2(n))), found as the largest i with 2^(2^i) <= n using
// integer comparisons only. Throws DomainError for n < 4.
unsigned max_borel_level(std::uint64_t n);

BlockCounts count_blocks(const BitSequence& seq, unsigned level);

// Counts blocks [first_block, last_block) of `seq` at `level`.
BlockCounts count_blocks_range(const BitSequence& seq, unsigned level, std::uint64_t first_block,
                               std::uint64_t last_block);

// Splits the sequence into block-aligned ranges, counts them on `threads`
// workers (0 = hardware concurrency) and merges. Identical to count_blocks.
BlockCounts count_blocks_parallel(const BitSequence& seq, unsigned level, unsigned threads = 0);

// Counts several levels at once over a streaming reader. The reader's chunk
// length must be a multiple of every requested level.
std::vector<BlockCounts> count_blocks_stream(BitChunkReader& reader,
                                             std::span<const unsigned> levels);

BlockCounts merge_counts(const BlockCounts& a, const BlockCounts& b);

// Worker count from RANDCERT_THREADS (unset or 0 = hardware concurrency).
unsigned configured_threads();

// Renders substring index j at `level` as bits, e.g. (2, 2) -> "10".
std::string substring_bits(std::uint64_t j, unsigned level);

void to_json(nlohmann::json& j, const BlockCounts& c);
void from_json(const nlohmann::json& j, BlockCounts& c);

}  // namespace randcert
