#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace randcert {

__extension__ using uint128 = unsigned __int128;

std::string to_string(uint128 v);

// A set partition of the 2^level substrings, stored as a canonical
// restricted-growth string: rgs[t] is the block of substring t, block labels
// appear in first-use order (rgs[0] == 0, rgs[t] <= 1 + max(rgs[0..t))).
// Each partition is one generative model: substrings sharing a block share
// one probability.
struct PartitionModel {
  unsigned level = 0;  // log2(rgs.size()) when that is an integer, else 0
  std::vector<std::uint8_t> rgs;
  unsigned num_blocks = 0;
  std::vector<std::uint64_t> block_sizes;

  // Validates canonicity and derives num_blocks / block_sizes.
  static PartitionModel from_rgs(std::vector<std::uint8_t> rgs);
  // Parses the hex-digit identifier written by id(), e.g. "0101".
  static PartitionModel from_id(std::string_view id);

  // One hex digit per element ("0011" for {{00,01},{10,11}}).
  std::string id() const;
  bool is_one_block() const noexcept { return num_blocks == 1; }

  friend bool operator==(const PartitionModel&, const PartitionModel&) = default;
};

// Bell number B_N (number of partitions of an N-set) from the Bell triangle.
// Exact for 0 <= N <= 26; other N throw DomainError.
uint128 bell_number(unsigned N);

// Yields canonical restricted-growth strings of length N in lexicographic
// order, optionally limited to at most max_blocks blocks. The one-block
// partition comes first.
class PartitionEnumerator {
 public:
  // Throws DomainError for N outside 1..16 or max_blocks outside 1..N.
  explicit PartitionEnumerator(unsigned N, std::optional<unsigned> max_blocks = std::nullopt);

  std::optional<PartitionModel> next();

 private:
  unsigned n_;
  unsigned cap_;
  std::vector<std::uint8_t> rgs_;
  std::vector<std::uint8_t> prefix_max_;  // prefix_max_[t] = max(rgs_[0..t))
  bool started_ = false;
  bool done_ = false;
};

std::vector<PartitionModel> enumerate_partitions(unsigned N,
                                                 std::optional<unsigned> max_blocks = std::nullopt);

}  // namespace randcert
