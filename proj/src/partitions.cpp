#include "randcert/partitions.hpp"

#include <algorithm>
#include <bit>

#include "randcert/errors.hpp"

namespace randcert {

namespace {

constexpr unsigned kMaxEnumerable = 16;
constexpr unsigned kMaxBell = 26;

}  // namespace

std::string to_string(uint128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

PartitionModel PartitionModel::from_rgs(std::vector<std::uint8_t> rgs) {
  if (rgs.empty()) throw ContractError("partition of an empty set");
  if (rgs.size() > 255) throw ContractError("partition too large");
  PartitionModel m;
  unsigned next_label = 0;
  for (std::size_t t = 0; t < rgs.size(); ++t) {
    if (rgs[t] > next_label) {
      throw ContractError("restricted-growth string is not canonical at position " + std::to_string(t));
    }
    if (rgs[t] == next_label) {
      ++next_label;
      m.block_sizes.push_back(0);
    }
    ++m.block_sizes[rgs[t]];
  }
  m.num_blocks = next_label;
  m.level = std::has_single_bit(rgs.size()) ? static_cast<unsigned>(std::countr_zero(rgs.size())) : 0;
  m.rgs = std::move(rgs);
  return m;
}

PartitionModel PartitionModel::from_id(std::string_view id) {
  std::vector<std::uint8_t> rgs;
  rgs.reserve(id.size());
  for (char c : id) {
    if (c >= '0' && c <= '9') {
      rgs.push_back(static_cast<std::uint8_t>(c - '0'));
    } else if (c >= 'a' && c <= 'f') {
      rgs.push_back(static_cast<std::uint8_t>(c - 'a' + 10));
    } else {
      throw ContractError("invalid partition id '" + std::string(id) + "'");
    }
  }
  return from_rgs(std::move(rgs));
}

std::string PartitionModel::id() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(rgs.size());
  for (auto label : rgs) {
    if (label >= 16) throw ContractError("partition with more than 16 blocks has no hex id");
    s.push_back(kDigits[label]);
  }
  return s;
}

uint128 bell_number(unsigned N) {
  if (N > kMaxBell) {
    throw DomainError("bell_number(" + std::to_string(N) + ") exceeds the exact range 0.." +
                      std::to_string(kMaxBell));
  }
  // Bell triangle: each row starts with the last entry of the previous row;
  // the first entry of row N is B_N.
  std::vector<uint128> row{1};
  for (unsigned r = 0; r < N; ++r) {
    std::vector<uint128> next{row.back()};
    next.reserve(row.size() + 1);
    for (auto v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

PartitionEnumerator::PartitionEnumerator(unsigned N, std::optional<unsigned> max_blocks)
    : n_(N), cap_(max_blocks.value_or(N)), rgs_(N, 0), prefix_max_(N, 0) {
  if (N < 1 || N > kMaxEnumerable) {
    throw DomainError("refusing to enumerate partitions of a " + std::to_string(N) +
                      "-element set (supported: 1.." + std::to_string(kMaxEnumerable) +
                      "; use a block cap for large levels)");
  }
  if (cap_ < 1 || cap_ > N) {
    throw DomainError("max_blocks must lie in 1.." + std::to_string(N));
  }
}

std::optional<PartitionModel> PartitionEnumerator::next() {
  if (done_) return std::nullopt;
  if (!started_) {
    started_ = true;
    return PartitionModel::from_rgs(rgs_);
  }
  // Rightmost position that can still grow without breaking canonicity or the cap.
  for (unsigned t = n_; t-- > 1;) {
    if (rgs_[t] <= prefix_max_[t] && rgs_[t] + 1u < cap_) {
      ++rgs_[t];
      for (unsigned u = t + 1; u < n_; ++u) {
        rgs_[u] = 0;
        prefix_max_[u] = std::max(prefix_max_[u - 1], rgs_[u - 1]);
      }
      return PartitionModel::from_rgs(rgs_);
    }
  }
  done_ = true;
  return std::nullopt;
}

std::vector<PartitionModel> enumerate_partitions(unsigned N, std::optional<unsigned> max_blocks) {
  PartitionEnumerator e(N, max_blocks);
  std::vector<PartitionModel> out;
  while (auto m = e.next()) out.push_back(std::move(*m));
  return out;
}

}  // namespace randcert
