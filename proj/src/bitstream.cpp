#include "randcert/bitstream.hpp"

#include <bit>
#include <cstring>
#include <sstream>

#include "randcert/errors.hpp"

namespace randcert {

namespace {

void clear_pad_bits(std::vector<std::uint8_t>& bytes, std::uint64_t n) {
  if (n % 8 != 0 && !bytes.empty()) {
    bytes.back() &= static_cast<std::uint8_t>(0xFFu << (8 - n % 8));
  }
}

bool is_skippable(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::vector<char> slurp(const std::filesystem::path& path) {
  auto in = open_binary(path);
  std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed on '" + path.string() + "'");
  return data;
}

}  // namespace

BitSequence::BitSequence(std::vector<std::uint8_t> bytes, std::uint64_t n)
    : bytes_(std::move(bytes)), n_(n) {
  if (n_ > 8 * static_cast<std::uint64_t>(bytes_.size())) {
    throw LengthError("requested " + std::to_string(n_) + " bits but only " +
                      std::to_string(8 * bytes_.size()) + " are available");
  }
  bytes_.resize((n_ + 7) / 8);
  clear_pad_bits(bytes_, n_);
}

BitSequence BitSequence::from_string(std::string_view bits) {
  BitSequenceBuilder builder;
  builder.reserve_bits(bits.size());
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] == '0' || bits[k] == '1') {
      builder.push_bit(bits[k] - '0');
    } else {
      throw FormatError("invalid bit character", k);
    }
  }
  return std::move(builder).finish();
}

int BitSequence::bit_at(std::uint64_t k) const {
  if (k >= n_) {
    throw RangeError("bit index " + std::to_string(k) + " out of range for sequence of " +
                     std::to_string(n_) + " bits");
  }
  return (*this)[k];
}

std::uint64_t BitSequence::popcount() const noexcept {
  std::uint64_t total = 0;
  std::size_t k = 0;
  for (; k + 8 <= bytes_.size(); k += 8) {
    std::uint64_t word;
    std::memcpy(&word, bytes_.data() + k, 8);
    total += static_cast<std::uint64_t>(std::popcount(word));
  }
  for (; k < bytes_.size(); ++k) total += static_cast<std::uint64_t>(std::popcount(bytes_[k]));
  return total;
}

std::string BitSequence::to_string() const {
  std::string out(n_, '0');
  for (std::uint64_t k = 0; k < n_; ++k) out[k] = static_cast<char>('0' + (*this)[k]);
  return out;
}

void BitSequenceBuilder::push_bit(int bit) {
  if (n_ % 8 == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (n_ % 8));
  ++n_;
}

void BitSequenceBuilder::push_bytes(std::span<const std::uint8_t> bytes) {
  if (n_ % 8 == 0) {
    bytes_.insert(bytes_.end(), bytes.begin(), bytes.end());
    n_ += 8 * static_cast<std::uint64_t>(bytes.size());
    return;
  }
  for (std::uint8_t b : bytes) {
    for (int s = 7; s >= 0; --s) push_bit((b >> s) & 1);
  }
}

BitSequence BitSequenceBuilder::finish() && {
  auto n = n_;
  n_ = 0;
  return BitSequence(std::move(bytes_), n);
}

BitFormat parse_bit_format(std::string_view name) {
  if (name == "ascii") return BitFormat::Ascii;
  if (name == "packed") return BitFormat::Packed;
  throw ConfigError("unknown bit format '" + std::string(name) + "' (expected ascii or packed)");
}

const char* to_string(BitFormat format) {
  return format == BitFormat::Ascii ? "ascii" : "packed";
}

BitSequence parse_ascii(std::string_view text) {
  BitSequenceBuilder builder;
  builder.reserve_bits(text.size());
  for (std::size_t k = 0; k < text.size(); ++k) {
    char c = text[k];
    if (c == '0' || c == '1') {
      builder.push_bit(c - '0');
    } else if (!is_skippable(c)) {
      throw FormatError("unexpected character in ASCII bit file", k);
    }
  }
  return std::move(builder).finish();
}

BitSequence load_ascii(const std::filesystem::path& path) {
  auto data = slurp(path);
  try {
    return parse_ascii(std::string_view(data.data(), data.size()));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": unexpected character in ASCII bit file", e.offset());
  }
}

BitSequence load_packed(const std::filesystem::path& path, std::optional<std::uint64_t> n) {
  auto data = slurp(path);
  std::vector<std::uint8_t> bytes(data.begin(), data.end());
  std::uint64_t bits = n.value_or(8 * static_cast<std::uint64_t>(bytes.size()));
  return BitSequence(std::move(bytes), bits);
}

BitSequence load_bits(const std::filesystem::path& path, BitFormat format,
                      std::optional<std::uint64_t> n) {
  if (format == BitFormat::Ascii) {
    auto seq = load_ascii(path);
    if (n) {
      if (*n > seq.size()) {
        throw LengthError("requested " + std::to_string(*n) + " bits but file holds " +
                          std::to_string(seq.size()));
      }
      std::vector<std::uint8_t> bytes(seq.bytes().begin(), seq.bytes().end());
      return BitSequence(std::move(bytes), *n);
    }
    return seq;
  }
  return load_packed(path, n);
}

void write_packed(const std::filesystem::path& path, const BitSequence& seq) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  auto bytes = seq.bytes();
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

std::string render_ascii(const BitSequence& seq, std::size_t line_width) {
  std::string out;
  out.reserve(seq.size() + (line_width ? seq.size() / line_width : 0) + 1);
  for (std::uint64_t k = 0; k < seq.size(); ++k) {
    out.push_back(static_cast<char>('0' + seq[k]));
    if (line_width && (k + 1) % line_width == 0) out.push_back('\n');
  }
  if (out.empty() || out.back() != '\n') out.push_back('\n');
  return out;
}

void write_ascii(const std::filesystem::path& path, const BitSequence& seq,
                 std::size_t line_width) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << render_ascii(seq, line_width);
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

void write_bits(const std::filesystem::path& path, const BitSequence& seq, BitFormat format) {
  if (format == BitFormat::Ascii) {
    write_ascii(path, seq);
  } else {
    write_packed(path, seq);
  }
}

BitChunkReader::BitChunkReader(const std::filesystem::path& path, BitFormat format,
                               unsigned block_len, std::uint64_t target_chunk_bits,
                               std::optional<std::uint64_t> n)
    : in_(open_binary(path)), format_(format), limit_(n), buf_(1 << 16) {
  if (block_len == 0) throw ContractError("block length must be positive");
  const std::uint64_t unit = 8 * static_cast<std::uint64_t>(block_len);
  chunk_bits_ = std::max<std::uint64_t>(1, target_chunk_bits / unit) * unit;
  if (format_ == BitFormat::Packed && limit_) {
    auto file_bits = 8 * static_cast<std::uint64_t>(std::filesystem::file_size(path));
    if (*limit_ > file_bits) {
      throw LengthError("requested " + std::to_string(*limit_) + " bits but file holds " +
                        std::to_string(file_bits));
    }
  }
  buf_pos_ = buf_.size();
  buf_.resize(0);
}

bool BitChunkReader::refill() {
  if (eof_) return false;
  buf_.resize(1 << 16);
  in_.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  auto got = static_cast<std::size_t>(in_.gcount());
  if (in_.bad()) throw IoError("read failed");
  buf_.resize(got);
  buf_pos_ = 0;
  if (got == 0) eof_ = true;
  return got != 0;
}

std::optional<BitSequence> BitChunkReader::next() {
  std::uint64_t want = chunk_bits_;
  if (limit_) want = std::min(want, *limit_ - bits_read_);
  if (want == 0) return std::nullopt;

  BitSequenceBuilder builder;
  builder.reserve_bits(want);
  if (format_ == BitFormat::Packed) {
    while (builder.size() < want) {
      if (buf_pos_ >= buf_.size() && !refill()) break;
      std::uint64_t missing_bytes = (want - builder.size() + 7) / 8;
      std::size_t take = static_cast<std::size_t>(
          std::min<std::uint64_t>(missing_bytes, buf_.size() - buf_pos_));
      builder.push_bytes(std::span(reinterpret_cast<const std::uint8_t*>(buf_.data()) + buf_pos_, take));
      buf_pos_ += take;
      file_offset_ += take;
    }
  } else {
    while (builder.size() < want) {
      if (buf_pos_ >= buf_.size() && !refill()) break;
      char c = buf_[buf_pos_++];
      if (c == '0' || c == '1') {
        builder.push_bit(c - '0');
      } else if (!is_skippable(c)) {
        throw FormatError("unexpected character in ASCII bit file", file_offset_);
      }
      ++file_offset_;
    }
  }

  std::uint64_t got = std::min(builder.size(), want);
  if (limit_ && got < want) {
    throw LengthError("requested " + std::to_string(*limit_) + " bits but input ended after " +
                      std::to_string(bits_read_ + got));
  }
  if (got == 0) return std::nullopt;
  bits_read_ += got;
  auto seq = std::move(builder).finish();
  if (seq.size() != got) {
    std::vector<std::uint8_t> bytes(seq.bytes().begin(), seq.bytes().end());
    seq = BitSequence(std::move(bytes), got);
  }
  return seq;
}

BitSequence load_streaming(const std::filesystem::path& path, BitFormat format,
                           std::optional<std::uint64_t> n) {
  BitChunkReader reader(path, format, 1, std::uint64_t{1} << 20, n);
  BitSequenceBuilder builder;
  while (auto chunk = reader.next()) {
    if (builder.size() % 8 == 0 && chunk->size() % 8 == 0) {
      builder.push_bytes(chunk->bytes());
    } else {
      for (std::uint64_t k = 0; k < chunk->size(); ++k) builder.push_bit((*chunk)[k]);
    }
  }
  return std::move(builder).finish();
}

}  // namespace randcert
