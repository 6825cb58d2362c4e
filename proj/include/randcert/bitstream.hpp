#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace randcert {

// An immutable packed bit sequence. Bits are stored MSB-first within each
// byte; pad bits in the final byte are always zero and are not part of size().
class BitSequence {
 public:
  BitSequence() = default;

  // Takes ownership of packed bytes holding exactly `n` bits. Pad bits are
  // cleared. Throws LengthError if n > 8 * bytes.size().
  BitSequence(std::vector<std::uint8_t> bytes, std::uint64_t n);

  // Convenience for tests and small literals: "1011" -> [1,0,1,1].
  // Any character other than '0'/'1' is a FormatError.
  static BitSequence from_string(std::string_view bits);

  std::uint64_t size() const noexcept { return n_; }
  bool empty() const noexcept { return n_ == 0; }
  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

  // Throws RangeError when k >= size().
  int bit_at(std::uint64_t k) const;

  // Unchecked access for hot loops.
  int operator[](std::uint64_t k) const noexcept {
    return (bytes_[k >> 3] >> (7 - (k & 7))) & 1;
  }

  std::uint64_t popcount() const noexcept;
  std::string to_string() const;

  friend bool operator==(const BitSequence&, const BitSequence&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t n_ = 0;
};

// Appends bits one at a time or byte-aligned runs; finish() yields the sequence.
class BitSequenceBuilder {
 public:
  void reserve_bits(std::uint64_t n) { bytes_.reserve((n + 7) / 8); }
  void push_bit(int bit);
  // Appends 8 * bytes.size() bits; fast when the builder is byte-aligned.
  void push_bytes(std::span<const std::uint8_t> bytes);
  std::uint64_t size() const noexcept { return n_; }
  BitSequence finish() &&;

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t n_ = 0;
};

enum class BitFormat { Ascii, Packed };

BitFormat parse_bit_format(std::string_view name);
const char* to_string(BitFormat format);

// '0'/'1' with space, tab, CR and LF ignored. Anything else is a FormatError
// naming its byte offset.
BitSequence load_ascii(const std::filesystem::path& path);
BitSequence parse_ascii(std::string_view text);

// Raw bytes, MSB-first. When `n` is omitted every byte contributes 8 bits.
BitSequence load_packed(const std::filesystem::path& path,
                        std::optional<std::uint64_t> n = std::nullopt);

BitSequence load_bits(const std::filesystem::path& path, BitFormat format,
                      std::optional<std::uint64_t> n = std::nullopt);

void write_packed(const std::filesystem::path& path, const BitSequence& seq);
// Writes `line_width` bits per line (0 = single line), newline-terminated.
void write_ascii(const std::filesystem::path& path, const BitSequence& seq,
                 std::size_t line_width = 64);
std::string render_ascii(const BitSequence& seq, std::size_t line_width = 64);
void write_bits(const std::filesystem::path& path, const BitSequence& seq, BitFormat format);

// Constant-memory reader that hands out a file as consecutive chunks. Every
// chunk except the last has a bit length that is a multiple of 8 * block_len,
// so a consumer counting blocks of block_len bits never sees a block split
// across two chunks.
class BitChunkReader {
 public:
  BitChunkReader(const std::filesystem::path& path, BitFormat format, unsigned block_len,
                 std::uint64_t target_chunk_bits = std::uint64_t{1} << 23,
                 std::optional<std::uint64_t> n = std::nullopt);

  std::uint64_t chunk_bits() const noexcept { return chunk_bits_; }

  // Next chunk, or nullopt once the input is exhausted.
  std::optional<BitSequence> next();

  // Total bits handed out so far.
  std::uint64_t bits_read() const noexcept { return bits_read_; }

 private:
  bool refill();

  std::ifstream in_;
  BitFormat format_;
  std::uint64_t chunk_bits_;
  std::optional<std::uint64_t> limit_;
  std::uint64_t bits_read_ = 0;
  std::uint64_t file_offset_ = 0;
  std::vector<char> buf_;
  std::size_t buf_pos_ = 0;
  bool eof_ = false;
};

// Reads a whole file through BitChunkReader.
BitSequence load_streaming(const std::filesystem::path& path, BitFormat format,
                           std::optional<std::uint64_t> n = std::nullopt);

}  // namespace randcert
