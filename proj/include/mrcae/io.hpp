#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace mrcae::io {

/// CRC-32 (IEEE 802.3, reflected), running form: pass the previous value to
/// extend a checksum over several buffers. Start from 0.
std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t prev = 0);

std::string base64_encode(const std::uint8_t* data, std::size_t len);
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// Little-endian byte appenders, independent of host endianness.
void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v);
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v);
void put_f64(std::vector<std::uint8_t>& out, double v);

/// Cursor over an in-memory file image; throws TruncatedError on overrun.
class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::vector<std::uint8_t> raw(std::size_t n);
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const;
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Shortest text that round-trips the double exactly; used by every CSV and
/// report writer so identical runs yield identical bytes.
std::string fmt_double(double v);

}  // namespace mrcae::io
