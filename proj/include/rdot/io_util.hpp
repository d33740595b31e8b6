#ifndef RDOT_IO_UTIL_HPP
#define RDOT_IO_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rdot::io {

// Little-endian byte packing for the RSD1/TBK1 container formats.

class ByteWriter {
 public:
  void u8(uint8_t v) { bytes_.push_back(v); }
  void u16(uint16_t v);
  void u32(uint32_t v);
  void i16(int16_t v) { u16(uint16_t(v)); }
  void f64(double v);
  void raw(const void* data, size_t size);
  void str16(const std::string& s);  // u16 length + UTF-8 bytes

  const std::vector<uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<uint8_t> bytes_;
};

/// Reads from an in-memory buffer; throws TruncatedFile past the end.
class ByteReader {
 public:
  explicit ByteReader(std::vector<uint8_t> bytes) : bytes_(std::move(bytes)) {}

  uint8_t u8();
  uint16_t u16();
  uint32_t u32();
  int16_t i16() { return int16_t(u16()); }
  double f64();
  std::string str16();

  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(size_t n) const;

  std::vector<uint8_t> bytes_;
  size_t pos_ = 0;
};

std::vector<uint8_t> read_file(const std::filesystem::path& path);

/// Writes to "<path>.tmp" then renames, so partial runs never leave a
/// half-written artifact behind.
void atomic_write(const std::filesystem::path& path, const void* data, size_t size);
void atomic_write(const std::filesystem::path& path, const std::string& text);
void atomic_write(const std::filesystem::path& path, const std::vector<uint8_t>& bytes);

}  // namespace rdot::io

#endif  // RDOT_IO_UTIL_HPP
