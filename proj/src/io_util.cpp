#include "rdot/io_util.hpp"

#include <cstdio>
#include <cstring>

#include "rdot/error.hpp"

namespace rdot::io {

void ByteWriter::u16(uint16_t v) {
  bytes_.push_back(uint8_t(v & 0xFF));
  bytes_.push_back(uint8_t(v >> 8));
}

void ByteWriter::u32(uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes_.push_back(uint8_t((v >> (8 * i)) & 0xFF));
}

void ByteWriter::f64(double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int i = 0; i < 8; ++i) bytes_.push_back(uint8_t((bits >> (8 * i)) & 0xFF));
}

void ByteWriter::raw(const void* data, size_t size) {
  const auto* p = static_cast<const uint8_t*>(data);
  bytes_.insert(bytes_.end(), p, p + size);
}

void ByteWriter::str16(const std::string& s) {
  if (s.size() > 0xFFFF) {
    throw Error(ErrorCode::kInvalidParams, "string too long for u16 length prefix");
  }
  u16(uint16_t(s.size()));
  raw(s.data(), s.size());
}

void ByteReader::need(size_t n) const {
  if (pos_ + n > bytes_.size()) {
    throw Error(ErrorCode::kTruncatedFile, "unexpected end of file");
  }
}

uint8_t ByteReader::u8() {
  need(1);
  return bytes_[pos_++];
}

uint16_t ByteReader::u16() {
  need(2);
  uint16_t v = uint16_t(bytes_[pos_]) | uint16_t(bytes_[pos_ + 1]) << 8;
  pos_ += 2;
  return v;
}

uint32_t ByteReader::u32() {
  need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(bytes_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

double ByteReader::f64() {
  need(8);
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= uint64_t(bytes_[pos_ + i]) << (8 * i);
  pos_ += 8;
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

std::string ByteReader::str16() {
  const uint16_t len = u16();
  need(len);
  std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
  pos_ += len;
  return s;
}

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "rb");
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::fseek(f, 0, SEEK_END);
  const long size = std::ftell(f);
  std::fseek(f, 0, SEEK_SET);
  std::vector<uint8_t> bytes(size > 0 ? size_t(size) : 0);
  if (!bytes.empty() && std::fread(bytes.data(), 1, bytes.size(), f) != bytes.size()) {
    std::fclose(f);
    throw Error(ErrorCode::kIoError, "short read on " + path.string());
  }
  std::fclose(f);
  return bytes;
}

void atomic_write(const std::filesystem::path& path, const void* data, size_t size) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  std::FILE* f = std::fopen(tmp.string().c_str(), "wb");
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + tmp.string() + " for writing");
  if (size > 0 && std::fwrite(data, 1, size, f) != size) {
    std::fclose(f);
    std::remove(tmp.string().c_str());
    throw Error(ErrorCode::kIoError, "short write on " + tmp.string());
  }
  std::fclose(f);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "rename failed: " + ec.message());
}

void atomic_write(const std::filesystem::path& path, const std::string& text) {
  atomic_write(path, text.data(), text.size());
}

void atomic_write(const std::filesystem::path& path, const std::vector<uint8_t>& bytes) {
  atomic_write(path, bytes.data(), bytes.size());
}

}  // namespace rdot::io
