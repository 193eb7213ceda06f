// Little-endian primitives shared by the HSC1/HSK1/HSB1 readers and writers.
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "hypercolor/error.hpp"

namespace hypercolor::detail {

template <typename T>
T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::array<unsigned char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    std::reverse(b.begin(), b.end());
    std::memcpy(&v, b.data(), sizeof(T));
  }
  return v;
}

class LeWriter {
 public:
  void magic(std::string_view m) { bytes_.insert(bytes_.end(), m.begin(), m.end()); }

  template <typename T>
  void put(T v) {
    v = byteswap_if_big(v);
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }

  void put_u32(std::size_t v, const char* field) {
    if (v > 0xFFFFFFFFu) throw ParameterError(std::string(field) + " does not fit in u32");
    put(static_cast<std::uint32_t>(v));
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes_.data()),
              static_cast<std::streamsize>(bytes_.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
  }

  const std::vector<unsigned char>& bytes() const noexcept { return bytes_; }

 private:
  std::vector<unsigned char> bytes_;
};

class LeReader {
 public:
  explicit LeReader(const std::filesystem::path& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  void expect_magic(std::string_view m) {
    if (bytes_.size() < m.size() ||
        std::string_view(reinterpret_cast<const char*>(bytes_.data()), m.size()) != m) {
      throw FormatError("'" + path_.string() + "': bad magic, expected " + std::string(m));
    }
    pos_ = m.size();
  }

  template <typename T>
  T get() {
    if (bytes_.size() - pos_ < sizeof(T)) {
      throw TruncationError("'" + path_.string() + "': unexpected end of file at byte " +
                            std::to_string(pos_));
    }
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return byteswap_if_big(v);
  }

  /// Throws TruncationError unless `count` items of `item_size` remain.
  void require(std::uint64_t count, std::size_t item_size, const char* what) const {
    const std::uint64_t remaining = bytes_.size() - pos_;
    if (item_size != 0 && count > remaining / item_size) {
      throw TruncationError("'" + path_.string() + "': " + what + " truncated");
    }
  }

  void expect_end() const {
    if (pos_ != bytes_.size()) {
      throw FormatError("'" + path_.string() + "': trailing bytes after payload");
    }
  }

 private:
  std::filesystem::path path_;
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace hypercolor::detail
