#include "hypercolor/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "hypercolor/error.hpp"

namespace hypercolor {

namespace fs = std::filesystem;
using detail::LeReader;
using detail::LeWriter;

namespace {

std::vector<double> read_wavelengths(LeReader& in, std::uint32_t l) {
  in.require(l, sizeof(double), "wavelength table");
  std::vector<double> wl(l);
  for (auto& w : wl) w = in.get<double>();
  return wl;
}

void put_wavelengths(LeWriter& out, std::span<const double> wl) {
  for (double w : wl) out.put(w);
}

std::vector<unsigned char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Minimal netpbm header tokenizer: whitespace separated, '#' comments.
class PnmHeader {
 public:
  PnmHeader(const std::vector<unsigned char>& bytes, const fs::path& path)
      : bytes_(bytes), path_(path) {}

  std::string magic() {
    if (bytes_.size() < 2) throw FormatError("'" + path_.string() + "': not a netpbm file");
    pos_ = 2;
    return std::string(bytes_.begin(), bytes_.begin() + 2);
  }

  std::uint64_t number() {
    skip_space();
    std::uint64_t v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + static_cast<std::uint64_t>(bytes_[pos_] - '0');
      ++pos_;
      if (++digits > 12) throw FormatError("'" + path_.string() + "': header value too large");
    }
    if (digits == 0) throw FormatError("'" + path_.string() + "': malformed header");
    return v;
  }

  // Binary payload starts after exactly one whitespace byte.
  std::size_t payload_start() {
    if (pos_ >= bytes_.size()) throw TruncationError("'" + path_.string() + "': no payload");
    return pos_ + 1;
  }

  // For plain formats: next token after the header.
  std::size_t& cursor() { return pos_; }

  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

 private:
  const std::vector<unsigned char>& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

unsigned bit_depth(std::uint32_t maxval) {
  return static_cast<unsigned>(std::bit_width(maxval));
}

}  // namespace

HyperCube read_cube(const fs::path& path) {
  LeReader in(path);
  in.expect_magic("HSC1");
  const auto m = in.get<std::uint32_t>();
  const auto n = in.get<std::uint32_t>();
  const auto l = in.get<std::uint32_t>();
  auto wl = read_wavelengths(in, l);
  const std::uint64_t count = std::uint64_t{m} * n * l;
  in.require(count, sizeof(float), "cube payload");
  std::vector<double> data(count);
  for (auto& v : data) v = static_cast<double>(in.get<float>());
  in.expect_end();
  try {
    return HyperCube(m, n, std::move(wl), std::move(data));
  } catch (const ValidationError& e) {
    throw ValidationError("'" + path.string() + "': " + e.what());
  }
}

void write_cube(const HyperCube& cube, const fs::path& path) {
  cube.validate();
  LeWriter out;
  out.magic("HSC1");
  out.put_u32(cube.height(), "height");
  out.put_u32(cube.width(), "width");
  out.put_u32(cube.bands(), "bands");
  put_wavelengths(out, cube.wavelengths());
  for (double v : cube.data()) out.put(static_cast<float>(v));
  out.save(path);
}

ClueSet read_clues(const fs::path& path) {
  LeReader in(path);
  in.expect_magic("HSK1");
  const auto m = in.get<std::uint32_t>();
  const auto n = in.get<std::uint32_t>();
  const auto l = in.get<std::uint32_t>();
  const auto count = in.get<std::uint32_t>();
  auto wl = read_wavelengths(in, l);
  in.require(count, 8 + std::size_t{l} * sizeof(float), "clue payload");
  std::vector<PixelIndex> coords(count);
  std::vector<double> spectra(std::size_t{count} * l);
  for (std::uint32_t i = 0; i < count; ++i) {
    coords[i].row = in.get<std::uint32_t>();
    coords[i].col = in.get<std::uint32_t>();
    for (std::uint32_t b = 0; b < l; ++b) {
      spectra[std::size_t{i} * l + b] = static_cast<double>(in.get<float>());
    }
  }
  in.expect_end();
  try {
    return ClueSet(m, n, std::move(wl), std::move(coords), std::move(spectra));
  } catch (const ValidationError& e) {
    throw ValidationError("'" + path.string() + "': " + e.what());
  }
}

void write_clues(const ClueSet& clues, const fs::path& path) {
  LeWriter out;
  out.magic("HSK1");
  out.put_u32(clues.height(), "height");
  out.put_u32(clues.width(), "width");
  out.put_u32(clues.bands(), "bands");
  out.put_u32(clues.count(), "clue count");
  put_wavelengths(out, clues.wavelengths());
  for (std::size_t i = 0; i < clues.count(); ++i) {
    out.put(clues.coords()[i].row);
    out.put(clues.coords()[i].col);
    for (double v : clues.spectrum(i)) out.put(static_cast<float>(v));
  }
  out.save(path);
}

fs::path guide_sidecar_path(const fs::path& pgm_path) {
  return fs::path(pgm_path.string() + ".json");
}

GuideEncoding write_guide(const GuideImage& guide, const fs::path& path) {
  guide.validate();
  GuideEncoding enc;
  if (guide.pixels() > 0) {
    const auto [lo, hi] = std::ranges::minmax(guide.data());
    enc.offset = lo;
    enc.scale = hi > lo ? (hi - lo) / 65535.0 : 1.0;
  }
  GrayImage img;
  img.height = guide.height();
  img.width = guide.width();
  img.maxval = 65535;
  img.pixels.resize(guide.pixels());
  for (std::size_t i = 0; i < guide.pixels(); ++i) {
    const double code = std::round((guide.data()[i] - enc.offset) / enc.scale);
    img.pixels[i] = static_cast<std::uint16_t>(std::clamp(code, 0.0, 65535.0));
  }
  write_pgm(img, path);

  const nlohmann::ordered_json meta = {{"format", "hypercolor-guide"},
                                       {"height", guide.height()},
                                       {"width", guide.width()},
                                       {"scale", enc.scale},
                                       {"offset", enc.offset}};
  const auto sidecar = guide_sidecar_path(path);
  std::ofstream out(sidecar, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + sidecar.string() + "' for writing");
  out << meta.dump(2) << '\n';
  return enc;
}

GuideImage read_guide(const fs::path& path) {
  const GrayImage img = read_pgm(path);
  GuideEncoding enc{1.0 / img.maxval, 0.0};
  const auto sidecar = guide_sidecar_path(path);
  if (fs::exists(sidecar)) {
    std::ifstream in(sidecar);
    try {
      const auto meta = nlohmann::json::parse(in);
      enc.scale = meta.at("scale").get<double>();
      enc.offset = meta.value("offset", 0.0);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("'" + sidecar.string() + "': " + e.what());
    }
  }
  std::vector<double> data(img.pixels.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = enc.offset + enc.scale * img.pixels[i];
  return GuideImage(img.height, img.width, std::move(data));
}

void write_mask(const Mask& mask, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "P4\n" << mask.width() << ' ' << mask.height() << '\n';
  const std::size_t row_bytes = (mask.width() + 7) / 8;
  std::vector<unsigned char> row(row_bytes);
  for (std::size_t r = 0; r < mask.height(); ++r) {
    std::ranges::fill(row, 0);
    for (std::size_t c = 0; c < mask.width(); ++c) {
      if (mask.at(r, c)) row[c / 8] |= static_cast<unsigned char>(0x80u >> (c % 8));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Mask read_mask(const fs::path& path) {
  const auto bytes = slurp(path);
  PnmHeader hdr(bytes, path);
  const std::string magic = hdr.magic();
  if (magic != "P4" && magic != "P1") {
    throw FormatError("'" + path.string() + "': expected PBM (P1/P4), got " + magic);
  }
  const auto width = hdr.number();
  const auto height = hdr.number();
  Mask mask(height, width);
  if (magic == "P4") {
    const std::size_t start = hdr.payload_start();
    const std::size_t row_bytes = (width + 7) / 8;
    if (bytes.size() - std::min(start, bytes.size()) < row_bytes * height) {
      throw TruncationError("'" + path.string() + "': PBM payload truncated");
    }
    for (std::size_t r = 0; r < height; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        const unsigned char byte = bytes[start + r * row_bytes + c / 8];
        if (byte & (0x80u >> (c % 8))) mask.set(r, c);
      }
    }
  } else {
    auto& pos = hdr.cursor();
    for (std::size_t i = 0; i < width * height; ++i) {
      hdr.skip_space();
      if (pos >= bytes.size()) throw TruncationError("'" + path.string() + "': PBM truncated");
      const unsigned char ch = bytes[pos++];
      if (ch != '0' && ch != '1') throw FormatError("'" + path.string() + "': bad P1 digit");
      if (ch == '1') mask.set(i / width, i % width);
    }
  }
  return mask;
}

GrayImage read_pgm(const fs::path& path) {
  const auto bytes = slurp(path);
  PnmHeader hdr(bytes, path);
  const std::string magic = hdr.magic();
  if (magic != "P5" && magic != "P2") {
    throw FormatError("'" + path.string() + "': expected PGM (P2/P5), got " + magic);
  }
  GrayImage img;
  img.width = hdr.number();
  img.height = hdr.number();
  const auto maxval = hdr.number();
  if (maxval == 0 || maxval > 65535) throw FormatError("'" + path.string() + "': bad maxval");
  img.maxval = static_cast<std::uint32_t>(maxval);
  const std::size_t count = img.width * img.height;
  img.pixels.resize(count);
  if (magic == "P5") {
    const std::size_t start = hdr.payload_start();
    const std::size_t bpp = img.maxval > 255 ? 2 : 1;
    if (bytes.size() - std::min(start, bytes.size()) < count * bpp) {
      throw TruncationError("'" + path.string() + "': PGM payload truncated");
    }
    for (std::size_t i = 0; i < count; ++i) {
      img.pixels[i] = bpp == 2 ? static_cast<std::uint16_t>((bytes[start + 2 * i] << 8) |
                                                            bytes[start + 2 * i + 1])
                               : bytes[start + i];
    }
  } else {
    for (auto& px : img.pixels) {
      const auto v = hdr.number();
      if (v > img.maxval) throw FormatError("'" + path.string() + "': value above maxval");
      px = static_cast<std::uint16_t>(v);
    }
  }
  return img;
}

void write_pgm(const GrayImage& image, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "P5\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
  const bool wide = image.maxval > 255;
  std::vector<unsigned char> payload;
  payload.reserve(image.pixels.size() * (wide ? 2 : 1));
  for (std::uint16_t v : image.pixels) {
    if (wide) payload.push_back(static_cast<unsigned char>(v >> 8));
    payload.push_back(static_cast<unsigned char>(v & 0xFF));
  }
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

HyperCube import_band_stack(const fs::path& dir, std::span<const double> wavelengths) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".pgm" || ext == ".PGM") files.push_back(entry.path());
  }
  std::ranges::sort(files);
  if (files.size() != wavelengths.size()) {
    throw ParameterError("band stack has " + std::to_string(files.size()) + " images but " +
                         std::to_string(wavelengths.size()) + " wavelengths were given");
  }
  if (files.empty()) throw ParameterError("band stack is empty");

  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;
  const std::size_t l = files.size();
  for (std::size_t b = 0; b < l; ++b) {
    const GrayImage img = read_pgm(files[b]);
    if (b == 0) {
      height = img.height;
      width = img.width;
      data.assign(height * width * l, 0.0);
    } else if (img.height != height || img.width != width) {
      throw ParameterError("'" + files[b].string() + "' is " + std::to_string(img.width) + "x" +
                           std::to_string(img.height) + ", expected " + std::to_string(width) +
                           "x" + std::to_string(height));
    }
    const double full_scale = std::ldexp(1.0, static_cast<int>(bit_depth(img.maxval))) - 1.0;
    for (std::size_t p = 0; p < img.pixels.size(); ++p) {
      data[p * l + b] = img.pixels[p] / full_scale;
    }
  }
  return HyperCube(height, width, std::vector<double>(wavelengths.begin(), wavelengths.end()),
                   std::move(data));
}

}  // namespace hypercolor
