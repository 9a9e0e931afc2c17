#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "myosynth/errors.hpp"
#include "myosynth/io.hpp"

namespace myosynth::io {

namespace {

enum Tag : std::uint16_t {
  kWidth = 256,
  kHeight = 257,
  kBitsPerSample = 258,
  kCompression = 259,
  kPhotometric = 262,
  kStripOffsets = 273,
  kSamplesPerPixel = 277,
  kRowsPerStrip = 278,
  kStripByteCounts = 279,
  kPlanarConfig = 284,
  kSampleFormat = 339,
};

enum FieldType : std::uint16_t { kShort = 3, kLong = 4 };

void put16(std::string& out, std::uint16_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char(v >> 8));
}
void put32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(char((v >> (8 * k)) & 0xff));
}

class Reader {
 public:
  Reader(std::string data, std::string name) : data_(std::move(data)), name_(std::move(name)) {
    if (data_.size() < 8) fail("truncated header");
    if (data_.compare(0, 2, "II") == 0) {
      little_ = true;
    } else if (data_.compare(0, 2, "MM") == 0) {
      little_ = false;
    } else {
      fail("not a TIFF file");
    }
    if (u16(2) != 42) fail("unsupported TIFF variant");
  }

  std::uint16_t u16(std::size_t at) const {
    need(at, 2);
    auto b = [&](std::size_t k) { return std::uint16_t(static_cast<unsigned char>(data_[at + k])); };
    return little_ ? std::uint16_t(b(0) | (b(1) << 8)) : std::uint16_t((b(0) << 8) | b(1));
  }
  std::uint32_t u32(std::size_t at) const {
    need(at, 4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
      std::uint32_t b = static_cast<unsigned char>(data_[at + (little_ ? k : 3 - k)]);
      v |= b << (8 * k);
    }
    return v;
  }
  float f32(std::size_t at) const {
    std::uint32_t bits = u32(at);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }
  void need(std::size_t at, std::size_t n) const {
    if (at > data_.size() || n > data_.size() - at) fail("truncated data");
  }
  [[noreturn]] void fail(const std::string& msg) const { throw IoError(name_ + ": " + msg); }

 private:
  std::string data_;
  std::string name_;
  bool little_ = true;
};

struct Entry {
  std::uint16_t type = 0;
  std::uint32_t count = 0;
  std::size_t value_at = 0;  // file offset of the value(s)
};

std::vector<std::uint32_t> values(const Reader& r, const Entry& e) {
  std::vector<std::uint32_t> out;
  std::size_t size = e.type == kShort ? 2 : 4;
  if (e.type != kShort && e.type != kLong) r.fail("unsupported field type");
  std::size_t at = e.count * size <= 4 ? e.value_at : r.u32(e.value_at);
  r.need(at, e.count * size);
  for (std::uint32_t k = 0; k < e.count; ++k) out.push_back(e.type == kShort ? r.u16(at + k * 2) : r.u32(at + k * 4));
  return out;
}

}  // namespace

void write_tiff_float(const std::filesystem::path& path, const FloatImage& img) {
  const std::uint32_t w = static_cast<std::uint32_t>(img.width());
  const std::uint32_t h = static_cast<std::uint32_t>(img.height());
  const std::uint32_t bytes = w * h * 4;
  constexpr std::uint16_t kEntries = 11;
  const std::uint32_t data_offset = 8 + 2 + kEntries * 12 + 4 + 2;  // padded to a multiple of 4
  std::string out;
  out.reserve(data_offset + bytes);
  out += "II";
  put16(out, 42);
  put32(out, 8);
  put16(out, kEntries);
  auto entry = [&](std::uint16_t tag, std::uint16_t type, std::uint32_t value) {
    put16(out, tag);
    put16(out, type);
    put32(out, 1);
    if (type == kShort) {
      put16(out, static_cast<std::uint16_t>(value));
      put16(out, 0);
    } else {
      put32(out, value);
    }
  };
  entry(kWidth, kLong, w);
  entry(kHeight, kLong, h);
  entry(kBitsPerSample, kShort, 32);
  entry(kCompression, kShort, 1);
  entry(kPhotometric, kShort, 1);
  entry(kStripOffsets, kLong, data_offset);
  entry(kSamplesPerPixel, kShort, 1);
  entry(kRowsPerStrip, kLong, h);
  entry(kStripByteCounts, kLong, bytes);
  entry(kPlanarConfig, kShort, 1);
  entry(kSampleFormat, kShort, 3);
  put32(out, 0);
  put16(out, 0);
  for (float f : img.pixels()) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put32(out, bits);
  }
  write_text(path, out);
}

FloatImage read_tiff_float(const std::filesystem::path& path) {
  Reader r(read_text(path), path.string());
  std::size_t ifd = r.u32(4);
  std::uint16_t n = r.u16(ifd);
  std::uint32_t width = 0, height = 0, rows_per_strip = 0;
  std::uint32_t bits = 0, compression = 1, samples = 1, planar = 1, format = 1;
  std::vector<std::uint32_t> offsets, counts;
  for (std::uint16_t k = 0; k < n; ++k) {
    std::size_t at = ifd + 2 + std::size_t(k) * 12;
    std::uint16_t tag = r.u16(at);
    Entry e{r.u16(at + 2), r.u32(at + 4), at + 8};
    if (e.type != kShort && e.type != kLong) continue;
    auto v = values(r, e);
    if (v.empty()) continue;
    switch (tag) {
      case kWidth: width = v[0]; break;
      case kHeight: height = v[0]; break;
      case kBitsPerSample: bits = v[0]; break;
      case kCompression: compression = v[0]; break;
      case kStripOffsets: offsets = v; break;
      case kSamplesPerPixel: samples = v[0]; break;
      case kRowsPerStrip: rows_per_strip = v[0]; break;
      case kStripByteCounts: counts = v; break;
      case kPlanarConfig: planar = v[0]; break;
      case kSampleFormat: format = v[0]; break;
      default: break;
    }
  }
  if (width == 0 || height == 0) r.fail("missing image dimensions");
  if (samples != 1) r.fail("expected a single-channel image");
  if (bits != 32 || format != 3) r.fail("expected 32-bit float samples");
  if (compression != 1) r.fail("compressed TIFF is not supported");
  if (planar != 1) r.fail("unsupported planar configuration");
  if (rows_per_strip == 0 || rows_per_strip > height) rows_per_strip = height;
  std::size_t strips = (height + rows_per_strip - 1) / rows_per_strip;
  if (offsets.size() != strips) r.fail("strip table does not match image height");
  if (width > (1u << 16) || height > (1u << 16)) r.fail("image too large");
  FloatImage img(static_cast<int>(width), static_cast<int>(height));
  std::size_t i = 0;
  for (std::size_t s = 0; s < strips; ++s) {
    std::size_t rows = std::min<std::size_t>(rows_per_strip, height - s * rows_per_strip);
    std::size_t expected = rows * width * 4;
    if (!counts.empty() && counts.size() == strips && counts[s] < expected) r.fail("strip too short");
    r.need(offsets[s], expected);
    for (std::size_t k = 0; k < rows * width; ++k) img[i++] = r.f32(offsets[s] + 4 * k);
  }
  return img;
}

namespace {

bool has_extension(const std::filesystem::path& path, std::initializer_list<const char*> exts) {
  std::string e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return std::any_of(exts.begin(), exts.end(), [&](const char* x) { return e == x; });
}

}  // namespace

ProbabilityMap read_probability(const std::filesystem::path& path) {
  ProbabilityMap prob;
  if (has_extension(path, {".png"})) {
    PngData d = read_png(path);
    if (d.channels != 1 || d.bit_depth != 16)
      throw IoError(path.string() + ": probability PNG must be 16-bit single-channel");
    prob = ProbabilityMap(d.width, d.height);
    for (std::size_t i = 0; i < prob.size(); ++i) prob[i] = static_cast<float>(d.samples[i] / 65535.0);
  } else if (has_extension(path, {".tif", ".tiff"})) {
    prob = read_tiff_float(path);
    for (std::size_t i = 0; i < prob.size(); ++i) {
      float v = prob[i];
      if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
        throw IoError(path.string() + ": probability value outside [0, 1] at pixel " + std::to_string(i));
    }
  } else {
    throw IoError(path.string() + ": probability maps must be .png or .tif/.tiff");
  }
  if (prob.empty()) throw IoError(path.string() + ": empty image");
  return prob;
}

void write_probability_png(const std::filesystem::path& path, const ProbabilityMap& prob) {
  Image<std::uint16_t> img(prob.width(), prob.height());
  for (std::size_t i = 0; i < prob.size(); ++i)
    img[i] = static_cast<std::uint16_t>(std::lround(std::clamp(double(prob[i]), 0.0, 1.0) * 65535.0));
  write_png_gray16(path, img);
}

void write_probability_tiff(const std::filesystem::path& path, const ProbabilityMap& prob) {
  write_tiff_float(path, prob);
}

std::string check_probability_file(const std::filesystem::path& path) {
  try {
    read_probability(path);
    return {};
  } catch (const IoError& e) {
    return e.what();
  }
}

}  // namespace myosynth::io
