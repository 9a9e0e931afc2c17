#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "myosynth/errors.hpp"
#include "myosynth/io.hpp"

namespace myosynth::io {

namespace {

struct File {
  std::FILE* f = nullptr;
  ~File() {
    if (f) std::fclose(f);
  }
};

void on_warning(png_structp, png_const_charp) {}

// Rows are big-endian byte rows ready for libpng.
void write_png(const std::filesystem::path& path, int width, int height, int color_type, int depth,
               std::vector<std::vector<png_byte>>& rows) {
  File file;
  file.f = std::fopen(path.string().c_str(), "wb");
  if (!file.f) throw IoError("cannot open for writing: " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, on_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialization failed");
  }
  std::vector<png_bytep> pointers(rows.size());
  for (std::size_t y = 0; y < rows.size(); ++y) pointers[y] = rows[y].data();
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encoding failed: " + path.string());
  }
  png_init_io(png, file.f);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  png_write_image(png, pointers.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.f) != 0) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_png_rgb(const std::filesystem::path& path, const RgbImage& img) {
  std::vector<std::vector<png_byte>> rows(img.height(), std::vector<png_byte>(std::size_t(img.width()) * 3));
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const Rgb8& c = img(x, y);
      rows[y][3 * x] = c.r;
      rows[y][3 * x + 1] = c.g;
      rows[y][3 * x + 2] = c.b;
    }
  write_png(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB, 8, rows);
}

void write_png_gray8(const std::filesystem::path& path, const Image<std::uint8_t>& img) {
  std::vector<std::vector<png_byte>> rows(img.height());
  for (int y = 0; y < img.height(); ++y) rows[y].assign(img.row(y).begin(), img.row(y).end());
  write_png(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 8, rows);
}

void write_png_gray16(const std::filesystem::path& path, const Image<std::uint16_t>& img) {
  std::vector<std::vector<png_byte>> rows(img.height(), std::vector<png_byte>(std::size_t(img.width()) * 2));
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      rows[y][2 * x] = static_cast<png_byte>(img(x, y) >> 8);
      rows[y][2 * x + 1] = static_cast<png_byte>(img(x, y) & 0xff);
    }
  write_png(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 16, rows);
}

PngData read_png(const std::filesystem::path& path) {
  File file;
  file.f = std::fopen(path.string().c_str(), "rb");
  if (!file.f) throw IoError("cannot open: " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.f) != 8 || png_sig_cmp(sig, 0, 8) != 0) throw IoError("not a PNG file: " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, on_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialization failed");
  }
  PngData out;
  std::vector<png_bytep> pointers;
  std::vector<png_byte> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("PNG decoding failed: " + path.string());
  }
  png_init_io(png, file.f);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  png_uint_32 width = png_get_image_width(png, info);
  png_uint_32 height = png_get_image_height(png, info);
  int depth = png_get_bit_depth(png, info);
  int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  out.width = static_cast<int>(width);
  out.height = static_cast<int>(height);
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * height);
  pointers.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) pointers[y] = buffer.data() + y * rowbytes;
  png_read_image(png, pointers.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  std::size_t n = std::size_t(out.width) * out.height * out.channels;
  out.samples.resize(n);
  for (std::size_t y = 0; y < height; ++y) {
    const png_byte* row = pointers[y];
    std::size_t per_row = std::size_t(out.width) * out.channels;
    for (std::size_t k = 0; k < per_row; ++k)
      out.samples[y * per_row + k] =
          out.bit_depth == 16 ? static_cast<std::uint16_t>((row[2 * k] << 8) | row[2 * k + 1]) : row[k];
  }
  return out;
}

RgbImage read_png_rgb(const std::filesystem::path& path) {
  PngData d = read_png(path);
  if (d.bit_depth != 8 || d.channels < 3) throw IoError("expected an 8-bit RGB PNG: " + path.string());
  RgbImage img(d.width, d.height);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const std::uint16_t* s = &d.samples[i * d.channels];
    img[i] = {static_cast<std::uint8_t>(s[0]), static_cast<std::uint8_t>(s[1]), static_cast<std::uint8_t>(s[2])};
  }
  return img;
}

Image<std::uint8_t> read_png_gray8(const std::filesystem::path& path) {
  PngData d = read_png(path);
  if (d.bit_depth != 8 || d.channels != 1) throw IoError("expected an 8-bit single-channel PNG: " + path.string());
  Image<std::uint8_t> img(d.width, d.height);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<std::uint8_t>(d.samples[i]);
  return img;
}

Image<std::uint16_t> read_png_gray16(const std::filesystem::path& path) {
  PngData d = read_png(path);
  if (d.bit_depth != 16 || d.channels != 1) throw IoError("expected a 16-bit single-channel PNG: " + path.string());
  Image<std::uint16_t> img(d.width, d.height);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = d.samples[i];
  return img;
}

void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
  Image<std::uint8_t> img(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) img[i] = mask[i] ? 255 : 0;
  write_png_gray8(path, img);
}

Mask read_mask_png(const std::filesystem::path& path) {
  PngData d = read_png(path);
  if (d.channels != 1) throw IoError("expected a single-channel mask PNG: " + path.string());
  Mask m(d.width, d.height);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = d.samples[i] ? 1 : 0;
  return m;
}

void write_labels_png(const std::filesystem::path& path, const LabelImage& labels) {
  Image<std::uint16_t> img(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 65535) throw IoError("label id exceeds 16-bit range");
    img[i] = static_cast<std::uint16_t>(labels[i]);
  }
  write_png_gray16(path, img);
}

LabelImage read_labels_png(const std::filesystem::path& path) {
  PngData d = read_png(path);
  if (d.channels != 1 || d.bit_depth != 16) throw IoError("expected a 16-bit single-channel label PNG: " + path.string());
  LabelImage img(d.width, d.height);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = d.samples[i];
  return img;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace myosynth::io
