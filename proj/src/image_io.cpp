#include "irisvigil/image_io.hpp"

#include "irisvigil/error.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <vector>

namespace irisvigil::io {

namespace {

// PGM header tokens are whitespace separated and may carry `#` comments.
long read_header_int(std::istream& in) {
  for (;;) {
    const int ch = in.peek();
    if (ch == EOF) throw Error(ErrorCode::ParseError, "truncated PGM header");
    if (std::isspace(ch)) {
      in.get();
    } else if (ch == '#') {
      std::string skip;
      std::getline(in, skip);
    } else {
      break;
    }
  }
  long v = -1;
  if (!(in >> v) || v < 0) throw Error(ErrorCode::ParseError, "malformed PGM header");
  return v;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

}  // namespace

GrayImage read_pgm(std::istream& in) {
  char magic[2] = {};
  if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '5')
    throw Error(ErrorCode::ParseError, "not a binary PGM (P5)");
  const long cols = read_header_int(in);
  const long rows = read_header_int(in);
  const long maxval = read_header_int(in);
  if (cols < 1 || rows < 1) throw Error(ErrorCode::ParseError, "PGM extents must be positive");
  if (maxval < 1 || maxval > 255) throw Error(ErrorCode::ParseError, "only 8-bit PGM is supported");
  if (!std::isspace(in.get())) throw Error(ErrorCode::ParseError, "malformed PGM header");

  std::vector<unsigned char> raw(static_cast<std::size_t>(rows * cols));
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw Error(ErrorCode::ParseError, "truncated PGM pixel data");

  GrayImage img(rows, cols);
  for (long i = 0; i < rows * cols; ++i) {
    if (raw[static_cast<std::size_t>(i)] > maxval) throw Error(ErrorCode::ParseError, "PGM sample above maxval");
    img.data()[i] = static_cast<double>(raw[static_cast<std::size_t>(i)]) / static_cast<double>(maxval);
  }
  return img;
}

GrayImage read_png(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error(ErrorCode::IoError, "cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::IoError, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::IoError, "libpng init failed");
  }

  GrayImage img;
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows_ptr;
  bool color = false;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::ParseError, "malformed PNG " + path);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  color = (color_type & PNG_COLOR_MASK_COLOR) != 0;
  if (!color) {
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);
    pixels.resize(static_cast<std::size_t>(width) * height);
    rows_ptr.resize(height);
    for (png_uint_32 r = 0; r < height; ++r) rows_ptr[r] = pixels.data() + static_cast<std::size_t>(r) * width;
    png_read_image(png, rows_ptr.data());
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (color) throw Error(ErrorCode::ParseError, "only grayscale PNG is supported: " + path);

  img.resize(height, width);
  for (std::size_t i = 0; i < pixels.size(); ++i) img.data()[i] = static_cast<double>(pixels[i]) / 255.0;
  return img;
}

GrayImage read_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::array<char, 8> sig{};
  in.read(sig.data(), sig.size());
  const auto got = in.gcount();
  if (got >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(sig.data()), 0, 8) == 0) return read_png(path);
  in.clear();
  in.seekg(0);
  return read_pgm(in);
}

Image<std::uint8_t> quantize(const GrayImage& img) {
  return (img.cwiseMax(0.0).cwiseMin(1.0) * 255.0).round().cast<std::uint8_t>();
}

void write_pgm(std::ostream& out, const Image<std::uint8_t>& pixels) {
  out << "P5\n" << pixels.cols() << ' ' << pixels.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

void write_pgm(const std::string& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  write_pgm(out, quantize(img));
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

void write_mask_pgm(const std::string& path, const Mask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  write_pgm(out, ((mask != 0).cast<std::uint8_t>() * std::uint8_t{255}).eval());
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

}  // namespace irisvigil::io
