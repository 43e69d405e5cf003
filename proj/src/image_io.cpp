#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

#include "ctsep/error.hpp"
#include "ctsep/image.hpp"

namespace ctsep {

namespace {

constexpr const char* kCorrupt = "unsupported or corrupt format";

std::string bytes_of(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::Io, "read error on " + path.string());
  return bytes;
}

[[noreturn]] void corrupt(const std::filesystem::path& path) {
  fail(ErrorKind::Format, kCorrupt + std::string(": ") + path.string());
}

// ---------------------------------------------------------------- PGM

class PgmCursor {
 public:
  PgmCursor(const std::string& bytes, const std::filesystem::path& path)
      : bytes_(bytes), path_(path) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long number() {
    skip_space_and_comments();
    unsigned long value = 0;
    const char* first = bytes_.data() + pos_;
    const char* last = bytes_.data() + bytes_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) corrupt(path_);
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  // Exactly one whitespace byte separates maxval from binary raster data.
  void single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      corrupt(path_);
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  const std::string& bytes_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 2;
};

GrayImage decode_pgm(const std::string& bytes, const std::filesystem::path& path) {
  const bool ascii = bytes[1] == '2';
  PgmCursor cur(bytes, path);
  const unsigned long width = cur.number();
  const unsigned long height = cur.number();
  const unsigned long maxval = cur.number();
  if (width == 0 || height == 0) fail(ErrorKind::Format, "zero-dimension image: " + path.string());
  if (maxval != 255 && maxval != 65535) corrupt(path);
  const double scale = static_cast<double>(maxval);
  const std::size_t n = width * height;
  std::vector<double> data(n);

  if (ascii) {
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned long v = cur.number();
      if (v > maxval) corrupt(path);
      data[i] = static_cast<double>(v) / scale;
    }
  } else {
    cur.single_space();
    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    if (bytes.size() - cur.pos() < n * bytes_per_sample) corrupt(path);
    const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data() + cur.pos());
    for (std::size_t i = 0; i < n; ++i) {
      unsigned v = raster[i * bytes_per_sample];
      if (bytes_per_sample == 2) v = (v << 8) | raster[2 * i + 1];
      if (v > maxval) corrupt(path);
      data[i] = static_cast<double>(v) / scale;
    }
  }
  return GrayImage(width, height, std::move(data));
}

void write_bytes(const std::filesystem::path& path, const std::string& header,
                 const unsigned char* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) fail(ErrorKind::Io, "write error on " + path.string());
}

std::string pgm_header(std::size_t width, std::size_t height, unsigned maxval) {
  return "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
         std::to_string(maxval) + "\n";
}

// ---------------------------------------------------------------- PNG

struct PngReadSource {
  const std::string* bytes;
  std::size_t pos;
};

void png_read_from_string(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
  if (src->bytes->size() - src->pos < length) png_error(png, "truncated PNG stream");
  std::copy_n(src->bytes->data() + src->pos, length, reinterpret_cast<char*>(out));
  src->pos += length;
}

void png_error_handler(png_structp png, png_const_charp) { std::longjmp(png_jmpbuf(png), 1); }
void png_warning_handler(png_structp, png_const_charp) {}

GrayImage decode_png(const std::string& bytes, const std::filesystem::path& path) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           png_error_handler, png_warning_handler);
  if (!png) fail(ErrorKind::Io, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorKind::Io, "libpng initialisation failed");
  }

  PngReadSource src{&bytes, 0};
  std::vector<unsigned char> raster;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  bool wide = false;

  // Everything with a destructor lives above this point; locals modified
  // after setjmp are not touched on the error path.
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    corrupt(path);
  }
  png_set_read_fn(png, &src, png_read_from_string);
  png_read_info(png, info);

  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  channels = png_get_channels(png, info);
  wide = png_get_bit_depth(png, info) == 16;
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  raster.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = raster.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (width == 0 || height == 0) fail(ErrorKind::Format, "zero-dimension image: " + path.string());
  if (channels != 1 && channels != 3) corrupt(path);

  const std::size_t n = static_cast<std::size_t>(width) * height;
  const double scale = wide ? 65535.0 : 255.0;
  auto sample = [&](std::size_t i) -> double {
    if (!wide) return raster[i] / scale;
    std::uint16_t v;
    std::copy_n(raster.data() + 2 * i, 2, reinterpret_cast<unsigned char*>(&v));
    return v / scale;
  };

  if (channels == 1) {
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = sample(i);
    return GrayImage(width, height, std::move(data));
  }
  std::vector<double> r(n), g(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = sample(3 * i);
    g[i] = sample(3 * i + 1);
    b[i] = sample(3 * i + 2);
  }
  return to_grayscale(width, height, r, g, b);
}

void encode_png(const std::filesystem::path& path, std::size_t width, std::size_t height,
                int color_type, const std::uint8_t* data) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"),
                                                     &std::fclose);
  if (!fp) fail(ErrorKind::Io, "cannot write " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            png_error_handler, png_warning_handler);
  if (!png) fail(ErrorKind::Io, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorKind::Io, "libpng initialisation failed");
  }
  const std::size_t channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  std::vector<png_const_bytep> rows(height);
  for (std::size_t y = 0; y < height; ++y) rows[y] = data + y * width * channels;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::Io, "PNG encoding failed for " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(fp.get()) != 0) fail(ErrorKind::Io, "write error on " + path.string());
}

bool wants_png(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png";
}

std::string shortest(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

GrayImage decode(const std::filesystem::path& path) {
  const std::string bytes = bytes_of(path);
  static constexpr std::array<unsigned char, 8> kPngMagic = {0x89, 'P', 'N', 'G',
                                                             '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5'))
    return decode_pgm(bytes, path);
  if (bytes.size() >= kPngMagic.size() &&
      std::equal(kPngMagic.begin(), kPngMagic.end(),
                 reinterpret_cast<const unsigned char*>(bytes.data())))
    return decode_png(bytes, path);
  corrupt(path);
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  GrayImage img = decode(path);
  snap_to_lattice(img);
  return img;
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
  const auto levels = quantize_bytes(img);
  if (wants_png(path)) {
    encode_png(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, levels.data());
  } else {
    save_levels_pgm(img.width(), img.height(), levels, path);
  }
}

void save_image(const RgbImage& img, const std::filesystem::path& path) {
  if (wants_png(path)) {
    encode_png(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB, img.data().data());
    return;
  }
  const std::string header = "P6\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  write_bytes(path, header, img.data().data(), img.data().size());
}

void save_levels_pgm(std::size_t width, std::size_t height, std::span<const std::uint8_t> levels,
                     const std::filesystem::path& path) {
  require(width >= 1 && height >= 1 && levels.size() == width * height,
          "level map does not match image dimensions");
  write_bytes(path, pgm_header(width, height, 255), levels.data(), levels.size());
}

SignedRange save_signed_pgm16(std::span<const double> values, std::size_t width,
                              std::size_t height, const std::filesystem::path& pgm_path,
                              const std::filesystem::path& sidecar_path) {
  require(width >= 1 && height >= 1 && values.size() == width * height,
          "field does not match image dimensions");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const SignedRange range{*lo, *hi};
  const double span = range.max - range.min;

  std::vector<unsigned char> raster(2 * values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double t = span > 0.0 ? (values[i] - range.min) / span : 0.0;
    const auto s = static_cast<unsigned>(std::floor(65535.0 * std::clamp(t, 0.0, 1.0) + 0.5));
    raster[2 * i] = static_cast<unsigned char>(s >> 8);
    raster[2 * i + 1] = static_cast<unsigned char>(s & 0xff);
  }
  write_bytes(pgm_path, pgm_header(width, height, 65535), raster.data(), raster.size());

  std::ofstream side(sidecar_path, std::ios::trunc);
  if (!side) fail(ErrorKind::Io, "cannot write " + sidecar_path.string());
  side << "min: " << shortest(range.min) << "\n"
       << "max: " << shortest(range.max) << "\n";
  if (!side) fail(ErrorKind::Io, "write error on " + sidecar_path.string());
  return range;
}

}  // namespace ctsep
