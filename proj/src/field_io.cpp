#include "iquad/field_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace iquad {

static_assert(std::endian::native == std::endian::little, "raw field I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void write_field_raw(const std::string& path, const ScalarField& f, FieldKind kind) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write("IQF1", 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.n()));
  put<double>(os, f.grid().pitch);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(kind));
  const char reserved[12] = {};
  os.write(reserved, sizeof reserved);
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.values().size() * sizeof(double)));
  if (!os) throw IoError("write failed: " + path);
}

StoredField read_field_raw(const std::string& path, int pad_factor) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "IQF1", 4) != 0) throw IoError("not an IQF1 field file: " + path);
  const auto n = get<std::uint32_t>(is);
  const auto pitch = get<double>(is);
  const auto kind = get<std::uint32_t>(is);
  char reserved[12];
  is.read(reserved, sizeof reserved);
  if (!is || n < 8 || n > 1u << 14) throw IoError("corrupt field header: " + path);
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw IoError("truncated field data: " + path);
  Grid g = make_grid(static_cast<int>(n), pitch, pad_factor);
  return {ScalarField(g, std::move(v)), static_cast<FieldKind>(kind)};
}

void write_field_csv(const std::string& path, const ScalarField& f) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw IoError("cannot open for writing: " + path);
  const int n = f.n();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) std::fprintf(fp, c ? ",%.17g" : "%.17g", f.at(r, c));
    std::fputc('\n', fp);
  }
  if (std::fclose(fp) != 0) throw IoError("write failed: " + path);
}

PngScale write_field_png(const std::string& path, const ScalarField& f) {
  PngScale scale{f.values().front(), f.values().front()};
  for (double v : f.values()) {
    scale.min = std::min(scale.min, v);
    scale.max = std::max(scale.max, v);
  }
  const int n = f.n();
  std::vector<png_byte> pixels(f.values().size());
  const double span = scale.max - scale.min;
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    double t = span > 0.0 ? (f[i] - scale.min) / span : 128.0 / 255.0;
    pixels[i] = static_cast<png_byte>(std::lround(t * 255.0));
  }

  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot open for writing: " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("png encoding failed: " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, n, n, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < n; ++r) png_write_row(png, pixels.data() + static_cast<std::size_t>(r) * n);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0) throw IoError("write failed: " + path);

  char buf[128];
  std::snprintf(buf, sizeof buf, "min %.17g\nmax %.17g\n", scale.min, scale.max);
  write_text(path + ".txt", buf);
  return scale;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << text;
  if (!os) throw IoError("write failed: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace iquad
