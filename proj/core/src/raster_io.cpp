// Copyright 2026 The kdcs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kdcs/raster_io.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <sstream>

#include "byte_order.hpp"
#include "kdcs/error.hpp"

namespace kdcs {
namespace {

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

std::string encode_float32(const std::vector<double>& values) {
  std::string out;
  out.reserve(4 * values.size());
  for (double v : values) detail::append_le(out, static_cast<float>(v));
  return out;
}

std::vector<float> decode_float32(const std::string& bytes) {
  if (bytes.size() % 4 != 0) throw FormatError("float32 payload length not a multiple of 4", bytes.size());
  std::vector<float> out(bytes.size() / 4);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::read_le<float>(p + 4 * i);
  return out;
}

void write_raster(const DensityRaster& raster, const std::filesystem::path& stem) {
  const GridSpec& g = raster.grid;
  {
    std::ofstream hdr(with_suffix(stem, ".hdr"));
    if (!hdr) throw Error("cannot write " + with_suffix(stem, ".hdr").string());
    hdr << "format=kdcs-raster\nversion=1\n"
        << "width=" << g.width << "\nheight=" << g.height << "\n"
        << "min_x=" << format_double(g.extent.min_x) << "\nmin_y=" << format_double(g.extent.min_y) << "\n"
        << "max_x=" << format_double(g.extent.max_x) << "\nmax_y=" << format_double(g.extent.max_y) << "\n"
        << "bandwidth=" << format_double(raster.kernel.bandwidth) << "\n"
        << "source_size=" << raster.source_size << "\n"
        << "dtype=float32\nbyte_order=little\nrow_order=south_up\n";
  }
  std::ofstream body(with_suffix(stem, ".f32"), std::ios::binary);
  if (!body) throw Error("cannot write " + with_suffix(stem, ".f32").string());
  const std::string bytes = encode_float32(raster.values);
  body.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

DensityRaster read_raster(const std::filesystem::path& stem) {
  std::istringstream hdr(read_file(with_suffix(stem, ".hdr")));
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(hdr, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("raster header line without '='", lineno);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto need = [&kv](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError(std::string("raster header missing key '") + key + "'", 0);
    return it->second;
  };
  if (need("format") != "kdcs-raster" || need("version") != "1") {
    throw FormatError("unsupported raster header format/version", 0);
  }
  DensityRaster r;
  r.grid.width = std::stoi(need("width"));
  r.grid.height = std::stoi(need("height"));
  r.grid.extent = {std::stod(need("min_x")), std::stod(need("min_y")), std::stod(need("max_x")),
                   std::stod(need("max_y"))};
  r.grid.validate();
  r.kernel.bandwidth = std::stod(need("bandwidth"));
  r.source_size = std::stoull(need("source_size"));
  const std::string body = read_file(with_suffix(stem, ".f32"));
  if (body.size() != 4 * r.grid.pixel_count()) {
    throw FormatError("raster body has " + std::to_string(body.size()) + " bytes, expected " +
                          std::to_string(4 * r.grid.pixel_count()),
                      body.size());
  }
  const auto floats = decode_float32(body);
  r.values.assign(floats.begin(), floats.end());
  return r;
}

void write_png(const Image& image, const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw Error("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("libpng failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) {
    auto* row = const_cast<png_bytep>(image.rgb.data() + 3 * static_cast<std::size_t>(y) * static_cast<std::size_t>(image.width));
    png_write_row(png, row);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image read_png(const std::filesystem::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.string().c_str())) {
    throw FormatError("cannot read PNG " + path.string() + ": " + img.message, 0);
  }
  img.format = PNG_FORMAT_RGB;
  Image out;
  out.width = static_cast<int>(img.width);
  out.height = static_cast<int>(img.height);
  out.rgb.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.rgb.data(), 0, nullptr)) {
    png_image_free(&img);
    throw FormatError("cannot decode PNG " + path.string(), 0);
  }
  return out;
}

}  // namespace kdcs
