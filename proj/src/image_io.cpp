// SPDX-License-Identifier: Apache-2.0
#include "glassforge/image_io.hpp"

#include <array>
#include <bit>
#include <csetjmp>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include <jpeglib.h>
#include <png.h>

namespace glassforge {

namespace fs = std::filesystem;

namespace {

std::string describe(const fs::path& path) { return "'" + path.string() + "'"; }

std::vector<unsigned char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + describe(path));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

}  // namespace

ImageFormat detect_format(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + describe(path));
  std::array<char, 10> head{};
  in.read(head.data(), head.size());
  const auto n = std::size_t(in.gcount());
  const std::string s(head.data(), n);
  if (n >= 8 && std::memcmp(head.data(), "\x89PNG\r\n\x1a\n", 8) == 0) return ImageFormat::png;
  if (n >= 2 && static_cast<unsigned char>(head[0]) == 0xFF &&
      static_cast<unsigned char>(head[1]) == 0xD8)
    return ImageFormat::jpeg;
  if (s.rfind("#?RADIANCE", 0) == 0 || s.rfind("#?RGBE", 0) == 0) return ImageFormat::radiance_hdr;
  return ImageFormat::unknown;
}

SrgbImage read_png(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw Error("PNG decode failed for " + describe(path) + ": " + image.message);
  image.format = PNG_FORMAT_RGB;
  SrgbImage out(int(image.width), int(image.height));
  if (!png_image_finish_read(&image, nullptr, out.array().data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error("PNG decode failed for " + describe(path) + ": " + msg);
  }
  return out;
}

SrgbImage read_jpeg(const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error("cannot open " + describe(path));

  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error("JPEG decode failed for " + describe(path) + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  SrgbImage out(int(cinfo.output_width), int(cinfo.output_height));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = &out.array()(int(cinfo.output_scanline), 0);
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

LinearImage read_hdr(const fs::path& path) {
  const auto bytes = read_bytes(path);
  std::size_t pos = 0;
  auto next_line = [&]() {
    std::string line;
    while (pos < bytes.size() && bytes[pos] != '\n') line.push_back(char(bytes[pos++]));
    if (pos >= bytes.size()) throw Error("HDR " + describe(path) + ": truncated header");
    ++pos;
    return line;
  };

  const std::string magic = next_line();
  if (magic.rfind("#?", 0) != 0) throw Error("HDR " + describe(path) + ": missing #? signature");
  for (;;) {
    const std::string line = next_line();
    if (line.empty()) break;
    if (line.rfind("FORMAT=", 0) == 0 && line != "FORMAT=32-bit_rle_rgbe")
      throw Error("HDR " + describe(path) + ": unsupported " + line);
  }
  std::istringstream res(next_line());
  std::string ylabel, xlabel;
  int height = 0, width = 0;
  res >> ylabel >> height >> xlabel >> width;
  if (ylabel != "-Y" || xlabel != "+X" || width <= 0 || height <= 0)
    throw Error("HDR " + describe(path) + ": unsupported resolution line (only -Y H +X W)");

  auto need = [&](std::size_t n) {
    if (pos + n > bytes.size()) throw Error("HDR " + describe(path) + ": truncated pixel data");
  };

  LinearImage out(width, height);
  std::vector<unsigned char> scan(std::size_t(width) * 4);
  for (int y = 0; y < height; ++y) {
    need(4);
    const bool rle = width >= 8 && width < 32768 && bytes[pos] == 2 && bytes[pos + 1] == 2 &&
                     ((int(bytes[pos + 2]) << 8) | bytes[pos + 3]) == width && !(bytes[pos + 2] & 0x80);
    if (rle) {
      pos += 4;
      for (int c = 0; c < 4; ++c) {
        int x = 0;
        while (x < width) {
          need(1);
          int count = bytes[pos++];
          if (count > 128) {
            count -= 128;
            need(1);
            if (x + count > width) throw Error("HDR " + describe(path) + ": bad run length");
            const unsigned char v = bytes[pos++];
            for (int i = 0; i < count; ++i) scan[std::size_t(x++) * 4 + c] = v;
          } else {
            if (count == 0 || x + count > width)
              throw Error("HDR " + describe(path) + ": bad literal length");
            need(std::size_t(count));
            for (int i = 0; i < count; ++i) scan[std::size_t(x++) * 4 + c] = bytes[pos++];
          }
        }
      }
    } else {
      need(std::size_t(width) * 4);
      std::memcpy(scan.data(), &bytes[pos], std::size_t(width) * 4);
      pos += std::size_t(width) * 4;
    }
    for (int x = 0; x < width; ++x) {
      const unsigned char* t = &scan[std::size_t(x) * 4];
      if (t[3] == 0) continue;
      const float f = std::ldexp(1.0f, int(t[3]) - 128 - 8);
      out.pixel(x, y) = Rgb(t[0], t[1], t[2]) * f;
    }
  }
  return out;
}

LinearImage load_image(const fs::path& path) {
  if (!fs::exists(path)) throw Error("image not found: " + describe(path));
  switch (detect_format(path)) {
    case ImageFormat::png: return srgb_decode(read_png(path));
    case ImageFormat::jpeg: return srgb_decode(read_jpeg(path));
    case ImageFormat::radiance_hdr: return read_hdr(path);
    case ImageFormat::unknown: break;
  }
  throw Error("unsupported image format for " + describe(path) +
              " (expected PNG, JPEG or Radiance HDR signature)");
}

void write_png(const fs::path& path, const SrgbImage& img) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = png_uint_32(img.width());
  image.height = png_uint_32(img.height());
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.array().data(), 0, nullptr))
    throw Error("PNG encode failed for " + describe(path) + ": " + image.message);
}

void write_raw(const fs::path& path, const LinearImage& img) {
  static_assert(std::endian::native == std::endian::little, "raw dump assumes little endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + describe(path));
  const std::int32_t dims[2] = {img.width(), img.height()};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(img.array().data()),
            std::streamsize(img.array().size() * sizeof(float)));
}

LinearImage read_raw(const fs::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() < 8) throw Error("raw dump " + describe(path) + ": truncated header");
  std::int32_t dims[2];
  std::memcpy(dims, bytes.data(), sizeof(dims));
  LinearImage img(dims[0], dims[1]);
  const std::size_t payload = std::size_t(img.array().size()) * sizeof(float);
  if (bytes.size() != 8 + payload) throw Error("raw dump " + describe(path) + ": size mismatch");
  std::memcpy(img.array().data(), bytes.data() + 8, payload);
  return img;
}

}  // namespace glassforge
