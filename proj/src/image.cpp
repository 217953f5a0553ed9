#include "camwatch/image.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>

#include <fmt/format.h>
#include <jpeglib.h>
#include <png.h>

#include "camwatch/error.hpp"

namespace camwatch {

PixelImage::PixelImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw InvalidInput(fmt::format("image dimensions {}x{} must be positive", width, height));
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

PixelImage::PixelImage(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) throw InvalidInput(fmt::format("image dimensions {}x{} must be positive", width, height));
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidInput(fmt::format("{} pixels given for a {}x{} image", pixels_.size(), width, height));
  }
}

ImageFormat sniff_image_format(std::span<const std::uint8_t> bytes) noexcept {
  static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (bytes.size() >= sizeof kPng && std::memcmp(bytes.data(), kPng, sizeof kPng) == 0) return ImageFormat::Png;
  if (bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff) return ImageFormat::Jpeg;
  return ImageFormat::Unknown;
}

namespace {

PixelImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw DecodeError(fmt::format("png: {}", img.message));
  }
  img.format = PNG_FORMAT_RGB;
  if (img.width == 0 || img.height == 0 || img.width > 1u << 15 || img.height > 1u << 15) {
    png_image_free(&img);
    throw DecodeError("png: unsupported dimensions");
  }
  std::vector<Rgb> pixels(static_cast<std::size_t>(img.width) * img.height);
  static_assert(sizeof(Rgb) == 3);
  if (!png_image_finish_read(&img, nullptr, pixels.data(), 0, nullptr)) {
    throw DecodeError(fmt::format("png: {}", img.message));
  }
  return PixelImage(static_cast<int>(img.width), static_cast<int>(img.height), std::move(pixels));
}

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

void jpeg_silent(j_common_ptr, int) {}

PixelImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  std::vector<Rgb> pixels;
  int width = 0;
  int height = 0;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_silent;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError(fmt::format("jpeg: {}", err.message));
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  pixels.resize(static_cast<std::size_t>(width) * height);
  while (cinfo.output_scanline < cinfo.output_height) {
    auto* row = reinterpret_cast<JSAMPROW>(pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * width);
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return PixelImage(width, height, std::move(pixels));
}

void png_append(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

}  // namespace

PixelImage decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw DecodeError("empty image data");
  switch (sniff_image_format(bytes)) {
    case ImageFormat::Png:
      return decode_png(bytes);
    case ImageFormat::Jpeg:
      return decode_jpeg(bytes);
    case ImageFormat::Unknown:
      break;
  }
  throw DecodeError("unrecognized image format");
}

std::vector<std::uint8_t> encode_png(const PixelImage& image, int compression_level) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error("EncodeError", "png: allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("EncodeError", "png: encoding failed");
  }
  png_set_write_fn(png, &out, png_append, nullptr);
  png_set_compression_level(png, compression_level);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const auto* base = reinterpret_cast<const png_byte*>(image.pixels().data());
  for (int y = 0; y < image.height(); ++y) {
    png_write_row(png, base + static_cast<std::size_t>(y) * image.width() * 3);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

std::vector<std::uint8_t> encode_jpeg(const PixelImage& image, int quality, bool optimize_coding) {
  jpeg_compress_struct cinfo;
  JpegErrorManager err;
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_silent;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    throw Error("EncodeError", fmt::format("jpeg: {}", err.message));
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(image.width());
  cinfo.image_height = static_cast<JDIMENSION>(image.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  cinfo.optimize_coding = optimize_coding ? TRUE : FALSE;
  jpeg_start_compress(&cinfo, TRUE);
  std::vector<Rgb> row_copy(static_cast<std::size_t>(image.width()));
  while (cinfo.next_scanline < cinfo.image_height) {
    const auto src = image.pixels().subspan(static_cast<std::size_t>(cinfo.next_scanline) * image.width(),
                                            static_cast<std::size_t>(image.width()));
    std::copy(src.begin(), src.end(), row_copy.begin());
    auto* row = reinterpret_cast<JSAMPROW>(row_copy.data());
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  std::vector<std::uint8_t> out(buffer, buffer + size);
  jpeg_destroy_compress(&cinfo);
  std::free(buffer);
  return out;
}

}  // namespace camwatch
