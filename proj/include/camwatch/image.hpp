#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace camwatch {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Decoded 8-bit RGB raster, row-major, origin top-left.
class PixelImage {
 public:
  // Uniformly filled image. Throws InvalidInput unless width, height >= 1.
  PixelImage(int width, int height, Rgb fill = {});
  // Throws InvalidInput unless pixels.size() == width * height.
  PixelImage(int width, int height, std::vector<Rgb> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return pixels_.size(); }

  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }

  std::span<const Rgb> pixels() const noexcept { return pixels_; }
  std::span<Rgb> pixels() noexcept { return pixels_; }

  bool same_dimensions(const PixelImage& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const PixelImage&, const PixelImage&) = default;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

enum class ImageFormat { Png, Jpeg, Unknown };

ImageFormat sniff_image_format(std::span<const std::uint8_t> bytes) noexcept;

// Decodes PNG or JPEG; grayscale and palette inputs are expanded to RGB and
// alpha is dropped. Throws DecodeError.
PixelImage decode_image(std::span<const std::uint8_t> bytes);

// compression_level is the zlib level, 0-9.
std::vector<std::uint8_t> encode_png(const PixelImage& image, int compression_level = 6);
// quality is 1-100; optimize_coding selects optimized Huffman tables, which
// changes the bytes but not the decoded pixels.
std::vector<std::uint8_t> encode_jpeg(const PixelImage& image, int quality = 90, bool optimize_coding = false);

}  // namespace camwatch
