#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "camwatch/error.hpp"
#include "camwatch/image.hpp"
#include "camwatch/time.hpp"

namespace camwatch {

enum class LivenessStatus { Live, Static };

struct LivenessConfig {
  double min_percent = 0.001;  // fraction of pixels
  double min_luminance = 1.0;  // mean-luminance units
  int channel_tolerance = 0;
  int samples = 3;
  std::chrono::seconds spacing{10};
};

// One timed retrieval of a candidate link. image is empty when the bytes
// could not be decoded.
struct Retrieval {
  std::vector<std::uint8_t> bytes;
  std::optional<PixelImage> image;
  Timestamp retrieved_at{};
  std::string decode_error;
};

// Decodes the bytes, recording (not throwing) a decode failure.
Retrieval make_retrieval(std::vector<std::uint8_t> bytes, Timestamp at);

struct LivenessVerdict {
  LivenessStatus status = LivenessStatus::Static;
  bool checksum_changed = false;
  double percent_diff = 0.0;
  double luminance_diff = 0.0;
  std::vector<Timestamp> sample_times;
  std::vector<std::size_t> decode_failures;  // sample indices
};

// Throws InvalidInput on an empty input.
bool checksum_changed(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

// Fraction of pixel positions where some channel differs by more than
// channel_tolerance. Throws DimensionMismatch.
double percent_difference(const PixelImage& a, const PixelImage& b, int channel_tolerance = 0);

// Rec. 601 luma averaged over the image.
double mean_luminance(const PixelImage& image);
// |mean_luminance(a) - mean_luminance(b)|. Throws DimensionMismatch.
double luminance_difference(const PixelImage& a, const PixelImage& b);

// Live iff some consecutive decodable pair changed checksum and also moved
// one of the pixel metrics past its threshold. The verdict carries the
// maximum of each metric over the compared pairs. Throws InsufficientSamples
// when fewer than two samples are given or no pair could be compared.
LivenessVerdict classify_liveness(std::span<const Retrieval> samples, const LivenessConfig& config = {});

// Pixelwise identity of exactly four archive samples, tolerance 0.
// Throws InvalidInput for a count other than 4, DimensionMismatch otherwise.
bool is_frozen(std::span<const PixelImage> samples);

// Indices round(i * (n - 1) / 3), i = 0..3. Throws InsufficientSamples for n < 4.
std::array<std::size_t, 4> equally_spaced_indices(std::size_t n);

template <typename T>
std::array<T, 4> select_equally_spaced(std::span<const T> archive) {
  const auto idx = equally_spaced_indices(archive.size());
  return {archive[idx[0]], archive[idx[1]], archive[idx[2]], archive[idx[3]]};
}

const char* to_string(LivenessStatus status) noexcept;

}  // namespace camwatch
