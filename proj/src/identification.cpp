#include "camwatch/identification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "camwatch/digest.hpp"

namespace camwatch {

Retrieval make_retrieval(std::vector<std::uint8_t> bytes, Timestamp at) {
  Retrieval r;
  r.retrieved_at = at;
  try {
    r.image = decode_image(bytes);
  } catch (const DecodeError& e) {
    r.decode_error = e.what();
  }
  r.bytes = std::move(bytes);
  return r;
}

bool checksum_changed(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.empty() || b.empty()) throw InvalidInput("checksum comparison of an empty byte sequence");
  return sha256_hex(a) != sha256_hex(b);
}

namespace {

void require_same_dimensions(const PixelImage& a, const PixelImage& b) {
  if (!a.same_dimensions(b)) {
    throw DimensionMismatch(fmt::format("{}x{} vs {}x{}", a.width(), a.height(), b.width(), b.height()));
  }
}

}  // namespace

double percent_difference(const PixelImage& a, const PixelImage& b, int channel_tolerance) {
  require_same_dimensions(a, b);
  if (channel_tolerance < 0) throw InvalidInput("channel tolerance must be non-negative");
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  std::size_t changed = 0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (std::abs(pa[i].r - pb[i].r) > channel_tolerance || std::abs(pa[i].g - pb[i].g) > channel_tolerance ||
        std::abs(pa[i].b - pb[i].b) > channel_tolerance) {
      ++changed;
    }
  }
  return static_cast<double>(changed) / static_cast<double>(pa.size());
}

double mean_luminance(const PixelImage& image) {
  // Per-channel sums are exact in 64-bit; weighting the sums keeps the mean
  // independent of pixel order.
  std::uint64_t r = 0, g = 0, b = 0;
  for (const auto& p : image.pixels()) {
    r += p.r;
    g += p.g;
    b += p.b;
  }
  const double n = static_cast<double>(image.pixel_count());
  return (0.299 * static_cast<double>(r) + 0.587 * static_cast<double>(g) + 0.114 * static_cast<double>(b)) / n;
}

double luminance_difference(const PixelImage& a, const PixelImage& b) {
  require_same_dimensions(a, b);
  return std::fabs(mean_luminance(a) - mean_luminance(b));
}

LivenessVerdict classify_liveness(std::span<const Retrieval> samples, const LivenessConfig& config) {
  if (samples.size() < 2) {
    throw InsufficientSamples(fmt::format("liveness needs at least 2 samples, got {}", samples.size()));
  }
  LivenessVerdict verdict;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    verdict.sample_times.push_back(samples[i].retrieved_at);
    if (!samples[i].image) verdict.decode_failures.push_back(i);
  }

  std::size_t compared = 0;
  bool live = false;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const Retrieval& prev = samples[i - 1];
    const Retrieval& cur = samples[i];
    if (!prev.image || !cur.image || prev.bytes.empty() || cur.bytes.empty()) continue;
    ++compared;

    const bool changed = checksum_changed(prev.bytes, cur.bytes);
    double pct = 0.0;
    double lum = 0.0;
    if (changed) {
      if (prev.image->same_dimensions(*cur.image)) {
        pct = percent_difference(*prev.image, *cur.image, config.channel_tolerance);
        lum = luminance_difference(*prev.image, *cur.image);
      } else {
        // A resolution change replaces every pixel position.
        pct = 1.0;
        lum = std::fabs(mean_luminance(*prev.image) - mean_luminance(*cur.image));
      }
    }
    verdict.checksum_changed = verdict.checksum_changed || changed;
    verdict.percent_diff = std::max(verdict.percent_diff, pct);
    verdict.luminance_diff = std::max(verdict.luminance_diff, lum);
    if (changed && (pct >= config.min_percent || lum >= config.min_luminance)) live = true;
  }
  if (compared == 0) throw InsufficientSamples("no pair of decodable samples to compare");
  verdict.status = live ? LivenessStatus::Live : LivenessStatus::Static;
  return verdict;
}

bool is_frozen(std::span<const PixelImage> samples) {
  if (samples.size() != 4) throw InvalidInput(fmt::format("frozen check takes exactly 4 images, got {}", samples.size()));
  for (std::size_t i = 1; i < samples.size(); ++i) require_same_dimensions(samples[0], samples[i]);
  return std::all_of(samples.begin() + 1, samples.end(), [&](const PixelImage& img) {
    return std::equal(img.pixels().begin(), img.pixels().end(), samples[0].pixels().begin());
  });
}

std::array<std::size_t, 4> equally_spaced_indices(std::size_t n) {
  if (n < 4) throw InsufficientSamples(fmt::format("need at least 4 archived images, have {}", n));
  std::array<std::size_t, 4> idx{};
  for (std::size_t i = 0; i < 4; ++i) {
    // round(i * (n - 1) / 3), half-up, in exact integer arithmetic
    idx[i] = (2 * i * (n - 1) + 3) / 6;
  }
  return idx;
}

const char* to_string(LivenessStatus status) noexcept {
  return status == LivenessStatus::Live ? "Live" : "Static";
}

}  // namespace camwatch
