#pragma once

// Time-to-first-spike encoding: spike time is the bitwise NOT of the pixel
// intensity, so brighter pixels fire earlier.

#include <bit>
#include <cstdint>
#include <span>

#include "spikesoc/model.hpp"

namespace spikesoc {

enum class ZeroPixelPolicy {
    NoSpike,        // zero intensity carries no information; emit nothing
    LastTimestep,   // emit at t_max - 1 like any other pixel
};

/// Right shift applied to 8-bit intensities so the largest shifted value
/// fits below t_max. Zero for t_max = 256.
constexpr unsigned intensity_shift(std::uint32_t t_max) noexcept {
    return 8u - static_cast<unsigned>(std::bit_width(t_max) - 1);
}

constexpr Time encode_pixel(std::uint8_t pixel, std::uint32_t t_max,
                            ZeroPixelPolicy zero = ZeroPixelPolicy::NoSpike) noexcept {
    if (pixel == 0 && zero == ZeroPixelPolicy::NoSpike) return kNoSpike;
    const unsigned shift = intensity_shift(t_max);
    const unsigned mask = (1u << (8 - shift)) - 1u;
    // complement within the shifted width, then place it at the end of the window
    const unsigned inverted = ~(unsigned{pixel} >> shift) & mask;
    return static_cast<Time>(t_max - 1 - mask + inverted);
}

inline SpikeTrain encode_ttfs(std::span<const std::uint8_t> frame, std::uint32_t expected_dim,
                              std::uint32_t t_max, ZeroPixelPolicy zero = ZeroPixelPolicy::NoSpike) {
    if (frame.size() != expected_dim) {
        fail(ErrorCode::DimensionMismatch, "frame has " + std::to_string(frame.size()) + " pixels, network expects " +
                                               std::to_string(expected_dim));
    }
    if (t_max == 0 || t_max > kMaxTimesteps) fail(ErrorCode::InvalidParameter, "t_max must be in [1, 256]");
    SpikeTrain train(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) train[i] = encode_pixel(frame[i], t_max, zero);
    return train;
}

}  // namespace spikesoc
