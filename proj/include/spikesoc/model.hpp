#pragma once

// Network description held in the on-chip weight and parameter memories.
//
// Binary weights are packed 16 per 16-bit cell, LSB first: presynaptic index
// i lives in bit (i % 16) of word (i / 16) of its row, and a set bit means +1.
// Bits past in_dim in the last word of a row are always zero.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "spikesoc/error.hpp"

namespace spikesoc {

/// Discrete timestep within the inference window.
using Time = std::uint16_t;
inline constexpr Time kNoSpike = 0xFFFF;
inline constexpr std::uint32_t kMaxTimesteps = 256;

/// One entry per neuron: a spike time in [0, t_max) or kNoSpike.
using SpikeTrain = std::vector<Time>;

/// Raw 8-bit intensities, one per input neuron.
using InputFrame = std::vector<std::uint8_t>;

enum class WeightMode : std::uint8_t { Binary = 0, Fixed16 = 1 };

/// Unsigned 8.8 fixed-point value.
struct UFixed8_8 {
    std::uint16_t raw = 0x0100;

    static constexpr UFixed8_8 from_raw(std::uint16_t r) noexcept { return UFixed8_8{r}; }
    static constexpr UFixed8_8 from_int(std::uint8_t v) noexcept {
        return UFixed8_8{static_cast<std::uint16_t>(v << 8)};
    }
    constexpr double value() const noexcept { return raw / 256.0; }

    friend constexpr bool operator==(UFixed8_8, UFixed8_8) = default;
};

struct LayerConfig {
    std::uint32_t in_dim = 1;
    std::uint32_t out_dim = 1;
    UFixed8_8 alpha{};
    std::int32_t threshold = 0;  // raw accumulator units

    friend bool operator==(const LayerConfig&, const LayerConfig&) = default;
};

constexpr std::size_t words_per_row(std::size_t in_dim) noexcept { return (in_dim + 15) / 16; }

/// Packs a row of ±1 weights into 16-bit cells.
inline std::vector<std::uint16_t> pack_binary_row(std::span<const int> weights) {
    if (weights.empty()) fail(ErrorCode::InvalidParameter, "binary row must not be empty");
    std::vector<std::uint16_t> words(words_per_row(weights.size()), 0);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const int w = weights[i];
        if (w == 1) {
            words[i / 16] |= static_cast<std::uint16_t>(1u << (i % 16));
        } else if (w != -1) {
            fail(ErrorCode::InvalidWeight,
                 "weight " + std::to_string(w) + " at index " + std::to_string(i) + " is not +1/-1");
        }
    }
    return words;
}

inline std::vector<int> unpack_binary_row(std::span<const std::uint16_t> words, std::size_t in_dim) {
    if (in_dim == 0) fail(ErrorCode::InvalidParameter, "in_dim must be positive");
    if (words.size() != words_per_row(in_dim)) {
        fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(words_per_row(in_dim)) +
                                               " words, got " + std::to_string(words.size()));
    }
    const std::size_t tail = in_dim % 16;
    if (tail != 0 && (words.back() >> tail) != 0) {
        fail(ErrorCode::CorruptWeightWord, "nonzero padding bits in final word");
    }
    std::vector<int> out(in_dim);
    for (std::size_t i = 0; i < in_dim; ++i) {
        out[i] = ((words[i / 16] >> (i % 16)) & 1u) ? 1 : -1;
    }
    return out;
}

/// Row-major synaptic weights for one layer, stored as 16-bit cells.
///
/// Binary: out_dim rows of words_per_row(in_dim) packed words.
/// Fixed16: out_dim rows of in_dim two's-complement words.
class WeightMatrix {
public:
    WeightMatrix() = default;

    static WeightMatrix binary(std::uint32_t in_dim, std::uint32_t out_dim,
                               std::vector<std::uint16_t> words) {
        WeightMatrix m(WeightMode::Binary, in_dim, out_dim);
        if (words.size() != m.words_.size()) {
            fail(ErrorCode::InconsistentDims, "binary weight blob has " + std::to_string(words.size()) +
                                                  " words, expected " + std::to_string(m.words_.size()));
        }
        m.words_ = std::move(words);
        m.check_padding();
        return m;
    }

    static WeightMatrix fixed16(std::uint32_t in_dim, std::uint32_t out_dim,
                                std::span<const std::int16_t> weights) {
        WeightMatrix m(WeightMode::Fixed16, in_dim, out_dim);
        if (weights.size() != m.words_.size()) {
            fail(ErrorCode::InconsistentDims, "fixed16 weight blob has " + std::to_string(weights.size()) +
                                                  " entries, expected " + std::to_string(m.words_.size()));
        }
        for (std::size_t k = 0; k < weights.size(); ++k) m.words_[k] = static_cast<std::uint16_t>(weights[k]);
        return m;
    }

    /// Builds a binary matrix from a dense row-major ±1 array.
    static WeightMatrix binary_from_dense(std::uint32_t in_dim, std::uint32_t out_dim,
                                          std::span<const int> dense) {
        if (dense.size() != std::size_t{in_dim} * out_dim) {
            fail(ErrorCode::InconsistentDims, "dense weight array size mismatch");
        }
        std::vector<std::uint16_t> words;
        words.reserve(out_dim * words_per_row(in_dim));
        for (std::uint32_t j = 0; j < out_dim; ++j) {
            auto row = pack_binary_row(dense.subspan(std::size_t{j} * in_dim, in_dim));
            words.insert(words.end(), row.begin(), row.end());
        }
        return binary(in_dim, out_dim, std::move(words));
    }

    WeightMode mode() const noexcept { return mode_; }
    std::uint32_t in_dim() const noexcept { return in_dim_; }
    std::uint32_t out_dim() const noexcept { return out_dim_; }

    std::size_t row_stride() const noexcept {
        return mode_ == WeightMode::Binary ? words_per_row(in_dim_) : in_dim_;
    }

    std::span<const std::uint16_t> row(std::uint32_t j) const noexcept {
        return std::span<const std::uint16_t>(words_).subspan(std::size_t{j} * row_stride(), row_stride());
    }

    /// Raw storage in row-major order, exactly as laid out in the flash image.
    std::span<const std::uint16_t> words() const noexcept { return words_; }

    /// Weight of synapse (post j, pre i) as a signed integer.
    std::int32_t weight(std::uint32_t j, std::uint32_t i) const noexcept {
        const auto r = row(j);
        if (mode_ == WeightMode::Binary) return ((r[i / 16] >> (i % 16)) & 1u) ? 1 : -1;
        return static_cast<std::int16_t>(r[i]);
    }

    std::size_t byte_size() const noexcept { return words_.size() * 2; }

    friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

private:
    WeightMatrix(WeightMode mode, std::uint32_t in_dim, std::uint32_t out_dim)
        : mode_(mode), in_dim_(in_dim), out_dim_(out_dim) {
        if (in_dim == 0 || out_dim == 0) fail(ErrorCode::InconsistentDims, "layer dims must be positive");
        words_.assign(std::size_t{out_dim} * row_stride(), 0);
    }

    void check_padding() const {
        const std::size_t tail = in_dim_ % 16;
        if (tail == 0) return;
        const std::size_t stride = row_stride();
        for (std::uint32_t j = 0; j < out_dim_; ++j) {
            if ((words_[j * stride + stride - 1] >> tail) != 0) {
                fail(ErrorCode::CorruptWeightWord, "nonzero padding bits in row " + std::to_string(j));
            }
        }
    }

    WeightMode mode_ = WeightMode::Binary;
    std::uint32_t in_dim_ = 0;
    std::uint32_t out_dim_ = 0;
    std::vector<std::uint16_t> words_;
};

struct Layer {
    LayerConfig config;
    WeightMatrix weights;

    friend bool operator==(const Layer&, const Layer&) = default;
};

struct NetworkModel {
    WeightMode mode = WeightMode::Binary;
    std::uint32_t t_max = kMaxTimesteps;
    std::vector<Layer> layers;

    std::uint32_t input_dim() const { return layers.empty() ? 0 : layers.front().config.in_dim; }
    std::uint32_t num_classes() const { return layers.empty() ? 0 : layers.back().config.out_dim; }

    friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

/// Throws unless every structural invariant of the model holds.
inline void validate(const NetworkModel& model) {
    if (model.layers.empty() || model.layers.size() > 255) {
        fail(ErrorCode::InvalidParameter, "layer count must be in [1, 255]");
    }
    if (model.t_max == 0 || model.t_max > kMaxTimesteps) {
        fail(ErrorCode::InvalidParameter, "t_max must be in [1, 256]");
    }
    for (std::size_t k = 0; k < model.layers.size(); ++k) {
        const auto& [cfg, w] = model.layers[k];
        const std::string where = "layer " + std::to_string(k);
        if (cfg.in_dim == 0 || cfg.out_dim == 0 || cfg.in_dim > 0xFFFF || cfg.out_dim > 0xFFFF) {
            fail(ErrorCode::InconsistentDims, where + ": dims must be in [1, 65535]");
        }
        if (cfg.alpha.raw == 0) fail(ErrorCode::InvalidParameter, where + ": alpha must be positive");
        if (w.mode() != model.mode || w.in_dim() != cfg.in_dim || w.out_dim() != cfg.out_dim) {
            fail(ErrorCode::InconsistentDims, where + ": weight matrix does not match layer config");
        }
        if (k + 1 < model.layers.size() && cfg.out_dim != model.layers[k + 1].config.in_dim) {
            fail(ErrorCode::InconsistentDims, where + ": out_dim does not chain into the next layer");
        }
    }
}

/// Firing threshold in raw accumulator units.
///
/// Binary mode folds alpha into the threshold so the datapath stays add/sub
/// only: round(threshold / alpha), half away from zero. Fixed16 compares
/// against the threshold directly.
inline std::int64_t effective_threshold(WeightMode mode, const LayerConfig& cfg) noexcept {
    if (mode == WeightMode::Fixed16) return cfg.threshold;
    const std::int64_t num = std::int64_t{cfg.threshold} * 256;
    const std::int64_t den = cfg.alpha.raw;
    const std::int64_t mag = ((num < 0 ? -num : num) * 2 + den) / (2 * den);
    return num < 0 ? -mag : mag;
}

}  // namespace spikesoc
