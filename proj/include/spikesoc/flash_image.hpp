#pragma once

// Flash model image, little-endian throughout.
//
//   0..3   magic "SNN1"
//   4..5   format version (1)
//   6      weight mode (0 = Binary, 1 = Fixed16)
//   7      layer count L
//   8..9   t_max (1..256)
//   L x 10-byte layer records: in_dim u16, out_dim u16, alpha u16 (8.8), threshold i32
//   L weight blobs, row-major 16-bit cells

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spikesoc/model.hpp"

namespace spikesoc {

inline constexpr std::array<std::uint8_t, 4> kImageMagic{0x53, 0x4E, 0x4E, 0x31};
inline constexpr std::uint16_t kImageVersion = 1;
inline constexpr std::size_t kImageHeaderBytes = 10;
inline constexpr std::size_t kLayerRecordBytes = 10;

namespace detail {

class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v));
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int s = 0; s < 32; s += 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
    }
    std::vector<std::uint8_t> take() && { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() { return need(1), in_[pos_++]; }
    std::uint16_t u16() {
        need(2);
        const auto v = static_cast<std::uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= std::uint32_t{in_[pos_ + k]} << (8 * k);
        pos_ += 4;
        return v;
    }
    std::size_t remaining() const noexcept { return in_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) fail(ErrorCode::TruncatedImage, "image ends at byte " + std::to_string(in_.size()));
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> serialize_model(const NetworkModel& model) {
    validate(model);
    detail::ByteWriter w;
    for (auto b : kImageMagic) w.u8(b);
    w.u16(kImageVersion);
    w.u8(static_cast<std::uint8_t>(model.mode));
    w.u8(static_cast<std::uint8_t>(model.layers.size()));
    w.u16(static_cast<std::uint16_t>(model.t_max));
    for (const auto& layer : model.layers) {
        const auto& c = layer.config;
        w.u16(static_cast<std::uint16_t>(c.in_dim));
        w.u16(static_cast<std::uint16_t>(c.out_dim));
        w.u16(c.alpha.raw);
        w.u32(static_cast<std::uint32_t>(c.threshold));
    }
    for (const auto& layer : model.layers) {
        for (auto word : layer.weights.words()) w.u16(word);
    }
    return std::move(w).take();
}

inline NetworkModel deserialize_model(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kImageMagic.size() ||
        !std::equal(kImageMagic.begin(), kImageMagic.end(), bytes.begin())) {
        fail(ErrorCode::NotAModelImage, "missing SNN1 magic");
    }
    detail::ByteReader r(bytes.subspan(kImageMagic.size()));
    const auto version = r.u16();
    if (version != kImageVersion) {
        fail(ErrorCode::UnsupportedVersion, "image version " + std::to_string(version));
    }
    NetworkModel model;
    const auto mode = r.u8();
    if (mode > 1) fail(ErrorCode::NotAModelImage, "unknown weight mode " + std::to_string(mode));
    model.mode = static_cast<WeightMode>(mode);
    const auto layer_count = r.u8();
    if (layer_count == 0) fail(ErrorCode::InconsistentDims, "image declares zero layers");
    model.t_max = r.u16();
    if (model.t_max == 0 || model.t_max > kMaxTimesteps) {
        fail(ErrorCode::InconsistentDims, "t_max " + std::to_string(model.t_max) + " out of range");
    }

    std::vector<LayerConfig> configs(layer_count);
    for (auto& c : configs) {
        c.in_dim = r.u16();
        c.out_dim = r.u16();
        c.alpha = UFixed8_8::from_raw(r.u16());
        c.threshold = static_cast<std::int32_t>(r.u32());
        if (c.in_dim == 0 || c.out_dim == 0) fail(ErrorCode::InconsistentDims, "zero layer dimension");
        if (c.alpha.raw == 0) fail(ErrorCode::InconsistentDims, "zero alpha");
    }
    for (std::size_t k = 0; k + 1 < configs.size(); ++k) {
        if (configs[k].out_dim != configs[k + 1].in_dim) {
            fail(ErrorCode::InconsistentDims, "layer " + std::to_string(k) + " does not chain into layer " +
                                                  std::to_string(k + 1));
        }
    }

    for (const auto& c : configs) {
        const std::size_t stride = model.mode == WeightMode::Binary ? words_per_row(c.in_dim) : c.in_dim;
        if (r.remaining() < std::size_t{c.out_dim} * stride * 2) {
            fail(ErrorCode::TruncatedImage, "weight blob shorter than declared dims");
        }
        if (model.mode == WeightMode::Binary) {
            std::vector<std::uint16_t> words(std::size_t{c.out_dim} * stride);
            for (auto& word : words) word = r.u16();
            model.layers.push_back({c, WeightMatrix::binary(c.in_dim, c.out_dim, std::move(words))});
        } else {
            std::vector<std::int16_t> weights(std::size_t{c.out_dim} * c.in_dim);
            for (auto& v : weights) v = static_cast<std::int16_t>(r.u16());
            model.layers.push_back({c, WeightMatrix::fixed16(c.in_dim, c.out_dim, weights)});
        }
    }
    if (r.remaining() != 0) {
        fail(ErrorCode::InconsistentDims, std::to_string(r.remaining()) + " trailing bytes after weight blobs");
    }
    return model;
}

}  // namespace spikesoc
