#pragma once

// IDX dataset files (the MNIST / Fashion-MNIST distribution format):
// big-endian magic 0x00000803 (u8 images, 3 dims) or 0x00000801 (u8 labels,
// 1 dim), one big-endian u32 per dimension, then raw bytes.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <vector>

#include "spikesoc/model.hpp"

namespace spikesoc {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct ImageSet {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<InputFrame> frames;  // row-major, rows * cols pixels each
};

namespace detail {

inline std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t pos) {
    return (std::uint32_t{b[pos]} << 24) | (std::uint32_t{b[pos + 1]} << 16) | (std::uint32_t{b[pos + 2]} << 8) |
           std::uint32_t{b[pos + 3]};
}

inline void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

inline void expect_magic(std::span<const std::uint8_t> bytes, std::uint32_t magic) {
    if (bytes.size() < 4 || read_be32(bytes, 0) != magic) fail(ErrorCode::NotIdx, "unexpected IDX magic");
}

}  // namespace detail

inline ImageSet parse_idx_images(std::span<const std::uint8_t> bytes) {
    detail::expect_magic(bytes, kIdxImagesMagic);
    if (bytes.size() < 16) fail(ErrorCode::CorruptDataset, "IDX image header truncated");
    ImageSet set;
    const std::uint32_t count = detail::read_be32(bytes, 4);
    set.rows = detail::read_be32(bytes, 8);
    set.cols = detail::read_be32(bytes, 12);
    if (count == 0 || set.rows == 0 || set.cols == 0) fail(ErrorCode::CorruptDataset, "empty image set");
    const std::uint64_t frame_size = std::uint64_t{set.rows} * set.cols;
    if (bytes.size() - 16 != count * frame_size) {
        fail(ErrorCode::CorruptDataset, "IDX image payload is " + std::to_string(bytes.size() - 16) +
                                            " bytes, header declares " + std::to_string(count * frame_size));
    }
    set.frames.reserve(count);
    for (std::uint64_t n = 0; n < count; ++n) {
        const auto first = bytes.begin() + 16 + static_cast<std::ptrdiff_t>(n * frame_size);
        set.frames.emplace_back(first, first + static_cast<std::ptrdiff_t>(frame_size));
    }
    return set;
}

inline std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
    detail::expect_magic(bytes, kIdxLabelsMagic);
    if (bytes.size() < 8) fail(ErrorCode::CorruptDataset, "IDX label header truncated");
    const std::uint32_t count = detail::read_be32(bytes, 4);
    if (count == 0) fail(ErrorCode::CorruptDataset, "empty label set");
    if (bytes.size() - 8 != count) {
        fail(ErrorCode::CorruptDataset, "IDX label payload does not match the declared count");
    }
    return {bytes.begin() + 8, bytes.end()};
}

inline std::vector<std::uint8_t> serialize_idx_images(const ImageSet& set) {
    std::vector<std::uint8_t> out;
    detail::write_be32(out, kIdxImagesMagic);
    detail::write_be32(out, static_cast<std::uint32_t>(set.frames.size()));
    detail::write_be32(out, set.rows);
    detail::write_be32(out, set.cols);
    for (const auto& f : set.frames) {
        if (f.size() != std::size_t{set.rows} * set.cols) fail(ErrorCode::CorruptDataset, "frame size mismatch");
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

inline std::vector<std::uint8_t> serialize_idx_labels(std::span<const std::uint8_t> labels) {
    std::vector<std::uint8_t> out;
    detail::write_be32(out, kIdxLabelsMagic);
    detail::write_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.insert(out.end(), labels.begin(), labels.end());
    return out;
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path, ErrorCode on_error) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(on_error, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::InvalidParameter, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::vector<InputFrame> load_idx_images(const std::filesystem::path& path) {
    return parse_idx_images(read_file(path, ErrorCode::CorruptDataset)).frames;
}

inline std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path) {
    return parse_idx_labels(read_file(path, ErrorCode::CorruptDataset));
}

}  // namespace spikesoc
