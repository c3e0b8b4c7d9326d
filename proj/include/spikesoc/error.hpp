#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spikesoc {

enum class ErrorCode {
    InvalidWeight,
    CorruptWeightWord,
    InvalidParameter,
    NotAModelImage,
    UnsupportedVersion,
    TruncatedImage,
    InconsistentDims,
    DimensionMismatch,
    AccumulatorOverflow,
    ProtocolViolation,
    NotIdx,
    CorruptDataset,
    OracleDivergence,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidWeight: return "InvalidWeight";
        case ErrorCode::CorruptWeightWord: return "CorruptWeightWord";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::NotAModelImage: return "NotAModelImage";
        case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorCode::TruncatedImage: return "TruncatedImage";
        case ErrorCode::InconsistentDims: return "InconsistentDims";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::AccumulatorOverflow: return "AccumulatorOverflow";
        case ErrorCode::ProtocolViolation: return "ProtocolViolation";
        case ErrorCode::NotIdx: return "NotIdx";
        case ErrorCode::CorruptDataset: return "CorruptDataset";
        case ErrorCode::OracleDivergence: return "OracleDivergence";
    }
    return "Unknown";
}

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace spikesoc
