#pragma once

#include <cstdint>
#include <span>

#include "spikesoc/model.hpp"

namespace spikesoc {

struct Decision {
    std::uint32_t label = 0;
    Time time = kNoSpike;  // kNoSpike when decided by the potential fallback

    bool fallback() const noexcept { return time == kNoSpike; }
    friend bool operator==(const Decision&, const Decision&) = default;
};

/// Earliest spike wins; a silent layer falls back to the largest potential.
/// Ties go to the lowest index on both paths.
inline Decision decode(std::span<const Time> fire_times, std::span<const std::int32_t> potentials) {
    if (fire_times.empty() || fire_times.size() != potentials.size()) {
        fail(ErrorCode::DimensionMismatch, "decoder needs equal, non-empty fire-time and potential arrays");
    }
    Decision d;
    for (std::uint32_t j = 0; j < fire_times.size(); ++j) {
        if (fire_times[j] < d.time) d = {j, fire_times[j]};
    }
    if (!d.fallback()) return d;

    d.label = 0;
    for (std::uint32_t j = 1; j < potentials.size(); ++j) {
        if (potentials[j] > potentials[d.label]) d.label = j;
    }
    return d;
}

}  // namespace spikesoc
