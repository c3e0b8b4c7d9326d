#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "spikesoc/model.hpp"

namespace spikesoc {

struct SpikeEvent {
    std::uint32_t neuron = 0;
    Time time = 0;

    friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

/// Active events ordered by time, ties by ascending neuron index.
using EventQueue = std::vector<SpikeEvent>;

/// Stable counting sort over t_max buckets. NoSpike entries are dropped.
inline EventQueue sort_spikes(const SpikeTrain& train, std::uint32_t t_max = kMaxTimesteps) {
    std::vector<std::uint32_t> offset(std::size_t{t_max} + 1, 0);
    for (Time t : train) {
        if (t == kNoSpike) continue;
        if (t >= t_max) fail(ErrorCode::InvalidParameter, "spike time " + std::to_string(t) + " outside window");
        ++offset[t + 1];
    }
    for (std::size_t b = 1; b < offset.size(); ++b) offset[b] += offset[b - 1];

    EventQueue queue(offset.back());
    for (std::uint32_t i = 0; i < train.size(); ++i) {
        const Time t = train[i];
        if (t != kNoSpike) queue[offset[t]++] = SpikeEvent{i, t};
    }
    return queue;
}

/// Prefix of a sorted queue with time <= cutoff.
inline EventQueue truncate_after(const EventQueue& queue, Time cutoff) {
    auto end = std::upper_bound(queue.begin(), queue.end(), cutoff,
                                [](Time c, const SpikeEvent& e) { return c < e.time; });
    return EventQueue(queue.begin(), end);
}

}  // namespace spikesoc
