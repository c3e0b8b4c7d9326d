#pragma once

// Event-driven SNN datapath.
//
// Each layer consumes its sorted event queue one timestep at a time: every
// event of a timestep is accumulated first, then a single sequential scan
// over the neurons (ascending index) fires those whose potential reached the
// effective threshold. Neurons are non-leaky and fire at most once; a fired
// neuron's potential is frozen.

#include <cstdint>
#include <limits>
#include <vector>

#include "spikesoc/decoder.hpp"
#include "spikesoc/encoder.hpp"
#include "spikesoc/model.hpp"
#include "spikesoc/perf.hpp"
#include "spikesoc/sorter.hpp"

namespace spikesoc {

struct OpCounters {
    std::uint64_t additions = 0;
    std::uint64_t subtractions = 0;
    std::uint64_t multiplications = 0;
    std::uint64_t events_processed = 0;
    std::uint64_t events_skipped = 0;

    OpCounters& operator+=(const OpCounters& o) {
        additions += o.additions;
        subtractions += o.subtractions;
        multiplications += o.multiplications;
        events_processed += o.events_processed;
        events_skipped += o.events_skipped;
        return *this;
    }
    friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

struct NeuronState {
    std::vector<std::int32_t> potentials;
    std::vector<bool> fired;
    SpikeTrain fire_times;

    NeuronState() = default;
    explicit NeuronState(std::uint32_t out_dim)
        : potentials(out_dim, 0), fired(out_dim, false), fire_times(out_dim, kNoSpike) {}

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(potentials.size()); }

    friend bool operator==(const NeuronState&, const NeuronState&) = default;
};

namespace detail {

inline void add_checked(std::int32_t& acc, std::int32_t delta) {
    const std::int64_t sum = std::int64_t{acc} + delta;
    if (sum > std::numeric_limits<std::int32_t>::max() || sum < std::numeric_limits<std::int32_t>::min()) {
        fail(ErrorCode::AccumulatorOverflow, "membrane potential left the 32-bit range");
    }
    acc = static_cast<std::int32_t>(sum);
}

}  // namespace detail

/// Adds +1 or -1 per unfired postsynaptic neuron, read straight from the packed bit for presynaptic `pre`.
inline void accumulate_event_binary(NeuronState& state, const WeightMatrix& weights, std::uint32_t pre,
                                    OpCounters& counters) {
    const std::size_t word = pre / 16;
    const unsigned bit = pre % 16;
    for (std::uint32_t j = 0; j < state.size(); ++j) {
        if (state.fired[j]) continue;
        if ((weights.row(j)[word] >> bit) & 1u) {
            detail::add_checked(state.potentials[j], 1);
            ++counters.additions;
        } else {
            detail::add_checked(state.potentials[j], -1);
            ++counters.subtractions;
        }
    }
}

/// Multi-bit path: sign-extended 16-bit weight per unfired neuron, one multiply-accumulate each.
inline void accumulate_event_fixed16(NeuronState& state, const WeightMatrix& weights, std::uint32_t pre,
                                     OpCounters& counters) {
    for (std::uint32_t j = 0; j < state.size(); ++j) {
        if (state.fired[j]) continue;
        detail::add_checked(state.potentials[j], static_cast<std::int16_t>(weights.row(j)[pre]));
        ++counters.multiplications;
        ++counters.additions;
    }
}

/// Fires every unfired neuron at or above `threshold`, scanning in ascending index order.
inline std::vector<std::uint32_t> fire_check(NeuronState& state, std::int64_t threshold, Time now) {
    std::vector<std::uint32_t> fired_now;
    for (std::uint32_t j = 0; j < state.size(); ++j) {
        if (!state.fired[j] && state.potentials[j] >= threshold) {
            state.fired[j] = true;
            state.fire_times[j] = now;
            fired_now.push_back(j);
        }
    }
    return fired_now;
}

struct LayerOptions {
    bool skip_when_all_fired = true;  // drop events once every neuron has fired
    bool stop_at_first_fire = false;  // drop events after the first timestep that fires anything
};

struct LayerRun {
    NeuronState state;
    std::uint64_t processed = 0;
    std::uint64_t skipped = 0;
    Time first_fire = kNoSpike;
};

inline LayerRun run_layer(const EventQueue& queue, WeightMode mode, const Layer& layer, OpCounters& counters,
                          const LayerOptions& options = {}) {
    const auto& cfg = layer.config;
    for (std::size_t k = 0; k < queue.size(); ++k) {
        if (queue[k].neuron >= cfg.in_dim) {
            fail(ErrorCode::DimensionMismatch, "event for presynaptic neuron " + std::to_string(queue[k].neuron) +
                                                   " but layer in_dim is " + std::to_string(cfg.in_dim));
        }
        if (k > 0 && queue[k].time < queue[k - 1].time) {
            fail(ErrorCode::InvalidParameter, "event queue is not time-sorted");
        }
    }

    LayerRun run{NeuronState(cfg.out_dim)};
    const std::int64_t threshold = effective_threshold(mode, cfg);
    std::uint32_t unfired = cfg.out_dim;

    std::size_t k = 0;
    while (k < queue.size()) {
        if ((options.skip_when_all_fired && unfired == 0) ||
            (options.stop_at_first_fire && run.first_fire != kNoSpike)) {
            break;
        }
        const Time now = queue[k].time;
        for (; k < queue.size() && queue[k].time == now; ++k) {
            if (mode == WeightMode::Binary) {
                accumulate_event_binary(run.state, layer.weights, queue[k].neuron, counters);
            } else {
                accumulate_event_fixed16(run.state, layer.weights, queue[k].neuron, counters);
            }
            ++run.processed;
        }
        const auto fired_now = fire_check(run.state, threshold, now);
        unfired -= static_cast<std::uint32_t>(fired_now.size());
        if (!fired_now.empty() && run.first_fire == kNoSpike) run.first_fire = now;
    }
    run.skipped = queue.size() - k;
    counters.events_processed += run.processed;
    counters.events_skipped += run.skipped;
    return run;
}

struct RunOptions {
    bool early_stop = true;           // truncate the output layer's input at the decision time
    bool skip_when_all_fired = true;
    ZeroPixelPolicy zero_pixels = ZeroPixelPolicy::NoSpike;
    CycleCostTable costs{};

    /// Every event-skipping mechanism switched off.
    static RunOptions exhaustive() {
        RunOptions o;
        o.early_stop = false;
        o.skip_when_all_fired = false;
        o.zero_pixels = ZeroPixelPolicy::LastTimestep;
        return o;
    }
};

struct InferenceResult {
    Decision decision;
    SpikeTrain input_spikes;
    std::vector<NeuronState> layers;  // final state of every layer, input to output
    OpCounters counters;
    CycleReport cycles;

    std::uint32_t predicted() const noexcept { return decision.label; }
    Time decision_time() const noexcept { return decision.time; }
};

inline InferenceResult run_network(const NetworkModel& model, std::span<const std::uint8_t> frame,
                                   const RunOptions& options = {}) {
    validate(model);
    InferenceResult result;
    result.input_spikes = encode_ttfs(frame, model.input_dim(), model.t_max, options.zero_pixels);

    StageTrace trace;
    trace.input_dim = model.input_dim();
    trace.t_max = model.t_max;

    result.layers.reserve(model.layers.size());
    const SpikeTrain* spikes = &result.input_spikes;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& layer = model.layers[l];
        const bool output_layer = l + 1 == model.layers.size();
        const EventQueue queue = sort_spikes(*spikes, model.t_max);

        LayerOptions lo;
        lo.skip_when_all_fired = options.skip_when_all_fired;
        // the first output spike fixes the decision; later events cannot change it
        lo.stop_at_first_fire = output_layer && options.early_stop;

        LayerRun run = run_layer(queue, model.mode, layer, result.counters, lo);
        trace.layers.push_back({layer.config.in_dim, layer.config.out_dim, queue.size(), run.processed, run.skipped});
        result.layers.push_back(std::move(run.state));
        spikes = &result.layers.back().fire_times;
    }

    const auto& out = result.layers.back();
    result.decision = decode(out.fire_times, out.potentials);
    result.cycles = estimate_cycles(trace, options.costs);
    return result;
}

}  // namespace spikesoc
