#pragma once

// Dense reference simulator.
//
// Sweeps every timestep of the window and, for each layer in order, every
// synapse: V_j += sum_i w_ji * [spike_i == t]. No sorting, no skipping, no
// early termination. It shares only the firing conventions with the
// event-driven core (>= comparison, alpha folding, ascending scan, check once
// per timestep that delivered input) and none of its code paths.
//
// Cost is O(t_max * sum(in_dim * out_dim)); intended for desk-scale checks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spikesoc/core.hpp"

namespace spikesoc {

namespace detail {

/// Unpacks a layer into a dense row-major matrix by reading the raw cells.
inline std::vector<std::int64_t> dense_weights(WeightMode mode, const Layer& layer) {
    const auto& c = layer.config;
    const auto words = layer.weights.words();
    std::vector<std::int64_t> dense(std::size_t{c.out_dim} * c.in_dim);
    for (std::size_t j = 0; j < c.out_dim; ++j) {
        for (std::size_t i = 0; i < c.in_dim; ++i) {
            if (mode == WeightMode::Binary) {
                const std::size_t stride = (c.in_dim + 15) / 16;
                const bool set = (words[j * stride + i / 16] & (1u << (i % 16))) != 0;
                dense[j * c.in_dim + i] = set ? 1 : -1;
            } else {
                dense[j * c.in_dim + i] = static_cast<std::int16_t>(words[j * c.in_dim + i]);
            }
        }
    }
    return dense;
}

}  // namespace detail

inline InferenceResult dense_infer(const NetworkModel& model, std::span<const std::uint8_t> frame,
                                   ZeroPixelPolicy zero_pixels = ZeroPixelPolicy::NoSpike) {
    validate(model);
    InferenceResult result;
    result.input_spikes = encode_ttfs(frame, model.input_dim(), model.t_max, zero_pixels);

    const std::size_t n_layers = model.layers.size();
    std::vector<std::vector<std::int64_t>> weights;
    std::vector<std::vector<std::int64_t>> potential;
    std::vector<SpikeTrain> fire_time;
    std::vector<std::int64_t> threshold;
    for (const auto& layer : model.layers) {
        weights.push_back(detail::dense_weights(model.mode, layer));
        potential.emplace_back(layer.config.out_dim, 0);
        fire_time.emplace_back(layer.config.out_dim, kNoSpike);
        threshold.push_back(effective_threshold(model.mode, layer.config));
    }

    for (std::uint32_t t = 0; t < model.t_max; ++t) {
        const SpikeTrain* in = &result.input_spikes;
        for (std::size_t l = 0; l < n_layers; ++l) {
            const auto& c = model.layers[l].config;
            bool any_input = false;
            for (std::size_t i = 0; i < c.in_dim; ++i) any_input |= (*in)[i] == t;
            if (any_input) {
                for (std::size_t j = 0; j < c.out_dim; ++j) {
                    if (fire_time[l][j] != kNoSpike) continue;
                    std::int64_t current = 0;
                    for (std::size_t i = 0; i < c.in_dim; ++i) {
                        if ((*in)[i] == t) current += weights[l][j * c.in_dim + i];
                    }
                    potential[l][j] += current;
                }
                for (std::size_t j = 0; j < c.out_dim; ++j) {
                    if (fire_time[l][j] == kNoSpike && potential[l][j] >= threshold[l]) {
                        fire_time[l][j] = static_cast<Time>(t);
                    }
                }
            }
            in = &fire_time[l];
        }
    }

    for (std::size_t l = 0; l < n_layers; ++l) {
        NeuronState s(model.layers[l].config.out_dim);
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (potential[l][j] > std::numeric_limits<std::int32_t>::max() ||
                potential[l][j] < std::numeric_limits<std::int32_t>::min()) {
                fail(ErrorCode::AccumulatorOverflow, "dense potential left the 32-bit range");
            }
            s.potentials[j] = static_cast<std::int32_t>(potential[l][j]);
            s.fire_times[j] = fire_time[l][j];
            s.fired[j] = fire_time[l][j] != kNoSpike;
        }
        result.layers.push_back(std::move(s));
    }
    const auto& out = result.layers.back();
    result.decision = decode(out.fire_times, out.potentials);
    return result;
}

enum class Agreement {
    Full,      // decision, every fire time, every final potential
    Decision,  // decision plus everything the early-stopped output layer still observes
};

/// First difference between an event-driven result and the dense reference, if any.
///
/// With Agreement::Decision the output layer is compared only up to the
/// decision time, since early termination leaves later output activity
/// unobserved. Hidden layers are always compared in full.
inline std::optional<std::string> first_divergence(const InferenceResult& event, const InferenceResult& dense,
                                                   Agreement level = Agreement::Full) {
    if (event.decision != dense.decision) {
        return "decision (" + std::to_string(event.decision.label) + "@" + std::to_string(event.decision.time) +
               ") vs dense (" + std::to_string(dense.decision.label) + "@" + std::to_string(dense.decision.time) + ")";
    }
    if (event.layers.size() != dense.layers.size()) return std::string("layer count");
    for (std::size_t l = 0; l < event.layers.size(); ++l) {
        const auto& a = event.layers[l];
        const auto& b = dense.layers[l];
        if (a.size() != b.size()) return "layer " + std::to_string(l) + " width";
        const bool partial = level == Agreement::Decision && l + 1 == event.layers.size();
        for (std::size_t j = 0; j < a.size(); ++j) {
            const std::string where = "layer " + std::to_string(l) + " neuron " + std::to_string(j);
            if (partial) {
                const bool before_a = a.fire_times[j] != kNoSpike && a.fire_times[j] <= dense.decision.time;
                const bool before_b = b.fire_times[j] != kNoSpike && b.fire_times[j] <= dense.decision.time;
                if (before_a != before_b || (before_a && a.fire_times[j] != b.fire_times[j])) {
                    return where + " fire time before decision";
                }
                continue;
            }
            if (a.fire_times[j] != b.fire_times[j]) {
                return where + " fire time " + std::to_string(a.fire_times[j]) + " vs " +
                       std::to_string(b.fire_times[j]);
            }
            if (a.potentials[j] != b.potentials[j]) {
                return where + " potential " + std::to_string(a.potentials[j]) + " vs " +
                       std::to_string(b.potentials[j]);
            }
        }
    }
    return std::nullopt;
}

}  // namespace spikesoc
