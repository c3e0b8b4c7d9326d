#pragma once

// Cycle-cost and memory-footprint model.
//
// The pipeline is sequential per layer:
//   encode  = input_dim * encode_per_pixel
//   sort    = sum over layers of (sort_base + sorted_events * sort_per_event), sort_base defaults to t_max
//   neuron  = sum over layers of processed_events * out_dim * scc_per_event_per_neuron
//   decode  = out_dim of the last layer * decode_per_neuron
// and total is their exact sum.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "spikesoc/model.hpp"

namespace spikesoc {

struct CycleCostTable {
    std::uint64_t encode_per_pixel = 1;
    std::optional<std::uint64_t> sort_base;  // defaults to t_max buckets
    std::uint64_t sort_per_event = 1;
    std::uint64_t scc_per_event_per_neuron = 1;
    std::uint64_t decode_per_neuron = 1;
};

struct LayerTrace {
    std::uint32_t in_dim = 0;
    std::uint32_t out_dim = 0;
    std::uint64_t sorted_events = 0;     // events leaving the sorter
    std::uint64_t processed_events = 0;  // events that reached the SCC
    std::uint64_t skipped_events = 0;
};

struct StageTrace {
    std::uint32_t input_dim = 0;
    std::uint32_t t_max = kMaxTimesteps;
    std::vector<LayerTrace> layers;
};

struct LayerCycles {
    std::uint64_t sort_cycles = 0;
    std::uint64_t neuron_cycles = 0;
    std::uint64_t events_sorted = 0;
    std::uint64_t events_processed = 0;
    std::uint64_t events_skipped = 0;

    friend bool operator==(const LayerCycles&, const LayerCycles&) = default;
};

struct CycleReport {
    std::uint64_t encode_cycles = 0;
    std::uint64_t sort_cycles = 0;
    std::uint64_t neuron_cycles = 0;
    std::uint64_t decode_cycles = 0;
    std::uint64_t total_cycles = 0;
    std::vector<LayerCycles> layers;

    CycleReport& operator+=(const CycleReport& other) {
        encode_cycles += other.encode_cycles;
        sort_cycles += other.sort_cycles;
        neuron_cycles += other.neuron_cycles;
        decode_cycles += other.decode_cycles;
        total_cycles += other.total_cycles;
        return *this;
    }

    friend bool operator==(const CycleReport&, const CycleReport&) = default;
};

inline CycleReport estimate_cycles(const StageTrace& trace, const CycleCostTable& costs = {}) {
    CycleReport r;
    r.encode_cycles = std::uint64_t{trace.input_dim} * costs.encode_per_pixel;
    const std::uint64_t sort_base = costs.sort_base.value_or(trace.t_max);
    for (const auto& layer : trace.layers) {
        LayerCycles lc;
        lc.sort_cycles = sort_base + layer.sorted_events * costs.sort_per_event;
        lc.neuron_cycles = layer.processed_events * layer.out_dim * costs.scc_per_event_per_neuron;
        lc.events_sorted = layer.sorted_events;
        lc.events_processed = layer.processed_events;
        lc.events_skipped = layer.skipped_events;
        r.sort_cycles += lc.sort_cycles;
        r.neuron_cycles += lc.neuron_cycles;
        r.layers.push_back(lc);
    }
    if (!trace.layers.empty()) {
        r.decode_cycles = std::uint64_t{trace.layers.back().out_dim} * costs.decode_per_neuron;
    }
    r.total_cycles = r.encode_cycles + r.sort_cycles + r.neuron_cycles + r.decode_cycles;
    return r;
}

inline double cycles_to_ms(std::uint64_t cycles, double clock_mhz) {
    return static_cast<double>(cycles) / (clock_mhz * 1e3);
}

/// Stage breakdown as CSV (stage,cycles,fraction), one row per stage plus the total.
inline void write_breakdown_csv(std::ostream& os, const CycleReport& r) {
    const auto fraction = [&](std::uint64_t c) {
        return r.total_cycles == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(r.total_cycles);
    };
    const std::pair<const char*, std::uint64_t> rows[] = {
        {"encode", r.encode_cycles}, {"sort", r.sort_cycles},   {"neuron", r.neuron_cycles},
        {"decode", r.decode_cycles}, {"total", r.total_cycles},
    };
    os << "stage,cycles,fraction\n";
    char buf[32];
    for (const auto& [name, cycles] : rows) {
        std::snprintf(buf, sizeof buf, "%.6f", fraction(cycles));
        os << name << ',' << cycles << ',' << buf << '\n';
    }
}

struct LayerMemory {
    std::uint64_t weight_bytes = 0;          // in the model's own mode
    std::uint64_t binary_weight_bytes = 0;   // same topology, 1-bit packed
    std::uint64_t fixed16_weight_bytes = 0;  // same topology, 16-bit cells
    std::uint64_t spike_bytes = 0;           // input spike memory, one byte per presynaptic neuron

    double reduction_ratio() const {
        return binary_weight_bytes == 0 ? 0.0
                                        : static_cast<double>(fixed16_weight_bytes) / binary_weight_bytes;
    }
};

struct MemoryReport {
    std::vector<LayerMemory> layers;
    std::uint64_t weight_bytes = 0;
    std::uint64_t binary_weight_bytes = 0;
    std::uint64_t fixed16_weight_bytes = 0;
    std::uint64_t spike_bytes = 0;  // every layer boundary, output included
    std::uint64_t total_bytes = 0;

    double reduction_ratio() const {
        return binary_weight_bytes == 0 ? 0.0
                                        : static_cast<double>(fixed16_weight_bytes) / binary_weight_bytes;
    }
};

inline MemoryReport memory_footprint(const NetworkModel& model) {
    MemoryReport r;
    for (const auto& layer : model.layers) {
        const auto& c = layer.config;
        LayerMemory m;
        m.binary_weight_bytes = std::uint64_t{c.out_dim} * words_per_row(c.in_dim) * 2;
        m.fixed16_weight_bytes = std::uint64_t{c.out_dim} * c.in_dim * 2;
        m.weight_bytes = model.mode == WeightMode::Binary ? m.binary_weight_bytes : m.fixed16_weight_bytes;
        m.spike_bytes = c.in_dim;
        r.weight_bytes += m.weight_bytes;
        r.binary_weight_bytes += m.binary_weight_bytes;
        r.fixed16_weight_bytes += m.fixed16_weight_bytes;
        r.spike_bytes += m.spike_bytes;
        r.layers.push_back(m);
    }
    r.spike_bytes += model.num_classes();
    r.total_bytes = r.weight_bytes + r.spike_bytes;
    return r;
}

}  // namespace spikesoc
