#pragma once

// Batch evaluation: streams every sample of a dataset through the controller
// command protocol and collects accuracy, latency and memory figures.

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "spikesoc/controller.hpp"
#include "spikesoc/idx.hpp"
#include "spikesoc/oracle.hpp"
#include "spikesoc/perf.hpp"

namespace spikesoc {

struct BatchOptions {
    bool oracle = false;      // cross-check every sample against dense_infer
    bool early_stop = true;
    std::optional<std::uint32_t> t_max;  // overrides the image's window
    double clock_mhz = 163.0;
    unsigned jobs = 1;
    CycleCostTable costs{};
};

struct SampleRecord {
    std::uint32_t index = 0;
    std::uint32_t label = 0;
    std::uint32_t pred = 0;
    Time decision_time = kNoSpike;
    std::uint64_t cycles = 0;

    friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct BatchReport {
    std::string model;
    std::string dataset;
    std::vector<SampleRecord> samples;
    CycleReport cycles;  // summed over samples, stage totals only
    OpCounters counters;
    MemoryReport memory;
    std::vector<std::uint8_t> uart;  // every result frame, in sample order
    std::size_t oracle_checked = 0;

    std::size_t correct() const {
        std::size_t n = 0;
        for (const auto& s : samples) n += s.pred == s.label;
        return n;
    }
    double accuracy() const { return samples.empty() ? 0.0 : static_cast<double>(correct()) / samples.size(); }
};

namespace detail {

struct WorkerOutput {
    std::vector<SampleRecord> samples;
    std::vector<std::uint8_t> uart;
    CycleReport cycles;
    OpCounters counters;
    std::size_t oracle_checked = 0;
    std::exception_ptr error;
    std::uint32_t failed_at = 0;
};

inline void run_chunk(const NetworkModel& model, const std::vector<std::uint8_t>& image,
                      const std::vector<InputFrame>& frames, const std::vector<std::uint8_t>& labels,
                      std::uint32_t begin, std::uint32_t end, const BatchOptions& options, WorkerOutput& out) {
    RunOptions ro;
    ro.early_stop = options.early_stop;
    ro.costs = options.costs;
    Controller controller(ro, begin);
    controller.handle(Command::load_model(image));
    for (std::uint32_t n = begin; n < end; ++n) {
        out.failed_at = n;
        controller.handle(Command::load_input(frames[n]));
        const Response response = controller.handle(Command::run());
        const InferenceResult& result = *controller.last_result();
        if (options.oracle) {
            const auto level = options.early_stop ? Agreement::Decision : Agreement::Full;
            if (auto diff = first_divergence(result, dense_infer(model, frames[n]), level)) {
                fail(ErrorCode::OracleDivergence, *diff);
            }
            ++out.oracle_checked;
        }
        out.samples.push_back({n, labels[n], result.predicted(), result.decision_time(), result.cycles.total_cycles});
        out.uart.insert(out.uart.end(), response.uart.begin(), response.uart.end());
        out.cycles += result.cycles;
        out.counters += result.counters;
    }
}

}  // namespace detail

/// Runs a dataset through a model. Errors are rethrown with the failing
/// sample index in the message and their original code.
inline BatchReport run_batch(NetworkModel model, const std::vector<InputFrame>& frames,
                             const std::vector<std::uint8_t>& labels, const BatchOptions& options = {}) {
    if (frames.empty()) fail(ErrorCode::CorruptDataset, "dataset has no samples");
    if (frames.size() != labels.size()) {
        fail(ErrorCode::CorruptDataset, std::to_string(frames.size()) + " images but " +
                                            std::to_string(labels.size()) + " labels");
    }
    if (options.t_max) model.t_max = *options.t_max;
    validate(model);
    for (std::size_t n = 0; n < frames.size(); ++n) {
        if (frames[n].size() != model.input_dim()) {
            fail(ErrorCode::DimensionMismatch, "sample " + std::to_string(n) + ": frame has " +
                                                   std::to_string(frames[n].size()) + " pixels, model expects " +
                                                   std::to_string(model.input_dim()));
        }
    }
    const std::vector<std::uint8_t> image = serialize_model(model);

    const auto count = static_cast<std::uint32_t>(frames.size());
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, count));
    std::vector<detail::WorkerOutput> outputs(jobs);
    const auto chunk_begin = [&](unsigned w) { return static_cast<std::uint32_t>(std::uint64_t{count} * w / jobs); };
    const auto work = [&](unsigned w) {
        try {
            detail::run_chunk(model, image, frames, labels, chunk_begin(w), chunk_begin(w + 1), options, outputs[w]);
        } catch (...) {
            outputs[w].error = std::current_exception();
        }
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    }

    BatchReport report;
    report.memory = memory_footprint(model);
    for (auto& out : outputs) {
        if (out.error) {
            try {
                std::rethrow_exception(out.error);
            } catch (const Error& e) {
                fail(e.code(), "sample " + std::to_string(out.failed_at) + ": " + e.what());
            }
        }
        report.samples.insert(report.samples.end(), out.samples.begin(), out.samples.end());
        report.uart.insert(report.uart.end(), out.uart.begin(), out.uart.end());
        report.cycles += out.cycles;
        report.counters += out.counters;
        report.oracle_checked += out.oracle_checked;
    }
    return report;
}

inline nlohmann::ordered_json to_json(const BatchReport& r) {
    nlohmann::ordered_json j;
    j["model"] = r.model;
    j["dataset"] = r.dataset;
    j["n_samples"] = r.samples.size();
    j["accuracy"] = r.accuracy();
    j["total_cycles"] = r.cycles.total_cycles;
    j["cycles_breakdown"] = {{"encode", r.cycles.encode_cycles},
                             {"sort", r.cycles.sort_cycles},
                             {"neuron", r.cycles.neuron_cycles},
                             {"decode", r.cycles.decode_cycles}};
    j["memory"] = {{"binary_bytes", r.memory.binary_weight_bytes},
                   {"fixed_equiv_bytes", r.memory.fixed16_weight_bytes},
                   {"ratio", r.memory.reduction_ratio()}};
    auto& per_sample = j["per_sample"] = nlohmann::ordered_json::array();
    for (const auto& s : r.samples) {
        nlohmann::ordered_json e;
        e["index"] = s.index;
        e["label"] = s.label;
        e["pred"] = s.pred;
        e["decision_time"] = s.decision_time == kNoSpike ? nlohmann::ordered_json(nullptr)
                                                         : nlohmann::ordered_json(s.decision_time);
        e["cycles"] = s.cycles;
        per_sample.push_back(std::move(e));
    }
    return j;
}

}  // namespace spikesoc
