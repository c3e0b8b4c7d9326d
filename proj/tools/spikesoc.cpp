// spikesoc: command-line harness for the TTFS SNN SoC model.
//
//   spikesoc run       --model M --images I --labels L [--oracle] [--no-early-stop] ...
//   spikesoc gen-model --dims 784,600,10 --mode binary --out M
//   spikesoc gen-data  --count 10 --rows 28 --cols 28 --images I --labels L
//   spikesoc memory    --model M
//   spikesoc replay    --script S [--uart-out U]
//
// Exit codes: 0 success, 1 dataset error, 2 model error, 3 oracle divergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spikesoc/spikesoc.hpp"

namespace {

using namespace spikesoc;

constexpr int kExitOk = 0;
constexpr int kExitDataset = 1;
constexpr int kExitModel = 2;
constexpr int kExitOracle = 3;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotIdx:
        case ErrorCode::CorruptDataset:
        case ErrorCode::DimensionMismatch:
            return kExitDataset;
        case ErrorCode::OracleDivergence:
            return kExitOracle;
        default:
            return kExitModel;
    }
}

NetworkModel load_model_file(const std::string& path) {
    return deserialize_model(read_file(path, ErrorCode::NotAModelImage));
}

struct RunArgs {
    std::string model, images, labels, report_json, breakdown_csv, uart_log;
    bool oracle = false;
    bool no_early_stop = false;
    std::uint32_t t_max = 0;
    double clock_mhz = 163.0;
    unsigned jobs = 1;
};

int cmd_run(const RunArgs& a) {
    const NetworkModel model = load_model_file(a.model);
    const auto frames = load_idx_images(a.images);
    const auto labels = load_idx_labels(a.labels);

    BatchOptions options;
    options.oracle = a.oracle;
    options.early_stop = !a.no_early_stop;
    if (a.t_max != 0) options.t_max = a.t_max;
    options.clock_mhz = a.clock_mhz;
    options.jobs = a.jobs;

    BatchReport report = run_batch(model, frames, labels, options);
    report.model = a.model;
    report.dataset = a.images;

    const std::size_t n = report.samples.size();
    const double mean_cycles = static_cast<double>(report.cycles.total_cycles) / static_cast<double>(n);
    const double latency_ms = cycles_to_ms(static_cast<std::uint64_t>(mean_cycles), a.clock_mhz);
    std::printf("samples        %zu\n", n);
    std::printf("accuracy       %.4f (%zu/%zu)\n", report.accuracy(), report.correct(), n);
    std::printf("mean cycles    %.1f\n", mean_cycles);
    std::printf("latency        %.6f ms @ %.1f MHz\n", latency_ms, a.clock_mhz);
    std::printf("throughput     %.1f fps\n", latency_ms > 0 ? 1000.0 / latency_ms : 0.0);
    std::printf("weights        %llu bytes (fixed16 equivalent %llu, ratio %.2f)\n",
                static_cast<unsigned long long>(report.memory.weight_bytes),
                static_cast<unsigned long long>(report.memory.fixed16_weight_bytes), report.memory.reduction_ratio());
    std::printf("multiplies     %llu\n", static_cast<unsigned long long>(report.counters.multiplications));
    if (a.oracle) std::printf("oracle         %zu/%zu samples agree\n", report.oracle_checked, n);

    if (!a.report_json.empty()) {
        std::ofstream(a.report_json) << to_json(report).dump(2) << '\n';
    }
    if (!a.breakdown_csv.empty()) {
        std::ofstream csv(a.breakdown_csv);
        write_breakdown_csv(csv, report.cycles);
    }
    if (!a.uart_log.empty()) write_file(a.uart_log, report.uart);
    return kExitOk;
}

std::vector<std::uint32_t> parse_dims(const std::string& text) {
    std::vector<std::uint32_t> dims;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string part = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        dims.push_back(static_cast<std::uint32_t>(std::stoul(part)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return dims;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-driven TTFS spiking network SoC model"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Evaluate a model image on an IDX dataset");
    run_cmd->add_option("--model", run.model, "Flash model image")->required();
    run_cmd->add_option("--images", run.images, "IDX image file")->required();
    run_cmd->add_option("--labels", run.labels, "IDX label file")->required();
    run_cmd->add_flag("--oracle", run.oracle, "Cross-check every sample against the dense simulator");
    run_cmd->add_flag("--no-early-stop", run.no_early_stop, "Process the output layer's whole window");
    run_cmd->add_option("--t-max", run.t_max, "Override the inference window (1-256)")->check(CLI::Range(1, 256));
    run_cmd->add_option("--clock-mhz", run.clock_mhz, "Clock used for latency figures")->check(CLI::PositiveNumber);
    run_cmd->add_option("--jobs", run.jobs, "Worker threads")->check(CLI::Range(1, 256));
    run_cmd->add_option("--report-json", run.report_json, "Write the JSON report here");
    run_cmd->add_option("--breakdown-csv", run.breakdown_csv, "Write the stage breakdown CSV here");
    run_cmd->add_option("--uart-log", run.uart_log, "Write the raw UART result frames here");

    std::string dims = "784,600,10", mode = "binary", model_out;
    std::uint32_t gen_t_max = 256;
    std::uint64_t seed = 1;
    auto* gen_model = app.add_subcommand("gen-model", "Write a random model image");
    gen_model->add_option("--dims", dims, "Input width and layer widths, comma separated");
    gen_model->add_option("--mode", mode, "binary or fixed16")->check(CLI::IsMember({"binary", "fixed16"}));
    gen_model->add_option("--t-max", gen_t_max, "Inference window")->check(CLI::Range(1, 256));
    gen_model->add_option("--seed", seed, "RNG seed");
    gen_model->add_option("--out", model_out, "Output path")->required();

    std::uint32_t count = 10, rows = 28, cols = 28, classes = 10;
    std::string images_out, labels_out;
    auto* gen_data = app.add_subcommand("gen-data", "Write a random IDX image/label pair");
    gen_data->add_option("--count", count, "Number of samples")->check(CLI::Range(1u, 1u << 24));
    gen_data->add_option("--rows", rows)->check(CLI::Range(1, 4096));
    gen_data->add_option("--cols", cols)->check(CLI::Range(1, 4096));
    gen_data->add_option("--classes", classes)->check(CLI::Range(1, 256));
    gen_data->add_option("--seed", seed, "RNG seed");
    gen_data->add_option("--images", images_out)->required();
    gen_data->add_option("--labels", labels_out)->required();

    std::string memory_model;
    auto* memory_cmd = app.add_subcommand("memory", "Print the weight and spike memory footprint");
    memory_cmd->add_option("--model", memory_model)->required();

    std::string script, uart_out;
    auto* replay_cmd = app.add_subcommand("replay", "Replay a controller command stream");
    replay_cmd->add_option("--script", script, "Binary command stream")->required();
    replay_cmd->add_option("--uart-out", uart_out, "Write UART output here instead of hex to stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return cmd_run(run);

        if (*gen_model) {
            std::mt19937_64 rng(seed);
            RandomModelSpec spec;
            spec.mode = mode == "binary" ? WeightMode::Binary : WeightMode::Fixed16;
            spec.t_max = gen_t_max;
            spec.dims = parse_dims(dims);
            write_file(model_out, serialize_model(random_model(rng, spec)));
            return kExitOk;
        }

        if (*gen_data) {
            std::mt19937_64 rng(seed);
            ImageSet set{rows, cols, {}};
            std::vector<std::uint8_t> labels(count);
            std::uniform_int_distribution<std::uint32_t> label(0, classes - 1);
            for (std::uint32_t n = 0; n < count; ++n) {
                set.frames.push_back(random_frame(rng, rows * cols));
                labels[n] = static_cast<std::uint8_t>(label(rng));
            }
            write_file(images_out, serialize_idx_images(set));
            write_file(labels_out, serialize_idx_labels(labels));
            return kExitOk;
        }

        if (*memory_cmd) {
            const NetworkModel model = load_model_file(memory_model);
            const MemoryReport m = memory_footprint(model);
            std::printf("layer  in_dim  out_dim  weight_bytes  binary_bytes  fixed16_bytes  ratio\n");
            for (std::size_t l = 0; l < m.layers.size(); ++l) {
                const auto& c = model.layers[l].config;
                const auto& lm = m.layers[l];
                std::printf("%5zu  %6u  %7u  %12llu  %12llu  %13llu  %5.2f\n", l, c.in_dim, c.out_dim,
                            static_cast<unsigned long long>(lm.weight_bytes),
                            static_cast<unsigned long long>(lm.binary_weight_bytes),
                            static_cast<unsigned long long>(lm.fixed16_weight_bytes), lm.reduction_ratio());
            }
            std::printf("total  weights %llu  spikes %llu  all %llu  ratio %.2f\n",
                        static_cast<unsigned long long>(m.weight_bytes), static_cast<unsigned long long>(m.spike_bytes),
                        static_cast<unsigned long long>(m.total_bytes), m.reduction_ratio());
            return kExitOk;
        }

        if (*replay_cmd) {
            Controller controller;
            const auto uart = controller.replay(read_file(script, ErrorCode::ProtocolViolation));
            if (!uart_out.empty()) {
                write_file(uart_out, uart);
            } else {
                for (std::size_t k = 0; k < uart.size(); ++k) {
                    std::printf("%02X%c", uart[k], (k + 1) % kUartFrameBytes == 0 ? '\n' : ' ');
                }
            }
            return kExitOk;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "spikesoc: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "spikesoc: %s\n", e.what());
        return kExitModel;
    }
    return kExitOk;
}
