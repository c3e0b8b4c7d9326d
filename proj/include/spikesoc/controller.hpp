#pragma once

// Protocol-level model of the control processor: it loads a flash model
// image and input samples into the core, starts inference, raises the
// completion and load-next interrupts, and writes a result frame to the UART.
//
// Command stream (lengths little-endian):
//   0x01 LoadModel  u32 length, image bytes
//   0x02 LoadInput  u16 length, pixel bytes
//   0x03 Run
//   0x0F Reset
//
// UART result frame, 11 bytes:
//   0xA5 | u32 sample index | u8 label | u8 decision time (0xFF = fallback)
//   | u32 total cycles | u8 XOR of the previous 10 bytes

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spikesoc/core.hpp"
#include "spikesoc/flash_image.hpp"

namespace spikesoc {

enum class Phase { Idle, ModelLoaded, InputLoaded, Running, Done };

constexpr std::string_view to_string(Phase p) noexcept {
    switch (p) {
        case Phase::Idle: return "Idle";
        case Phase::ModelLoaded: return "ModelLoaded";
        case Phase::InputLoaded: return "InputLoaded";
        case Phase::Running: return "Running";
        case Phase::Done: return "Done";
    }
    return "?";
}

enum class Interrupt { InferenceDone, LoadNextSample };

enum class CommandKind : std::uint8_t { LoadModel = 0x01, LoadInput = 0x02, Run = 0x03, Reset = 0x0F };

struct Command {
    CommandKind kind = CommandKind::Reset;
    std::vector<std::uint8_t> payload;

    static Command load_model(std::vector<std::uint8_t> image) { return {CommandKind::LoadModel, std::move(image)}; }
    static Command load_input(std::vector<std::uint8_t> pixels) { return {CommandKind::LoadInput, std::move(pixels)}; }
    static Command run() { return {CommandKind::Run, {}}; }
    static Command reset() { return {CommandKind::Reset, {}}; }

    friend bool operator==(const Command&, const Command&) = default;
};

inline constexpr std::uint8_t kUartMarker = 0xA5;
inline constexpr std::size_t kUartFrameBytes = 11;
inline constexpr std::uint8_t kFallbackTime = 0xFF;
/// The cycle field is 24 bits wide and saturates.
inline constexpr std::uint64_t kUartMaxCycles = 0xFFFFFF;

using UartFrame = std::array<std::uint8_t, kUartFrameBytes>;

inline UartFrame format_uart_frame(std::uint32_t sample_index, std::uint32_t label, Time decision_time,
                                   std::uint64_t total_cycles) {
    const auto cycles = static_cast<std::uint32_t>(std::min<std::uint64_t>(total_cycles, kUartMaxCycles));
    UartFrame f{};
    f[0] = kUartMarker;
    for (int k = 0; k < 4; ++k) f[1 + k] = static_cast<std::uint8_t>(sample_index >> (8 * k));
    f[5] = static_cast<std::uint8_t>(label);
    f[6] = decision_time == kNoSpike ? kFallbackTime : static_cast<std::uint8_t>(decision_time);
    for (int k = 0; k < 3; ++k) f[7 + k] = static_cast<std::uint8_t>(cycles >> (8 * k));
    std::uint8_t x = 0;
    for (std::size_t k = 0; k + 1 < kUartFrameBytes; ++k) x ^= f[k];
    f[10] = x;
    return f;
}

inline UartFrame format_uart_frame(std::uint32_t sample_index, const InferenceResult& result) {
    return format_uart_frame(sample_index, result.predicted(), result.decision_time(), result.cycles.total_cycles);
}

struct DecodedUartFrame {
    std::uint32_t sample_index = 0;
    std::uint8_t label = 0;
    std::uint8_t decision_time = 0;
    std::uint32_t total_cycles = 0;
};

/// Parses one frame; nullopt on a bad marker, wrong length or checksum mismatch.
inline std::optional<DecodedUartFrame> parse_uart_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kUartFrameBytes || bytes[0] != kUartMarker) return std::nullopt;
    std::uint8_t x = 0;
    for (std::size_t k = 0; k + 1 < kUartFrameBytes; ++k) x ^= bytes[k];
    if (x != bytes[10]) return std::nullopt;
    DecodedUartFrame d;
    for (int k = 0; k < 4; ++k) d.sample_index |= std::uint32_t{bytes[1 + k]} << (8 * k);
    d.label = bytes[5];
    d.decision_time = bytes[6];
    for (int k = 0; k < 3; ++k) d.total_cycles |= std::uint32_t{bytes[7 + k]} << (8 * k);
    return d;
}

inline std::vector<std::uint8_t> encode_commands(std::span<const Command> commands) {
    std::vector<std::uint8_t> out;
    for (const auto& c : commands) {
        out.push_back(static_cast<std::uint8_t>(c.kind));
        if (c.kind == CommandKind::LoadModel) {
            const auto n = static_cast<std::uint32_t>(c.payload.size());
            for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(n >> (8 * k)));
        } else if (c.kind == CommandKind::LoadInput) {
            if (c.payload.size() > 0xFFFF) fail(ErrorCode::InvalidParameter, "input frame longer than 65535 bytes");
            const auto n = static_cast<std::uint16_t>(c.payload.size());
            out.push_back(static_cast<std::uint8_t>(n));
            out.push_back(static_cast<std::uint8_t>(n >> 8));
        }
        out.insert(out.end(), c.payload.begin(), c.payload.end());
    }
    return out;
}

inline std::vector<Command> parse_command_stream(std::span<const std::uint8_t> bytes) {
    std::vector<Command> commands;
    std::size_t pos = 0;
    const auto need = [&](std::size_t n) {
        if (bytes.size() - pos < n) fail(ErrorCode::ProtocolViolation, "command stream truncated at byte " + std::to_string(pos));
    };
    while (pos < bytes.size()) {
        const std::uint8_t tag = bytes[pos++];
        std::size_t length = 0;
        switch (tag) {
            case 0x01:
                need(4);
                for (int k = 0; k < 4; ++k) length |= std::size_t{bytes[pos + k]} << (8 * k);
                pos += 4;
                break;
            case 0x02:
                need(2);
                length = bytes[pos] | (bytes[pos + 1] << 8);
                pos += 2;
                break;
            case 0x03:
            case 0x0F:
                break;
            default:
                fail(ErrorCode::ProtocolViolation, "unknown command tag " + std::to_string(tag));
        }
        need(length);
        commands.push_back({static_cast<CommandKind>(tag),
                            std::vector<std::uint8_t>(bytes.begin() + pos, bytes.begin() + pos + length)});
        pos += length;
    }
    return commands;
}

struct Response {
    std::vector<Interrupt> interrupts;
    std::vector<std::uint8_t> uart;
    std::vector<Phase> phases;  // every phase entered while handling the command
};

class Controller {
public:
    explicit Controller(RunOptions options = {}, std::uint32_t first_sample_index = 0)
        : options_(options), first_sample_(first_sample_index), next_sample_(first_sample_index) {}

    /// Applies one command. Throws on protocol violations and malformed
    /// payloads, leaving the controller untouched.
    Response handle(const Command& command) {
        Response r;
        switch (command.kind) {
            case CommandKind::LoadModel: {
                NetworkModel model = deserialize_model(command.payload);
                model_ = std::move(model);
                pending_input_.reset();
                next_sample_ = first_sample_;
                enter(Phase::ModelLoaded, r);
                break;
            }
            case CommandKind::LoadInput: {
                if (!model_) violation("LoadInput before LoadModel");
                if (command.payload.size() != model_->input_dim()) {
                    fail(ErrorCode::DimensionMismatch, "input has " + std::to_string(command.payload.size()) +
                                                           " pixels, model expects " +
                                                           std::to_string(model_->input_dim()));
                }
                pending_input_ = command.payload;
                enter(Phase::InputLoaded, r);
                break;
            }
            case CommandKind::Run: {
                if (phase_ != Phase::InputLoaded) violation("Run without a loaded input");
                InferenceResult result = run_network(*model_, *pending_input_, options_);
                enter(Phase::Running, r);
                enter(Phase::Done, r);
                r.interrupts.push_back(Interrupt::InferenceDone);
                const auto frame = format_uart_frame(next_sample_++, result);
                r.uart.assign(frame.begin(), frame.end());
                r.interrupts.push_back(Interrupt::LoadNextSample);
                last_result_ = std::move(result);
                pending_input_.reset();
                enter(Phase::ModelLoaded, r);
                break;
            }
            case CommandKind::Reset:
                model_.reset();
                pending_input_.reset();
                last_result_.reset();
                next_sample_ = first_sample_;
                enter(Phase::Idle, r);
                break;
            default:
                violation("unknown command");
        }
        return r;
    }

    /// Runs a whole encoded command stream and returns the concatenated UART output.
    std::vector<std::uint8_t> replay(std::span<const std::uint8_t> stream) {
        std::vector<std::uint8_t> uart;
        for (const auto& c : parse_command_stream(stream)) {
            auto r = handle(c);
            uart.insert(uart.end(), r.uart.begin(), r.uart.end());
        }
        return uart;
    }

    Phase phase() const noexcept { return phase_; }
    const std::optional<NetworkModel>& model() const noexcept { return model_; }
    const std::optional<InputFrame>& pending_input() const noexcept { return pending_input_; }
    const std::optional<InferenceResult>& last_result() const noexcept { return last_result_; }
    std::uint32_t next_sample_index() const noexcept { return next_sample_; }

private:
    [[noreturn]] void violation(const std::string& what) const {
        fail(ErrorCode::ProtocolViolation, what + " (phase " + std::string(to_string(phase_)) + ")");
    }

    void enter(Phase p, Response& r) {
        phase_ = p;
        r.phases.push_back(p);
    }

    RunOptions options_;
    std::uint32_t first_sample_;
    std::uint32_t next_sample_;
    Phase phase_ = Phase::Idle;
    std::optional<NetworkModel> model_;
    std::optional<InputFrame> pending_input_;
    std::optional<InferenceResult> last_result_;
};

}  // namespace spikesoc
