#pragma once

// Random models and frames for property tests, benchmarks and smoke runs.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "spikesoc/model.hpp"

namespace spikesoc {

struct RandomModelSpec {
    WeightMode mode = WeightMode::Binary;
    std::uint32_t t_max = kMaxTimesteps;
    std::vector<std::uint32_t> dims;  // input width followed by every layer's out_dim
};

/// Draws weights, alpha and a threshold scaled so that a typical layer sees a
/// mix of firing and silent neurons.
template <typename Rng>
NetworkModel random_model(Rng& rng, const RandomModelSpec& spec) {
    if (spec.dims.size() < 2) fail(ErrorCode::InvalidParameter, "need an input width and at least one layer");
    NetworkModel model;
    model.mode = spec.mode;
    model.t_max = spec.t_max;

    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<std::uint32_t> alpha_raw(32, 1024);
    for (std::size_t l = 0; l + 1 < spec.dims.size(); ++l) {
        LayerConfig cfg;
        cfg.in_dim = spec.dims[l];
        cfg.out_dim = spec.dims[l + 1];
        const std::size_t n = std::size_t{cfg.in_dim} * cfg.out_dim;
        const auto spread = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(cfg.in_dim))));

        WeightMatrix weights;
        std::int64_t target;  // threshold in raw accumulator units
        if (spec.mode == WeightMode::Binary) {
            std::vector<int> dense(n);
            for (auto& w : dense) w = coin(rng) ? 1 : -1;
            weights = WeightMatrix::binary_from_dense(cfg.in_dim, cfg.out_dim, dense);
            target = std::uniform_int_distribution<std::int64_t>(-2, spread + 1)(rng);
        } else {
            // mostly modest weights, occasionally the full 16-bit range
            const std::int32_t range = std::uniform_int_distribution<int>(0, 7)(rng) == 0 ? 32767 : 300;
            std::uniform_int_distribution<std::int32_t> wdist(-range, range);
            std::vector<std::int16_t> dense(n);
            for (auto& w : dense) w = static_cast<std::int16_t>(wdist(rng));
            if (range == 32767 && n >= 2) {
                dense[0] = -32768;
                dense[n - 1] = 32767;
            }
            weights = WeightMatrix::fixed16(cfg.in_dim, cfg.out_dim, dense);
            target = std::uniform_int_distribution<std::int64_t>(-range, range * (spread + 1))(rng);
        }

        cfg.alpha = UFixed8_8::from_raw(static_cast<std::uint16_t>(alpha_raw(rng)));
        if (spec.mode == WeightMode::Binary) {
            // store threshold = target * alpha so the folded threshold lands near target
            target = static_cast<std::int64_t>(std::llround(static_cast<double>(target) * cfg.alpha.value()));
        }
        cfg.threshold = static_cast<std::int32_t>(target);
        model.layers.push_back({cfg, std::move(weights)});
    }
    validate(model);
    return model;
}

/// Pixels are zero with a per-frame probability, otherwise uniform in [1, 255].
template <typename Rng>
InputFrame random_frame(Rng& rng, std::uint32_t size) {
    const double zero_prob = std::uniform_real_distribution<double>(0.0, 0.9)(rng);
    std::bernoulli_distribution is_zero(zero_prob);
    std::uniform_int_distribution<int> level(1, 255);
    InputFrame frame(size);
    for (auto& p : frame) p = is_zero(rng) ? 0 : static_cast<std::uint8_t>(level(rng));
    return frame;
}

}  // namespace spikesoc
