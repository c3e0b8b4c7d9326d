#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "reference.hpp"
#include "spikesoc/core.hpp"
#include "spikesoc/synth.hpp"

using namespace spikesoc;

namespace {

struct RandomLayer {
    Layer layer;
    ref::DenseLayer dense;
};

RandomLayer random_binary_layer(std::mt19937_64& rng, std::uint32_t in, std::uint32_t out) {
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<int> w(std::size_t{in} * out);
    for (auto& x : w) x = coin(rng) ? 1 : -1;
    RandomLayer r;
    r.layer.config = {in, out, UFixed8_8::from_int(1), 0};
    r.layer.weights = WeightMatrix::binary_from_dense(in, out, w);
    r.dense = {in, out, std::vector<std::int64_t>(w.begin(), w.end())};
    return r;
}

RandomLayer random_fixed_layer(std::mt19937_64& rng, std::uint32_t in, std::uint32_t out, int range) {
    std::uniform_int_distribution<int> dist(-range, range);
    std::vector<std::int16_t> w(std::size_t{in} * out);
    for (auto& x : w) x = static_cast<std::int16_t>(dist(rng));
    RandomLayer r;
    r.layer.config = {in, out, UFixed8_8::from_int(1), 0};
    r.layer.weights = WeightMatrix::fixed16(in, out, w);
    r.dense = {in, out, std::vector<std::int64_t>(w.begin(), w.end())};
    return r;
}

Layer single_layer(std::uint32_t in, std::uint32_t out, std::vector<int> dense, std::int32_t threshold,
                   UFixed8_8 alpha = UFixed8_8::from_int(1)) {
    return {{in, out, alpha, threshold}, WeightMatrix::binary_from_dense(in, out, dense)};
}

NetworkModel one_layer_model(Layer layer, std::uint32_t t_max = 256) {
    NetworkModel m;
    m.t_max = t_max;
    m.mode = layer.weights.mode();
    m.layers.push_back(std::move(layer));
    return m;
}

}  // namespace

TEST(AccumulateBinary, AddsAndSubtractsPerBit) {
    const auto layer = single_layer(3, 1, {1, -1, 1}, 100);
    NeuronState s(1);
    OpCounters c;
    for (std::uint32_t i = 0; i < 3; ++i) accumulate_event_binary(s, layer.weights, i, c);
    EXPECT_EQ(s.potentials[0], 1);
    EXPECT_EQ(c.additions, 2u);
    EXPECT_EQ(c.subtractions, 1u);
    EXPECT_EQ(c.multiplications, 0u);
}

TEST(AccumulateBinary, FiredNeuronIsFrozen) {
    const auto layer = single_layer(2, 2, {1, 1, 1, 1}, 100);
    NeuronState s(2);
    s.fired[1] = true;
    s.fire_times[1] = 0;
    s.potentials[1] = 7;
    OpCounters c;
    accumulate_event_binary(s, layer.weights, 0, c);
    EXPECT_EQ(s.potentials[0], 1);
    EXPECT_EQ(s.potentials[1], 7);
    EXPECT_EQ(c.additions, 1u);
}

TEST(AccumulateBinary, MatchesDenseAccumulation) {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const auto r = random_binary_layer(rng, 64, 8);
        std::uniform_int_distribution<std::uint32_t> pre(0, 63);
        std::vector<std::int64_t> arrivals(64, 0);
        NeuronState s(8);
        OpCounters c;
        for (int e = 0; e < 100; ++e) {
            const auto i = pre(rng);
            ++arrivals[i];
            accumulate_event_binary(s, r.layer.weights, i, c);
        }
        for (std::uint32_t j = 0; j < 8; ++j) {
            std::int64_t expect = 0;
            for (std::uint32_t i = 0; i < 64; ++i) expect += r.dense.at(j, i) * arrivals[i];
            ASSERT_EQ(s.potentials[j], expect);
        }
        EXPECT_EQ(c.additions + c.subtractions, 800u);
    }
}

TEST(AccumulateFixed16, Examples) {
    NeuronState s(1);
    OpCounters c;
    const std::vector<std::int16_t> one{300};
    accumulate_event_fixed16(s, WeightMatrix::fixed16(1, 1, one), 0, c);
    EXPECT_EQ(s.potentials[0], 300);
    EXPECT_EQ(c.multiplications, 1u);

    NeuronState t(1);
    const std::vector<std::int16_t> extremes{-32768, 32767};
    const auto m = WeightMatrix::fixed16(2, 1, extremes);
    accumulate_event_fixed16(t, m, 0, c);
    accumulate_event_fixed16(t, m, 1, c);
    EXPECT_EQ(t.potentials[0], -1);
}

TEST(AccumulateFixed16, MatchesDenseMatrixVector) {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        const auto r = random_fixed_layer(rng, 128, 10, 32767);
        std::bernoulli_distribution arrives(0.5);
        NeuronState s(10);
        OpCounters c;
        std::vector<std::int64_t> x(128, 0);
        for (std::uint32_t i = 0; i < 128; ++i) {
            if (!arrives(rng)) continue;
            x[i] = 1;
            accumulate_event_fixed16(s, r.layer.weights, i, c);
        }
        for (std::uint32_t j = 0; j < 10; ++j) {
            std::int64_t expect = 0;
            for (std::uint32_t i = 0; i < 128; ++i) expect += r.dense.at(j, i) * x[i];
            ASSERT_EQ(s.potentials[j], expect);
        }
    }
}

TEST(AccumulateFixed16, OverflowIsReported) {
    NeuronState s(1);
    s.potentials[0] = std::numeric_limits<std::int32_t>::max() - 10;
    OpCounters c;
    const std::vector<std::int16_t> w{100};
    EXPECT_EQ(ref::code_of([&] { accumulate_event_fixed16(s, WeightMatrix::fixed16(1, 1, w), 0, c); }),
              ErrorCode::AccumulatorOverflow);
}

TEST(FireCheck, FiresAtThresholdAndRecordsTime) {
    NeuronState s(1);
    s.potentials[0] = 1;
    EXPECT_TRUE(fire_check(s, 2, 5).empty());
    s.potentials[0] = 2;
    EXPECT_EQ(fire_check(s, 2, 7), (std::vector<std::uint32_t>{0}));
    EXPECT_EQ(s.fire_times[0], 7);
    EXPECT_TRUE(s.fired[0]);
    EXPECT_TRUE(fire_check(s, 2, 8).empty());
    EXPECT_EQ(s.fire_times[0], 7);
}

TEST(FireCheck, ZeroThresholdUsesGreaterOrEqual) {
    const auto layer = single_layer(2, 1, {-1, 1}, 0);
    const EventQueue q{{0, 3}, {1, 4}};
    OpCounters c;
    const auto run = run_layer(q, WeightMode::Binary, layer, c);
    EXPECT_EQ(run.state.fire_times[0], 4);
    EXPECT_EQ(run.state.potentials[0], 0);
}

TEST(FireCheck, ScansAscendingAndReportsSimultaneousFires) {
    NeuronState s(4);
    s.potentials = {3, 0, 5, 3};
    EXPECT_EQ(fire_check(s, 3, 1), (std::vector<std::uint32_t>{0, 2, 3}));
}

TEST(FireCheck, AlphaFoldMatchesUnitAlpha) {
    const EventQueue q{{0, 1}, {1, 2}, {2, 6}, {3, 9}};
    const auto folded = single_layer(4, 2, {1, 1, -1, 1, 1, -1, 1, 1}, 4, UFixed8_8::from_int(2));
    const auto plain = single_layer(4, 2, {1, 1, -1, 1, 1, -1, 1, 1}, 2);
    OpCounters c;
    const auto a = run_layer(q, WeightMode::Binary, folded, c);
    const auto b = run_layer(q, WeightMode::Binary, plain, c);
    EXPECT_EQ(a.state, b.state);
    EXPECT_EQ(a.state.fire_times[0], 2);
}

TEST(RunLayer, EmptyQueueLeavesEverythingSilent) {
    const auto layer = single_layer(4, 3, std::vector<int>(12, 1), 1);
    OpCounters c;
    const auto run = run_layer({}, WeightMode::Binary, layer, c);
    EXPECT_EQ(run.state.fire_times, SpikeTrain(3, kNoSpike));
    EXPECT_EQ(run.state.potentials, std::vector<std::int32_t>(3, 0));
}

TEST(RunLayer, CrossesOnSecondEvent) {
    const auto layer = single_layer(2, 1, {1, 1}, 2);
    OpCounters c;
    const auto run = run_layer({{0, 3}, {1, 9}}, WeightMode::Binary, layer, c);
    EXPECT_EQ(run.state.fire_times[0], 9);
}

TEST(RunLayer, SkipsEventsOnceAllNeuronsFired) {
    const auto layer = single_layer(4, 1, {1, 1, 1, 1}, 1);
    const EventQueue q{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    OpCounters c;
    const auto run = run_layer(q, WeightMode::Binary, layer, c);
    EXPECT_EQ(run.state.fire_times[0], 0);
    EXPECT_EQ(run.processed, 1u);
    EXPECT_EQ(run.skipped, 3u);
    EXPECT_EQ(c.events_skipped, 3u);

    OpCounters d;
    const auto full = run_layer(q, WeightMode::Binary, layer, d, {.skip_when_all_fired = false});
    EXPECT_EQ(full.state, run.state);
    EXPECT_EQ(full.processed, 4u);
}

TEST(RunLayer, RejectsOutOfRangeEvents) {
    const auto layer = single_layer(2, 1, {1, 1}, 2);
    OpCounters c;
    EXPECT_EQ(ref::code_of([&] { run_layer({{2, 0}}, WeightMode::Binary, layer, c); }),
              ErrorCode::DimensionMismatch);
}

TEST(RunLayer, MatchesDenseSweepOnRandomInstances) {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<std::uint32_t> dim(1, 64);
    std::uniform_int_distribution<int> thr(-3, 12);
    for (int n = 0; n < 1000; ++n) {
        const std::uint32_t t_max = n % 3 == 0 ? 16 : n % 3 == 1 ? 64 : 256;
        const std::uint32_t in = dim(rng), out = dim(rng);
        auto r = n % 2 ? random_fixed_layer(rng, in, out, 50) : random_binary_layer(rng, in, out);
        const WeightMode mode = n % 2 ? WeightMode::Fixed16 : WeightMode::Binary;
        r.layer.config.threshold = thr(rng) * (mode == WeightMode::Fixed16 ? 20 : 1);
        const SpikeTrain input = ref::random_train(rng, in, t_max);
        OpCounters c;
        const auto run = run_layer(sort_spikes(input, t_max), mode, r.layer, c);
        const auto sweep = ref::sweep_layer(r.dense, input, t_max, r.layer.config.threshold);
        ASSERT_EQ(run.state.fire_times, sweep.fire_times) << "instance " << n;
        for (std::uint32_t j = 0; j < out; ++j) ASSERT_EQ(run.state.potentials[j], sweep.potentials[j]);
        for (std::uint32_t j = 0; j < out; ++j) ASSERT_EQ(run.state.fired[j], run.state.fire_times[j] != kNoSpike);
    }
}

TEST(RunLayer, SameTimestepOrderDoesNotMatter) {
    std::mt19937_64 rng(33);
    for (int n = 0; n < 200; ++n) {
        const auto r = random_binary_layer(rng, 48, 12);
        auto layer = r.layer;
        layer.config.threshold = 2;
        const EventQueue q = sort_spikes(ref::random_train(rng, 48, 16, 0.2), 16);
        EventQueue shuffled = q;
        for (auto first = shuffled.begin(); first != shuffled.end();) {
            auto last = std::find_if(first, shuffled.end(), [&](const SpikeEvent& e) { return e.time != first->time; });
            std::shuffle(first, last, rng);
            first = last;
        }
        OpCounters c;
        ASSERT_EQ(run_layer(q, WeightMode::Binary, layer, c).state,
                  run_layer(shuffled, WeightMode::Binary, layer, c).state);
    }
}

TEST(RunNetwork, AllZeroFrameFallsBackToClassZero) {
    const auto model = one_layer_model(single_layer(16, 3, std::vector<int>(48, 1), 1));
    const auto r = run_network(model, InputFrame(16, 0));
    EXPECT_EQ(r.predicted(), 0u);
    EXPECT_EQ(r.decision_time(), kNoSpike);
    EXPECT_EQ(r.counters.events_processed, 0u);
}

TEST(RunNetwork, FirstRowWinsOnBrightFrame) {
    std::vector<int> w(32, 1);
    std::fill(w.begin() + 16, w.end(), -1);
    const auto model = one_layer_model(single_layer(16, 2, w, 1));
    const auto r = run_network(model, InputFrame(16, 255));
    EXPECT_EQ(r.predicted(), 0u);
    EXPECT_EQ(r.decision_time(), 0);
}

TEST(RunNetwork, BinaryModeNeverMultipliesAndFiresOnce) {
    std::mt19937_64 rng(41);
    for (int n = 0; n < 200; ++n) {
        const auto model = random_model(rng, {WeightMode::Binary, 64, {32, 24, 16, 5}});
        const auto r = run_network(model, random_frame(rng, 32));
        ASSERT_EQ(r.counters.multiplications, 0u);
        for (const auto& layer : r.layers) {
            for (std::uint32_t j = 0; j < layer.size(); ++j) {
                ASSERT_EQ(layer.fired[j], layer.fire_times[j] != kNoSpike);
                if (layer.fired[j]) {
                    ASSERT_LT(layer.fire_times[j], 64);
                }
            }
        }
    }
}

TEST(RunNetwork, EarlyStopKeepsDecisionAndNeverCostsMore) {
    std::mt19937_64 rng(43);
    for (int n = 0; n < 300; ++n) {
        const WeightMode mode = n % 2 ? WeightMode::Fixed16 : WeightMode::Binary;
        const auto model = random_model(rng, {mode, 256, {40, 20, 6}});
        const auto frame = random_frame(rng, 40);
        RunOptions off;
        off.early_stop = false;
        off.skip_when_all_fired = false;
        const auto fast = run_network(model, frame);
        const auto full = run_network(model, frame, off);
        ASSERT_EQ(fast.decision, full.decision);
        ASSERT_LE(fast.cycles.total_cycles, full.cycles.total_cycles);
        ASSERT_EQ(fast.layers.front(), full.layers.front());
    }
}

TEST(RunNetwork, ReportsCycleBreakdown) {
    const auto model = one_layer_model(single_layer(16, 2, std::vector<int>(32, 1), 100), 256);
    RunOptions o;
    o.early_stop = false;
    const auto r = run_network(model, InputFrame(16, 9), o);
    EXPECT_EQ(r.cycles.encode_cycles, 16u);
    EXPECT_EQ(r.cycles.sort_cycles, 256u + 16u);
    EXPECT_EQ(r.cycles.neuron_cycles, 16u * 2u);
    EXPECT_EQ(r.cycles.decode_cycles, 2u);
    EXPECT_EQ(r.cycles.total_cycles, 16u + 272u + 32u + 2u);
}

TEST(RunNetwork, RejectsWrongFrameSize) {
    const auto model = one_layer_model(single_layer(16, 2, std::vector<int>(32, 1), 1));
    EXPECT_EQ(ref::code_of([&] { run_network(model, InputFrame(15, 1)); }), ErrorCode::DimensionMismatch);
}
