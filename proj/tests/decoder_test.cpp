#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "reference.hpp"
#include "spikesoc/decoder.hpp"

using namespace spikesoc;

namespace {

Decision decode_v(const SpikeTrain& t, const std::vector<std::int32_t>& v) { return decode(t, v); }

}  // namespace

TEST(Decode, EarliestSpikeWins) {
    EXPECT_EQ(decode_v({10, 3, 7}, {0, 0, 0}), (Decision{1, 3}));
}

TEST(Decode, SilentLayerFallsBackToMaxPotential) {
    const auto d = decode_v({kNoSpike, kNoSpike, kNoSpike}, {5, 9, 2});
    EXPECT_EQ(d, (Decision{1, kNoSpike}));
    EXPECT_TRUE(d.fallback());
}

TEST(Decode, TiesGoToLowestIndex) {
    EXPECT_EQ(decode_v({4, 4}, {-100, 100}), (Decision{0, 4}));
    EXPECT_EQ(decode_v({kNoSpike, kNoSpike, kNoSpike}, {3, 7, 7}), (Decision{1, kNoSpike}));
    EXPECT_EQ(decode_v({kNoSpike, kNoSpike}, {0, 0}), (Decision{0, kNoSpike}));
}

TEST(Decode, SpikeBeatsLargerPotential) {
    EXPECT_EQ(decode_v({kNoSpike, 200}, {1000, -5}), (Decision{1, 200}));
}

TEST(Decode, RejectsEmptyOrMismatchedInputs) {
    EXPECT_EQ(ref::code_of([] { decode_v({}, {}); }), ErrorCode::DimensionMismatch);
    EXPECT_EQ(ref::code_of([] { decode_v({1, 2}, {0}); }), ErrorCode::DimensionMismatch);
}

TEST(Decode, FallbackArgmaxIsShiftInvariant) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::int32_t> v(-1000, 1000), shift(-100000, 100000);
    std::uniform_int_distribution<std::size_t> len(1, 20);
    for (int n = 0; n < 1000; ++n) {
        std::vector<std::int32_t> p(len(rng));
        for (auto& x : p) x = v(rng);
        const SpikeTrain silent(p.size(), kNoSpike);
        const auto d = decode(silent, p);
        const std::int32_t s = shift(rng);
        for (auto& x : p) x += s;
        ASSERT_EQ(decode(silent, p), d);
        ASSERT_LT(d.label, p.size());
        ASSERT_TRUE(d.fallback());
    }
}
