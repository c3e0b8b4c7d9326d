#include <gtest/gtest.h>

#include <vector>

#include "reference.hpp"
#include "spikesoc/encoder.hpp"

using namespace spikesoc;

TEST(EncodeTtfs, Examples) {
    EXPECT_EQ(encode_pixel(255, 256), 0);
    EXPECT_EQ(encode_pixel(200, 256), 55);
    EXPECT_EQ(encode_pixel(0, 256), kNoSpike);
    EXPECT_EQ(encode_pixel(131, 128), 62);
}

TEST(EncodeTtfs, ZeroPixelPolicy) {
    EXPECT_EQ(encode_pixel(0, 256, ZeroPixelPolicy::LastTimestep), 255);
    EXPECT_EQ(encode_pixel(0, 64, ZeroPixelPolicy::LastTimestep), 63);
    EXPECT_EQ(encode_pixel(0, 64, ZeroPixelPolicy::NoSpike), kNoSpike);
}

TEST(EncodeTtfs, ComplementAtFullWindow) {
    for (int p = 1; p < 256; ++p) {
        EXPECT_EQ(encode_pixel(static_cast<std::uint8_t>(p), 256), 255 - p);
        EXPECT_EQ(encode_pixel(static_cast<std::uint8_t>(p), 256),
                  static_cast<std::uint8_t>(~static_cast<std::uint8_t>(p)));
    }
}

TEST(EncodeTtfs, ShiftRuleForShortWindows) {
    // 16 buckets keep the top 4 bits
    EXPECT_EQ(encode_pixel(0xF0, 16), 0);
    EXPECT_EQ(encode_pixel(0x0F, 16), 15);
    EXPECT_EQ(encode_pixel(0x10, 16), 14);
    // non-power-of-two windows keep floor(log2) bits and end at t_max - 1
    EXPECT_EQ(encode_pixel(255, 200), 72);
    EXPECT_EQ(encode_pixel(1, 200), 199);
    EXPECT_EQ(encode_pixel(1, 1), 0);
}

TEST(EncodeTtfs, MonotoneAndInRange) {
    for (std::uint32_t t_max : {1u, 2u, 16u, 64u, 100u, 128u, 200u, 256u}) {
        for (int p1 = 1; p1 < 256; ++p1) {
            const Time t1 = encode_pixel(static_cast<std::uint8_t>(p1), t_max);
            ASSERT_LT(t1, t_max);
            for (int p2 = 1; p2 < p1; ++p2) {
                const Time t2 = encode_pixel(static_cast<std::uint8_t>(p2), t_max);
                ASSERT_LE(t1, t2) << "t_max " << t_max;
                if (t_max == 256) {
                    ASSERT_LT(t1, t2);
                }
            }
        }
    }
}

TEST(EncodeTtfs, FrameLengthMustMatch) {
    const InputFrame frame{1, 2, 3};
    EXPECT_EQ(ref::code_of([&] { encode_ttfs(frame, 4, 256); }), ErrorCode::DimensionMismatch);
    EXPECT_EQ(encode_ttfs(frame, 3, 256), (SpikeTrain{254, 253, 252}));
}
