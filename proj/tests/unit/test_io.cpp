// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstring>

#include "support.hpp"

using namespace symprune;

TEST(Symw, HeaderLayoutIsLittleEndian) {
    const Matrix m{{1, -2, 0.5}, {3, 4, 8}};
    const bytes b = encode_symw(m);
    ASSERT_EQ(b.size(), 6u + 1 + 4 + 4 + 6 * 4);
    EXPECT_EQ(std::memcmp(b.data(), "SYMW1\0", 6), 0);
    EXPECT_EQ(b[6], 1);
    EXPECT_EQ(b[7], 2);
    EXPECT_EQ(b[8], 0);
    EXPECT_EQ(b[11], 3);
    // -2.0f = 0xc0000000, second value of row 0
    EXPECT_EQ(b[15 + 4], 0x00);
    EXPECT_EQ(b[15 + 7], 0xc0);
}

TEST(Symw, RoundTripAtF32Precision) {
    std::mt19937_64 eng(1);
    const Matrix m = testing_support::random_matrix(eng, 5, 7, -10, 10);
    const Matrix back = decode_symw(encode_symw(m));
    EXPECT_EQ(back, round_to_f32(m));
    EXPECT_EQ(encode_symw(back), encode_symw(m));
}

TEST(Symw, RejectsBadInput) {
    bytes b = encode_symw(Matrix{{1, 2}});
    bytes wrong_magic = b;
    wrong_magic[0] = 'X';
    EXPECT_THROW(decode_symw(wrong_magic), format_error);
    bytes wrong_dtype = b;
    wrong_dtype[6] = 2;
    EXPECT_THROW(decode_symw(wrong_dtype), format_error);
    bytes truncated(b.begin(), b.end() - 1);
    EXPECT_THROW(decode_symw(truncated), format_error);
    bytes trailing = b;
    trailing.push_back(0);
    EXPECT_THROW(decode_symw(trailing), format_error);
    bytes nan = b;
    const float q = std::nanf("");
    std::memcpy(nan.data() + 15, &q, 4);
    EXPECT_THROW(decode_symw(nan), format_error);
}

TEST(Symw, FileRoundTrip) {
    const auto dir = testing_support::scratch_dir("symw");
    const Matrix m{{0.25, -1}, {2, 3}};
    save_symw(dir / "m.symw", m);
    EXPECT_EQ(load_symw(dir / "m.symw"), m);
    EXPECT_THROW(load_symw(dir / "missing.symw"), format_error);
}
