#include <doctest.h>

#include <cmath>

#include "klconst/rng.hpp"

using namespace klconst;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using B = PhiloxStream::Block;
    using K = PhiloxStream::Key;
    CHECK(PhiloxStream::philox(B{0, 0, 0, 0}, K{0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(PhiloxStream::philox(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(PhiloxStream::philox(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    PhiloxStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
        CHECK(x != d.next_u64());
    }
}

TEST_CASE("uniform_index stays in range and is roughly uniform") {
    PhiloxStream rng(1, 0);
    std::vector<int> counts(6, 0);
    for (int i = 0; i < 60000; ++i) {
        const auto k = rng.uniform_index(6);
        REQUIRE(k < 6);
        ++counts[k];
    }
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("complex normal moments") {
    PhiloxStream rng(2, 0);
    const int n = 200000;
    double re = 0, im = 0, pow = 0, cross = 0;
    for (int i = 0; i < n; ++i) {
        const cdouble z = rng.complex_normal(2.5);
        re += z.real();
        im += z.imag();
        pow += std::norm(z);
        cross += z.real() * z.imag();
    }
    CHECK(std::abs(re / n) < 0.02);
    CHECK(std::abs(im / n) < 0.02);
    CHECK(pow / n == doctest::Approx(2.5).epsilon(0.02));
    CHECK(std::abs(cross / n) < 0.02);
}
