#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "ssdm/rng.hpp"

TEST_CASE("raw words match the reference Philox4x64-10 stream") {
    // Key (seed, stream) = (42, 7), counter starting at zero. The first two
    // blocks below were verified against an independent Philox
    // implementation; the second block equals numpy.random.Philox's first
    // raw outputs for the same key (numpy begins emitting at counter 1).
    const std::uint64_t expected[12] = {
        0x2fd1bc0d2c8697bbULL, 0x8ee17f67a549bba6ULL, 0x1bdce1f847e7df47ULL,
        0xe123b6bbe4e89f03ULL, 0xa64064f34e84b9a3ULL, 0xe287959a866a08fdULL,
        0x8dc181f009b96c03ULL, 0xf3f6001d4fa83454ULL, 0x69c633ee791df6b3ULL,
        0x89327f7a8f0127a4ULL, 0x1ed8260458996ff6ULL, 0x4299f7433fb1683eULL,
    };
    ssdm::Rng rng(42, 7);
    for (int i = 0; i < 12; ++i) {
        CAPTURE(i);
        CHECK(rng.next_u64() == expected[i]);
    }
}

TEST_CASE("uniforms are the top 53 bits over 2^53") {
    ssdm::Rng rng(42, 7);
    // (0x2fd1bc0d2c8697bb >> 11) * 2^-53
    CHECK(rng.next_uniform() == 0.18679404565457447);

    ssdm::Rng a(42, 7);
    ssdm::Rng b(42, 7);
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t word = a.next_u64();
        const double expected =
            static_cast<double>(word >> 11) * 0x1.0p-53;
        CHECK(b.next_uniform() == expected);
    }
}

TEST_CASE("same key reproduces the same stream") {
    ssdm::Rng a(123456789, 42);
    ssdm::Rng b(123456789, 42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams decorrelate") {
    ssdm::Rng a(42, 0);
    ssdm::Rng b(42, 1);
    int equal = 0;
    for (int i = 0; i < 256; ++i) {
        if (a.next_u64() == b.next_u64()) ++equal;
    }
    CHECK(equal == 0);

    // First words across many streams are all distinct.
    std::set<std::uint64_t> firsts;
    for (std::uint64_t stream = 0; stream < 512; ++stream) {
        firsts.insert(ssdm::Rng(42, stream).next_u64());
    }
    CHECK(firsts.size() == 512);
}

TEST_CASE("uniform moments") {
    ssdm::Rng rng(7, 0);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0, lo = 1.0, hi = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.next_uniform();
        sum += x;
        sumsq += x * x;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 0.005);
    CHECK(std::abs(var - 1.0 / 12.0) < 0.005);
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
}

TEST_CASE("normal moments") {
    ssdm::Rng rng(11, 3);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0, sum3 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.next_normal();
        sum += x;
        sumsq += x * x;
        sum3 += x * x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.05);
    CHECK(std::abs(sum3 / n) < 0.1); // symmetric
}
