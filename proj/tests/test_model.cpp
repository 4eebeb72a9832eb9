#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "wsec/model.hpp"

using namespace wsec;

TEST_CASE("normalize_delta rounds up to a power of four") {
    CHECK(normalize_delta(1) == 1);
    CHECK(normalize_delta(16) == 16);
    CHECK(normalize_delta(20) == 64);
    for (std::uint64_t raw = 1; raw <= 5000; ++raw)
        REQUIRE(normalize_delta(raw) == oracle::power_of_four_at_least(raw));
}

TEST_CASE("sqrt_pow4 and log helpers") {
    CHECK(sqrt_pow4(1) == 1);
    CHECK(sqrt_pow4(64) == 8);
    CHECK(sqrt_pow4(1ull << 40) == (1ull << 20));
    CHECK(floor_log2(1) == 0);
    CHECK(floor_log2(9) == 3);
    CHECK(ceil_log2(1) == 0);
    CHECK(ceil_log2(9) == 4);
    CHECK(ceil_log2(16) == 4);
    CHECK(is_pow2(32));
    CHECK_FALSE(is_pow2(48));
}

TEST_CASE("color strings") {
    CHECK(encode_color(ColorId::base(0, 0, 3)) == "E0.L0.BASE.3");
    CHECK(encode_color(ColorId::family(ColorKind::A, 0, 1, 2, 8, 5, 7)) == "E0.L1.P2.D8.A5.7");
    CHECK(encode_color(ColorId::low(1, 2, 3, 4, 5)) == "E1.L2.P3.I4.LOW.5");

    auto a = decode_color("E0.L1.P2.D8.A5.7");
    CHECK(a.kind == ColorKind::A);
    CHECK(a.phase == 2);
    CHECK(a.d == 8);
    CHECK(a.index == 5);
    CHECK(a.slot == 7);
    CHECK(a.level == 1);
    CHECK(decode_color("E0.L0.BASE.3") == ColorId::base(0, 0, 3));

    CHECK_THROWS_AS(decode_color("E0.L0.XYZ"), ParseError);
    CHECK_THROWS_AS(decode_color("E0.L01.BASE.3"), ParseError);
    CHECK_THROWS_AS(decode_color("E0.L0.BASE.3.4"), ParseError);
    CHECK_THROWS_AS(decode_color(""), ParseError);
}

TEST_CASE("decode inverts encode on random colors") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> small(0, 1000);
    for (int i = 0; i < 2000; ++i) {
        ColorId c;
        switch (rng() % 5) {
        case 0: c = ColorId::base(small(rng), small(rng), small(rng)); break;
        case 1: c = ColorId::low(small(rng), small(rng), small(rng), small(rng), small(rng)); break;
        default:
            c = ColorId::family(static_cast<ColorKind>(2 + rng() % 3), small(rng), small(rng),
                                small(rng), 1ull << (rng() % 20), small(rng) + 1, small(rng));
        }
        REQUIRE(decode_color(encode_color(c)) == c);
    }
}

TEST_CASE("distinct fields give distinct colors") {
    auto a = ColorId::family(ColorKind::B, 0, 0, 1, 8, 3, 5);
    auto b = ColorId::family(ColorKind::C, 0, 0, 1, 8, 3, 5);
    auto c = ColorId::family(ColorKind::B, 1, 0, 1, 8, 3, 5);
    CHECK(a != b);
    CHECK(a != c);
    CHECK(encode_color(a) != encode_color(b));
    CHECK(ColorIdHash{}(a) == ColorIdHash{}(ColorId::family(ColorKind::B, 0, 0, 1, 8, 3, 5)));
}

TEST_CASE("RunConfig validation") {
    auto cfg = make_config(100, 20, 500, 32, 1);
    CHECK(cfg.delta == 64);
    CHECK(cfg.interval_size == 100);
    CHECK(cfg.effective_phase_len() == 8);
    CHECK(cfg.max_depth == default_max_depth(500));
    CHECK(default_max_depth(500) == 4 * 9 + 10);
    CHECK(default_max_depth(0) == 4 * 1 + 10);

    auto bad = cfg;
    bad.kappa = 16;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = cfg;
    bad.kappa = 48;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = cfg;
    bad.delta = 32;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = cfg;
    bad.interval_size = 0;
    CHECK_THROWS_AS(bad.validate(), InputError);

    CHECK(cfg.effective_sigma_seed() == 1);
    cfg.sigma_seed = 9;
    CHECK(cfg.effective_sigma_seed() == 9);
    CHECK(cfg.effective_offset_seed() == 1);
}

TEST_CASE("interval_size_logn") {
    CHECK(interval_size_logn(256) == 256 * 8);
    CHECK(interval_size_logn(100) == 665);  // ceil(100 * 6.6439)
    CHECK(interval_size_logn(1) == 1);
}
