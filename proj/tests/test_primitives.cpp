#include "doctest.h"

#include <random>
#include <set>

#include "oracles.hpp"
#include "wsec/primitives.hpp"
#include "wsec/space_meter.hpp"

using namespace wsec;

namespace {

std::vector<Edge> random_multigraph(std::mt19937_64& rng, VertexId n, std::size_t m) {
    std::vector<Edge> out;
    std::uniform_int_distribution<VertexId> pick(0, n - 1);
    while (out.size() < m) {
        auto u = pick(rng), v = pick(rng);
        if (u != v)
            out.push_back(Edge{u, v, out.size()});
    }
    return out;
}

} // namespace

TEST_CASE("greedy on a path") {
    std::vector<Edge> path{{0, 1, 0}, {1, 2, 1}};
    std::vector<ColorId> palette{ColorId::base(0, 0, 0), ColorId::base(0, 0, 1),
                                 ColorId::base(0, 0, 2)};
    auto colors = greedy_edge_color(path, 2, palette);
    CHECK(colors[0] == palette[0]);
    CHECK(colors[1] == palette[1]);
}

TEST_CASE("greedy separates parallel edges") {
    std::vector<Edge> par{{0, 1, 0}, {1, 0, 1}};
    auto slots = greedy_edge_color(par, 2, 3);
    CHECK(slots == std::vector<std::uint64_t>{0, 1});
}

TEST_CASE("greedy on a triangle matches the exhaustive chromatic index") {
    std::vector<Edge> tri{{0, 1, 0}, {1, 2, 1}, {2, 0, 2}};
    auto slots = greedy_edge_color(tri, 2, 3);
    CHECK(std::set<std::uint64_t>(slots.begin(), slots.end()).size() == 3);
    CHECK(oracle::chromatic_index(tri) == 3);
}

TEST_CASE("greedy follows seq, not position") {
    std::vector<Edge> path{{1, 2, 5}, {0, 1, 2}};
    auto slots = greedy_edge_color(path, 2, 3);
    CHECK(slots[1] == 0);
    CHECK(slots[0] == 1);
}

TEST_CASE("greedy uses at most 2D-1 slots on random multigraphs") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        auto edges = random_multigraph(rng, 2 + rng() % 12, rng() % 60);
        auto D = oracle::max_degree(edges);
        auto slots = greedy_edge_color(edges, D, 2 * std::max<std::uint64_t>(D, 1) - 1);
        std::vector<Emission> out;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            REQUIRE(slots[i] < 2 * D - 1);
            out.push_back(Emission{edges[i], ColorId::base(0, 0, slots[i])});
        }
        REQUIRE(oracle::proper_by_pairs(out));
    }
}

TEST_CASE("greedy rejects an undersized palette and a wrong degree bound") {
    std::vector<Edge> star{{0, 1, 0}, {0, 2, 1}, {0, 3, 2}};
    CHECK_THROWS_AS(greedy_edge_color(star, 3, 4), std::invalid_argument);
    // bound claims 1 but degree is 3: palette of 1 runs out
    CHECK_THROWS_AS(greedy_edge_color(star, 1, 1), InvariantError);
    CHECK(max_degree(star) == 3);
}

TEST_CASE("mod_slot") {
    CHECK(mod_slot(250, 10, 256) == 4);
    CHECK(mod_slot(7, 3, 256) == 10);
    CHECK(mod_slot(0, 0, 512) == 0);
    CHECK(mod_slot(3, -5, 256) == 254);
    static_assert(mod_slot(250, 10, 256) == 4);
}

TEST_CASE("gap_check") {
    CHECK(gap_check(96, 100, 4, 256) == GapOutcome::Leftover);
    CHECK(gap_check(100, 96, 4, 256) == GapOutcome::Leftover);
    CHECK(gap_check(10, 40, 4, 256) == GapOutcome::Pass);
    // boundaries: delta = 2d passes, delta = K-2d passes, one step further fails
    CHECK(gap_check(0, 8, 4, 256) == GapOutcome::Pass);
    CHECK(gap_check(0, 7, 4, 256) == GapOutcome::Leftover);
    CHECK(gap_check(0, 248, 4, 256) == GapOutcome::Pass);
    CHECK(gap_check(0, 249, 4, 256) == GapOutcome::Leftover);
}

TEST_CASE("gap_check is symmetric, exhaustively for K <= 512") {
    for (std::uint64_t k : {64ull, 128ull, 256ull, 512ull})
        for (std::uint64_t d = 1; 4 * d < k; d *= 2)
            for (std::uint64_t ru = 0; ru < k; ru += 3)
                for (std::uint64_t rv = 0; rv < k; ++rv) {
                    auto delta = (rv + k - ru) % k;
                    bool expect_leftover = delta < 2 * d || delta > k - 2 * d;
                    REQUIRE((gap_check(ru, rv, d, k) == GapOutcome::Leftover) == expect_leftover);
                    REQUIRE(gap_check(ru, rv, d, k) == gap_check(rv, ru, d, k));
                }
}

TEST_CASE("RandomSource is a pure function of seed, path and index") {
    RandomSource a(42), b(42);
    auto ca = a.child("offset").child(3);
    auto cb = b.child("offset").child(3);
    for (std::uint64_t i = 0; i < 100; ++i)
        REQUIRE(ca.draw(i) == cb.draw(i));
    // draw order does not matter
    auto late = ca.draw(77);
    for (std::uint64_t i = 0; i < 77; ++i)
        (void)ca.draw(i);
    CHECK(ca.draw(77) == late);
    CHECK(a.child("offset").draw(0) != a.child("sigma").draw(0));
    CHECK(a.child(1).draw(0) != a.child(2).draw(0));
    CHECK(RandomSource(1).draw(0) != RandomSource(2).draw(0));
    CHECK(ca.path() == std::vector<std::string>{"offset", "3"});
}

TEST_CASE("RandomSource::uniform stays in range and covers it") {
    RandomSource r(5);
    for (std::uint64_t bound : {1ull, 2ull, 3ull, 7ull, 256ull, 1000ull}) {
        std::set<std::uint64_t> seen;
        for (std::uint64_t i = 0; i < 20000; ++i) {
            auto x = r.uniform(i, bound);
            REQUIRE(x < bound);
            seen.insert(x);
        }
        CHECK(seen.size() == bound);
    }
}

TEST_CASE("RandomSource::uniform is roughly flat") {
    RandomSource r(9);
    std::vector<int> bins(8, 0);
    const int draws = 80000;
    for (int i = 0; i < draws; ++i)
        ++bins[r.uniform(i, 8)];
    for (int b : bins)
        CHECK(std::abs(b - draws / 8) < 500);
}

TEST_CASE("PaletteWindow") {
    PaletteWindow w(16);
    CHECK_FALSE(w.used(3, Family::B, 5));
    CHECK(w.mark(3, Family::B, 5));
    CHECK_FALSE(w.mark(3, Family::B, 5));
    CHECK(w.used(3, Family::B, 5));
    CHECK_FALSE(w.used(3, Family::C, 5));
    CHECK_FALSE(w.used(4, Family::B, 5));
    CHECK(w.entries() == 1);
    CHECK_THROWS(w.mark(3, Family::B, 16));
    w.clear();
    CHECK(w.entries() == 0);
    CHECK_FALSE(w.used(3, Family::B, 5));
}

TEST_CASE("SpaceMeter tracks current, peak and the breakdown at peak") {
    SpaceMeter m;
    m.add(SpaceCategory::Buffer, 10);
    m.add(SpaceCategory::Offsets, 5);
    m.remove(SpaceCategory::Buffer, 10);
    m.add(SpaceCategory::Counters, 3);
    CHECK(m.current() == 8);
    CHECK(m.peak() == 15);
    CHECK(m.peak(SpaceCategory::Buffer) == 10);
    CHECK(m.at_peak()[static_cast<std::size_t>(SpaceCategory::Buffer)] == 10);
    CHECK(m.at_peak()[static_cast<std::size_t>(SpaceCategory::Counters)] == 0);
    CHECK_THROWS_AS(m.remove(SpaceCategory::Window, 1), InvariantError);
    CHECK(category_name(SpaceCategory::IndexSets) == "index_sets");
}
