#include "doctest.h"

#include <filesystem>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "wsec/workload.hpp"

using namespace wsec;

TEST_CASE("generator examples") {
    SUBCASE("n=4, delta=1, m=2 is a perfect matching") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto g = gen_multigraph(4, 1, 2, true, seed);
            REQUIRE(g.size() == 2);
            auto deg = oracle::degrees(g);
            REQUIRE(deg.size() == 4);
            for (const auto& [v, d] : deg)
                REQUIRE(d == 1);
        }
    }
    SUBCASE("n=2, delta=3, m=3 with parallels is a triple edge") {
        auto g = gen_multigraph(2, 3, 3, true, 1);
        REQUIRE(g.size() == 3);
        for (const auto& e : g)
            CHECK(std::min(e.u, e.v) == 0);
        CHECK_THROWS_AS(gen_multigraph(2, 3, 3, false, 1), InputError);
    }
    SUBCASE("infeasible requests") {
        CHECK_THROWS_AS(gen_multigraph(4, 1, 3, true, 1), InputError);
        CHECK_THROWS_AS(gen_multigraph(1, 4, 1, true, 1), InputError);
    }
}

TEST_CASE("generated graphs respect the degree bound and simplicity") {
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        for (std::uint64_t delta : {1ull, 4ull, 16ull, 64ull})
            for (bool parallel : {true, false}) {
                const std::uint64_t n = 100, m = n * delta / 2 - (seed % 3);
                auto g = gen_multigraph(n, delta, m, parallel, seed);
                REQUIRE(g.size() == m);
                REQUIRE(oracle::max_degree(g) <= delta);
                std::set<std::pair<VertexId, VertexId>> pairs;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    REQUIRE(g[i].u != g[i].v);
                    REQUIRE(g[i].u < n);
                    REQUIRE(g[i].v < n);
                    REQUIRE(g[i].seq == i);
                    auto fresh = pairs.insert({std::min(g[i].u, g[i].v), std::max(g[i].u, g[i].v)}).second;
                    if (!parallel)
                        REQUIRE(fresh);
                }
            }
}

TEST_CASE("orders") {
    std::vector<Edge> two{{2, 3, 0}, {0, 1, 1}};
    auto sorted = order_stream(two, OrderPolicy::VertexSorted, 0);
    CHECK(sorted[0] == Edge{0, 1, 0});
    CHECK(sorted[1] == Edge{2, 3, 1});

    auto g = gen_multigraph(50, 16, 400, true, 3);
    CHECK(order_stream(g, OrderPolicy::ArrivalRandom, 5) ==
          order_stream(g, OrderPolicy::ArrivalRandom, 5));
    CHECK(order_stream(g, OrderPolicy::ArrivalRandom, 5) !=
          order_stream(g, OrderPolicy::ArrivalRandom, 6));
    for (auto policy : {OrderPolicy::ArrivalRandom, OrderPolicy::VertexSorted,
                        OrderPolicy::DegreeBurst}) {
        auto o = order_stream(g, policy, 1);
        std::vector<Emission> as_out;
        for (std::size_t i = 0; i < o.size(); ++i) {
            REQUIRE(o[i].seq == i);
            as_out.push_back(Emission{o[i], {}});
        }
        // same multiset of endpoint pairs
        auto key = [](std::vector<Edge> v) {
            std::multiset<std::pair<VertexId, VertexId>> s;
            for (const auto& e : v)
                s.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
            return s;
        };
        REQUIRE(key(o) == key(g));
    }
    CHECK(parse_order("degree-burst") == OrderPolicy::DegreeBurst);
    CHECK(order_name(OrderPolicy::VertexSorted) == "vertex-sorted");
    CHECK_THROWS_AS(parse_order("sorted"), InputError);
}

TEST_CASE("degree-burst emits a hub's edges contiguously") {
    // hub 0 of degree 16 plus a sparse background
    std::vector<Edge> g;
    for (VertexId v = 1; v <= 16; ++v)
        g.push_back(Edge{0, v, g.size()});
    for (VertexId v = 17; v < 40; v += 2)
        g.push_back(Edge{v, v + 1, g.size()});
    auto o = order_stream(g, OrderPolicy::DegreeBurst, 2);
    std::vector<std::size_t> at;
    for (std::size_t i = 0; i < o.size(); ++i)
        if (o[i].u == 0 || o[i].v == 0)
            at.push_back(i);
    REQUIRE(at.size() == 16);
    CHECK(at.back() - at.front() == 15);
    CHECK(at.front() == 0);
}

TEST_CASE("stream file round trip") {
    auto g = generate_stream(30, 4, 50, OrderPolicy::ArrivalRandom, true, 1);
    std::stringstream ss;
    write_stream(ss, StreamHeader{30, 4, 50}, g);
    auto back = read_stream(ss);
    CHECK(back.header.n == 30);
    CHECK(back.header.delta == 4);
    CHECK(back.header.m == 50);
    CHECK(back.edges == g);

    auto path = (std::filesystem::temp_directory_path() / "wsec_roundtrip.wse").string();
    write_stream(path, StreamHeader{30, 4, 50}, g);
    CHECK(read_stream(path).edges == g);
    std::filesystem::remove(path);
}

TEST_CASE("stream file errors name the line") {
    auto message = [](const std::string& text) {
        std::istringstream in(text);
        try {
            read_stream(in);
        } catch (const InputError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("wse v1 10 4 2\n0 1\n3 12\n").find("line 3") != std::string::npos);
    CHECK(message("wse v1 10 4 1\n2 2\n").find("line 2") != std::string::npos);
    CHECK(message("wse v1 10 1 2\n0 1\n0 2\n").find("line 3") != std::string::npos);
    CHECK(message("wse v1 10 4 3\n0 1\n") != "no error");
    CHECK(message("wse v1 10 4 1\n0 1\n2 3\n") != "no error");
    CHECK(message("wse v2 10 4 1\n0 1\n") != "no error");
    CHECK(message("wse v1 10 4 1\n0 x\n").find("line 2") != std::string::npos);

    std::istringstream loose("wse v1 10 1 2\n0 1\n0 2\n");
    StreamReader r(loose, false);
    CHECK(r.next().has_value());
    CHECK(r.next().has_value());
    CHECK_FALSE(r.next().has_value());
}

TEST_CASE("colored file round trip") {
    std::vector<Emission> out{{Edge{0, 1, 0}, ColorId::base(0, 0, 3)},
                              {Edge{1, 2, 1}, ColorId::family(ColorKind::C, 1, 2, 3, 8, 4, 9)}};
    std::stringstream ss;
    write_colored(ss, out);
    CHECK(ss.str() == "0 1 0 E0.L0.BASE.3\n1 2 1 E1.L2.P3.D8.C4.9\n");
    CHECK(read_colored(ss) == out);

    std::istringstream bad("0 1 0 E0.L0.BASE.3\n1 2 1 E0.L0.NOPE\n");
    try {
        read_colored(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}
