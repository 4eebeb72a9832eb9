#include "wsec/workload.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "wsec/primitives.hpp"

namespace wsec {

namespace {

using Pair = std::pair<VertexId, VertexId>;

Pair norm(VertexId a, VertexId b) { return {std::min(a, b), std::max(a, b)}; }

/// Vertices with spare degree capacity, with O(1) removal.
class Capacity {
public:
    Capacity(std::uint64_t n, std::uint64_t delta) : cap_(n, delta), pos_(n) {
        if (delta > 0)
            for (VertexId v = 0; v < n; ++v) {
                pos_[v] = avail_.size();
                avail_.push_back(v);
            }
    }
    std::size_t size() const { return avail_.size(); }
    VertexId at(std::size_t i) const { return avail_[i]; }
    std::uint64_t cap(VertexId v) const { return cap_[v]; }
    void use(VertexId v) {
        if (--cap_[v] == 0) {
            auto i = pos_[v];
            auto last = avail_.back();
            avail_[i] = last;
            pos_[last] = i;
            avail_.pop_back();
        }
    }

private:
    std::vector<std::uint64_t> cap_;
    std::vector<std::size_t> pos_;
    std::vector<VertexId> avail_;
};

std::uint64_t parse_field(std::string_view tok, std::uint64_t line, const char* field) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(field, "line " + std::to_string(line) + ": bad " + field + " '" +
                                    std::string(tok) + "'");
    return v;
}

std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r'))
            ++i;
        auto start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r')
            ++i;
        if (i > start)
            out.push_back(s.substr(start, i - start));
    }
    return out;
}

} // namespace

std::vector<Edge> gen_multigraph(std::uint64_t n, std::uint64_t delta, std::uint64_t m,
                                 bool allow_parallel, std::uint64_t seed) {
    if (2 * m > n * delta)
        throw InputError("infeasible: m=" + std::to_string(m) + " exceeds n*delta/2=" +
                         std::to_string(n * delta / 2));
    if (m > 0 && n < 2)
        throw InputError("need at least two vertices for a loopless edge");

    auto rng = RandomSource(seed).child("gen").engine();
    Capacity capacity(n, delta);
    std::vector<Pair> edges;
    edges.reserve(m);
    std::multiset<Pair> present;

    auto pick = [&](std::size_t bound) {
        return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng);
    };
    auto exists = [&](VertexId a, VertexId b) { return present.contains(norm(a, b)); };
    auto add = [&](VertexId a, VertexId b) {
        edges.emplace_back(a, b);
        present.insert(norm(a, b));
        capacity.use(a);
        capacity.use(b);
    };

    // Splits a random edge (c, e) away from {x, y} into (x, c) and (y, e).
    auto repair = [&](VertexId x, VertexId y) {
        for (int attempt = 0; attempt < 4096 && !edges.empty(); ++attempt) {
            auto idx = pick(edges.size());
            auto [c, e] = edges[idx];
            if (pick(2))
                std::swap(c, e);
            if (c == x || c == y || e == x || e == y)
                continue;
            if (!allow_parallel && (exists(x, c) || exists(y, e)))
                continue;
            present.erase(present.find(norm(edges[idx].first, edges[idx].second)));
            edges[idx] = {x, c};
            present.insert(norm(x, c));
            edges.emplace_back(y, e);
            present.insert(norm(y, e));
            capacity.use(x);
            capacity.use(y);
            return true;
        }
        return false;
    };

    std::uint64_t rejections = 0;
    while (edges.size() < m) {
        if (capacity.size() >= 2) {
            auto i = pick(capacity.size());
            auto j = pick(capacity.size() - 1);
            if (j >= i)
                ++j;
            auto a = capacity.at(i), b = capacity.at(j);
            if (allow_parallel || !exists(a, b)) {
                add(a, b);
                rejections = 0;
                continue;
            }
            if (++rejections < 64)
                continue;
            if (!repair(a, b))
                throw InputError("could not complete a simple graph with these parameters");
            rejections = 0;
        } else if (capacity.size() == 1 && capacity.cap(capacity.at(0)) >= 2) {
            auto x = capacity.at(0);
            if (!repair(x, x))
                throw InputError("could not place remaining degree without self-loops");
        } else {
            throw InputError("degree capacity exhausted before reaching m edges");
        }
    }

    std::vector<Edge> out;
    out.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i)
        out.push_back(Edge{edges[i].first, edges[i].second, i});
    return out;
}

std::string_view order_name(OrderPolicy p) noexcept {
    switch (p) {
    case OrderPolicy::ArrivalRandom: return "arrival-random";
    case OrderPolicy::VertexSorted: return "vertex-sorted";
    case OrderPolicy::DegreeBurst: return "degree-burst";
    }
    return "?";
}

OrderPolicy parse_order(std::string_view s) {
    for (auto p : {OrderPolicy::ArrivalRandom, OrderPolicy::VertexSorted, OrderPolicy::DegreeBurst})
        if (order_name(p) == s)
            return p;
    throw InputError("unknown order policy '" + std::string(s) + "'");
}

std::vector<Edge> order_stream(std::vector<Edge> edges, OrderPolicy policy, std::uint64_t seed) {
    auto rng = RandomSource(seed).child("order").engine();
    switch (policy) {
    case OrderPolicy::ArrivalRandom:
        std::shuffle(edges.begin(), edges.end(), rng);
        break;
    case OrderPolicy::VertexSorted:
        std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
            return norm(a.u, a.v) < norm(b.u, b.v);
        });
        break;
    case OrderPolicy::DegreeBurst: {
        std::shuffle(edges.begin(), edges.end(), rng);
        VertexId top = 0;
        for (const auto& e : edges)
            top = std::max({top, e.u, e.v});
        std::vector<std::vector<std::size_t>> incident(edges.empty() ? 0 : top + 1);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            incident[edges[i].u].push_back(i);
            incident[edges[i].v].push_back(i);
        }
        std::vector<VertexId> verts(incident.size());
        std::iota(verts.begin(), verts.end(), VertexId{0});
        std::shuffle(verts.begin(), verts.end(), rng);
        std::stable_sort(verts.begin(), verts.end(), [&](VertexId a, VertexId b) {
            return incident[a].size() > incident[b].size();
        });
        std::vector<char> taken(edges.size(), 0);
        std::vector<Edge> out;
        out.reserve(edges.size());
        for (auto v : verts)
            for (auto idx : incident[v])
                if (!taken[idx]) {
                    taken[idx] = 1;
                    out.push_back(edges[idx]);
                }
        edges = std::move(out);
        break;
    }
    }
    for (std::size_t i = 0; i < edges.size(); ++i)
        edges[i].seq = i;
    return edges;
}

std::vector<Edge> generate_stream(std::uint64_t n, std::uint64_t delta, std::uint64_t m,
                                  OrderPolicy policy, bool allow_parallel, std::uint64_t seed) {
    return order_stream(gen_multigraph(n, delta, m, allow_parallel, seed), policy, seed);
}

StreamReader::StreamReader(std::istream& in, bool check_declared_degree)
    : in_(in), check_degree_(check_declared_degree) {
    std::string line;
    if (!std::getline(in_, line))
        throw ParseError("header", "line 1: missing header");
    auto tok = tokens(line);
    if (tok.size() != 5 || tok[0] != "wse" || tok[1] != "v1")
        throw ParseError("header", "line 1: expected 'wse v1 <n> <delta> <m>'");
    header_.n = parse_field(tok[2], 1, "n");
    header_.delta = parse_field(tok[3], 1, "delta");
    header_.m = parse_field(tok[4], 1, "m");
    if (header_.n == 0 || header_.delta == 0)
        throw ParseError("header", "line 1: n and delta must be positive");
    degree_.assign(header_.n, 0);
}

std::optional<Edge> StreamReader::next() {
    if (done_)
        return std::nullopt;
    std::string line;
    while (true) {
        if (!std::getline(in_, line)) {
            if (read_ != header_.m)
                throw ParseError("m", "line " + std::to_string(line_ + 1) + ": expected " +
                                          std::to_string(header_.m) + " edges, found " +
                                          std::to_string(read_));
            done_ = true;
            return std::nullopt;
        }
        ++line_;
        auto tok = tokens(line);
        if (tok.empty()) {
            if (read_ == header_.m)
                continue;
            throw ParseError("edge", "line " + std::to_string(line_) + ": empty line");
        }
        if (read_ == header_.m)
            throw ParseError("m", "line " + std::to_string(line_) + ": more than " +
                                      std::to_string(header_.m) + " edges");
        if (tok.size() != 2)
            throw ParseError("edge", "line " + std::to_string(line_) + ": expected '<u> <v>'");
        auto u = parse_field(tok[0], line_, "u");
        auto v = parse_field(tok[1], line_, "v");
        if (u >= header_.n || v >= header_.n)
            throw InputError("line " + std::to_string(line_) + ": vertex " +
                             std::to_string(std::max(u, v)) + " >= n=" +
                             std::to_string(header_.n));
        if (u == v)
            throw InputError("line " + std::to_string(line_) + ": self-loop on vertex " +
                             std::to_string(u));
        ++degree_[u];
        ++degree_[v];
        if (check_degree_ && (degree_[u] > header_.delta || degree_[v] > header_.delta))
            throw InputError("line " + std::to_string(line_) +
                             ": degree exceeds declared delta " + std::to_string(header_.delta));
        return Edge{static_cast<VertexId>(u), static_cast<VertexId>(v), read_++};
    }
}

StreamFile read_stream(std::istream& in) {
    StreamReader reader(in);
    StreamFile f;
    f.header = reader.header();
    while (auto e = reader.next())
        f.edges.push_back(*e);
    return f;
}

StreamFile read_stream(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    return read_stream(in);
}

void write_stream(std::ostream& out, const StreamHeader& header, std::span<const Edge> edges) {
    out << "wse v1 " << header.n << ' ' << header.delta << ' ' << header.m << '\n';
    for (const auto& e : edges)
        out << e.u << ' ' << e.v << '\n';
}

void write_stream(const std::string& path, const StreamHeader& header,
                  std::span<const Edge> edges) {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path);
    write_stream(out, header, edges);
}

void write_colored_line(std::ostream& out, const Emission& e) {
    out << e.edge.u << ' ' << e.edge.v << ' ' << e.edge.seq << ' ' << encode_color(e.color)
        << '\n';
}

void write_colored(std::ostream& out, std::span<const Emission> emissions) {
    for (const auto& e : emissions)
        write_colored_line(out, e);
}

std::vector<Emission> read_colored(std::istream& in) {
    std::vector<Emission> out;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto tok = tokens(line);
        if (tok.empty())
            continue;
        if (tok.size() != 4)
            throw ParseError("line", "line " + std::to_string(lineno) +
                                         ": expected '<u> <v> <seq> <color>'");
        Emission em;
        em.edge.u = static_cast<VertexId>(parse_field(tok[0], lineno, "u"));
        em.edge.v = static_cast<VertexId>(parse_field(tok[1], lineno, "v"));
        em.edge.seq = parse_field(tok[2], lineno, "seq");
        try {
            em.color = decode_color(tok[3]);
        } catch (const ParseError& e) {
            throw ParseError(e.field(), "line " + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(em);
    }
    return out;
}

std::vector<Emission> read_colored(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    return read_colored(in);
}

} // namespace wsec
