#pragma once

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsec/class_colorer.hpp"
#include "wsec/model.hpp"

namespace wsec {

/// Random multigraph on n vertices with m edges and every degree <= delta.
/// Pairs vertices with spare capacity uniformly; when only one vertex has
/// capacity left, an existing edge (a, b) is split into (x, a), (x, b).
/// Parallel edges only if `allow_parallel`. Edge seq = position.
/// Throws InputError when m > n*delta/2 or no such graph is found.
std::vector<Edge> gen_multigraph(std::uint64_t n, std::uint64_t delta, std::uint64_t m,
                                 bool allow_parallel, std::uint64_t seed);

enum class OrderPolicy { ArrivalRandom, VertexSorted, DegreeBurst };

std::string_view order_name(OrderPolicy p) noexcept;
/// Accepts "arrival-random", "vertex-sorted", "degree-burst".
OrderPolicy parse_order(std::string_view s);

/// Permutes the stream and renumbers seq by position.
///   arrival-random: uniform shuffle
///   vertex-sorted:  ascending (min endpoint, max endpoint)
///   degree-burst:   vertices by descending degree (random tie-break); each
///                   vertex emits all its remaining edges contiguously
std::vector<Edge> order_stream(std::vector<Edge> edges, OrderPolicy policy, std::uint64_t seed);

/// gen_multigraph followed by order_stream, both driven by `seed`.
std::vector<Edge> generate_stream(std::uint64_t n, std::uint64_t delta, std::uint64_t m,
                                  OrderPolicy policy, bool allow_parallel, std::uint64_t seed);

struct StreamHeader {
    std::uint64_t n = 0;
    std::uint64_t delta = 0;
    std::uint64_t m = 0;
};

/// Streaming reader for `wse v1 <n> <delta> <m>` files. Validates every
/// line (vertex range, self-loops, declared degree bound, edge count) and
/// reports the line number on error.
class StreamReader {
public:
    /// With `check_declared_degree` false the declared delta is not enforced
    /// (unknown-delta runs).
    explicit StreamReader(std::istream& in, bool check_declared_degree = true);

    const StreamHeader& header() const noexcept { return header_; }
    /// Next edge, or nullopt at end of body. Throws ParseError / InputError.
    std::optional<Edge> next();

private:
    std::istream& in_;
    StreamHeader header_;
    std::uint64_t line_ = 1;
    std::uint64_t read_ = 0;
    std::vector<std::uint64_t> degree_;
    bool check_degree_;
    bool done_ = false;
};

struct StreamFile {
    StreamHeader header;
    std::vector<Edge> edges;
};

StreamFile read_stream(std::istream& in);
StreamFile read_stream(const std::string& path);

void write_stream(std::ostream& out, const StreamHeader& header, std::span<const Edge> edges);
void write_stream(const std::string& path, const StreamHeader& header,
                  std::span<const Edge> edges);

/// `<u> <v> <seq> <color>` per emission.
void write_colored_line(std::ostream& out, const Emission& e);
void write_colored(std::ostream& out, std::span<const Emission> emissions);

std::vector<Emission> read_colored(std::istream& in);
std::vector<Emission> read_colored(const std::string& path);

} // namespace wsec
