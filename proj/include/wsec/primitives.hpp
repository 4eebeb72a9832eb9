#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "wsec/model.hpp"

namespace wsec {

/// First-fit edge coloring. Edges are visited in ascending `seq`; each edge
/// takes the lowest slot in [0, palette_size) free at both endpoints.
/// Parallel edges conflict like any other adjacent pair.
///
/// Requires palette_size >= 2*degree_bound - 1 (std::invalid_argument
/// otherwise). Running out of slots anyway means the degree bound was wrong
/// and raises InvariantError. Returns one slot per input edge, by position.
std::vector<std::uint64_t> greedy_edge_color(std::span<const Edge> edges,
                                             std::uint64_t degree_bound,
                                             std::uint64_t palette_size);

/// Palette form: maps the chosen slots onto the given colors.
std::vector<ColorId> greedy_edge_color(std::span<const Edge> edges, std::uint64_t degree_bound,
                                       std::span<const ColorId> palette);

/// Maximum number of endpoint occurrences of any vertex in `edges`.
std::uint64_t max_degree(std::span<const Edge> edges);

/// (base + offset) mod k, never negative.
constexpr std::uint64_t mod_slot(std::int64_t base, std::int64_t offset, std::uint64_t k) {
    auto m = static_cast<std::int64_t>(k);
    auto r = (base % m + offset % m) % m;
    return static_cast<std::uint64_t>(r < 0 ? r + m : r);
}

enum class GapOutcome { Pass, Leftover };

/// delta = (r_v - r_u) mod k; leftover iff delta < 2d or delta > k - 2d.
constexpr GapOutcome gap_check(std::uint64_t r_u, std::uint64_t r_v, std::uint64_t d,
                               std::uint64_t k) {
    auto delta = mod_slot(static_cast<std::int64_t>(r_v), -static_cast<std::int64_t>(r_u), k);
    return (delta < 2 * d || delta + 2 * d > k) ? GapOutcome::Leftover : GapOutcome::Pass;
}

/// Counter-based deterministic randomness. A source is a seed plus a path of
/// scope labels; each `child` hashes one more label in. Draws are a pure
/// function of (seed, path, index), so lazily drawn values do not depend on
/// the order in which they are requested.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed);

    RandomSource child(std::string_view label) const;
    RandomSource child(std::uint64_t label) const;

    std::uint64_t draw(std::uint64_t index) const;

    /// Uniform in [0, bound). Exact for powers of two.
    std::uint64_t uniform(std::uint64_t index, std::uint64_t bound) const;

    /// A sequential engine seeded from this scope, for shuffles and generators.
    std::mt19937_64 engine() const;

    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<std::string>& path() const noexcept { return path_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    std::vector<std::string> path_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

enum class Family : std::uint8_t { B = 1, C = 2 };

/// Slots already used at a high-degree vertex during the current interval,
/// per palette family. Cleared at every interval boundary.
class PaletteWindow {
public:
    explicit PaletteWindow(std::uint64_t size = 1) : size_(size) {}

    bool used(VertexId anchor, Family family, std::uint64_t slot) const;
    /// Returns false if the entry was already present.
    bool mark(VertexId anchor, Family family, std::uint64_t slot);
    void clear() { used_.clear(); }

    std::size_t entries() const noexcept { return used_.size(); }
    std::uint64_t size() const noexcept { return size_; }
    void resize(std::uint64_t size) { size_ = size; }

private:
    struct Key {
        VertexId anchor;
        Family family;
        std::uint64_t slot;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    std::uint64_t size_;
    std::unordered_set<Key, KeyHash> used_;
};

} // namespace wsec
