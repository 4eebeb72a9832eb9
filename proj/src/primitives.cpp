#include "wsec/primitives.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace wsec {

namespace {

class UsedSlots {
public:
    bool test(std::uint64_t slot) const {
        auto word = slot / 64;
        return word < bits_.size() && (bits_[word] >> (slot % 64)) & 1U;
    }
    void set(std::uint64_t slot) {
        auto word = slot / 64;
        if (word >= bits_.size())
            bits_.resize(word + 1, 0);
        bits_[word] |= std::uint64_t{1} << (slot % 64);
    }
    std::uint64_t word(std::size_t i) const { return i < bits_.size() ? bits_[i] : 0; }
    std::size_t words() const { return bits_.size(); }

private:
    std::vector<std::uint64_t> bits_;
};

} // namespace

std::uint64_t max_degree(std::span<const Edge> edges) {
    std::unordered_map<VertexId, std::uint64_t> deg;
    std::uint64_t best = 0;
    for (const auto& e : edges) {
        best = std::max(best, ++deg[e.u]);
        best = std::max(best, ++deg[e.v]);
    }
    return best;
}

std::vector<std::uint64_t> greedy_edge_color(std::span<const Edge> edges,
                                             std::uint64_t degree_bound,
                                             std::uint64_t palette_size) {
    if (degree_bound > 0 && palette_size < 2 * degree_bound - 1)
        throw std::invalid_argument("palette smaller than 2D-1");

    std::vector<std::size_t> order(edges.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return edges[a].seq < edges[b].seq; });

    std::unordered_map<VertexId, UsedSlots> used;
    std::vector<std::uint64_t> slots(edges.size(), 0);
    for (auto idx : order) {
        const auto& e = edges[idx];
        auto& at_u = used[e.u];
        auto& at_v = used[e.v];
        std::uint64_t slot = palette_size;
        auto words = std::max(at_u.words(), at_v.words()) + 1;
        for (std::size_t w = 0; w < words; ++w) {
            auto taken = at_u.word(w) | at_v.word(w);
            if (taken != ~std::uint64_t{0}) {
                slot = w * 64 + static_cast<std::uint64_t>(std::countr_one(taken));
                break;
            }
        }
        if (slot >= palette_size)
            throw InvariantError("greedy palette exhausted (" + std::to_string(palette_size) +
                                 " slots)");
        at_u.set(slot);
        at_v.set(slot);
        slots[idx] = slot;
    }
    return slots;
}

std::vector<ColorId> greedy_edge_color(std::span<const Edge> edges, std::uint64_t degree_bound,
                                       std::span<const ColorId> palette) {
    auto slots = greedy_edge_color(edges, degree_bound, palette.size());
    std::vector<ColorId> colors;
    colors.reserve(slots.size());
    for (auto s : slots)
        colors.push_back(palette[s]);
    return colors;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed), state_(splitmix64(seed)) {}

RandomSource RandomSource::child(std::string_view label) const {
    RandomSource out = *this;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : label)
        h = (h ^ ch) * 0x100000001b3ULL;
    out.state_ = splitmix64(state_ ^ splitmix64(h ^ 0x5851f42d4c957f2dULL));
    out.path_.emplace_back(label);
    return out;
}

RandomSource RandomSource::child(std::uint64_t label) const {
    RandomSource out = *this;
    out.state_ = splitmix64(state_ ^ splitmix64(label + 0x2545f4914f6cdd1dULL));
    out.path_.push_back(std::to_string(label));
    return out;
}

std::uint64_t RandomSource::draw(std::uint64_t index) const {
    return splitmix64(state_ ^ splitmix64(index));
}

std::uint64_t RandomSource::uniform(std::uint64_t index, std::uint64_t bound) const {
    if (bound == 0)
        throw std::invalid_argument("uniform bound must be positive");
    auto x = draw(index);
    if (is_pow2(bound))
        return x & (bound - 1);
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * bound) >> 64);
}

std::mt19937_64 RandomSource::engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(state_), static_cast<std::uint32_t>(state_ >> 32)};
    return std::mt19937_64(seq);
}

std::size_t PaletteWindow::KeyHash::operator()(const Key& k) const noexcept {
    return static_cast<std::size_t>(
        splitmix64((std::uint64_t{k.anchor} << 2 | static_cast<std::uint64_t>(k.family)) ^
                   splitmix64(k.slot)));
}

bool PaletteWindow::used(VertexId anchor, Family family, std::uint64_t slot) const {
    return used_.contains(Key{anchor, family, slot});
}

bool PaletteWindow::mark(VertexId anchor, Family family, std::uint64_t slot) {
    if (slot >= size_)
        throw InvariantError("window slot " + std::to_string(slot) + " outside palette");
    return used_.insert(Key{anchor, family, slot}).second;
}

} // namespace wsec
