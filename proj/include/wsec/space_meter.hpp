#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace wsec {

/// Tracked algorithmic state, in modeled machine words (one per buffered
/// edge, map entry or set element).
enum class SpaceCategory : std::uint8_t {
    Buffer,
    Offsets,
    IndexSets,
    Counters,
    PhaseCounts,
    Window,
    Scratch,
};

inline constexpr std::size_t kSpaceCategories = 7;

std::string_view category_name(SpaceCategory c) noexcept;

class SpaceMeter {
public:
    void add(SpaceCategory c, std::uint64_t words = 1);
    void remove(SpaceCategory c, std::uint64_t words = 1);

    std::uint64_t current() const noexcept { return current_; }
    std::uint64_t peak() const noexcept { return peak_; }
    std::uint64_t current(SpaceCategory c) const noexcept { return tally_[index(c)]; }
    std::uint64_t peak(SpaceCategory c) const noexcept { return peak_by_[index(c)]; }

    /// Per-category tallies at the moment the total peaked.
    const std::array<std::uint64_t, kSpaceCategories>& at_peak() const noexcept {
        return at_peak_;
    }

private:
    static constexpr std::size_t index(SpaceCategory c) noexcept {
        return static_cast<std::size_t>(c);
    }

    std::array<std::uint64_t, kSpaceCategories> tally_{};
    std::array<std::uint64_t, kSpaceCategories> peak_by_{};
    std::array<std::uint64_t, kSpaceCategories> at_peak_{};
    std::uint64_t current_ = 0;
    std::uint64_t peak_ = 0;
};

} // namespace wsec
