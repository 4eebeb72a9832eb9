#include "wsec/space_meter.hpp"

#include <algorithm>
#include <string>

#include "wsec/model.hpp"

namespace wsec {

std::string_view category_name(SpaceCategory c) noexcept {
    switch (c) {
    case SpaceCategory::Buffer: return "buffer";
    case SpaceCategory::Offsets: return "offsets";
    case SpaceCategory::IndexSets: return "index_sets";
    case SpaceCategory::Counters: return "counters";
    case SpaceCategory::PhaseCounts: return "phase_counts";
    case SpaceCategory::Window: return "window";
    case SpaceCategory::Scratch: return "scratch";
    }
    return "?";
}

void SpaceMeter::add(SpaceCategory c, std::uint64_t words) {
    auto i = index(c);
    tally_[i] += words;
    current_ += words;
    peak_by_[i] = std::max(peak_by_[i], tally_[i]);
    if (current_ > peak_) {
        peak_ = current_;
        at_peak_ = tally_;
    }
}

void SpaceMeter::remove(SpaceCategory c, std::uint64_t words) {
    auto i = index(c);
    if (tally_[i] < words)
        throw InvariantError("space meter underflow in " + std::string(category_name(c)));
    tally_[i] -= words;
    current_ -= words;
}

} // namespace wsec
