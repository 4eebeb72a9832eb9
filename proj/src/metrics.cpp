#include "wsec/metrics.hpp"

#include <algorithm>

namespace wsec {

double RunMetrics::leftover_fraction_l0() const {
    std::uint64_t in = 0, left = 0;
    for (const auto& lm : levels)
        if (lm.level == 0) {
            in += lm.log.input_edges;
            left += lm.log.leftovers;
        }
    return in ? static_cast<double>(left) / static_cast<double>(in) : 0.0;
}

std::uint64_t RunMetrics::peak_words_l0() const {
    std::uint64_t best = 0;
    for (const auto& lm : levels)
        if (lm.level == 0)
            best = std::max(best, lm.peak_words);
    return best;
}

std::uint64_t RunMetrics::leftover_at(std::uint32_t level) const {
    std::uint64_t total = 0;
    for (const auto& lm : levels)
        if (lm.level == level)
            total += lm.log.leftovers;
    return total;
}

std::uint64_t RunMetrics::input_at(std::uint32_t level) const {
    std::uint64_t total = 0;
    for (const auto& lm : levels)
        if (lm.level == level)
            total += lm.log.input_edges;
    return total;
}

nlohmann::json to_json(const RunMetrics& m) {
    using nlohmann::json;
    json levels = json::array();
    for (const auto& lm : m.levels) {
        json breakdown = json::object();
        for (std::size_t i = 0; i < kSpaceCategories; ++i)
            breakdown[std::string(category_name(static_cast<SpaceCategory>(i)))] =
                lm.peak_breakdown[i];
        json classes = json::array();
        for (const auto& c : lm.log.classes)
            classes.push_back({{"phase", c.phase},
                               {"d", c.d},
                               {"intervals", c.stats.intervals},
                               {"index_entries", c.stats.index_entries},
                               {"counters_created", c.stats.counters_created},
                               {"offsets_drawn", c.stats.offsets_drawn},
                               {"max_a_slots", c.stats.max_a_slots}});
        json level = {{"epoch", lm.epoch},
                      {"level", lm.level},
                      {"delta", lm.delta},
                      {"fallback", lm.fallback},
                      {"input_edges", lm.log.input_edges},
                      {"colored", lm.log.colored},
                      {"leftover", lm.log.leftovers},
                      {"intervals", lm.log.intervals},
                      {"phases", lm.log.phases},
                      {"colors_used", lm.colors_used},
                      {"peak_words", lm.peak_words},
                      {"peak_breakdown", breakdown},
                      {"final_words", lm.final_words},
                      {"low_intervals", lm.log.low_intervals.size()},
                      {"fallback_intervals", lm.log.fallback_intervals.size()},
                      {"classes", classes}};
        level["base_max_degree"] =
            lm.log.base_degree ? json(*lm.log.base_degree) : json(nullptr);
        levels.push_back(std::move(level));
    }

    json doc = {
        {"schema", "wsec-metrics/1"},
        {"config",
         {{"n", m.n},
          {"delta", m.delta},
          {"kappa", m.kappa},
          {"interval_size", m.interval_size},
          {"phase_len", m.phase_len},
          {"max_depth", m.max_depth},
          {"seed", m.seed},
          {"sigma_seed", m.sigma_seed},
          {"offset_seed", m.offset_seed},
          {"delta_mode", m.delta_mode == DeltaMode::Known ? "known" : "unknown"}}},
        {"input_edges", m.input_edges},
        {"emitted", m.emitted},
        {"colors_used", m.colors_used},
        {"colors_by_kind", m.colors_by_kind},
        {"depth", m.depth},
        {"epochs", m.epochs},
        {"interval_count", m.interval_count},
        {"phase_count", m.phase_count},
        {"fallback_intervals", m.fallback_intervals},
        {"leftover_fraction_l0", m.leftover_fraction_l0()},
        {"peak_words_l0", m.peak_words_l0()},
        {"wall_ms", m.wall_ms},
        {"levels", levels},
    };
    return doc;
}

} // namespace wsec
