#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wsec/model.hpp"
#include "wsec/phase_engine.hpp"
#include "wsec/space_meter.hpp"

namespace wsec {

struct LevelMetrics {
    std::uint32_t epoch = 0;
    std::uint32_t level = 0;
    std::uint64_t delta = 0;
    bool fallback = false;
    std::uint64_t colors_used = 0;
    std::uint64_t peak_words = 0;
    std::array<std::uint64_t, kSpaceCategories> peak_breakdown{};
    std::uint64_t final_words = 0;
    LevelLog log;
};

struct RunMetrics {
    std::uint64_t n = 0;
    std::uint64_t delta = 0;
    std::uint64_t kappa = 0;
    std::uint64_t interval_size = 0;
    std::uint64_t phase_len = 0;
    std::uint32_t max_depth = 0;
    std::uint64_t seed = 0;
    std::uint64_t sigma_seed = 0;
    std::uint64_t offset_seed = 0;
    DeltaMode delta_mode = DeltaMode::Known;

    std::uint64_t input_edges = 0;
    std::uint64_t emitted = 0;
    std::uint64_t colors_used = 0;
    std::map<std::string, std::uint64_t> colors_by_kind;
    std::uint32_t depth = 0;
    std::uint32_t epochs = 0;
    std::uint64_t interval_count = 0;
    std::uint64_t phase_count = 0;
    std::uint64_t fallback_intervals = 0;
    double wall_ms = 0.0;
    std::vector<LevelMetrics> levels;

    /// Level-0 leftovers / level-0 input, summed over epochs.
    double leftover_fraction_l0() const;
    /// Peak tracked words of level 0 (max over epochs).
    std::uint64_t peak_words_l0() const;
    std::uint64_t leftover_at(std::uint32_t level) const;
    std::uint64_t input_at(std::uint32_t level) const;
};

/// Metrics document, schema "wsec-metrics/1". Key names are documented in
/// the README.
nlohmann::json to_json(const RunMetrics& m);

} // namespace wsec
