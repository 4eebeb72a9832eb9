#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wsec/metrics.hpp"
#include "wsec/model.hpp"
#include "wsec/phase_engine.hpp"
#include "wsec/trace.hpp"

namespace wsec {

/// Cascade of levels for one epoch. Leftovers of level l are fed to level
/// l+1 as soon as they are produced; level max_depth runs the fallback.
class Pipeline {
public:
    Pipeline(const RunConfig& cfg, std::uint32_t epoch, TraceSink* trace = nullptr);

    std::vector<Emission> submit(const Edge& e);
    /// Flushes levels in increasing order until none holds edges.
    std::vector<Emission> finalize();

    const RunConfig& config() const noexcept { return cfg_; }
    std::uint32_t epoch() const noexcept { return epoch_; }
    std::size_t depth() const noexcept { return levels_.size(); }
    const LevelEngine& level(std::size_t l) const { return *levels_.at(l); }

private:
    void cascade(std::vector<Edge> pending, std::uint32_t level, std::vector<Emission>& out);
    LevelEngine& level_at(std::uint32_t level);

    RunConfig cfg_;
    std::uint32_t epoch_;
    TraceSink* trace_;
    std::vector<std::unique_ptr<LevelEngine>> levels_;
};

/// Unknown-delta mode: tracks the running maximum degree and opens a new
/// epoch k whenever it enters (2^(k-1), 2^k]. Each epoch owns a Pipeline
/// with delta = normalize_delta(2^k) and colors tagged with epoch k.
class EpochRouter {
public:
    EpochRouter(const RunConfig& cfg, TraceSink* trace = nullptr);

    std::vector<Emission> route(const Edge& e);
    std::vector<Emission> finalize();

    std::uint64_t running_max_degree() const noexcept { return max_deg_; }
    std::uint32_t current_epoch() const noexcept { return current_; }
    const std::map<std::uint32_t, std::unique_ptr<Pipeline>>& epochs() const noexcept {
        return epochs_;
    }

private:
    RunConfig base_;
    TraceSink* trace_;
    std::vector<std::uint64_t> degree_;
    std::uint64_t max_deg_ = 0;
    std::uint32_t current_ = 0;
    std::map<std::uint32_t, std::unique_ptr<Pipeline>> epochs_;
};

/// Epoch for a running max degree: smallest k with max_deg <= 2^k.
std::uint32_t epoch_for_degree(std::uint64_t max_deg);

/// Streaming front door: validates arrivals, routes them through the
/// known-delta pipeline or the epoch router, and gathers RunMetrics.
class Engine {
public:
    explicit Engine(const RunConfig& cfg, TraceSink* trace = nullptr);

    std::vector<Emission> push(const Edge& e);
    std::vector<Emission> finish();

    /// Valid after finish().
    const RunMetrics& metrics() const noexcept { return metrics_; }

private:
    void observe(const std::vector<Emission>& out);
    void collect_level(const LevelEngine& lvl);

    RunConfig cfg_;
    std::unique_ptr<Pipeline> known_;
    std::unique_ptr<EpochRouter> router_;
    std::vector<std::uint64_t> degree_;  // known-delta input contract
    std::unordered_set<ColorId, ColorIdHash> colors_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::unordered_set<ColorId, ColorIdHash>>
        colors_by_level_;
    RunMetrics metrics_;
    std::chrono::steady_clock::time_point start_;
    bool finished_ = false;
};

struct RunResult {
    std::vector<Emission> emissions;
    RunMetrics metrics;
};

RunResult color_stream(const RunConfig& cfg, std::span<const Edge> edges,
                       TraceSink* trace = nullptr);

/// Per-interval fresh 2*delta-1 palettes, no recursion (max_depth = 0).
RunResult run_baseline(RunConfig cfg, std::span<const Edge> edges);

} // namespace wsec
