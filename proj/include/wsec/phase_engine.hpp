#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "wsec/class_colorer.hpp"
#include "wsec/model.hpp"
#include "wsec/space_meter.hpp"
#include "wsec/trace.hpp"

namespace wsec {

struct IntervalSnapshot {
    std::uint64_t index = 0;
    std::vector<Edge> edges;
    DegreeMap deg;
};

/// Computes interval degrees. Throws InputError if any exceeds `delta`.
IntervalSnapshot make_snapshot(std::uint64_t index, std::vector<Edge> edges,
                               std::uint64_t delta);

struct ClassifiedInterval {
    /// Edges whose endpoint degrees are all below sqrt(delta).
    std::vector<Edge> low_bucket;
    /// Class d = 2^floor(log2 max endpoint degree), ascending.
    std::map<std::uint64_t, ClassBucket> per_class;
};

ClassifiedInterval classify_interval(const IntervalSnapshot& s, std::uint64_t delta);

/// Fresh 2*sqrt(delta)-1 Low palette scoped to (phase, interval).
std::vector<Emission> color_low_bucket(std::span<const Edge> edges, std::uint32_t epoch,
                                       std::uint32_t level, std::uint64_t phase,
                                       std::uint64_t interval, std::uint64_t sqrt_delta);

/// Bookkeeping for one (phase, d) state once it is discarded.
struct ClassPhaseLog {
    std::uint64_t phase = 0;
    std::uint64_t d = 0;
    ClassStats stats;
};

/// What a level did, for metrics and the budget/space audits.
struct LevelLog {
    std::uint64_t input_edges = 0;
    std::uint64_t colored = 0;
    std::uint64_t leftovers = 0;
    std::uint64_t intervals = 0;
    std::uint64_t phases = 0;
    std::vector<ClassPhaseLog> classes;
    std::vector<std::uint64_t> low_intervals;
    std::vector<std::uint64_t> fallback_intervals;
    std::optional<std::uint64_t> base_degree;
};

/// One recursion level: buffers intervals, rolls phases every phase_len
/// intervals, colors the low bucket and hands each degree class to its
/// ClassColorer. At level == max_depth the level instead colors every
/// interval with a fresh 2*delta-1 palette and produces no leftovers.
class LevelEngine {
public:
    LevelEngine(const RunConfig& cfg, std::uint32_t epoch, std::uint32_t level,
                TraceSink* trace = nullptr);
    ~LevelEngine();

    LevelEngine(const LevelEngine&) = delete;
    LevelEngine& operator=(const LevelEngine&) = delete;

    /// Buffers e; processes the interval when it fills up. The first interval
    /// is held until the next edge arrives so an input of exactly one interval
    /// still takes the base case.
    StepOutput ingest(const Edge& e);

    /// End of this level's input: colors the partial interval, or the whole
    /// input with a Base palette if no interval ever filled.
    StepOutput flush();

    bool fallback() const noexcept { return fallback_; }
    std::uint32_t level() const noexcept { return level_; }
    std::uint32_t epoch() const noexcept { return epoch_; }
    const RunConfig& config() const noexcept { return cfg_; }
    const SpaceMeter& meter() const noexcept { return meter_; }
    const LevelLog& log() const noexcept { return log_; }
    std::size_t buffered() const noexcept { return buffer_.size(); }
    std::uint64_t phase_of(std::uint64_t interval) const { return interval / phase_len_; }

private:
    StepOutput process_interval();
    StepOutput process_fallback(const IntervalSnapshot& s);
    StepOutput base_case();
    ClassColorer& class_state(std::uint64_t d, std::uint64_t phase);
    void close_phase();
    void release_buffer();

    RunConfig cfg_;
    std::uint32_t epoch_;
    std::uint32_t level_;
    TraceSink* trace_;
    bool fallback_;
    std::uint64_t sqrt_delta_;
    std::uint64_t phase_len_;
    RandomSource offsets_;
    RandomSource sigmas_;
    SpaceMeter meter_;

    std::vector<Edge> buffer_;
    std::uint64_t next_interval_ = 0;
    std::optional<Seq> last_seq_;
    std::map<std::uint64_t, std::unique_ptr<ClassColorer>> classes_;
    bool phase_open_ = false;
    bool flushed_ = false;
    LevelLog log_;
};

/// Base case: greedy with a fresh Base palette of 2*D'-1 colors, D' the
/// buffered graph's maximum degree.
std::vector<Emission> base_case_color(std::span<const Edge> edges, std::uint32_t epoch,
                                      std::uint32_t level);

/// Depth-cap fallback for one interval: fresh 2*delta-1 Low palette scoped to
/// (level, interval).
std::vector<Emission> fallback_color(std::span<const Edge> edges, std::uint32_t epoch,
                                     std::uint32_t level, std::uint64_t phase,
                                     std::uint64_t interval, std::uint64_t delta);

} // namespace wsec
