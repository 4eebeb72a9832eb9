#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsec/class_colorer.hpp"
#include "wsec/metrics.hpp"
#include "wsec/model.hpp"
#include "wsec/trace.hpp"

namespace wsec {

struct VerifyResult {
    enum class Status { Ok, Conflict, Mismatch };

    Status status = Status::Ok;
    /// Conflict: the two edges and their shared color at `vertex`.
    Edge first;
    Edge second;
    ColorId color;
    VertexId vertex = 0;
    std::string detail;

    bool ok() const noexcept { return status == Status::Ok; }
};

/// Ok iff the colored edges are exactly the input multiset (matched on
/// unordered endpoints plus seq) and no two colored edge instances sharing
/// an endpoint carry the same color. Reports the first witness found
/// scanning edges in ascending seq.
VerifyResult verify_proper(std::span<const Emission> colored, std::span<const Edge> input);

struct OracleResult {
    /// Color per input edge, by position.
    std::vector<std::uint64_t> colors;
    std::uint64_t count = 0;
};

/// Best of `tries` first-fit colorings over random edge orders. Independent
/// of the engine's greedy; used as a reference on small inputs.
OracleResult oracle_min_greedy(std::span<const Edge> edges, std::uint64_t tries,
                               std::uint64_t seed);

/// Deterministic color bound computed from a run's own log: every touched
/// (level, phase, class) may use 3 * (kappa*delta/d) * 2*kappa*d colors,
/// every low-bucket interval 2*sqrt(delta)-1, every fallback interval
/// 2*delta-1 and every base case 2*D'-1.
struct ColorBudget {
    std::uint64_t class_colors = 0;
    std::uint64_t low_colors = 0;
    std::uint64_t fallback_colors = 0;
    std::uint64_t base_colors = 0;

    std::uint64_t total() const noexcept {
        return class_colors + low_colors + fallback_colors + base_colors;
    }
};

ColorBudget color_budget(const RunMetrics& m);

/// Findings of the decision-trace audit.
struct TraceAudit {
    std::uint64_t c_checked = 0;
    std::uint64_t b_checked = 0;
    std::uint64_t c_range_violations = 0;
    std::uint64_t b_block_violations = 0;
    std::uint64_t saturation_violations = 0;
    std::uint64_t counter_mismatches = 0;
    std::vector<std::string> findings;

    std::uint64_t violations() const noexcept {
        return c_range_violations + b_block_violations + saturation_violations +
               counter_mismatches;
    }
    bool ok() const noexcept { return violations() == 0; }
};

/// Checks, per (epoch, level, phase, d, low vertex, index):
///  - C slots are r_u + t for strictly increasing counter values t < 2d,
///    and t matches the counter trace;
///  - B slots lie in the sqrt(delta)-block selected by p, with distinct p
///    across intervals and b < sqrt(delta);
///  - per vertex, at most delta/(2d) indices have accumulated interval
///    degree >= 2d.
TraceAudit audit_trace(const TraceBuffer& trace, const RunMetrics& m);

/// Explicit per-(phase, class) storage bounds:
///   index entries  <= 2 * interval_size * phase_len / d
///   counters made  <= 2 * interval_size * phase_len / sqrt(delta)
/// and every level's tracked words back to zero after its last phase.
struct SpaceAudit {
    std::uint64_t index_violations = 0;
    std::uint64_t counter_violations = 0;
    std::uint64_t residual_violations = 0;
    std::vector<std::string> findings;

    bool ok() const noexcept {
        return index_violations + counter_violations + residual_violations == 0;
    }
};

SpaceAudit space_audit(const RunMetrics& m);

struct MeterReport {
    std::vector<std::uint64_t> peaks_small;
    std::vector<std::uint64_t> peaks_large;
    double ratio_l0 = 0.0;
    bool regression = false;
    SpaceAudit small_bounds;
    SpaceAudit large_bounds;

    bool ok() const noexcept { return !regression && small_bounds.ok() && large_bounds.ok(); }
};

inline constexpr double kMeterRatioLimit = 2.5;

/// Compares paired runs at n and 2n: flags peak_l0(2n)/peak_l0(n) > 2.5.
MeterReport meter_check(const RunMetrics& small, const RunMetrics& large);

struct IndCheck {
    bool pass = false;
    std::size_t records_first = 0;
    std::size_t records_second = 0;
    std::optional<std::size_t> first_difference;
};

/// Runs the stream twice with the same sigma seed and two offset seeds and
/// compares the level-0 counter traces (creations and increments) exactly.
IndCheck offset_independence_check(std::span<const Edge> stream, RunConfig cfg, std::uint64_t sigma_seed,
                         std::uint64_t offset_seed_a, std::uint64_t offset_seed_b);

struct LeftoverStats {
    std::size_t runs = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double threshold = 0.0;
    bool flagged = false;
};

inline constexpr std::size_t kMinLeftoverRuns = 20;
inline constexpr double kLeftoverSlack = 0.05;

/// Mean level-0 leftover fraction with a normal 95% interval; flags mean
/// above 7/kappa + 0.05. Throws InputError with fewer than 20 runs.
LeftoverStats leftover_stats(std::span<const RunMetrics> runs, std::uint64_t kappa);

} // namespace wsec
