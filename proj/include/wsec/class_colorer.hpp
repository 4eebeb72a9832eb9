#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wsec/model.hpp"
#include "wsec/primitives.hpp"
#include "wsec/space_meter.hpp"
#include "wsec/trace.hpp"

namespace wsec {

using DegreeMap = std::unordered_map<VertexId, std::uint64_t>;

struct Emission {
    Edge edge;
    ColorId color;

    friend bool operator==(const Emission&, const Emission&) = default;
};

/// A high-low edge of one degree class, oriented by role.
struct H2Edge {
    Edge edge;
    VertexId low = 0;
    VertexId high = 0;
};

/// The class-d part of one interval.
struct ClassBucket {
    std::vector<Edge> h1;
    std::vector<H2Edge> h2;
};

struct StepOutput {
    std::vector<Emission> colored;
    std::vector<Edge> leftovers;

    void append(StepOutput&& other);
};

struct Step1Result {
    StepOutput out;
    /// High vertices whose index set did not contain sigma.
    std::unordered_set<VertexId> active;
    /// High vertices that had already used A_sigma this phase; all their
    /// class edges in this interval went to the leftover stream.
    std::unordered_set<VertexId> exiled;
    /// Distinct A slots used this interval.
    std::uint64_t a_slots_used = 0;
};

struct ClassParams {
    ClassScope scope;
    std::uint64_t delta = 1;
    std::uint64_t kappa = 32;
    /// Global index of the first interval of the phase.
    std::uint64_t phase_start = 0;
    EngineFaults faults;
};

/// Running totals for one (phase, d) state, used by the space audits.
struct ClassStats {
    std::uint64_t intervals = 0;
    std::uint64_t index_entries = 0;
    std::uint64_t counters_created = 0;
    std::uint64_t offsets_drawn = 0;
    std::uint64_t max_a_slots = 0;
};

/// All per-(phase, d) state: offsets r_v, index sets I_v, counters c_v[i],
/// interval counts p[i] and the current sigma. Palettes A_i, B_i, C_i for
/// i in [1, kappa*delta/d] each hold K = 2*kappa*d slots.
///
/// Usage per interval: begin_interval, step1_high_high, step2_high_low,
/// end_interval. Everything tracked is reported to the space meter and
/// released on destruction.
class ClassColorer {
public:
    ClassColorer(const ClassParams& params, RandomSource offsets, RandomSource sigmas,
                 SpaceMeter* meter = nullptr, TraceSink* trace = nullptr);
    ~ClassColorer();

    ClassColorer(const ClassColorer&) = delete;
    ClassColorer& operator=(const ClassColorer&) = delete;

    /// Draws sigma for `interval` (a global interval index inside this phase).
    /// Intervals of the phase that never reached this class still count in p.
    std::uint64_t begin_interval(std::uint64_t interval);

    Step1Result step1_high_high(const ClassBucket& bucket, const DegreeMap& deg);

    StepOutput step2_high_low(std::span<const H2Edge> h2, const Step1Result& step1,
                              const DegreeMap& deg);

    void end_interval();

    std::uint64_t d() const noexcept { return params_.scope.d; }
    std::uint64_t palette_size() const noexcept { return k_; }
    std::uint64_t palette_count() const noexcept { return npal_; }
    std::uint64_t sigma() const noexcept { return sigma_; }
    std::uint64_t phase_count(std::uint64_t index) const;
    std::optional<std::uint64_t> counter(VertexId u, std::uint64_t index) const;
    bool has_index(VertexId v, std::uint64_t index) const;
    /// Offset of v, drawing (and storing) it if needed.
    std::uint64_t offset(VertexId v);
    const PaletteWindow& window() const noexcept { return window_; }
    const ClassStats& stats() const noexcept { return stats_; }
    const ClassParams& params() const noexcept { return params_; }

private:
    std::uint64_t draw_sigma(std::uint64_t position) const;
    void bump_phase_count(std::uint64_t index);
    void add_index(VertexId v, std::uint64_t index);
    ColorId color(ColorKind kind, std::uint64_t slot) const;
    void record(const H2Edge& e, Decision what, std::uint64_t slot, std::uint64_t r_low,
                std::optional<std::uint64_t> counter, std::uint64_t b, std::uint64_t p);
    void count_counter(VertexId u, bool created, std::uint64_t value);
    void meter_add(SpaceCategory c, std::uint64_t w = 1);

    static std::uint64_t counter_key(VertexId u, std::uint64_t index) {
        return (std::uint64_t{u} << 32) | index;
    }

    ClassParams params_;
    std::uint64_t sqrt_delta_;
    std::uint64_t k_;
    std::uint64_t npal_;
    RandomSource offsets_;
    RandomSource sigmas_;
    SpaceMeter* meter_;
    TraceSink* trace_;

    std::unordered_map<VertexId, std::uint64_t> r_;
    std::unordered_map<VertexId, std::vector<std::uint64_t>> index_sets_;
    std::unordered_map<std::uint64_t, std::uint64_t> counters_;
    std::unordered_map<std::uint64_t, std::uint64_t> p_;
    PaletteWindow window_;

    std::uint64_t synced_ = 0;  // positions [0, synced_) are counted in p_
    std::uint64_t interval_ = 0;
    std::uint64_t sigma_ = 0;
    bool in_interval_ = false;
    ClassStats stats_;
    std::array<std::uint64_t, kSpaceCategories> held_{};
};

} // namespace wsec
