#include "wsec/audit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "wsec/pipeline.hpp"
#include "wsec/primitives.hpp"

namespace wsec {

namespace {

using EdgeKey = std::tuple<VertexId, VertexId, Seq>;

EdgeKey key_of(const Edge& e) {
    return {std::min(e.u, e.v), std::max(e.u, e.v), e.seq};
}

std::string describe(const Edge& e) {
    std::ostringstream os;
    os << '(' << e.u << ',' << e.v << ")#" << e.seq;
    return os.str();
}

struct VertexColor {
    VertexId v;
    ColorId c;
    friend bool operator==(const VertexColor&, const VertexColor&) = default;
};

struct VertexColorHash {
    std::size_t operator()(const VertexColor& k) const noexcept {
        return ColorIdHash{}(k.c) ^ static_cast<std::size_t>(splitmix64(k.v));
    }
};

} // namespace

VerifyResult verify_proper(std::span<const Emission> colored, std::span<const Edge> input) {
    VerifyResult res;

    std::vector<EdgeKey> want, got;
    want.reserve(input.size());
    got.reserve(colored.size());
    for (const auto& e : input)
        want.push_back(key_of(e));
    for (const auto& em : colored)
        got.push_back(key_of(em.edge));
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    if (want != got) {
        res.status = VerifyResult::Status::Mismatch;
        auto [wi, gi] = std::mismatch(want.begin(), want.end(), got.begin(), got.end());
        std::ostringstream os;
        if (wi != want.end() && (gi == got.end() || *wi < *gi)) {
            auto [a, b, s] = *wi;
            os << "input edge (" << a << ',' << b << ")#" << s << " missing from colored output";
        } else {
            auto [a, b, s] = *gi;
            os << "colored edge (" << a << ',' << b << ")#" << s
               << " not in input (or duplicated)";
        }
        os << "; input " << input.size() << " edges, colored " << colored.size();
        res.detail = os.str();
        return res;
    }

    std::vector<std::size_t> order(colored.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return colored[a].edge.seq < colored[b].edge.seq;
    });
    std::unordered_map<VertexColor, std::size_t, VertexColorHash> seen;
    for (auto idx : order) {
        const auto& em = colored[idx];
        for (VertexId x : {em.edge.u, em.edge.v}) {
            auto [it, inserted] = seen.try_emplace(VertexColor{x, em.color}, idx);
            if (!inserted) {
                res.status = VerifyResult::Status::Conflict;
                res.first = colored[it->second].edge;
                res.second = em.edge;
                res.color = em.color;
                res.vertex = x;
                res.detail = "edges " + describe(res.first) + " and " + describe(res.second) +
                             " share vertex " + std::to_string(x) + " and color " +
                             encode_color(em.color);
                return res;
            }
        }
    }
    return res;
}

OracleResult oracle_min_greedy(std::span<const Edge> edges, std::uint64_t tries,
                               std::uint64_t seed) {
    OracleResult best;
    best.count = std::numeric_limits<std::uint64_t>::max();
    if (edges.empty()) {
        best.count = 0;
        return best;
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(edges.size());
    for (std::uint64_t t = 0; t < std::max<std::uint64_t>(tries, 1); ++t) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        if (t > 0)
            std::shuffle(order.begin(), order.end(), rng);
        std::map<VertexId, std::set<std::uint64_t>> used;
        std::vector<std::uint64_t> colors(edges.size());
        std::uint64_t count = 0;
        for (auto idx : order) {
            const auto& a = used[edges[idx].u];
            const auto& b = used[edges[idx].v];
            std::uint64_t c = 0;
            while (a.contains(c) || b.contains(c))
                ++c;
            colors[idx] = c;
            used[edges[idx].u].insert(c);
            used[edges[idx].v].insert(c);
            count = std::max(count, c + 1);
        }
        if (count < best.count) {
            best.count = count;
            best.colors = std::move(colors);
        }
    }
    return best;
}

ColorBudget color_budget(const RunMetrics& m) {
    ColorBudget b;
    for (const auto& lm : m.levels) {
        const auto delta = lm.delta;
        const auto root = sqrt_pow4(delta);
        for (const auto& c : lm.log.classes) {
            const auto npal = m.kappa * delta / c.d;
            const auto k = 2 * m.kappa * c.d;
            b.class_colors += 3 * npal * k;
        }
        b.low_colors += lm.log.low_intervals.size() * (2 * root - 1);
        b.fallback_colors += lm.log.fallback_intervals.size() * (2 * delta - 1);
        if (lm.log.base_degree)
            b.base_colors += 2 * *lm.log.base_degree - 1;
    }
    return b;
}

TraceAudit audit_trace(const TraceBuffer& trace, const RunMetrics& m) {
    TraceAudit audit;
    auto note = [&](const std::string& s) {
        if (audit.findings.size() < 16)
            audit.findings.push_back(s);
    };

    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> delta_of;
    for (const auto& lm : m.levels)
        delta_of[{lm.epoch, lm.level}] = lm.delta;
    auto delta_for = [&](const ClassScope& s) {
        auto it = delta_of.find({s.epoch, s.level});
        if (it == delta_of.end())
            throw InputError("trace references unknown level");
        return it->second;
    };

    using GroupKey = std::tuple<ClassScope, VertexId, std::uint64_t>;

    // Counter values as traced: create -> 0, inc -> value.
    std::map<GroupKey, std::vector<std::uint64_t>> counter_values;
    for (const auto& c : trace.counters) {
        auto& values = counter_values[{c.scope, c.u, c.index}];
        // created once at 0, then +1 per step, never past 2d
        bool ok = c.created ? values.empty() && c.value == 0
                            : !values.empty() && c.value == values.back() + 1;
        if (!ok || c.value > 2 * c.scope.d) {
            ++audit.counter_mismatches;
            note("counter trace out of sequence for u=" + std::to_string(c.u) + " index " +
                 std::to_string(c.index) + " (value " + std::to_string(c.value) + ")");
        }
        values.push_back(c.value);
    }

    struct CRun {
        std::optional<std::uint64_t> last;
        std::optional<std::uint64_t> r;
    };
    std::map<GroupKey, CRun> c_runs;
    struct BRun {
        std::map<std::uint64_t, std::uint64_t> p_by_interval;
        std::optional<std::uint64_t> r;
    };
    std::map<GroupKey, BRun> b_runs;

    for (const auto& rec : trace.decisions) {
        const auto delta = delta_for(rec.scope);
        const auto root = sqrt_pow4(delta);
        const auto d = rec.scope.d;
        const auto k = 2 * m.kappa * d;
        const GroupKey key{rec.scope, rec.low, rec.sigma};

        if (rec.decision == Decision::CAssigned || rec.decision == Decision::CConflict) {
            ++audit.c_checked;
            auto& run = c_runs[key];
            if (!rec.counter) {
                ++audit.c_range_violations;
                note("C decision without a counter at seq " + std::to_string(rec.seq));
                continue;
            }
            const auto t = *rec.counter;
            bool bad = false;
            if (rec.slot != mod_slot(static_cast<std::int64_t>(rec.r_low),
                                     static_cast<std::int64_t>(t), k))
                bad = true;
            if (t >= 2 * d)
                bad = true;
            if (run.last && t <= *run.last)
                bad = true;
            if (run.r && *run.r != rec.r_low)
                bad = true;
            if (bad) {
                ++audit.c_range_violations;
                note("C-range violation at seq " + std::to_string(rec.seq) + " (u=" +
                     std::to_string(rec.low) + ", counter " + std::to_string(t) + ", slot " +
                     std::to_string(rec.slot) + ")");
            }
            run.last = t;
            run.r = rec.r_low;

            const auto& traced = counter_values[key];
            if (std::find(traced.begin(), traced.end(), t) == traced.end()) {
                ++audit.counter_mismatches;
                note("C slot used counter value " + std::to_string(t) +
                     " never reached in the counter trace");
            }
        } else if (rec.decision == Decision::BAssigned || rec.decision == Decision::BConflict) {
            ++audit.b_checked;
            auto& run = b_runs[key];
            bool bad = false;
            const auto start = mod_slot(static_cast<std::int64_t>(rec.r_low),
                                        static_cast<std::int64_t>(root * rec.p), k);
            const auto offset_in_block =
                mod_slot(static_cast<std::int64_t>(rec.slot), -static_cast<std::int64_t>(start), k);
            if (offset_in_block >= root || rec.b >= root || rec.counter)
                bad = true;
            if (rec.p >= 2 * d / root)
                bad = true;
            if (run.r && *run.r != rec.r_low)
                bad = true;
            auto [it, inserted] = run.p_by_interval.try_emplace(rec.interval, rec.p);
            if (!inserted && it->second != rec.p)
                bad = true;
            if (inserted)
                for (const auto& [iv, p] : run.p_by_interval)
                    if (iv != rec.interval && p == rec.p)
                        bad = true;
            run.r = rec.r_low;
            if (bad) {
                ++audit.b_block_violations;
                note("B-block violation at seq " + std::to_string(rec.seq) + " (u=" +
                     std::to_string(rec.low) + ", p " + std::to_string(rec.p) + ", slot " +
                     std::to_string(rec.slot) + ")");
            }
        }
    }

    // Saturated indices per vertex.
    std::map<std::pair<ClassScope, VertexId>, std::map<std::uint64_t, std::uint64_t>> sums;
    for (const auto& g : trace.degrees) {
        const auto delta = delta_for(g.scope);
        const auto d = g.scope.d;
        auto& per_index = sums[{g.scope, g.v}];
        per_index[g.sigma] += g.degree;
        std::uint64_t saturated = 0;
        for (const auto& [i, total] : per_index)
            if (total >= 2 * d)
                ++saturated;
        if (saturated * 2 * d > delta) {
            ++audit.saturation_violations;
            note("vertex " + std::to_string(g.v) + " saturates " + std::to_string(saturated) +
                 " indices at d=" + std::to_string(d));
        }
    }
    return audit;
}

SpaceAudit space_audit(const RunMetrics& m) {
    SpaceAudit a;
    for (const auto& lm : m.levels) {
        const auto root = sqrt_pow4(lm.delta);
        const auto budget = 2 * m.interval_size * m.phase_len;
        for (const auto& c : lm.log.classes) {
            if (c.stats.index_entries * c.d > budget) {
                ++a.index_violations;
                a.findings.push_back("index entries " + std::to_string(c.stats.index_entries) +
                                     " above bound at level " + std::to_string(lm.level) +
                                     " d=" + std::to_string(c.d));
            }
            if (c.stats.counters_created * root > budget) {
                ++a.counter_violations;
                a.findings.push_back("counters " + std::to_string(c.stats.counters_created) +
                                     " above bound at level " + std::to_string(lm.level) +
                                     " d=" + std::to_string(c.d));
            }
        }
        if (lm.final_words != 0) {
            ++a.residual_violations;
            a.findings.push_back("level " + std::to_string(lm.level) + " still holds " +
                                 std::to_string(lm.final_words) + " words after finish");
        }
    }
    return a;
}

MeterReport meter_check(const RunMetrics& small, const RunMetrics& large) {
    MeterReport r;
    for (const auto& lm : small.levels)
        r.peaks_small.push_back(lm.peak_words);
    for (const auto& lm : large.levels)
        r.peaks_large.push_back(lm.peak_words);
    const auto base = small.peak_words_l0();
    r.ratio_l0 = base ? static_cast<double>(large.peak_words_l0()) / static_cast<double>(base)
                      : 0.0;
    r.regression = r.ratio_l0 > kMeterRatioLimit;
    r.small_bounds = space_audit(small);
    r.large_bounds = space_audit(large);
    return r;
}

IndCheck offset_independence_check(std::span<const Edge> stream, RunConfig cfg, std::uint64_t sigma_seed,
                         std::uint64_t offset_seed_a, std::uint64_t offset_seed_b) {
    auto level0_counters = [&](std::uint64_t offset_seed) {
        RunConfig c = cfg;
        c.sigma_seed = sigma_seed;
        c.offset_seed = offset_seed;
        TraceBuffer buf;
        color_stream(c, stream, &buf);
        std::vector<CounterRecord> out;
        for (const auto& r : buf.counters)
            if (r.scope.level == 0)
                out.push_back(r);
        return out;
    };
    auto a = level0_counters(offset_seed_a);
    auto b = level0_counters(offset_seed_b);
    IndCheck res;
    res.records_first = a.size();
    res.records_second = b.size();
    auto [ia, ib] = std::mismatch(a.begin(), a.end(), b.begin(), b.end());
    if (ia != a.end() || ib != b.end())
        res.first_difference = static_cast<std::size_t>(ia - a.begin());
    res.pass = !res.first_difference;
    return res;
}

LeftoverStats leftover_stats(std::span<const RunMetrics> runs, std::uint64_t kappa) {
    if (runs.size() < kMinLeftoverRuns)
        throw InputError("leftover statistics need at least " + std::to_string(kMinLeftoverRuns) +
                         " seeded runs of one configuration, got " +
                         std::to_string(runs.size()) + "; rerun with --runs 20 or more");
    LeftoverStats s;
    s.runs = runs.size();
    std::vector<double> xs;
    for (const auto& m : runs)
        xs.push_back(m.leftover_fraction_l0());
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double var = 0.0;
    for (auto x : xs)
        var += (x - s.mean) * (x - s.mean);
    var /= static_cast<double>(xs.size() - 1);
    s.stddev = std::sqrt(var);
    const double half = 1.96 * s.stddev / std::sqrt(static_cast<double>(xs.size()));
    s.ci_low = s.mean - half;
    s.ci_high = s.mean + half;
    s.threshold = 7.0 / static_cast<double>(kappa) + kLeftoverSlack;
    s.flagged = s.mean > s.threshold;
    return s;
}

} // namespace wsec
