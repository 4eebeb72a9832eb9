#include "wsec/class_colorer.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace wsec {

void StepOutput::append(StepOutput&& other) {
    colored.insert(colored.end(), other.colored.begin(), other.colored.end());
    leftovers.insert(leftovers.end(), other.leftovers.begin(), other.leftovers.end());
}

ClassColorer::ClassColorer(const ClassParams& params, RandomSource offsets, RandomSource sigmas,
                           SpaceMeter* meter, TraceSink* trace)
    : params_(params),
      sqrt_delta_(sqrt_pow4(params.delta)),
      k_(2 * params.kappa * params.scope.d),
      npal_(params.kappa * params.delta / params.scope.d),
      offsets_(std::move(offsets)),
      sigmas_(std::move(sigmas)),
      meter_(meter),
      trace_(trace),
      window_(k_) {
    const auto d = params.scope.d;
    if (!is_pow2(d) || d < sqrt_delta_ || d > params.delta)
        throw InvariantError("class d=" + std::to_string(d) + " outside [sqrt(delta), delta]");
    if (npal_ >= (std::uint64_t{1} << 32))
        throw InputError("palette count kappa*delta/d too large");
}

ClassColorer::~ClassColorer() {
    if (!meter_)
        return;
    for (std::size_t i = 0; i < kSpaceCategories; ++i)
        if (held_[i])
            meter_->remove(static_cast<SpaceCategory>(i), held_[i]);
}

void ClassColorer::meter_add(SpaceCategory c, std::uint64_t w) {
    held_[static_cast<std::size_t>(c)] += w;
    if (meter_)
        meter_->add(c, w);
}

std::uint64_t ClassColorer::draw_sigma(std::uint64_t position) const {
    return sigmas_.uniform(position, npal_) + 1;
}

void ClassColorer::bump_phase_count(std::uint64_t index) {
    auto [it, inserted] = p_.try_emplace(index, 0);
    if (inserted)
        meter_add(SpaceCategory::PhaseCounts);
    ++it->second;
}

std::uint64_t ClassColorer::begin_interval(std::uint64_t interval) {
    if (in_interval_)
        throw InvariantError("begin_interval called twice");
    if (interval < params_.phase_start)
        throw InvariantError("interval precedes phase start");
    const auto position = interval - params_.phase_start;
    if (position < synced_)
        throw InvariantError("interval already processed in this class");
    for (; synced_ < position; ++synced_)
        bump_phase_count(draw_sigma(synced_));
    interval_ = interval;
    sigma_ = draw_sigma(position);
    in_interval_ = true;
    ++stats_.intervals;
    return sigma_;
}

void ClassColorer::end_interval() {
    if (!in_interval_)
        throw InvariantError("end_interval without begin_interval");
    bump_phase_count(sigma_);
    synced_ = interval_ - params_.phase_start + 1;
    if (meter_ && window_.entries()) {
        meter_->remove(SpaceCategory::Window, window_.entries());
        held_[static_cast<std::size_t>(SpaceCategory::Window)] -= window_.entries();
    }
    window_.clear();
    in_interval_ = false;
}

std::uint64_t ClassColorer::phase_count(std::uint64_t index) const {
    auto it = p_.find(index);
    return it == p_.end() ? 0 : it->second;
}

std::optional<std::uint64_t> ClassColorer::counter(VertexId u, std::uint64_t index) const {
    auto it = counters_.find(counter_key(u, index));
    if (it == counters_.end())
        return std::nullopt;
    return it->second;
}

bool ClassColorer::has_index(VertexId v, std::uint64_t index) const {
    auto it = index_sets_.find(v);
    return it != index_sets_.end() &&
           std::find(it->second.begin(), it->second.end(), index) != it->second.end();
}

void ClassColorer::add_index(VertexId v, std::uint64_t index) {
    auto& set = index_sets_[v];
    if (std::find(set.begin(), set.end(), index) != set.end())
        return;
    set.push_back(index);
    meter_add(SpaceCategory::IndexSets);
    ++stats_.index_entries;
}

std::uint64_t ClassColorer::offset(VertexId v) {
    auto [it, inserted] = r_.try_emplace(v, 0);
    if (inserted) {
        it->second = offsets_.uniform(v, k_);
        meter_add(SpaceCategory::Offsets);
        ++stats_.offsets_drawn;
    }
    return it->second;
}

ColorId ClassColorer::color(ColorKind kind, std::uint64_t slot) const {
    const auto& s = params_.scope;
    return ColorId::family(kind, s.epoch, s.level, s.phase, s.d, sigma_, slot);
}

void ClassColorer::record(const H2Edge& e, Decision what, std::uint64_t slot, std::uint64_t r_low,
                          std::optional<std::uint64_t> counter, std::uint64_t b,
                          std::uint64_t p) {
    if (!trace_)
        return;
    DecisionRecord r;
    r.scope = params_.scope;
    r.interval = interval_;
    r.sigma = sigma_;
    r.seq = e.edge.seq;
    r.low = e.low;
    r.high = e.high;
    r.decision = what;
    r.slot = slot;
    r.r_low = r_low;
    r.counter = counter;
    r.b = b;
    r.p = p;
    trace_->on_decision(r);
}

void ClassColorer::count_counter(VertexId u, bool created, std::uint64_t value) {
    if (!trace_)
        return;
    CounterRecord r;
    r.scope = params_.scope;
    r.interval = interval_;
    r.u = u;
    r.index = sigma_;
    r.created = created;
    r.value = value;
    trace_->on_counter(r);
}

Step1Result ClassColorer::step1_high_high(const ClassBucket& bucket, const DegreeMap& deg) {
    if (!in_interval_)
        throw InvariantError("step1 outside an interval");
    const auto d = params_.scope.d;

    std::vector<VertexId> high;
    for (const auto& e : bucket.h1) {
        high.push_back(e.u);
        high.push_back(e.v);
    }
    for (const auto& e : bucket.h2)
        high.push_back(e.high);
    std::sort(high.begin(), high.end());
    high.erase(std::unique(high.begin(), high.end()), high.end());

    Step1Result res;
    for (auto v : high) {
        auto dv = deg.at(v);
        if (dv < d || dv >= 2 * d)
            throw InvariantError("vertex marked high outside [d, 2d)");
        if (has_index(v, sigma_))
            res.exiled.insert(v);
        else
            res.active.insert(v);
    }

    if (trace_) {
        std::vector<VertexId> touched = high;
        for (const auto& e : bucket.h2)
            touched.push_back(e.low);
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (auto v : touched)
            trace_->on_degree(DegreeRecord{params_.scope, interval_, sigma_, v, deg.at(v)});
    }

    std::vector<Edge> inner;
    for (const auto& e : bucket.h1) {
        if (res.exiled.contains(e.u) || res.exiled.contains(e.v)) {
            res.out.leftovers.push_back(e);
            record(H2Edge{e, e.u, e.v}, Decision::Exiled, 0, 0, std::nullopt, 0, 0);
        } else {
            inner.push_back(e);
        }
    }
    // H1[U] has maximum degree below 2d; first-fit needs at most 4d-3 of the K slots.
    auto slots = greedy_edge_color(inner, 2 * d - 1, k_);
    std::unordered_set<std::uint64_t> distinct;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        res.out.colored.push_back(Emission{inner[i], color(ColorKind::A, slots[i])});
        distinct.insert(slots[i]);
        record(H2Edge{inner[i], inner[i].u, inner[i].v}, Decision::AColored, slots[i], 0,
               std::nullopt, 0, 0);
    }
    res.a_slots_used = distinct.size();
    stats_.max_a_slots = std::max(stats_.max_a_slots, res.a_slots_used);

    for (const auto& e : bucket.h2) {
        if (res.exiled.contains(e.high)) {
            res.out.leftovers.push_back(e.edge);
            record(e, Decision::Exiled, 0, 0, std::nullopt, 0, 0);
        }
    }

    for (auto v : high)
        add_index(v, sigma_);
    return res;
}

StepOutput ClassColorer::step2_high_low(std::span<const H2Edge> h2, const Step1Result& step1,
                                        const DegreeMap& deg) {
    if (!in_interval_)
        throw InvariantError("step2 outside an interval");
    const auto d = params_.scope.d;
    const auto cap = 2 * d;
    const auto p_cap = 2 * d / sqrt_delta_;
    const auto p_now = phase_count(sigma_);

    // Low vertices ascending, then each low vertex's edges by (high neighbor, seq).
    std::vector<const H2Edge*> order;
    order.reserve(h2.size());
    for (const auto& e : h2)
        order.push_back(&e);
    std::sort(order.begin(), order.end(), [](const H2Edge* a, const H2Edge* b) {
        return std::tie(a->low, a->high, a->edge.seq) < std::tie(b->low, b->high, b->edge.seq);
    });

    StepOutput out;
    std::size_t i = 0;
    while (i < order.size()) {
        const VertexId u = order[i]->low;
        std::size_t end = i;
        while (end < order.size() && order[end]->low == u)
            ++end;

        if (deg.at(u) >= d)
            throw InvariantError("vertex marked low with degree >= d");

        const auto key = counter_key(u, sigma_);
        auto cit = counters_.find(key);
        if (cit == counters_.end() && deg.at(u) > sqrt_delta_) {
            cit = counters_.emplace(key, 0).first;
            meter_add(SpaceCategory::Counters);
            ++stats_.counters_created;
            count_counter(u, true, 0);
        }

        for (std::uint64_t b = 0; i < end; ++i, ++b) {
            const H2Edge& e = *order[i];
            const std::optional<std::uint64_t> c =
                cit == counters_.end() ? std::nullopt : std::optional(cit->second);
            bool leftover = false;

            if (step1.exiled.contains(e.high)) {
                record(e, Decision::SkipExiled, 0, 0, c, b, p_now);
                leftover = true;  // already forwarded by step 1
            } else {
                const auto r_u = offset(u);
                const auto r_v = offset(e.high);
                if (gap_check(r_u, r_v, d, k_) == GapOutcome::Leftover) {
                    record(e, Decision::GapLeftover, 0, r_u, c, b, p_now);
                    out.leftovers.push_back(e.edge);
                    leftover = true;
                } else if (c && *c >= cap) {
                    record(e, Decision::CounterFull, 0, r_u, c, b, p_now);
                    out.leftovers.push_back(e.edge);
                    leftover = true;
                } else if (c) {
                    const auto slot = mod_slot(static_cast<std::int64_t>(r_u),
                                               static_cast<std::int64_t>(*c), k_);
                    if (window_.used(e.high, Family::C, slot)) {
                        record(e, Decision::CConflict, slot, r_u, c, b, p_now);
                        out.leftovers.push_back(e.edge);
                        leftover = true;
                    } else {
                        window_.mark(e.high, Family::C, slot);
                        meter_add(SpaceCategory::Window);
                        out.colored.push_back(Emission{e.edge, color(ColorKind::C, slot)});
                        record(e, Decision::CAssigned, slot, r_u, c, b, p_now);
                    }
                } else if (p_now >= p_cap) {
                    record(e, Decision::PhaseCap, 0, r_u, c, b, p_now);
                    out.leftovers.push_back(e.edge);
                    leftover = true;
                } else {
                    const auto slot = mod_slot(static_cast<std::int64_t>(r_u),
                                               static_cast<std::int64_t>(b + sqrt_delta_ * p_now),
                                               k_);
                    if (window_.used(e.high, Family::B, slot)) {
                        record(e, Decision::BConflict, slot, r_u, c, b, p_now);
                        out.leftovers.push_back(e.edge);
                        leftover = true;
                    } else {
                        window_.mark(e.high, Family::B, slot);
                        meter_add(SpaceCategory::Window);
                        out.colored.push_back(Emission{e.edge, color(ColorKind::B, slot)});
                        record(e, Decision::BAssigned, slot, r_u, c, b, p_now);
                    }
                }
            }

            if (cit != counters_.end()) {
                if (leftover && params_.faults.skip_counter_increment_on_leftover)
                    continue;
                // Saturates at 2d: from there on every edge of u under this index is leftover.
                if (cit->second < cap) {
                    ++cit->second;
                    count_counter(u, false, cit->second);
                }
            }
        }
    }
    return out;
}

} // namespace wsec
