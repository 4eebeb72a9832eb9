#include "wsec/phase_engine.hpp"

#include <algorithm>

#include "wsec/primitives.hpp"

namespace wsec {

IntervalSnapshot make_snapshot(std::uint64_t index, std::vector<Edge> edges,
                               std::uint64_t delta) {
    IntervalSnapshot s;
    s.index = index;
    s.edges = std::move(edges);
    for (const auto& e : s.edges) {
        ++s.deg[e.u];
        ++s.deg[e.v];
    }
    for (const auto& [v, dv] : s.deg)
        if (dv > delta)
            throw InputError("vertex " + std::to_string(v) + " has degree " + std::to_string(dv) +
                             " in one interval, above the degree bound " +
                             std::to_string(delta));
    return s;
}

ClassifiedInterval classify_interval(const IntervalSnapshot& s, std::uint64_t delta) {
    const auto root = sqrt_pow4(delta);
    ClassifiedInterval out;
    for (const auto& e : s.edges) {
        const auto du = s.deg.at(e.u);
        const auto dv = s.deg.at(e.v);
        const auto top = std::max(du, dv);
        if (top > delta)
            throw InputError("degree bound violated");
        if (top < root) {
            out.low_bucket.push_back(e);
            continue;
        }
        const auto d = std::uint64_t{1} << floor_log2(top);
        auto& bucket = out.per_class[d];
        const bool u_high = du >= d;
        const bool v_high = dv >= d;
        if (u_high && v_high)
            bucket.h1.push_back(e);
        else if (u_high)
            bucket.h2.push_back(H2Edge{e, e.v, e.u});
        else
            bucket.h2.push_back(H2Edge{e, e.u, e.v});
    }
    return out;
}

std::vector<Emission> color_low_bucket(std::span<const Edge> edges, std::uint32_t epoch,
                                       std::uint32_t level, std::uint64_t phase,
                                       std::uint64_t interval, std::uint64_t sqrt_delta) {
    std::vector<Emission> out;
    if (edges.empty())
        return out;
    const auto palette = 2 * sqrt_delta - 1;
    auto slots = greedy_edge_color(edges, sqrt_delta > 1 ? sqrt_delta - 1 : 0, palette);
    out.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i)
        out.push_back(Emission{edges[i], ColorId::low(epoch, level, phase, interval, slots[i])});
    return out;
}

std::vector<Emission> base_case_color(std::span<const Edge> edges, std::uint32_t epoch,
                                      std::uint32_t level) {
    std::vector<Emission> out;
    if (edges.empty())
        return out;
    const auto dmax = max_degree(edges);
    auto slots = greedy_edge_color(edges, dmax, 2 * dmax - 1);
    out.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i)
        out.push_back(Emission{edges[i], ColorId::base(epoch, level, slots[i])});
    return out;
}

std::vector<Emission> fallback_color(std::span<const Edge> edges, std::uint32_t epoch,
                                     std::uint32_t level, std::uint64_t phase,
                                     std::uint64_t interval, std::uint64_t delta) {
    std::vector<Emission> out;
    auto slots = greedy_edge_color(edges, delta, 2 * delta - 1);
    out.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i)
        out.push_back(Emission{edges[i], ColorId::low(epoch, level, phase, interval, slots[i])});
    return out;
}

LevelEngine::LevelEngine(const RunConfig& cfg, std::uint32_t epoch, std::uint32_t level,
                         TraceSink* trace)
    : cfg_(cfg),
      epoch_(epoch),
      level_(level),
      trace_(trace),
      fallback_(level >= cfg.max_depth),
      sqrt_delta_(cfg.sqrt_delta()),
      phase_len_(cfg.effective_phase_len()),
      offsets_(RandomSource(cfg.effective_offset_seed()).child("offset").child(epoch).child(level)),
      sigmas_(RandomSource(cfg.effective_sigma_seed()).child("sigma").child(epoch).child(level)) {
    cfg_.validate();
}

LevelEngine::~LevelEngine() {
    classes_.clear();
}

StepOutput LevelEngine::ingest(const Edge& e) {
    if (flushed_)
        throw InvariantError("ingest after flush");
    if (e.u == e.v)
        throw InputError("self-loop on vertex " + std::to_string(e.u) + " (seq " +
                         std::to_string(e.seq) + ")");
    if (e.u >= cfg_.n || e.v >= cfg_.n)
        throw InputError("vertex id out of range in edge seq " + std::to_string(e.seq));
    if (last_seq_ && e.seq <= *last_seq_)
        throw InputError("edge sequence numbers must strictly increase");
    last_seq_ = e.seq;

    // A full first interval waits for one more edge: if the input ends right
    // there, the whole level is still a base case.
    StepOutput out;
    if (next_interval_ == 0 && !fallback_ && buffer_.size() >= cfg_.interval_size)
        out = process_interval();

    buffer_.push_back(e);
    meter_.add(SpaceCategory::Buffer);
    ++log_.input_edges;
    if (buffer_.size() >= cfg_.interval_size && (next_interval_ > 0 || fallback_))
        return process_interval();
    return out;
}

StepOutput LevelEngine::flush() {
    if (flushed_)
        return {};
    flushed_ = true;
    StepOutput out;
    if (!buffer_.empty())
        out = (!fallback_ && next_interval_ == 0) ? base_case() : process_interval();
    close_phase();
    return out;
}

void LevelEngine::release_buffer() {
    meter_.remove(SpaceCategory::Buffer, buffer_.size());
    buffer_.clear();
}

ClassColorer& LevelEngine::class_state(std::uint64_t d, std::uint64_t phase) {
    auto it = classes_.find(d);
    if (it != classes_.end())
        return *it->second;
    ClassParams params;
    params.scope = ClassScope{epoch_, level_, phase, d};
    params.delta = cfg_.delta;
    params.kappa = cfg_.kappa;
    params.phase_start = phase * phase_len_;
    params.faults = cfg_.faults;
    auto cc = std::make_unique<ClassColorer>(params, offsets_.child(phase).child(d),
                                             sigmas_.child(phase).child(d), &meter_, trace_);
    return *classes_.emplace(d, std::move(cc)).first->second;
}

void LevelEngine::close_phase() {
    for (auto& [d, cc] : classes_)
        log_.classes.push_back(ClassPhaseLog{cc->params().scope.phase, d, cc->stats()});
    classes_.clear();
}

StepOutput LevelEngine::process_fallback(const IntervalSnapshot& s) {
    StepOutput out;
    out.colored = fallback_color(s.edges, epoch_, level_, phase_of(s.index), s.index, cfg_.delta);
    log_.fallback_intervals.push_back(s.index);
    return out;
}

StepOutput LevelEngine::base_case() {
    auto snap = make_snapshot(0, buffer_, cfg_.delta);
    meter_.add(SpaceCategory::Scratch, snap.deg.size());
    StepOutput out;
    out.colored = base_case_color(snap.edges, epoch_, level_);
    log_.base_degree = max_degree(snap.edges);
    log_.colored += out.colored.size();
    meter_.remove(SpaceCategory::Scratch, snap.deg.size());
    release_buffer();
    return out;
}

StepOutput LevelEngine::process_interval() {
    const auto index = next_interval_++;
    const auto phase = phase_of(index);
    auto snap = make_snapshot(index, buffer_, cfg_.delta);
    meter_.add(SpaceCategory::Scratch, snap.deg.size());

    StepOutput out;
    if (fallback_) {
        out = process_fallback(snap);
    } else {
        auto classified = classify_interval(snap, cfg_.delta);
        if (!classified.low_bucket.empty()) {
            out.colored = color_low_bucket(classified.low_bucket, epoch_, level_, phase, index,
                                           sqrt_delta_);
            log_.low_intervals.push_back(index);
        }
        for (auto& [d, bucket] : classified.per_class) {
            auto& cc = class_state(d, phase);
            cc.begin_interval(index);
            auto step1 = cc.step1_high_high(bucket, snap.deg);
            auto step2 = cc.step2_high_low(bucket.h2, step1, snap.deg);
            cc.end_interval();
            out.append(std::move(step1.out));
            out.append(std::move(step2));
        }
    }

    std::sort(out.leftovers.begin(), out.leftovers.end(),
              [](const Edge& a, const Edge& b) { return a.seq < b.seq; });
    if (out.colored.size() + out.leftovers.size() != snap.edges.size())
        throw InvariantError("interval conservation broken at level " + std::to_string(level_));

    ++log_.intervals;
    log_.phases = phase + 1;
    log_.colored += out.colored.size();
    log_.leftovers += out.leftovers.size();

    meter_.remove(SpaceCategory::Scratch, snap.deg.size());
    release_buffer();
    if ((index + 1) % phase_len_ == 0)
        close_phase();
    return out;
}

} // namespace wsec
