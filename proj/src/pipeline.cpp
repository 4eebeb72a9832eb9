#include "wsec/pipeline.hpp"

#include <algorithm>

namespace wsec {

Pipeline::Pipeline(const RunConfig& cfg, std::uint32_t epoch, TraceSink* trace)
    : cfg_(cfg), epoch_(epoch), trace_(trace) {
    cfg_.validate();
}

LevelEngine& Pipeline::level_at(std::uint32_t level) {
    if (level > cfg_.max_depth)
        throw InvariantError("recursion passed the depth cap");
    while (levels_.size() <= level)
        levels_.push_back(std::make_unique<LevelEngine>(
            cfg_, epoch_, static_cast<std::uint32_t>(levels_.size()), trace_));
    return *levels_[level];
}

void Pipeline::cascade(std::vector<Edge> pending, std::uint32_t level,
                       std::vector<Emission>& out) {
    while (!pending.empty()) {
        auto& lvl = level_at(level);
        std::vector<Edge> next;
        for (const auto& e : pending) {
            auto step = lvl.ingest(e);
            out.insert(out.end(), step.colored.begin(), step.colored.end());
            next.insert(next.end(), step.leftovers.begin(), step.leftovers.end());
        }
        pending = std::move(next);
        ++level;
    }
}

std::vector<Emission> Pipeline::submit(const Edge& e) {
    std::vector<Emission> out;
    cascade({e}, 0, out);
    return out;
}

std::vector<Emission> Pipeline::finalize() {
    std::vector<Emission> out;
    for (std::size_t l = 0; l < levels_.size(); ++l) {
        auto step = levels_[l]->flush();
        out.insert(out.end(), step.colored.begin(), step.colored.end());
        cascade(std::move(step.leftovers), static_cast<std::uint32_t>(l + 1), out);
    }
    return out;
}

std::uint32_t epoch_for_degree(std::uint64_t max_deg) {
    return ceil_log2(std::max<std::uint64_t>(max_deg, 1));
}

EpochRouter::EpochRouter(const RunConfig& cfg, TraceSink* trace)
    : base_(cfg), trace_(trace), degree_(cfg.n, 0) {}

std::vector<Emission> EpochRouter::route(const Edge& e) {
    max_deg_ = std::max({max_deg_, ++degree_.at(e.u), ++degree_.at(e.v)});
    const auto k = epoch_for_degree(max_deg_);
    if (epochs_.empty() || k > current_) {
        current_ = k;
        RunConfig cfg = base_;
        cfg.delta = normalize_delta(std::uint64_t{1} << k);
        epochs_.emplace(k, std::make_unique<Pipeline>(cfg, k, trace_));
    }
    return epochs_.at(current_)->submit(e);
}

std::vector<Emission> EpochRouter::finalize() {
    std::vector<Emission> out;
    for (auto& [k, p] : epochs_) {
        auto step = p->finalize();
        out.insert(out.end(), step.begin(), step.end());
    }
    return out;
}

Engine::Engine(const RunConfig& cfg, TraceSink* trace)
    : cfg_(cfg), start_(std::chrono::steady_clock::now()) {
    cfg_.validate();
    if (cfg_.delta_mode == DeltaMode::Known)
        known_ = std::make_unique<Pipeline>(cfg_, 0, trace);
    else
        router_ = std::make_unique<EpochRouter>(cfg_, trace);
}

void Engine::observe(const std::vector<Emission>& out) {
    for (const auto& em : out) {
        colors_.insert(em.color);
        colors_by_level_[{em.color.epoch, em.color.level}].insert(em.color);
    }
    metrics_.emitted += out.size();
}

std::vector<Emission> Engine::push(const Edge& e) {
    if (finished_)
        throw InvariantError("push after finish");
    if (e.u == e.v)
        throw InputError("self-loop on vertex " + std::to_string(e.u));
    if (e.u >= cfg_.n || e.v >= cfg_.n)
        throw InputError("vertex id out of range at seq " + std::to_string(e.seq));
    if (known_) {
        if (degree_.empty())
            degree_.assign(cfg_.n, 0);
        for (auto x : {e.u, e.v})
            if (++degree_[x] > cfg_.delta)
                throw InputError("vertex " + std::to_string(x) + " exceeds degree bound " +
                                 std::to_string(cfg_.delta) + " at seq " +
                                 std::to_string(e.seq));
    }
    ++metrics_.input_edges;
    auto out = known_ ? known_->submit(e) : router_->route(e);
    observe(out);
    return out;
}

void Engine::collect_level(const LevelEngine& lvl) {
    LevelMetrics lm;
    lm.epoch = lvl.epoch();
    lm.level = lvl.level();
    lm.delta = lvl.config().delta;
    lm.fallback = lvl.fallback();
    auto it = colors_by_level_.find({lm.epoch, lm.level});
    lm.colors_used = it == colors_by_level_.end() ? 0 : it->second.size();
    lm.peak_words = lvl.meter().peak();
    lm.peak_breakdown = lvl.meter().at_peak();
    lm.final_words = lvl.meter().current();
    lm.log = lvl.log();
    if (lm.log.input_edges > 0)
        metrics_.depth = std::max(metrics_.depth, lm.level);
    metrics_.interval_count += lm.log.intervals;
    metrics_.phase_count += lm.log.phases;
    metrics_.fallback_intervals += lm.log.fallback_intervals.size();
    metrics_.levels.push_back(std::move(lm));
}

std::vector<Emission> Engine::finish() {
    if (finished_)
        return {};
    auto out = known_ ? known_->finalize() : router_->finalize();
    observe(out);
    finished_ = true;

    metrics_.n = cfg_.n;
    metrics_.delta = cfg_.delta;
    metrics_.kappa = cfg_.kappa;
    metrics_.interval_size = cfg_.interval_size;
    metrics_.phase_len = cfg_.effective_phase_len();
    metrics_.max_depth = cfg_.max_depth;
    metrics_.seed = cfg_.seed;
    metrics_.sigma_seed = cfg_.effective_sigma_seed();
    metrics_.offset_seed = cfg_.effective_offset_seed();
    metrics_.delta_mode = cfg_.delta_mode;
    metrics_.colors_used = colors_.size();
    for (const auto& c : colors_)
        ++metrics_.colors_by_kind[kind_name(c.kind)];

    if (known_) {
        metrics_.epochs = 1;
        for (std::size_t l = 0; l < known_->depth(); ++l)
            collect_level(known_->level(l));
    } else {
        metrics_.epochs = static_cast<std::uint32_t>(router_->epochs().size());
        for (const auto& [k, p] : router_->epochs())
            for (std::size_t l = 0; l < p->depth(); ++l)
                collect_level(p->level(l));
    }
    metrics_.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start_)
                           .count();
    return out;
}

RunResult color_stream(const RunConfig& cfg, std::span<const Edge> edges, TraceSink* trace) {
    Engine engine(cfg, trace);
    RunResult res;
    res.emissions.reserve(edges.size());
    for (const auto& e : edges) {
        auto out = engine.push(e);
        res.emissions.insert(res.emissions.end(), out.begin(), out.end());
    }
    auto tail = engine.finish();
    res.emissions.insert(res.emissions.end(), tail.begin(), tail.end());
    res.metrics = engine.metrics();
    return res;
}

RunResult run_baseline(RunConfig cfg, std::span<const Edge> edges) {
    cfg.max_depth = 0;
    cfg.delta_mode = DeltaMode::Known;
    return color_stream(cfg, edges);
}

} // namespace wsec
