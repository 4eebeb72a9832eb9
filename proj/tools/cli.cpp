#include "wsec/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "wsec/audit.hpp"
#include "wsec/metrics.hpp"
#include "wsec/pipeline.hpp"
#include "wsec/trace.hpp"
#include "wsec/workload.hpp"

namespace wsec::cli {

namespace {

// Flags shared by color and baseline.
struct EngineFlags {
    std::uint64_t kappa = 32;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> sigma_seed;
    std::optional<std::uint64_t> offset_seed;
    std::string interval_factor = "1";
    std::optional<std::uint64_t> interval_size;
    std::optional<std::uint64_t> phase_len;
    std::optional<std::uint32_t> max_depth;
    bool unknown_delta = false;
    std::string trace_path;
    std::string output;
    std::string metrics_path;
    std::string input;
};

struct CheckFlags {
    std::string which;
    std::optional<std::size_t> runs;
    std::uint64_t kappa = 32;
    std::uint64_t seed = 0;
    std::uint64_t n = 256;
    std::uint64_t delta = 64;
    std::optional<std::uint64_t> m;
    std::string order;
    std::string interval_factor = "1";
    bool simple = false;
    bool inject_fault = false;
};

struct BenchFlags {
    std::vector<std::uint64_t> n{64, 256};
    std::vector<std::uint64_t> delta{16, 64};
    std::vector<std::uint64_t> m;
    std::vector<std::string> orders{"arrival-random"};
    std::uint64_t seeds = 3;
    std::uint64_t seed_base = 0;
    std::uint64_t kappa = 32;
    std::string interval_factor = "1";
    bool simple = false;
    bool no_timing = false;
    std::string output;
};

std::uint64_t resolve_interval(const std::string& factor, std::uint64_t n) {
    if (factor == "1")
        return n;
    if (factor == "logn")
        return interval_size_logn(n);
    double f = 0.0;
    try {
        std::size_t used = 0;
        f = std::stod(factor, &used);
        if (used != factor.size())
            throw std::invalid_argument(factor);
    } catch (const std::exception&) {
        throw InputError("--interval-factor must be 1, logn or a positive number, got '" +
                         factor + "'");
    }
    if (!(f > 0.0))
        throw InputError("--interval-factor must be positive");
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(f * double(n))));
}

RunConfig resolve_config(const EngineFlags& f, const StreamHeader& h) {
    RunConfig cfg;
    cfg.n = h.n;
    cfg.delta = normalize_delta(std::max<std::uint64_t>(h.delta, 1));
    cfg.kappa = f.kappa;
    cfg.interval_size = f.interval_size ? *f.interval_size : resolve_interval(f.interval_factor, h.n);
    cfg.phase_len = f.phase_len.value_or(0);
    cfg.max_depth = f.max_depth ? *f.max_depth : default_max_depth(h.m);
    cfg.seed = f.seed;
    cfg.sigma_seed = f.sigma_seed.value_or(f.seed);
    cfg.offset_seed = f.offset_seed.value_or(f.seed);
    cfg.delta_mode = f.unknown_delta ? DeltaMode::Unknown : DeltaMode::Known;
    cfg.validate();
    return cfg;
}

// Replayable command line plus one line per resolved field.
void print_effective(std::ostream& err, const std::string& cmd, const RunConfig& cfg,
                     const EngineFlags& f) {
    err << "# wsec " << cmd << " --kappa " << cfg.kappa << " --seed " << cfg.seed
        << " --sigma-seed " << cfg.effective_sigma_seed() << " --offset-seed "
        << cfg.effective_offset_seed() << " --interval-size " << cfg.interval_size
        << " --phase-len " << cfg.effective_phase_len();
    if (cmd != "baseline")
        err << " --max-depth " << cfg.max_depth;
    if (cfg.delta_mode == DeltaMode::Unknown)
        err << " --unknown-delta";
    if (!f.trace_path.empty())
        err << " --trace " << f.trace_path;
    err << " -o " << f.output;
    if (!f.metrics_path.empty())
        err << " --metrics " << f.metrics_path;
    err << ' ' << f.input << '\n';
    err << "# n = " << cfg.n << "\n# delta = " << cfg.delta << "\n# kappa = " << cfg.kappa
        << "\n# interval_size = " << cfg.interval_size
        << "\n# phase_len = " << cfg.effective_phase_len() << "\n# max_depth = " << cfg.max_depth
        << "\n# seed = " << cfg.seed << "\n# sigma_seed = " << cfg.effective_sigma_seed()
        << "\n# offset_seed = " << cfg.effective_offset_seed() << "\n# delta_mode = "
        << (cfg.delta_mode == DeltaMode::Unknown ? "unknown" : "known") << '\n';
}

nlohmann::json metrics_document(const RunMetrics& m) {
    auto doc = to_json(m);
    auto b = color_budget(m);
    doc["color_budget"] = {{"class", b.class_colors},     {"low", b.low_colors},
                           {"fallback", b.fallback_colors}, {"base", b.base_colors},
                           {"total", b.total()},           {"within", m.colors_used <= b.total()}};
    return doc;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f)
        throw InputError("cannot open '" + path + "' for writing");
    return f;
}

int cmd_run(const std::string& name, EngineFlags f, bool baseline, std::ostream& out,
            std::ostream& err) {
    std::ifstream in(f.input);
    if (!in)
        throw InputError("cannot open '" + f.input + "'");
    StreamReader reader(in, !f.unknown_delta);
    auto cfg = resolve_config(f, reader.header());
    if (baseline) {
        cfg.max_depth = 0;
        cfg.delta_mode = DeltaMode::Known;
    }
    if (f.output.empty())
        f.output = f.input + ".colored";
    print_effective(err, name, cfg, f);

    auto colored = open_out(f.output);
    std::ofstream trace_file;
    std::unique_ptr<TraceWriter> trace;
    if (!f.trace_path.empty()) {
        trace_file = open_out(f.trace_path);
        trace = std::make_unique<TraceWriter>(trace_file);
    }

    Engine engine(cfg, trace.get());
    while (auto e = reader.next())
        for (const auto& em : engine.push(*e))
            write_colored_line(colored, em);
    for (const auto& em : engine.finish())
        write_colored_line(colored, em);

    auto doc = metrics_document(engine.metrics()).dump(2);
    if (f.metrics_path.empty()) {
        out << doc << '\n';
    } else {
        auto mf = open_out(f.metrics_path);
        mf << doc << '\n';
    }
    return kExitOk;
}

std::string edge_text(const Edge& e) {
    return "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ") seq " +
           std::to_string(e.seq);
}

int cmd_verify(const std::string& colored_path, const std::string& stream_path,
               std::ostream& out, std::ostream& err) {
    err << "# wsec verify " << colored_path << ' ' << stream_path << '\n';
    auto colored = read_colored(colored_path);
    auto stream = read_stream(stream_path);
    auto r = verify_proper(colored, stream.edges);
    switch (r.status) {
    case VerifyResult::Status::Ok:
        out << "ok " << colored.size() << " edges\n";
        return kExitOk;
    case VerifyResult::Status::Conflict:
        out << "conflict at vertex " << r.vertex << ": " << edge_text(r.first) << " and "
            << edge_text(r.second) << " share " << encode_color(r.color) << '\n';
        return kExitFailed;
    case VerifyResult::Status::Mismatch:
        out << "mismatch: " << r.detail << '\n';
        return kExitFailed;
    }
    return kExitFailed;
}

int cmd_gen(std::uint64_t n, std::uint64_t delta, std::optional<std::uint64_t> m, bool simple,
            const std::string& order, std::uint64_t seed, const std::string& output,
            std::ostream& out, std::ostream& err) {
    auto policy = parse_order(order);
    auto edges_m = m.value_or(n * delta / 4);
    err << "# wsec gen --n " << n << " --delta " << delta << " --m " << edges_m << " --order "
        << order_name(policy) << " --seed " << seed << (simple ? " --simple" : "")
        << (output.empty() ? "" : " -o " + output) << '\n';
    auto edges = generate_stream(n, delta, edges_m, policy, !simple, seed);
    StreamHeader h{n, delta, edges_m};
    if (output.empty())
        write_stream(out, h, edges);
    else
        write_stream(output, h, edges);
    return kExitOk;
}

int cmd_bench(const BenchFlags& b, std::ostream& out, std::ostream& err) {
    err << "# wsec bench --kappa " << b.kappa << " --seeds " << b.seeds << " --seed-base "
        << b.seed_base << " --interval-factor " << b.interval_factor
        << (b.simple ? " --simple" : "") << (b.no_timing ? " --no-timing" : "");
    auto list = [&](const char* flag, const auto& v) {
        err << ' ' << flag;
        for (const auto& x : v)
            err << ' ' << x;
    };
    list("--n", b.n);
    list("--delta", b.delta);
    if (!b.m.empty())
        list("--m", b.m);
    list("--orders", b.orders);
    err << '\n';

    std::ofstream file;
    std::ostream* sink = &out;
    if (!b.output.empty()) {
        file = open_out(b.output);
        sink = &file;
    }
    auto& csv = *sink;
    csv << "n,delta,m,kappa,order,seed,algorithm,colors_used,depth,leftover0,peak_words_l0,"
           "wall_ms\n";
    for (auto n : b.n)
        for (auto raw : b.delta) {
            auto delta = normalize_delta(raw);
            std::vector<std::uint64_t> ms = b.m;
            if (ms.empty())
                ms.push_back(n * delta / 4);
            for (auto m : ms)
                for (const auto& o : b.orders) {
                    auto policy = parse_order(o);
                    for (std::uint64_t s = b.seed_base; s < b.seed_base + b.seeds; ++s) {
                        auto edges = generate_stream(n, delta, m, policy, !b.simple, s);
                        auto cfg = make_config(n, delta, m, b.kappa, s);
                        cfg.interval_size = resolve_interval(b.interval_factor, n);
                        auto row = [&](const char* algo, const RunMetrics& r) {
                            csv << n << ',' << delta << ',' << m << ',' << b.kappa << ','
                                << order_name(policy) << ',' << s << ',' << algo << ','
                                << r.colors_used << ',' << r.depth << ',' << std::setprecision(6)
                                << r.leftover_fraction_l0() << ',' << r.peak_words_l0() << ','
                                << (b.no_timing ? 0.0 : r.wall_ms) << '\n';
                        };
                        row("engine", color_stream(cfg, edges).metrics);
                        row("baseline", run_baseline(cfg, edges).metrics);
                    }
                }
        }
    return kExitOk;
}

// One generated workload per run index.
struct CheckRun {
    std::vector<Edge> edges;
    RunConfig cfg;
};

CheckRun make_check_run(const CheckFlags& c, std::uint64_t n, std::uint64_t r) {
    auto delta = normalize_delta(c.delta);
    auto m = c.m ? *c.m * n / c.n : n * delta / 4;
    auto seed = c.seed + r;
    CheckRun run{generate_stream(n, delta, m, parse_order(c.order), !c.simple, seed),
                 make_config(n, delta, m, c.kappa, seed)};
    run.cfg.interval_size = resolve_interval(c.interval_factor, n);
    run.cfg.faults.skip_counter_increment_on_leftover = c.inject_fault;
    return run;
}

int verdict(std::ostream& out, const std::string& which, bool pass) {
    out << "check " << which << ": " << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kExitOk : kExitFailed;
}

int cmd_check(CheckFlags c, std::ostream& out, std::ostream& err) {
    static const std::map<std::string, std::size_t> default_runs{
        {"ind", 5}, {"crange", 5}, {"leftover", kMinLeftoverRuns}, {"space", 10}, {"depth", 20}};
    auto runs = c.runs.value_or(default_runs.at(c.which));
    // Counters only appear when a vertex's edges cluster inside an interval.
    if (c.order.empty())
        c.order = c.which == "ind" ? "degree-burst" : "arrival-random";
    auto delta = normalize_delta(c.delta);
    err << "# wsec check " << c.which << " --runs " << runs << " --kappa " << c.kappa
        << " --seed " << c.seed << " --n " << c.n << " --delta " << delta;
    if (c.m)
        err << " --m " << *c.m;
    err << " --order " << c.order << " --interval-factor " << c.interval_factor
        << (c.simple ? " --simple" : "") << (c.inject_fault ? " --inject-fault" : "") << '\n';
    if (runs == 0)
        throw InputError("--runs must be positive");

    if (c.which == "ind") {
        bool pass = true;
        std::size_t records = 0;
        for (std::size_t r = 0; r < runs; ++r) {
            auto run = make_check_run(c, c.n, r);
            auto sigma = c.seed + r;
            auto res = offset_independence_check(run.edges, run.cfg, sigma, sigma ^ 0x5bd1e995u,
                                       sigma ^ 0x27d4eb2fu);
            out << "run " << r << ": counter records " << res.records_first << '/'
                << res.records_second;
            if (res.first_difference)
                out << ", first difference at " << *res.first_difference;
            out << (res.pass ? " identical\n" : " differ\n");
            pass = pass && res.pass;
            records += res.records_first;
        }
        if (records == 0)
            out << "no counters were created; nothing was compared\n";
        return verdict(out, c.which, pass && records > 0);
    }

    if (c.which == "crange") {
        bool pass = true;
        for (std::size_t r = 0; r < runs; ++r) {
            auto run = make_check_run(c, c.n, r);
            TraceBuffer trace;
            auto res = color_stream(run.cfg, run.edges, &trace);
            auto audit = audit_trace(trace, res.metrics);
            auto proper = verify_proper(res.emissions, run.edges);
            out << "run " << r << ": C checked " << audit.c_checked << ", B checked "
                << audit.b_checked << ", violations " << audit.violations()
                << (proper.ok() ? "" : ", improper coloring") << '\n';
            for (const auto& finding : audit.findings)
                out << "  " << finding << '\n';
            pass = pass && audit.ok() && proper.ok();
        }
        return verdict(out, c.which, pass);
    }

    if (c.which == "leftover") {
        std::vector<RunMetrics> metrics;
        for (std::size_t r = 0; r < runs; ++r) {
            auto run = make_check_run(c, c.n, r);
            metrics.push_back(color_stream(run.cfg, run.edges).metrics);
        }
        auto s = leftover_stats(metrics, c.kappa);
        out << std::setprecision(4) << "runs " << s.runs << ", mean " << s.mean << ", stddev "
            << s.stddev << ", 95% CI [" << s.ci_low << ", " << s.ci_high << "], threshold "
            << s.threshold << '\n';
        return verdict(out, c.which, !s.flagged);
    }

    if (c.which == "space") {
        double sum = 0.0;
        bool bounds = true;
        for (std::size_t r = 0; r < runs; ++r) {
            auto small = make_check_run(c, c.n, r);
            auto large = make_check_run(c, 2 * c.n, r);
            auto rep = meter_check(color_stream(small.cfg, small.edges).metrics,
                                   color_stream(large.cfg, large.edges).metrics);
            out << "run " << r << ": peak_l0 " << rep.peaks_small.at(0) << " -> "
                << rep.peaks_large.at(0) << ", ratio " << std::setprecision(4) << rep.ratio_l0
                << '\n';
            for (const auto* a : {&rep.small_bounds, &rep.large_bounds})
                for (const auto& finding : a->findings)
                    out << "  " << finding << '\n';
            sum += rep.ratio_l0;
            bounds = bounds && rep.small_bounds.ok() && rep.large_bounds.ok();
        }
        auto mean = sum / double(runs);
        out << "mean ratio " << mean << ", limit " << kMeterRatioLimit << '\n';
        return verdict(out, c.which, bounds && mean <= kMeterRatioLimit);
    }

    if (c.which == "depth") {
        auto limit = 2 * floor_log2(delta) + 4;
        std::size_t within = 0;
        std::uint64_t fallback = 0;
        for (std::size_t r = 0; r < runs; ++r) {
            auto run = make_check_run(c, c.n, r);
            auto m = color_stream(run.cfg, run.edges).metrics;
            out << "run " << r << ": depth " << m.depth << ", fallback intervals "
                << m.fallback_intervals << '\n';
            within += m.depth <= limit;
            fallback += m.fallback_intervals;
        }
        auto frac = double(within) / double(runs);
        out << "depth <= " << limit << " in " << within << '/' << runs << " runs, fallback "
            << fallback << '\n';
        return verdict(out, c.which, frac >= 0.9 && fallback == 0);
    }

    throw InputError("unknown check '" + c.which + "'");
}

void add_engine_flags(CLI::App* app, EngineFlags& f, bool recursion) {
    app->add_option("stream", f.input, "input stream file")->required();
    app->add_option("--kappa", f.kappa, "palette scale, power of two >= 32");
    app->add_option("--seed", f.seed, "master seed");
    app->add_option("--sigma-seed", f.sigma_seed, "seed for palette indices (default: --seed)");
    app->add_option("--offset-seed", f.offset_seed, "seed for vertex offsets (default: --seed)");
    app->add_option("--interval-factor", f.interval_factor, "interval size: 1, logn or x*n");
    app->add_option("--interval-size", f.interval_size, "explicit interval size in edges");
    app->add_option("--phase-len", f.phase_len, "intervals per phase (default: sqrt(delta))");
    if (recursion) {
        app->add_option("--max-depth", f.max_depth, "recursion depth cap");
        app->add_flag("--unknown-delta", f.unknown_delta, "route by running max degree");
        app->add_option("--trace", f.trace_path, "write the decision trace here");
    }
    app->add_option("-o,--output", f.output, "colored output (default: <stream>.colored)");
    app->add_option("--metrics", f.metrics_path, "metrics JSON (default: stdout)");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"streaming edge coloring engine", "wsec"};
    app.require_subcommand(1);

    std::uint64_t gen_n = 0, gen_delta = 0, gen_seed = 0;
    std::optional<std::uint64_t> gen_m;
    bool gen_simple = false;
    std::string gen_order = "arrival-random", gen_out;
    auto* gen = app.add_subcommand("gen", "generate a stream file");
    gen->add_option("--n", gen_n, "vertices")->required();
    gen->add_option("--delta", gen_delta, "degree bound")->required();
    gen->add_option("--m", gen_m, "edges (default: n*delta/4)");
    gen->add_flag("--simple", gen_simple, "forbid parallel edges");
    gen->add_option("--order", gen_order, "arrival-random | vertex-sorted | degree-burst");
    gen->add_option("--seed", gen_seed, "seed");
    gen->add_option("-o,--output", gen_out, "output path (default: stdout)");

    EngineFlags color_flags, baseline_flags;
    auto* color = app.add_subcommand("color", "color a stream");
    add_engine_flags(color, color_flags, true);
    auto* baseline = app.add_subcommand("baseline", "color with fresh per-interval palettes");
    add_engine_flags(baseline, baseline_flags, false);

    std::string verify_colored, verify_stream;
    auto* verify = app.add_subcommand("verify", "check a colored file against its stream");
    verify->add_option("colored", verify_colored, "colored file")->required();
    verify->add_option("stream", verify_stream, "stream file")->required();

    BenchFlags bench_flags;
    auto* bench = app.add_subcommand("bench", "CSV grid of engine and baseline runs");
    bench->add_option("--n", bench_flags.n, "vertex counts");
    bench->add_option("--delta", bench_flags.delta, "degree bounds");
    bench->add_option("--m", bench_flags.m, "edge counts (default: n*delta/4)");
    bench->add_option("--orders", bench_flags.orders, "order policies");
    bench->add_option("--seeds", bench_flags.seeds, "seeds per grid point");
    bench->add_option("--seed-base", bench_flags.seed_base, "first seed");
    bench->add_option("--kappa", bench_flags.kappa, "palette scale");
    bench->add_option("--interval-factor", bench_flags.interval_factor, "1, logn or x*n");
    bench->add_flag("--simple", bench_flags.simple, "forbid parallel edges");
    bench->add_flag("--no-timing", bench_flags.no_timing, "write wall_ms as 0");
    bench->add_option("-o,--output", bench_flags.output, "CSV path (default: stdout)");

    CheckFlags check_flags;
    auto* check = app.add_subcommand("check", "run an audit on generated workloads");
    check->add_option("which", check_flags.which, "ind | crange | leftover | space | depth")
        ->required()
        ->check(CLI::IsMember({"ind", "crange", "leftover", "space", "depth"}));
    check->add_option("--runs", check_flags.runs, "number of seeded runs");
    check->add_option("--kappa", check_flags.kappa, "palette scale");
    check->add_option("--seed", check_flags.seed, "first seed");
    check->add_option("--n", check_flags.n, "vertices");
    check->add_option("--delta", check_flags.delta, "degree bound");
    check->add_option("--m", check_flags.m, "edges at --n (default: n*delta/4)");
    check->add_option("--order", check_flags.order,
                      "order policy (default: degree-burst for ind, else arrival-random)");
    check->add_option("--interval-factor", check_flags.interval_factor, "1, logn or x*n");
    check->add_flag("--simple", check_flags.simple, "forbid parallel edges");
    check->add_flag("--inject-fault", check_flags.inject_fault,
                    "skip counter increments on leftovers");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen)
            return cmd_gen(gen_n, gen_delta, gen_m, gen_simple, gen_order, gen_seed, gen_out, out,
                           err);
        if (*color)
            return cmd_run("color", color_flags, false, out, err);
        if (*baseline)
            return cmd_run("baseline", baseline_flags, true, out, err);
        if (*verify)
            return cmd_verify(verify_colored, verify_stream, out, err);
        if (*bench)
            return cmd_bench(bench_flags, out, err);
        if (*check)
            return cmd_check(check_flags, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvariantError& e) {
        err << "internal failure: " << e.what() << '\n';
        return kExitFailed;
    }
    return kExitUsage;
}

} // namespace wsec::cli
