#include "wsec/trace.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <sstream>

namespace wsec {

namespace {

constexpr std::array<std::pair<Decision, std::string_view>, 10> kDecisionNames{{
    {Decision::AColored, "a_colored"},
    {Decision::Exiled, "exiled"},
    {Decision::SkipExiled, "skip_exiled"},
    {Decision::GapLeftover, "gap"},
    {Decision::CounterFull, "counter_full"},
    {Decision::CAssigned, "c_assigned"},
    {Decision::CConflict, "c_conflict"},
    {Decision::PhaseCap, "phase_cap"},
    {Decision::BAssigned, "b_assigned"},
    {Decision::BConflict, "b_conflict"},
}};

void write_scope(std::ostream& os, const ClassScope& s, std::uint64_t interval) {
    os << s.epoch << ' ' << s.level << ' ' << s.phase << ' ' << interval << ' ' << s.d;
}

std::uint64_t next_u64(std::istringstream& in, const char* field) {
    std::string tok;
    if (!(in >> tok))
        throw ParseError(field, std::string("missing trace field ") + field);
    std::uint64_t v = 0;
    std::size_t used = 0;
    try {
        v = std::stoull(tok, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != tok.size() || tok.empty() || tok.front() == '-')
        throw ParseError(field, std::string("bad trace field ") + field + ": '" + tok + "'");
    return v;
}

ClassScope read_scope(std::istringstream& in, std::uint64_t& interval) {
    ClassScope s;
    s.epoch = static_cast<std::uint32_t>(next_u64(in, "epoch"));
    s.level = static_cast<std::uint32_t>(next_u64(in, "level"));
    s.phase = next_u64(in, "phase");
    interval = next_u64(in, "interval");
    s.d = next_u64(in, "d");
    return s;
}

void expect_end(std::istringstream& in) {
    std::string extra;
    if (in >> extra)
        throw ParseError("line", "trailing trace field '" + extra + "'");
}

} // namespace

std::string_view decision_name(Decision d) noexcept {
    for (const auto& [k, name] : kDecisionNames)
        if (k == d)
            return name;
    return "?";
}

std::optional<Decision> parse_decision(std::string_view s) noexcept {
    for (const auto& [k, name] : kDecisionNames)
        if (name == s)
            return k;
    return std::nullopt;
}

void TraceWriter::on_decision(const DecisionRecord& r) {
    out_ << "D ";
    write_scope(out_, r.scope, r.interval);
    out_ << ' ' << r.sigma << ' ' << r.seq << ' ' << r.low << ' ' << r.high << ' '
         << decision_name(r.decision) << ' ' << r.slot << ' ' << r.r_low << ' ';
    if (r.counter)
        out_ << *r.counter;
    else
        out_ << '-';
    out_ << ' ' << r.b << ' ' << r.p << '\n';
}

void TraceWriter::on_counter(const CounterRecord& r) {
    out_ << "C ";
    write_scope(out_, r.scope, r.interval);
    out_ << ' ' << r.u << ' ' << r.index << ' ' << (r.created ? "create" : "inc") << ' '
         << r.value << '\n';
}

void TraceWriter::on_degree(const DegreeRecord& r) {
    out_ << "G ";
    write_scope(out_, r.scope, r.interval);
    out_ << ' ' << r.sigma << ' ' << r.v << ' ' << r.degree << '\n';
}

void TraceTee::on_decision(const DecisionRecord& r) {
    for (auto* s : sinks_)
        s->on_decision(r);
}
void TraceTee::on_counter(const CounterRecord& r) {
    for (auto* s : sinks_)
        s->on_counter(r);
}
void TraceTee::on_degree(const DegreeRecord& r) {
    for (auto* s : sinks_)
        s->on_degree(r);
}

TraceRecord parse_trace_line(std::string_view line) {
    std::istringstream in{std::string(line)};
    std::string tag;
    if (!(in >> tag))
        throw ParseError("tag", "empty trace line");
    if (tag == "D") {
        DecisionRecord r;
        r.scope = read_scope(in, r.interval);
        r.sigma = next_u64(in, "sigma");
        r.seq = next_u64(in, "seq");
        r.low = static_cast<VertexId>(next_u64(in, "low"));
        r.high = static_cast<VertexId>(next_u64(in, "high"));
        std::string dec;
        if (!(in >> dec))
            throw ParseError("decision", "missing decision");
        auto parsed = parse_decision(dec);
        if (!parsed)
            throw ParseError("decision", "unknown decision '" + dec + "'");
        r.decision = *parsed;
        r.slot = next_u64(in, "slot");
        r.r_low = next_u64(in, "r_low");
        std::string counter;
        if (!(in >> counter))
            throw ParseError("counter", "missing counter");
        if (counter != "-") {
            std::istringstream one(counter);
            r.counter = next_u64(one, "counter");
        }
        r.b = next_u64(in, "b");
        r.p = next_u64(in, "p");
        expect_end(in);
        return r;
    }
    if (tag == "C") {
        CounterRecord r;
        r.scope = read_scope(in, r.interval);
        r.u = static_cast<VertexId>(next_u64(in, "u"));
        r.index = next_u64(in, "index");
        std::string ev;
        if (!(in >> ev) || (ev != "create" && ev != "inc"))
            throw ParseError("event", "bad counter event");
        r.created = ev == "create";
        r.value = next_u64(in, "value");
        expect_end(in);
        return r;
    }
    if (tag == "G") {
        DegreeRecord r;
        r.scope = read_scope(in, r.interval);
        r.sigma = next_u64(in, "sigma");
        r.v = static_cast<VertexId>(next_u64(in, "v"));
        r.degree = next_u64(in, "degree");
        expect_end(in);
        return r;
    }
    throw ParseError("tag", "unknown trace record '" + tag + "'");
}

TraceBuffer read_trace(std::istream& in) {
    TraceBuffer buf;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            auto rec = parse_trace_line(line);
            std::visit(
                [&](auto&& r) {
                    using T = std::decay_t<decltype(r)>;
                    if constexpr (std::is_same_v<T, DecisionRecord>)
                        buf.on_decision(r);
                    else if constexpr (std::is_same_v<T, CounterRecord>)
                        buf.on_counter(r);
                    else
                        buf.on_degree(r);
                },
                rec);
        } catch (const ParseError& e) {
            throw ParseError(e.field(), "trace line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return buf;
}

} // namespace wsec
