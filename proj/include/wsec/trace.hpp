#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wsec/model.hpp"

namespace wsec {

/// Where one class-d edge went inside its interval.
enum class Decision : std::uint8_t {
    AColored,     // Step (1): colored from A_sigma
    Exiled,       // Step (1): a high endpoint already used A_sigma this phase
    SkipExiled,   // Step (2)(a): already leftover from Step (1)
    GapLeftover,  // Step (2)(b): offsets too close
    CounterFull,  // Step (2)(c): counter saturated at 2d
    CAssigned,
    CConflict,
    PhaseCap,     // Step (2)(c): p[sigma] >= 2d / sqrt(delta)
    BAssigned,
    BConflict,
};

std::string_view decision_name(Decision d) noexcept;
std::optional<Decision> parse_decision(std::string_view s) noexcept;

struct ClassScope {
    std::uint32_t epoch = 0;
    std::uint32_t level = 0;
    std::uint64_t phase = 0;
    std::uint64_t d = 0;

    friend bool operator==(const ClassScope&, const ClassScope&) = default;
    friend auto operator<=>(const ClassScope&, const ClassScope&) = default;
};

/// One Step (1)/(2) decision. For H2 edges `low`/`high` are the low- and
/// high-degree endpoints; for H1 edges they are (u, v) in edge order.
/// `r_low`, `counter`, `b` and `p` are meaningful for Step (2) records only.
struct DecisionRecord {
    ClassScope scope;
    std::uint64_t interval = 0;
    std::uint64_t sigma = 0;
    Seq seq = 0;
    VertexId low = 0;
    VertexId high = 0;
    Decision decision = Decision::AColored;
    std::uint64_t slot = 0;
    std::uint64_t r_low = 0;
    std::optional<std::uint64_t> counter;
    std::uint64_t b = 0;
    std::uint64_t p = 0;

    friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

/// Creation or increment of a counter c[u, index].
struct CounterRecord {
    ClassScope scope;
    std::uint64_t interval = 0;
    VertexId u = 0;
    std::uint64_t index = 0;
    bool created = false;
    std::uint64_t value = 0;

    friend bool operator==(const CounterRecord&, const CounterRecord&) = default;
};

/// Interval degree of a vertex touching class-d edges, with the interval's sigma.
struct DegreeRecord {
    ClassScope scope;
    std::uint64_t interval = 0;
    std::uint64_t sigma = 0;
    VertexId v = 0;
    std::uint64_t degree = 0;

    friend bool operator==(const DegreeRecord&, const DegreeRecord&) = default;
};

class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void on_decision(const DecisionRecord&) {}
    virtual void on_counter(const CounterRecord&) {}
    virtual void on_degree(const DegreeRecord&) {}
};

/// Collects every record in memory.
class TraceBuffer : public TraceSink {
public:
    void on_decision(const DecisionRecord& r) override { decisions.push_back(r); }
    void on_counter(const CounterRecord& r) override { counters.push_back(r); }
    void on_degree(const DegreeRecord& r) override { degrees.push_back(r); }

    std::vector<DecisionRecord> decisions;
    std::vector<CounterRecord> counters;
    std::vector<DegreeRecord> degrees;
};

/// Writes one line per record:
///   D epoch level phase interval d sigma seq low high decision slot r_low counter|- b p
///   C epoch level phase interval d u index create|inc value
///   G epoch level phase interval d sigma v degree
class TraceWriter : public TraceSink {
public:
    explicit TraceWriter(std::ostream& out) : out_(out) {}
    void on_decision(const DecisionRecord& r) override;
    void on_counter(const CounterRecord& r) override;
    void on_degree(const DegreeRecord& r) override;

private:
    std::ostream& out_;
};

/// Fans records out to several sinks.
class TraceTee : public TraceSink {
public:
    explicit TraceTee(std::vector<TraceSink*> sinks) : sinks_(std::move(sinks)) {}
    void on_decision(const DecisionRecord& r) override;
    void on_counter(const CounterRecord& r) override;
    void on_degree(const DegreeRecord& r) override;

private:
    std::vector<TraceSink*> sinks_;
};

using TraceRecord = std::variant<DecisionRecord, CounterRecord, DegreeRecord>;

/// Parses one TraceWriter line. Throws ParseError.
TraceRecord parse_trace_line(std::string_view line);

/// Reads a whole trace file into a buffer. Throws ParseError with line number.
TraceBuffer read_trace(std::istream& in);

} // namespace wsec
