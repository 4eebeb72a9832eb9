#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wsec {

using VertexId = std::uint32_t;
using Seq = std::uint64_t;

/// Bad user input: self-loops, out-of-range vertices, degree-bound violations,
/// infeasible generator requests, malformed files.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed color string or file line. `field()` names what failed to parse.
class ParseError : public InputError {
public:
    ParseError(std::string field, const std::string& what)
        : InputError(what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// An internal invariant of the engine was broken. Never expected in a
/// correct build; tests count these as fatal.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// One arrival event. `seq` is the position in the original input stream and
/// is carried unchanged through every recursion level.
struct Edge {
    VertexId u = 0;
    VertexId v = 0;
    Seq seq = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class ColorKind : std::uint8_t { Base, Low, A, B, C };

/// Hierarchical color name. Palettes are never materialized; a color exists
/// only once it is assigned to an edge.
///
/// Field use by kind:
///   Base       slot
///   Low        phase, interval, slot
///   A / B / C  phase, d, index (1-based palette index), slot
struct ColorId {
    std::uint32_t epoch = 0;
    std::uint32_t level = 0;
    ColorKind kind = ColorKind::Base;
    std::uint64_t phase = 0;
    std::uint64_t interval = 0;
    std::uint64_t d = 0;
    std::uint64_t index = 0;
    std::uint64_t slot = 0;

    static ColorId base(std::uint32_t epoch, std::uint32_t level, std::uint64_t slot);
    static ColorId low(std::uint32_t epoch, std::uint32_t level, std::uint64_t phase,
                       std::uint64_t interval, std::uint64_t slot);
    static ColorId family(ColorKind kind, std::uint32_t epoch, std::uint32_t level,
                          std::uint64_t phase, std::uint64_t d, std::uint64_t index,
                          std::uint64_t slot);

    friend bool operator==(const ColorId&, const ColorId&) = default;
    friend auto operator<=>(const ColorId&, const ColorId&) = default;
};

struct ColorIdHash {
    std::size_t operator()(const ColorId& c) const noexcept;
};

/// Canonical string form:
///   E<epoch>.L<level>.BASE.<slot>
///   E<epoch>.L<level>.P<phase>.I<interval>.LOW.<slot>
///   E<epoch>.L<level>.P<phase>.D<d>.<A|B|C><index>.<slot>
std::string encode_color(const ColorId& c);

/// Inverse of encode_color. Throws ParseError naming the offending field.
ColorId decode_color(std::string_view s);

const char* kind_name(ColorKind k) noexcept;

/// Smallest power of four that is >= raw (raw >= 1).
std::uint64_t normalize_delta(std::uint64_t raw);

/// Integer square root of a power of four.
std::uint64_t sqrt_pow4(std::uint64_t delta);

bool is_pow2(std::uint64_t x) noexcept;

/// floor(log2 x) for x >= 1.
unsigned floor_log2(std::uint64_t x) noexcept;

/// ceil(log2 x) for x >= 1.
unsigned ceil_log2(std::uint64_t x) noexcept;

enum class DeltaMode { Known, Unknown };

/// Test-only perturbations of the engine, used by regression canaries.
struct EngineFaults {
    bool skip_counter_increment_on_leftover = false;
};

struct RunConfig {
    std::uint64_t n = 0;
    /// Normalized degree bound (power of four).
    std::uint64_t delta = 1;
    std::uint64_t kappa = 32;
    std::uint64_t interval_size = 0;
    /// Intervals per phase; 0 means sqrt(delta).
    std::uint64_t phase_len = 0;
    std::uint32_t max_depth = 0;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> sigma_seed;
    std::optional<std::uint64_t> offset_seed;
    DeltaMode delta_mode = DeltaMode::Known;
    EngineFaults faults;

    std::uint64_t sqrt_delta() const { return sqrt_pow4(delta); }
    std::uint64_t effective_phase_len() const { return phase_len ? phase_len : sqrt_delta(); }
    std::uint64_t effective_sigma_seed() const { return sigma_seed.value_or(seed); }
    std::uint64_t effective_offset_seed() const { return offset_seed.value_or(seed); }

    /// Throws InputError when a field is out of its domain.
    void validate() const;
};

/// 4 * ceil(log2(max(m, 2))) + 10.
std::uint32_t default_max_depth(std::uint64_t m);

/// ceil(n * log2 n), at least n.
std::uint64_t interval_size_logn(std::uint64_t n);

/// Builds a validated config: delta normalized, interval_size = n,
/// max_depth from the expected edge count.
RunConfig make_config(std::uint64_t n, std::uint64_t raw_delta, std::uint64_t m,
                      std::uint64_t kappa, std::uint64_t seed);

} // namespace wsec
