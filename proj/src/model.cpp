#include "wsec/model.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace wsec {

ColorId ColorId::base(std::uint32_t epoch, std::uint32_t level, std::uint64_t slot) {
    ColorId c;
    c.epoch = epoch;
    c.level = level;
    c.kind = ColorKind::Base;
    c.slot = slot;
    return c;
}

ColorId ColorId::low(std::uint32_t epoch, std::uint32_t level, std::uint64_t phase,
                     std::uint64_t interval, std::uint64_t slot) {
    ColorId c;
    c.epoch = epoch;
    c.level = level;
    c.kind = ColorKind::Low;
    c.phase = phase;
    c.interval = interval;
    c.slot = slot;
    return c;
}

ColorId ColorId::family(ColorKind kind, std::uint32_t epoch, std::uint32_t level,
                        std::uint64_t phase, std::uint64_t d, std::uint64_t index,
                        std::uint64_t slot) {
    ColorId c;
    c.epoch = epoch;
    c.level = level;
    c.kind = kind;
    c.phase = phase;
    c.d = d;
    c.index = index;
    c.slot = slot;
    return c;
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t x) {
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::uint64_t parse_decimal(std::string_view text, const char* field) {
    if (text.empty())
        throw ParseError(field, std::string("empty ") + field);
    if (text.size() > 1 && text.front() == '0')
        throw ParseError(field, std::string("leading zero in ") + field + ": '" +
                                    std::string(text) + "'");
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseError(field, std::string("bad ") + field + ": '" + std::string(text) + "'");
    return value;
}

std::uint64_t parse_tagged(std::string_view token, char tag, const char* field) {
    if (token.empty() || token.front() != tag)
        throw ParseError(field, std::string("expected '") + tag + "' for " + field + ", got '" +
                                    std::string(token) + "'");
    return parse_decimal(token.substr(1), field);
}

std::vector<std::string_view> split_dots(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find('.', start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

std::uint32_t narrow32(std::uint64_t v, const char* field) {
    if (v > std::numeric_limits<std::uint32_t>::max())
        throw ParseError(field, std::string(field) + " out of range");
    return static_cast<std::uint32_t>(v);
}

} // namespace

std::size_t ColorIdHash::operator()(const ColorId& c) const noexcept {
    std::uint64_t h = 0;
    h = mix(h, c.epoch);
    h = mix(h, c.level);
    h = mix(h, static_cast<std::uint64_t>(c.kind));
    h = mix(h, c.phase);
    h = mix(h, c.interval);
    h = mix(h, c.d);
    h = mix(h, c.index);
    h = mix(h, c.slot);
    return static_cast<std::size_t>(h);
}

const char* kind_name(ColorKind k) noexcept {
    switch (k) {
    case ColorKind::Base: return "BASE";
    case ColorKind::Low: return "LOW";
    case ColorKind::A: return "A";
    case ColorKind::B: return "B";
    case ColorKind::C: return "C";
    }
    return "?";
}

std::string encode_color(const ColorId& c) {
    std::ostringstream os;
    os << 'E' << c.epoch << ".L" << c.level << '.';
    switch (c.kind) {
    case ColorKind::Base:
        os << "BASE." << c.slot;
        break;
    case ColorKind::Low:
        os << 'P' << c.phase << ".I" << c.interval << ".LOW." << c.slot;
        break;
    case ColorKind::A:
    case ColorKind::B:
    case ColorKind::C:
        os << 'P' << c.phase << ".D" << c.d << '.' << kind_name(c.kind) << c.index << '.'
           << c.slot;
        break;
    }
    return os.str();
}

ColorId decode_color(std::string_view s) {
    auto parts = split_dots(s);
    if (parts.size() < 4)
        throw ParseError("kind", "color string too short: '" + std::string(s) + "'");
    auto epoch = narrow32(parse_tagged(parts[0], 'E', "epoch"), "epoch");
    auto level = narrow32(parse_tagged(parts[1], 'L', "level"), "level");

    if (parts[2] == "BASE") {
        if (parts.size() != 4)
            throw ParseError("slot", "BASE color takes exactly one slot field");
        return ColorId::base(epoch, level, parse_decimal(parts[3], "slot"));
    }
    if (parts[2].empty() || parts[2].front() != 'P')
        throw ParseError("kind", "unknown color kind '" + std::string(parts[2]) + "'");
    auto phase = parse_tagged(parts[2], 'P', "phase");
    if (parts.size() != 6)
        throw ParseError("kind", "wrong field count in '" + std::string(s) + "'");

    if (parts[4] == "LOW") {
        auto interval = parse_tagged(parts[3], 'I', "interval");
        return ColorId::low(epoch, level, phase, interval, parse_decimal(parts[5], "slot"));
    }
    auto d = parse_tagged(parts[3], 'D', "d");
    auto fam = parts[4];
    if (fam.empty())
        throw ParseError("kind", "missing palette family");
    ColorKind kind;
    switch (fam.front()) {
    case 'A': kind = ColorKind::A; break;
    case 'B': kind = ColorKind::B; break;
    case 'C': kind = ColorKind::C; break;
    default: throw ParseError("kind", "unknown palette family '" + std::string(fam) + "'");
    }
    auto index = parse_decimal(fam.substr(1), "index");
    return ColorId::family(kind, epoch, level, phase, d, index, parse_decimal(parts[5], "slot"));
}

bool is_pow2(std::uint64_t x) noexcept { return x != 0 && (x & (x - 1)) == 0; }

unsigned floor_log2(std::uint64_t x) noexcept {
    return static_cast<unsigned>(std::bit_width(x) - 1);
}

unsigned ceil_log2(std::uint64_t x) noexcept {
    return x <= 1 ? 0u : static_cast<unsigned>(std::bit_width(x - 1));
}

std::uint64_t normalize_delta(std::uint64_t raw) {
    if (raw == 0)
        throw InputError("degree bound must be >= 1");
    std::uint64_t p = 1;
    while (p < raw)
        p <<= 2;
    return p;
}

std::uint64_t sqrt_pow4(std::uint64_t delta) {
    return std::uint64_t{1} << (floor_log2(delta) / 2);
}

void RunConfig::validate() const {
    if (n == 0)
        throw InputError("n must be positive");
    if (kappa < 32 || !is_pow2(kappa))
        throw InputError("kappa must be a power of two >= 32, got " + std::to_string(kappa));
    if (normalize_delta(delta) != delta)
        throw InputError("delta must be normalized to a power of four, got " +
                         std::to_string(delta));
    if (interval_size == 0)
        throw InputError("interval_size must be positive");
}

std::uint32_t default_max_depth(std::uint64_t m) {
    return 4 * ceil_log2(m < 2 ? 2 : m) + 10;
}

std::uint64_t interval_size_logn(std::uint64_t n) {
    if (n < 2)
        return n;
    double v = static_cast<double>(n) * std::log2(static_cast<double>(n));
    auto size = static_cast<std::uint64_t>(std::ceil(v - 1e-9));
    return size < n ? n : size;
}

RunConfig make_config(std::uint64_t n, std::uint64_t raw_delta, std::uint64_t m,
                      std::uint64_t kappa, std::uint64_t seed) {
    RunConfig cfg;
    cfg.n = n;
    cfg.delta = normalize_delta(raw_delta);
    cfg.kappa = kappa;
    cfg.interval_size = n;
    cfg.max_depth = default_max_depth(m);
    cfg.seed = seed;
    cfg.validate();
    return cfg;
}

} // namespace wsec
