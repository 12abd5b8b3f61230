#pragma once

// Seeded generators for synthetic length sequences.
//
// All randomness comes from std::mt19937_64, whose output sequence is fixed
// by the C++ standard. Uniform variates use the top 53 bits of each draw and
// geometric variates use inverse-transform sampling, so a seed reproduces
// the same sequence on any conforming platform.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "lineometer/error.hpp"
#include "lineometer/seqmodel.hpp"

namespace lineometer {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Number of syllables up to and including the first boundary.
    std::uint32_t geometric(double q) {
        if (q >= 1.0) {
            engine_();  // keep stream position independent of q
            return 1;
        }
        const double u = uniform();
        const double k = std::floor(std::log1p(-u) / std::log1p(-q));
        return static_cast<std::uint32_t>(std::min(k, 1.0e9)) + 1;
    }

    double normal() {
        // Box-Muller, discarding the second variate
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

struct GeometricSpec {
    double q = 0.77;
    std::size_t words = 1000;
    std::uint64_t seed = 0;
};

struct IsometricSpec {
    std::uint32_t line_syllables = 8;
    std::size_t lines = 1000;
    double q = 0.7;
    std::uint64_t seed = 0;
};

struct AlternatingSpec {
    std::size_t words = 1000;
    double long_mean = 1.6;
    double short_mean = 1.2;
    std::uint64_t seed = 0;
};

// Verse blocks of `block_lines` lines embedded in prose so that roughly
// `verse_fraction` of the `prose.words` output words are verse.
struct MixtureSpec {
    GeometricSpec prose;
    IsometricSpec verse;
    double verse_fraction = 0.0;
    std::uint64_t seed = 0;
    std::size_t block_lines = 14;
};

using GeneratorSpec = std::variant<GeometricSpec, IsometricSpec, AlternatingSpec, MixtureSpec>;

namespace detail {
inline void check_q(double q) {
    require(q > 0.0 && q <= 1.0, ErrorKind::invalid_argument, "q must lie in (0, 1]");
}
} // namespace detail

/// K independent geometric(q) word lengths.
inline LengthSequence random_segmented(double q, std::size_t words, std::uint64_t seed) {
    detail::check_q(q);
    detail::require(words >= 1, ErrorKind::invalid_argument, "need at least one word");
    Rng rng(seed);
    std::vector<std::uint32_t> out(words);
    for (auto& v : out) v = rng.geometric(q);
    return LengthSequence(std::move(out));
}

namespace detail {
// One line: geometric words, the last one truncated to the remaining
// budget so the line sums to exactly n.
inline void append_line(Rng& rng, std::uint32_t n, double q, std::vector<std::uint32_t>& out) {
    std::uint32_t remaining = n;
    while (remaining > 0) {
        const std::uint32_t w = std::min(rng.geometric(q), remaining);
        out.push_back(w);
        remaining -= w;
    }
}
} // namespace detail

/// Lines of exactly `line_syllables` syllables, one vector per line.
inline std::vector<std::vector<std::uint32_t>> isometric_line_words(std::uint32_t line_syllables,
                                                                    std::size_t lines, double q,
                                                                    std::uint64_t seed) {
    detail::require(line_syllables >= 1, ErrorKind::invalid_argument, "line length must be >= 1");
    detail::require(lines >= 1, ErrorKind::invalid_argument, "need at least one line");
    detail::check_q(q);
    Rng rng(seed);
    std::vector<std::vector<std::uint32_t>> out(lines);
    for (auto& line : out) detail::append_line(rng, line_syllables, q, line);
    return out;
}

inline LengthSequence isometric_lines(std::uint32_t line_syllables, std::size_t lines, double q,
                                      std::uint64_t seed) {
    std::vector<std::uint32_t> flat;
    for (const auto& line : isometric_line_words(line_syllables, lines, q, seed)) {
        flat.insert(flat.end(), line.begin(), line.end());
    }
    return LengthSequence(std::move(flat));
}

/// Odd (1-based) positions drawn with mean long_mean, even with short_mean.
inline LengthSequence alternating(std::size_t words, double long_mean, double short_mean,
                                  std::uint64_t seed) {
    detail::require(words >= 1, ErrorKind::invalid_argument, "need at least one word");
    detail::require(short_mean >= 1.0 && long_mean >= short_mean && std::isfinite(long_mean),
                    ErrorKind::invalid_argument, "need long_mean >= short_mean >= 1");
    Rng rng(seed);
    const double q_long = 1.0 / long_mean;
    const double q_short = 1.0 / short_mean;
    std::vector<std::uint32_t> out(words);
    for (std::size_t i = 0; i < words; ++i) out[i] = rng.geometric(i % 2 == 0 ? q_long : q_short);
    return LengthSequence(std::move(out));
}

/// Prose words from `prose` with verse blocks from `verse` spliced in.
/// Fraction 0 reproduces random_segmented(prose) exactly; fraction 1 gives
/// the first prose.words words of the verse stream.
inline LengthSequence mixture(const GeometricSpec& prose, const IsometricSpec& verse,
                              double verse_fraction, std::uint64_t seed, std::size_t block_lines = 14) {
    detail::require(verse_fraction >= 0.0 && verse_fraction <= 1.0, ErrorKind::invalid_argument,
                    "verse fraction must lie in [0, 1]");
    detail::require(block_lines >= 1, ErrorKind::invalid_argument, "block must hold at least one line");
    detail::require(verse.line_syllables >= 1, ErrorKind::invalid_argument, "line length must be >= 1");
    detail::check_q(prose.q);
    detail::check_q(verse.q);
    const std::size_t K = prose.words;
    detail::require(K >= 1, ErrorKind::invalid_argument, "need at least one word");
    if (verse_fraction == 0.0) return random_segmented(prose.q, K, prose.seed);

    Rng prose_rng(prose.seed);
    Rng verse_rng(verse.seed);
    std::vector<std::uint32_t> out;
    out.reserve(K + verse.line_syllables * block_lines);
    std::size_t verse_words = 0;

    auto append_block = [&] {
        const std::size_t before = out.size();
        for (std::size_t l = 0; l < block_lines; ++l) {
            detail::append_line(verse_rng, verse.line_syllables, verse.q, out);
        }
        verse_words += out.size() - before;
    };

    if (verse_fraction < 1.0) {
        // random phase for the first block
        Rng mix_rng(seed);
        const double block_words = static_cast<double>(block_lines * verse.line_syllables) * verse.q;
        const double gap = block_words * (1.0 - verse_fraction) / verse_fraction;
        const auto lead = static_cast<std::size_t>(mix_rng.uniform() * gap);
        for (std::size_t i = 0; i < lead && out.size() < K; ++i) out.push_back(prose_rng.geometric(prose.q));
    }
    while (out.size() < K) {
        if (static_cast<double>(verse_words) <= verse_fraction * static_cast<double>(out.size())) {
            append_block();
        } else {
            out.push_back(prose_rng.geometric(prose.q));
        }
    }
    out.resize(K);
    return LengthSequence(std::move(out));
}

inline LengthSequence generate(const GeneratorSpec& spec) {
    return std::visit(
        [](const auto& s) -> LengthSequence {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GeometricSpec>) {
                return random_segmented(s.q, s.words, s.seed);
            } else if constexpr (std::is_same_v<T, IsometricSpec>) {
                return isometric_lines(s.line_syllables, s.lines, s.q, s.seed);
            } else if constexpr (std::is_same_v<T, AlternatingSpec>) {
                return alternating(s.words, s.long_mean, s.short_mean, s.seed);
            } else {
                return mixture(s.prose, s.verse, s.verse_fraction, s.seed, s.block_lines);
            }
        },
        spec);
}

namespace detail {
// shortest text that reads back to the same double
inline std::string shortest(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}
} // namespace detail

/// One-line `key=value` description, used in file headers and reports.
inline std::string describe(const GeneratorSpec& spec) {
    std::ostringstream os;
    const auto f = [](double v) { return detail::shortest(v); };
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GeometricSpec>) {
                os << "kind=geometric q=" << f(s.q) << " k=" << s.words << " seed=" << s.seed;
            } else if constexpr (std::is_same_v<T, IsometricSpec>) {
                os << "kind=isometric line=" << s.line_syllables << " lines=" << s.lines
                   << " q=" << f(s.q) << " seed=" << s.seed;
            } else if constexpr (std::is_same_v<T, AlternatingSpec>) {
                os << "kind=alternating k=" << s.words << " long-mean=" << f(s.long_mean)
                   << " short-mean=" << f(s.short_mean) << " seed=" << s.seed;
            } else {
                os << "kind=mixture k=" << s.prose.words << " q=" << f(s.prose.q)
                   << " prose-seed=" << s.prose.seed << " line=" << s.verse.line_syllables
                   << " verse-q=" << f(s.verse.q) << " verse-seed=" << s.verse.seed
                   << " fraction=" << f(s.verse_fraction) << " block-lines=" << s.block_lines
                   << " seed=" << s.seed;
            }
        },
        spec);
    return os.str();
}

} // namespace lineometer
