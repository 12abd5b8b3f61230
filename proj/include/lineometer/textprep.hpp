#pragma once

// Tokenization and rule-based syllable counting.
//
// Conventions: words are split on whitespace and on en/em dashes (and the
// ASCII "--"); code points that are neither letters nor digits are stripped
// from both ends of a word; internal apostrophes and hyphens stay in the
// word. Hyphenated compounds are one token whose syllable count is the sum
// of its parts. Words without any letter (numerals, stray symbols) are
// dropped. Contractions are counted by the same heuristic as any other word.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lineometer/error.hpp"
#include "lineometer/seqmodel.hpp"
#include "lineometer/utf8.hpp"

namespace lineometer {

struct Token {
    std::string surface;   // normalized: lowercase, edge punctuation stripped
    std::size_t position;  // 1-based word index
};

struct SyllabifiedToken {
    Token token;
    std::uint32_t syllables;
};

namespace detail {

// Normalizes one whitespace-delimited chunk. Returns an empty string when
// nothing alphabetic survives.
inline std::string normalize_chunk(std::span<const utf8::CodePoint> chunk) {
    std::size_t first = 0;
    std::size_t last = chunk.size();
    auto keep_at_edge = [](char32_t c) { return utf8::is_alpha(c) || utf8::is_digit(c); };
    while (first < last && !keep_at_edge(chunk[first].value)) ++first;
    while (last > first && !keep_at_edge(chunk[last - 1].value)) --last;

    std::string out;
    bool has_alpha = false;
    for (std::size_t i = first; i < last; ++i) {
        char32_t c = chunk[i].value;
        if (utf8::is_apostrophe(c)) {
            c = U'\'';
        } else if (utf8::is_hyphen(c)) {
            c = U'-';
        } else {
            has_alpha = has_alpha || utf8::is_alpha(c);
            c = utf8::to_lower(c);
        }
        utf8::append(out, c);
    }
    if (!has_alpha) out.clear();
    return out;
}

} // namespace detail

/// Splits UTF-8 text into normalized word tokens. Throws DecodeError on
/// malformed input.
inline std::vector<Token> tokenize(std::string_view text) {
    const auto cps = utf8::decode(text);
    std::vector<Token> tokens;
    std::size_t start = 0;
    auto flush = [&](std::size_t end) {
        if (end > start) {
            auto surface = detail::normalize_chunk(std::span(cps).subspan(start, end - start));
            if (!surface.empty()) tokens.push_back({std::move(surface), tokens.size() + 1});
        }
    };
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const char32_t c = cps[i].value;
        const bool double_hyphen =
            c == U'-' && ((i + 1 < cps.size() && cps[i + 1].value == U'-') ||
                          (i > 0 && cps[i - 1].value == U'-'));
        if (utf8::is_space(c) || utf8::is_dash_separator(c) || double_hyphen) {
            flush(i);
            start = i + 1;
        }
    }
    flush(cps.size());
    return tokens;
}

/// Lowercases and strips edge punctuation; used for lexicon keys so lookup
/// matches tokenizer output.
inline std::string normalize_word(std::string_view word) {
    const auto cps = utf8::decode(word);
    return detail::normalize_chunk(cps);
}

class ExceptionLexicon {
public:
    // Returns true when the key was already present (and is now replaced).
    bool insert(std::string_view word, std::uint32_t syllables) {
        detail::require(syllables >= 1, ErrorKind::invalid_argument,
                        "lexicon syllable counts must be >= 1");
        auto key = normalize_word(word);
        detail::require(!key.empty(), ErrorKind::invalid_argument,
                        "lexicon key '" + std::string(word) + "' has no letters");
        auto [it, inserted] = entries_.insert_or_assign(std::move(key), syllables);
        return !inserted;
    }

    std::optional<std::uint32_t> find(std::string_view normalized) const {
        auto it = entries_.find(std::string(normalized));
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::map<std::string, std::uint32_t>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, std::uint32_t> entries_;
};

/// Parses `word<TAB>count` lines; `#` starts a comment line. Duplicate keys
/// keep the last value and append a warning.
inline ExceptionLexicon load_lexicon(std::istream& in, std::vector<std::string>* warnings = nullptr) {
    ExceptionLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t p = line.find_first_not_of(" \t");
        if (p == std::string::npos || line[p] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw Error(ErrorKind::invalid_argument,
                        "lexicon line " + std::to_string(lineno) + ": expected word<TAB>count");
        }
        const std::string word = line.substr(0, tab);
        const std::string count_text = line.substr(tab + 1);
        std::size_t used = 0;
        long long count = 0;
        try {
            count = std::stoll(count_text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || count_text.find_first_not_of(" \t", used) != std::string::npos ||
            count < 1 || count > 1000) {
            throw Error(ErrorKind::invalid_argument,
                        "lexicon line " + std::to_string(lineno) + ": bad syllable count '" +
                            count_text + "'");
        }
        if (lex.insert(word, static_cast<std::uint32_t>(count)) && warnings) {
            warnings->push_back("lexicon line " + std::to_string(lineno) + ": duplicate entry '" +
                                normalize_word(word) + "', last value wins");
        }
    }
    return lex;
}

namespace detail {

// Heuristic count for one hyphen-free piece of a word.
inline std::uint32_t heuristic_part(std::span<const char32_t> letters) {
    std::uint32_t groups = 0;
    bool in_group = false;
    for (char32_t c : letters) {
        const bool v = utf8::is_vowel(c);
        if (v && !in_group) ++groups;
        in_group = v;
    }
    const std::size_t n = letters.size();
    if (groups > 1 && n >= 2 && letters[n - 1] == U'e' && !utf8::is_vowel(letters[n - 2])) {
        // "-Cle" keeps its syllable (table, little); other final e's are silent.
        const bool consonant_le =
            letters[n - 2] == U'l' && n >= 3 && !utf8::is_vowel(letters[n - 3]);
        if (!consonant_le) --groups;
    }
    return groups == 0 ? 1 : groups;
}

} // namespace detail

/// Syllable count for a normalized word: lexicon entry if present,
/// otherwise vowel-group counting with silent-e and "-le" adjustments.
inline std::uint32_t count_syllables(std::string_view word, const ExceptionLexicon& lexicon) {
    if (auto hit = lexicon.find(word)) return *hit;

    const auto cps = utf8::decode(word);
    std::uint32_t total = 0;
    std::vector<char32_t> letters;
    bool any_part = false;
    auto finish_part = [&] {
        if (!letters.empty()) {
            total += detail::heuristic_part(letters);
            any_part = true;
        }
        letters.clear();
    };
    for (const auto& cp : cps) {
        const char32_t c = utf8::to_lower(cp.value);
        if (utf8::is_hyphen(c)) {
            finish_part();
        } else if (utf8::is_alpha(c)) {
            letters.push_back(c);
        } else if (!utf8::is_apostrophe(c) && !letters.empty()) {
            // other internal punctuation: break the vowel run
            letters.push_back(U'_');
        }
    }
    finish_part();
    return any_part ? total : 1;
}

inline std::vector<SyllabifiedToken> syllabify_tokens(std::string_view text,
                                                      const ExceptionLexicon& lexicon) {
    auto tokens = tokenize(text);
    std::vector<SyllabifiedToken> out;
    out.reserve(tokens.size());
    for (auto& t : tokens) {
        const auto n = count_syllables(t.surface, lexicon);
        out.push_back({std::move(t), n});
    }
    return out;
}

inline LengthSequence syllabify_text(std::string_view text, const ExceptionLexicon& lexicon) {
    const auto tokens = tokenize(text);
    std::vector<LengthSequence::value_type> lengths;
    lengths.reserve(tokens.size());
    for (const auto& t : tokens) lengths.push_back(count_syllables(t.surface, lexicon));
    return LengthSequence(std::move(lengths));
}

} // namespace lineometer
