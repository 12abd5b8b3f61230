#pragma once

// Minimal UTF-8 decoding and the handful of code-point classes the
// tokenizer needs. Covers Latin, Greek and Cyrillic letters; anything
// else is treated as non-alphabetic.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lineometer/error.hpp"

namespace lineometer::utf8 {

struct CodePoint {
    char32_t value;
    std::size_t offset; // byte offset of the first byte in the source
};

// Strict decoder: rejects overlong forms, surrogates and values above
// U+10FFFF. Throws DecodeError with the offset of the offending sequence.
inline std::vector<CodePoint> decode(std::string_view bytes) {
    std::vector<CodePoint> out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    const std::size_t n = bytes.size();
    auto byte = [&](std::size_t k) { return static_cast<std::uint8_t>(bytes[k]); };
    while (i < n) {
        const std::uint8_t b0 = byte(i);
        if (b0 < 0x80) {
            out.push_back({b0, i});
            ++i;
            continue;
        }
        std::size_t len = 0;
        char32_t cp = 0;
        char32_t min = 0;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2; cp = b0 & 0x1F; min = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3; cp = b0 & 0x0F; min = 0x800;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4; cp = b0 & 0x07; min = 0x10000;
        } else {
            throw DecodeError(i);
        }
        if (i + len > n) throw DecodeError(i);
        for (std::size_t k = 1; k < len; ++k) {
            const std::uint8_t b = byte(i + k);
            if ((b & 0xC0) != 0x80) throw DecodeError(i);
            cp = (cp << 6) | (b & 0x3F);
        }
        if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            throw DecodeError(i);
        }
        out.push_back({cp, i});
        i += len;
    }
    return out;
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline bool is_space(char32_t c) {
    switch (c) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000: case 0xFEFF:
        return true;
    default:
        return c >= 0x2000 && c <= 0x200B;
    }
}

// En/em dashes and the horizontal bar join words typographically but are
// not word-internal hyphens.
inline bool is_dash_separator(char32_t c) {
    return c == 0x2013 || c == 0x2014 || c == 0x2015 || c == 0x2E3A || c == 0x2E3B;
}

inline bool is_hyphen(char32_t c) { return c == U'-' || c == 0x2010 || c == 0x2011; }

inline bool is_apostrophe(char32_t c) { return c == U'\'' || c == 0x2019 || c == 0x02BC; }

inline bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

inline bool is_alpha(char32_t c) {
    if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) return true;
    if (c < 0xAA) return false;
    if (c == 0xAA || c == 0xB5 || c == 0xBA) return true;
    if (c >= 0xC0 && c <= 0xFF) return c != 0xD7 && c != 0xF7;
    if (c >= 0x100 && c <= 0x2AF) return true;                 // Latin extended, IPA
    if (c >= 0x370 && c <= 0x3FF) return c != 0x37E && c != 0x387 && c != 0x375;
    if (c >= 0x400 && c <= 0x52F) return !(c >= 0x482 && c <= 0x489);
    if (c >= 0x1E00 && c <= 0x1FFF) return true;               // Latin ext. additional, Greek ext.
    return false;
}

inline char32_t to_lower(char32_t c) {
    if (c >= U'A' && c <= U'Z') return c + 32;
    if (c < 0xC0) return c;
    if (c <= 0xDE) return c == 0xD7 ? c : c + 32;
    if (c >= 0x100 && c <= 0x137) return c | 1u;
    if (c >= 0x139 && c <= 0x148) return (c & 1u) ? c + 1 : c;
    if (c >= 0x14A && c <= 0x177) return c | 1u;
    if (c == 0x178) return 0xFF;
    if (c >= 0x179 && c <= 0x17E) return (c & 1u) ? c + 1 : c;
    if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 32;
    if (c >= 0x410 && c <= 0x42F) return c + 32;
    if (c >= 0x400 && c <= 0x40F) return c + 80;
    return c;
}

// Vowel letters after lowercasing, including accented Latin-1 vowels so
// that words like "café" keep their final syllable.
inline bool is_vowel(char32_t c) {
    switch (c) {
    case U'a': case U'e': case U'i': case U'o': case U'u': case U'y':
        return true;
    default:
        break;
    }
    if (c >= 0xE0 && c <= 0xE6) return true;  // à..æ
    if (c >= 0xE8 && c <= 0xEF) return true;  // è..ï
    if (c >= 0xF2 && c <= 0xF6) return true;  // ò..ö
    if (c == 0xF8) return true;               // ø
    if (c >= 0xF9 && c <= 0xFD) return true;  // ù..ý
    return c == 0xFF || c == 0x153;           // ÿ, œ
}

} // namespace lineometer::utf8
