#pragma once

// Length-sequence files: UTF-8, '#' comment lines, then whitespace
// separated positive integers.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <istream>
#include <iterator>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lineometer/error.hpp"
#include "lineometer/seqmodel.hpp"

namespace lineometer {

struct SequenceFile {
    std::vector<std::string> header; // comment text without the leading '#'
    LengthSequence lengths;
};

namespace detail {

inline bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

inline std::string_view strip(std::string_view s) {
    while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
    return s;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 1;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        fn(text.substr(0, nl), line_no++);
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
}

} // namespace detail

inline SequenceFile parse_length_sequence(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    SequenceFile out;
    std::vector<std::uint32_t> values;
    detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        const auto body = detail::strip(line);
        if (body.empty()) return;
        if (body.front() == '#') {
            out.header.emplace_back(detail::strip(body.substr(1)));
            return;
        }
        std::size_t i = 0;
        while (i < body.size()) {
            while (i < body.size() && detail::is_blank(body[i])) ++i;
            std::size_t j = i;
            while (j < body.size() && !detail::is_blank(body[j])) ++j;
            if (i == j) break;
            const auto token = body.substr(i, j - i);
            std::uint32_t v = 0;
            const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (ec != std::errc{} || end != token.data() + token.size() || v == 0) {
                throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": '" + std::string(token) +
                                                  "' is not a positive integer");
            }
            values.push_back(v);
            i = j;
        }
    });
    detail::require(!values.empty(), ErrorKind::empty_input, "length-sequence file holds no lengths");
    out.lengths = LengthSequence(std::move(values));
    return out;
}

inline SequenceFile read_length_sequence(std::istream& in) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_length_sequence(text);
}

/// True when every non-comment character is a digit or whitespace and at
/// least one number is present. Used to pick the ingestion path.
inline bool looks_like_length_sequence(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    bool any = false, ok = true;
    detail::for_each_line(text, [&](std::string_view line, std::size_t) {
        const auto body = detail::strip(line);
        if (!ok || body.empty() || body.front() == '#') return;
        for (char c : body) {
            if (std::isdigit(static_cast<unsigned char>(c))) {
                any = true;
            } else if (!detail::is_blank(c)) {
                ok = false;
                return;
            }
        }
    });
    return ok && any;
}

inline void write_header(std::ostream& os, std::span<const std::string> header) {
    for (const auto& h : header) os << "# " << h << '\n';
}

inline void write_length_sequence(std::ostream& os, const LengthSequence& seq,
                                  std::span<const std::string> header = {}, std::size_t per_line = 20) {
    write_header(os, header);
    if (per_line == 0) per_line = 20;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        os << seq[i] << ((i + 1) % per_line == 0 || i + 1 == seq.size() ? '\n' : ' ');
    }
}

/// One text line per verse line.
inline void write_length_lines(std::ostream& os, const std::vector<std::vector<std::uint32_t>>& lines,
                               std::span<const std::string> header = {}) {
    write_header(os, header);
    for (const auto& line : lines) {
        for (std::size_t i = 0; i < line.size(); ++i) os << (i ? " " : "") << line[i];
        os << '\n';
    }
}

} // namespace lineometer
