#pragma once

// Full analysis of one input: model fit, spectrum, correlation, Q_n, and
// their serializations (JSON, plain text, CSV).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lineometer/error.hpp"
#include "lineometer/periodicity.hpp"
#include "lineometer/qn.hpp"
#include "lineometer/seqmodel.hpp"
#include "lineometer/sequence_io.hpp"
#include "lineometer/textprep.hpp"

#ifndef LINEOMETER_VERSION
#define LINEOMETER_VERSION "0.1.0"
#endif

namespace lineometer {

inline constexpr const char* version = LINEOMETER_VERSION;

inline constexpr const char* contraction_note =
    "contractions and elisions are counted by the vowel-group heuristic like any other word";
inline constexpr const char* spectral_note =
    "expected_count = tail probability x comparable points; the one-sided figure uses P(X >= |value|) "
    "with variance delta/2 (delta at m = K/2 unless the half-delta option is set); the two-sided figure "
    "doubles the tail";

enum class InputKind { automatic, text, lengths };

inline const char* to_string(InputKind k) {
    switch (k) {
    case InputKind::automatic: return "auto";
    case InputKind::text: return "text";
    case InputKind::lengths: return "lengths";
    }
    return "auto";
}

inline const char* to_string(NyquistVariance v) { return v == NyquistVariance::delta ? "delta" : "half-delta"; }

struct AnalysisOptions {
    std::size_t qn_max = 200;
    std::optional<QnWindow> window;  // defaults to 1..min(200, qn_max)
    double threshold = 0.01;
    Tail tail = Tail::one;
    SigmaConvention sigma = SigmaConvention::conventional;
    Boundary boundary = Boundary::circular;
    NyquistVariance nyquist = NyquistVariance::delta;
    std::size_t max_lag = 200;
    std::uint32_t excess_max = 10;
    std::uint64_t seed = 0;
    std::size_t baseline_replicas = 4;
    InputKind input = InputKind::automatic;
    bool split_chapters = false;
    std::string chapter_pattern = R"(^\s*(CHAPTER|Chapter|BOOK|Book|PART|Part)\b.*$)";
    std::string lexicon_path;  // echoed only
    std::size_t lexicon_entries = 0;

    QnWindow effective_window() const {
        return window.value_or(QnWindow{1, std::min<std::size_t>(200, qn_max)});
    }
};

struct Notice {
    std::string kind;
    std::string message;
};

struct AnalysisReport {
    std::string source;
    std::string input_kind;
    std::optional<std::size_t> chapter;
    std::vector<std::string> header;
    LengthSequence lengths;
    SegmentationModel model;
    AnalysisOptions options;

    std::optional<Spectrum> spectrum;
    std::vector<SpectralPeak> spectral_peaks;
    std::optional<SpectralPeak> nyquist_component;  // real S~_{K/2}, K even
    std::optional<CorrelationProfile> correlation;
    QnProfile qn;
    std::optional<QnSignificance> qn_sig;
    std::vector<HarmonicFamily> families;
    std::optional<Q2Dip> q2;
    LengthHistogram histogram;
    std::vector<ExcessRow> excess;
    std::vector<Notice> notices;
};

struct FileError {
    std::string source;
    ErrorKind kind;
    std::string message;
};

using FileResult = std::variant<AnalysisReport, FileError>;

inline AnalysisReport analyze_sequence(const LengthSequence& seq, std::string source, const AnalysisOptions& opts) {
    require_nonempty(seq, "analysis");
    AnalysisReport r;
    r.source = std::move(source);
    r.input_kind = "lengths";
    r.lengths = seq;
    r.options = opts;
    r.model = fit_model(seq);
    r.histogram = histogram(seq);
    r.excess = excess_table(r.histogram, r.model, std::max<std::uint32_t>(1, opts.excess_max));
    const std::size_t K = seq.size();

    if (r.model.delta == 0.0) {
        r.notices.push_back({to_string(ErrorKind::degenerate_constant),
                             "every word is monosyllabic; the model variance is zero and spectral significance is undefined"});
    }
    if (K >= 2) {
        SpectralOptions so{opts.tail, opts.threshold, opts.nyquist};
        r.spectrum = dft(seq);
        auto all = score_components(*r.spectrum, so);
        for (const auto& p : all) {
            if (p.flagged) r.spectral_peaks.push_back(p);
            if (p.component == Component::real && 2 * p.m == K) r.nyquist_component = p;
        }
        try {
            r.correlation = correlation(seq, std::min(opts.max_lag, K - 1));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::degenerate_constant) throw;
            r.notices.push_back({to_string(e.kind()), e.what()});
        }
    } else {
        r.notices.push_back({"short-input", "a single word has no spectrum or correlation"});
    }

    r.qn = qn_profile(seq, opts.qn_max, opts.boundary);
    r.qn_sig = qn_significance(r.qn, opts.effective_window(), {opts.sigma, opts.threshold});
    if (r.qn_sig->degenerate_flat) {
        r.notices.push_back({"degenerate-flat", "Q_n is constant over the window; sigma_Q = 0 and nothing is flagged"});
    }
    r.families = peak_scan(r.qn, *r.qn_sig);
    if (opts.qn_max >= 2 && opts.baseline_replicas > 0) {
        r.q2 = q2_dip_report(r.qn, r.model,
                             geometric_baseline(r.model, K, opts.baseline_replicas, opts.seed, opts.boundary));
    }
    return r;
}

inline AnalysisReport analyze_text(std::string_view text, std::string source, const ExceptionLexicon& lexicon,
                                   const AnalysisOptions& opts) {
    const auto seq = syllabify_text(text, lexicon);
    if (seq.empty()) throw Error(ErrorKind::empty_input, "no words found in " + source);
    auto r = analyze_sequence(seq, std::move(source), opts);
    r.input_kind = "text";
    return r;
}

/// Splits raw text at lines matching `pattern`. Text before the first
/// heading becomes its own part only when it holds words.
inline std::vector<std::string> split_chapters(std::string_view text, const std::string& pattern) {
    const std::regex heading(pattern);
    std::vector<std::string> parts(1);
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string line(text.substr(pos, nl - pos));
        if (std::regex_match(line, heading)) {
            if (!tokenize(parts.back()).empty()) parts.emplace_back();
            else parts.back().clear();
        } else {
            parts.back() += line;
            parts.back() += '\n';
        }
        pos = nl + 1;
    }
    if (parts.size() > 1 && tokenize(parts.back()).empty()) parts.pop_back();
    return parts;
}

/// Analyzes raw bytes from one source. Errors become FileError records.
inline std::vector<FileResult> analyze_bytes(const std::string& bytes, const std::string& source,
                                             const ExceptionLexicon& lexicon, const AnalysisOptions& opts) {
    std::vector<FileResult> out;
    try {
        const bool lengths = opts.input == InputKind::lengths ||
                             (opts.input == InputKind::automatic && looks_like_length_sequence(bytes));
        if (lengths) {
            auto file = parse_length_sequence(bytes);
            auto r = analyze_sequence(file.lengths, source, opts);
            r.header = std::move(file.header);
            out.emplace_back(std::move(r));
            return out;
        }
        utf8::decode(bytes);  // reject malformed input before splitting
        if (!opts.split_chapters) {
            out.emplace_back(analyze_text(bytes, source, lexicon, opts));
            return out;
        }
        const auto parts = split_chapters(bytes, opts.chapter_pattern);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const std::string label = source + "#" + std::to_string(i + 1);
            try {
                auto r = analyze_text(parts[i], label, lexicon, opts);
                r.chapter = i + 1;
                out.emplace_back(std::move(r));
            } catch (const Error& e) {
                out.emplace_back(FileError{label, e.kind(), e.what()});
            }
        }
    } catch (const Error& e) {
        out.emplace_back(FileError{source, e.kind(), e.what()});
    } catch (const std::regex_error& e) {
        out.emplace_back(FileError{source, ErrorKind::invalid_argument, std::string("chapter pattern: ") + e.what()});
    }
    return out;
}

inline std::vector<FileResult> analyze_file(const std::string& path, const ExceptionLexicon& lexicon,
                                            const AnalysisOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {FileError{path, ErrorKind::io, "cannot open " + path}};
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) return {FileError{path, ErrorKind::io, "read failed for " + path}};
    return analyze_bytes(bytes, path, lexicon, opts);
}

// ---------------------------------------------------------------- JSON

using json = nlohmann::ordered_json;

namespace detail {

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json peak_json(const SpectralPeak& p) {
    return {{"m", p.m},
            {"component", to_string(p.component)},
            {"value", p.value},
            {"period", p.period},
            {"variance", p.variance},
            {"z", p.z},
            {"one_sided_p", p.one_sided_p},
            {"two_sided_p", p.two_sided_p},
            {"comparisons", p.comparisons},
            {"expected_count", p.expected_count},
            {"expected_count_one_sided", p.one_sided_p * double(p.comparisons)},
            {"expected_count_two_sided", p.two_sided_p * double(p.comparisons)},
            {"flagged", p.flagged}};
}

} // namespace detail

inline json conventions_json(const AnalysisOptions& o) {
    const auto w = o.effective_window();
    return {{"tail", to_string(o.tail)},
            {"sigma", to_string(o.sigma)},
            {"boundary", to_string(o.boundary)},
            {"nyquist_variance", to_string(o.nyquist)},
            {"threshold", o.threshold},
            {"qn_max", o.qn_max},
            {"window", {w.first, w.last}},
            {"max_lag", o.max_lag},
            {"seed", o.seed},
            {"baseline_replicas", o.baseline_replicas},
            {"input", to_string(o.input)},
            {"split_chapters", o.split_chapters},
            {"lexicon", o.lexicon_path.empty() ? json(nullptr) : json(o.lexicon_path)},
            {"lexicon_entries", o.lexicon_entries},
            {"contractions", contraction_note},
            {"spectral_significance", spectral_note}};
}

inline json to_json(const AnalysisReport& r) {
    json j;
    j["tool"] = {{"name", "lineometer"}, {"version", version}};
    j["source"] = {{"file", r.source},
                   {"input", r.input_kind},
                   {"chapter", r.chapter ? json(*r.chapter) : json(nullptr)},
                   {"header", r.header},
                   {"K", r.lengths.size()},
                   {"syllables", r.lengths.total_syllables()},
                   {"s", r.model.s},
                   {"q", r.model.q},
                   {"delta", r.model.delta},
                   {"sqrt_delta", std::sqrt(r.model.delta)}};
    j["conventions"] = conventions_json(r.options);

    json notices = json::array();
    for (const auto& n : r.notices) notices.push_back({{"kind", n.kind}, {"message", n.message}});
    j["notices"] = notices;

    json hist = json::array();
    for (auto [s, p] : r.histogram.probabilities) hist.push_back({{"S", s}, {"p", p}});
    j["histogram"] = hist;
    json excess = json::array();
    for (const auto& e : r.excess) {
        excess.push_back({{"S", e.syllables}, {"p_empirical", e.p_empirical}, {"p_geometric", e.p_geometric},
                          {"excess", e.excess}});
    }
    j["excess"] = excess;

    if (r.spectrum) {
        const auto& c = r.spectrum->coefficients;
        json re = json::array(), im = json::array();
        for (std::size_t m = 0; 2 * m <= c.size(); ++m) {
            re.push_back(c[m].real());
            im.push_back(c[m].imag());
        }
        j["spectrum"] = {{"K", c.size()}, {"re", re}, {"im", im}};
    } else {
        j["spectrum"] = nullptr;
    }
    json peaks = json::array();
    for (const auto& p : r.spectral_peaks) peaks.push_back(detail::peak_json(p));
    j["spectral_peaks"] = peaks;
    j["nyquist_component"] = r.nyquist_component ? detail::peak_json(*r.nyquist_component) : json(nullptr);

    if (r.correlation) {
        j["correlation"] = {{"max_lag", r.correlation->values.size() - 1}, {"G", r.correlation->values}};
    } else {
        j["correlation"] = nullptr;
    }

    json qn = {{"boundary", to_string(r.qn.boundary)}, {"N", r.qn.N}, {"values", r.qn.values}};
    if (r.qn_sig) {
        const auto& s = *r.qn_sig;
        json z = json::array(), p = json::array();
        for (std::size_t i = 0; i < s.z.size(); ++i) {
            z.push_back(detail::finite_or_null(s.z[i]));
            p.push_back(detail::finite_or_null(s.p[i]));
        }
        json flagged = json::array();
        for (const auto& f : s.flagged) {
            flagged.push_back({{"n", f.n}, {"Q", f.q}, {"z", f.z}, {"p", f.p},
                               {"expected_count", f.p * double(s.window.size())}});
        }
        qn["mean"] = s.mean;
        qn["sigma"] = s.sigma;
        qn["sigma_paper"] = s.sigma_paper;
        qn["sigma_conventional"] = s.sigma_conventional;
        qn["sigma_convention"] = to_string(s.convention);
        qn["window"] = {s.window.first, s.window.last};
        qn["z"] = z;
        qn["p"] = p;
        qn["flagged"] = flagged;
        qn["degenerate_flat"] = s.degenerate_flat;
    }
    json families = json::array();
    for (const auto& f : r.families) {
        families.push_back({{"fundamental", f.fundamental}, {"fundamental_flagged", f.fundamental_flagged},
                            {"members", f.members}, {"missing", f.missing}, {"isolated", f.isolated}});
    }
    qn["families"] = families;
    if (r.q2) {
        qn["q2_dip"] = {{"text_q2", r.q2->text_q2},           {"baseline_mean", r.q2->baseline_mean},
                        {"baseline_sd", r.q2->baseline_sd},   {"deviation", r.q2->deviation},
                        {"standard_error", r.q2->standard_error}, {"replicas", r.q2->replicas}};
    } else {
        qn["q2_dip"] = nullptr;
    }
    j["qn"] = qn;
    return j;
}

inline json to_json(const FileError& e) {
    return {{"tool", {{"name", "lineometer"}, {"version", version}}},
            {"source", {{"file", e.source}}},
            {"error", {{"kind", to_string(e.kind)}, {"message", e.message}}}};
}

inline json to_json(const FileResult& r) {
    return std::visit([](const auto& v) { return to_json(v); }, r);
}

// ---------------------------------------------------------------- text

inline void write_text(std::ostream& os, const AnalysisReport& r) {
    const auto flags = os.flags();
    const auto prec = os.precision();
    os << std::setprecision(6);
    os << "== " << r.source << " (" << r.input_kind << ")\n";
    os << "lineometer " << version << "\n";
    os << "words K = " << r.lengths.size() << ", syllables = " << r.lengths.total_syllables() << "\n";
    os << "mean length s = " << r.model.s << ", q = " << r.model.q << ", delta = " << r.model.delta
       << ", sqrt(delta) = " << std::sqrt(r.model.delta) << "\n";
    const auto w = r.options.effective_window();
    os << "conventions: tail=" << to_string(r.options.tail) << " sigma=" << to_string(r.options.sigma)
       << " boundary=" << to_string(r.options.boundary) << " nyquist=" << to_string(r.options.nyquist)
       << " threshold=" << r.options.threshold << " window=" << w.first << ".." << w.last
       << " seed=" << r.options.seed << "\n";
    os << "lexicon: " << (r.options.lexicon_path.empty() ? "none" : r.options.lexicon_path) << " ("
       << r.options.lexicon_entries << " entries); " << contraction_note << "\n";
    for (const auto& n : r.notices) os << "notice [" << n.kind << "]: " << n.message << "\n";

    os << "\nlength distribution (S: empirical / geometric)\n";
    for (const auto& e : r.excess) {
        os << "  " << std::setw(2) << e.syllables << ": " << std::setw(10) << e.p_empirical << " / "
           << std::setw(10) << e.p_geometric << "\n";
    }

    os << "\nspectrum: " << r.spectral_peaks.size() << " flagged component(s)\n";
    for (const auto& p : r.spectral_peaks) {
        os << "  m=" << p.m << " " << to_string(p.component) << " value=" << p.value << " period=" << p.period
           << " z=" << p.z << " expected one-sided=" << p.one_sided_p * double(p.comparisons)
           << " two-sided=" << p.two_sided_p * double(p.comparisons) << "\n";
    }
    if (r.nyquist_component) {
        const auto& p = *r.nyquist_component;
        os << "  period-2 component S~_{K/2} = " << p.value << " (z=" << p.z
           << ", expected one-sided=" << p.one_sided_p * double(p.comparisons)
           << ", two-sided=" << p.two_sided_p * double(p.comparisons) << ")\n";
    }
    os << "  note: " << spectral_note << "\n";

    if (r.correlation) {
        const auto& g = r.correlation->values;
        double worst = 0.0;
        std::size_t at = 0;
        for (std::size_t l = 1; l < g.size(); ++l) {
            if (std::abs(g[l]) > worst) {
                worst = std::abs(g[l]);
                at = l;
            }
        }
        os << "\ncorrelation: lags 0.." << g.size() - 1 << ", largest |G| = " << worst << " at lag " << at
           << " (white-noise scale 1/sqrt(K) = " << 1.0 / std::sqrt(double(r.lengths.size())) << ")\n";
    }

    if (r.qn_sig) {
        const auto& s = *r.qn_sig;
        os << "\nQ_n: mean = " << s.mean << ", sigma = " << s.sigma << " (" << to_string(s.convention)
           << "; paper-normalized " << s.sigma_paper << ", conventional " << s.sigma_conventional << ")\n";
        if (!s.degenerate_flat) {
            std::size_t top = s.window.first;
            for (std::size_t n = s.window.first; n <= s.window.last; ++n) {
                if (s.z[n - 1] > s.z[top - 1]) top = n;
            }
            os << "  largest in window: n=" << top << " Q=" << r.qn(top) << " z=" << s.z[top - 1] << " ("
               << s.flagged.size() << " flagged)\n";
        }
        for (const auto& f : s.flagged) {
            os << "  flagged n=" << f.n << " Q=" << f.q << " z=" << f.z << " p=" << f.p
               << " expected=" << f.p * double(s.window.size()) << "\n";
        }
        for (const auto& f : r.families) {
            os << "  line length " << f.fundamental << (f.isolated ? " (isolated peak)" : "");
            if (!f.members.empty()) {
                os << " members";
                for (auto n : f.members) os << " " << n;
            }
            if (!f.missing.empty()) {
                os << " missing";
                for (auto n : f.missing) os << " " << n;
            }
            os << "\n";
        }
    }
    if (r.q2) {
        os << "  Q_2 = " << r.q2->text_q2 << " vs geometric baseline " << r.q2->baseline_mean
           << ": deviation " << r.q2->deviation << " +/- " << r.q2->standard_error << "\n";
    }
    os.flags(flags);
    os.precision(prec);
}

inline void write_text(std::ostream& os, const FileError& e) {
    os << "== " << e.source << "\nerror [" << to_string(e.kind) << "]: " << e.message << "\n";
}

inline void write_text(std::ostream& os, const FileResult& r) {
    std::visit([&](const auto& v) { write_text(os, v); }, r);
}

// ---------------------------------------------------------------- CSV

inline const std::vector<std::string>& csv_series_names() {
    static const std::vector<std::string> names{"histogram", "excess", "spectrum", "correlation", "qn"};
    return names;
}

/// Writes one series; returns false when the report does not hold it.
inline bool write_csv_series(std::ostream& os, const AnalysisReport& r, const std::string& series) {
    if (series == "histogram") {
        os << "S,p\n";
        os.precision(17);
        for (auto [s, p] : r.histogram.probabilities) os << s << ',' << p << '\n';
        return true;
    }
    if (series == "excess") {
        write_excess_csv(os, r.excess);
        return true;
    }
    if (series == "spectrum") {
        if (!r.spectrum) return false;
        write_spectrum_csv(os, *r.spectrum);
        return true;
    }
    if (series == "correlation") {
        if (!r.correlation) return false;
        write_correlation_csv(os, *r.correlation);
        return true;
    }
    if (series == "qn") {
        write_qn_csv(os, r.qn, r.qn_sig ? &*r.qn_sig : nullptr);
        return true;
    }
    throw Error(ErrorKind::invalid_argument, "unknown series '" + series + "'");
}

/// All series in one stream, each introduced by a comment line.
inline void write_csv(std::ostream& os, const AnalysisReport& r) {
    for (const auto& name : csv_series_names()) {
        std::ostringstream body;
        if (!write_csv_series(body, r, name)) continue;
        os << "# " << r.source << " " << name << "\n" << body.str();
    }
}

} // namespace lineometer
