// lineometer command-line front end: analyze, generate, plot, calibrate.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lineometer/report.hpp"
#include "lineometer/sequence_io.hpp"
#include "lineometer/svg.hpp"
#include "lineometer/synth.hpp"
#include "lineometer/textprep.hpp"

namespace {

using namespace lineometer;

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_input = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

QnWindow parse_window(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw UsageError("--window expects A..B, got '" + text + "'");
    try {
        std::size_t used_a = 0, used_b = 0;
        const auto a = std::stoull(text.substr(0, dots), &used_a);
        const auto b = std::stoull(text.substr(dots + 2), &used_b);
        if (used_a != dots || used_b != text.size() - dots - 2) throw std::invalid_argument("trailing");
        return {a, b};
    } catch (const std::logic_error&) {
        throw UsageError("--window expects A..B with positive integers, got '" + text + "'");
    }
}

std::string read_all(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes to --out (all or nothing) or stdout.
void emit(const std::string& out_path, const std::string& body) {
    if (out_path.empty() || out_path == "-") {
        std::cout << body;
        std::cout.flush();
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw InputError("cannot write " + out_path);
    out << body;
    if (!out) throw InputError("write failed for " + out_path);
}

ExceptionLexicon load_lexicon_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open lexicon " + path);
    std::vector<std::string> warnings;
    try {
        auto lex = load_lexicon(in, &warnings);
        for (const auto& w : warnings) std::cerr << "lineometer: lexicon " << path << ": " << w << "\n";
        return lex;
    } catch (const Error& e) {
        throw InputError("lexicon " + path + ": " + e.what());
    }
}

// ------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::vector<std::string> inputs;
    std::string lexicon;
    std::size_t qn_max = 200;
    std::string window;
    double threshold = 0.01;
    std::string tail = "one";
    std::string sigma = "conventional";
    std::string circular = "true";
    std::string nyquist = "delta";
    std::string format = "text";
    std::string input = "auto";
    std::uint64_t seed = 0;
    std::size_t max_lag = 200;
    std::size_t replicas = 4;
    std::string out;
    unsigned jobs = 1;
    bool split = false;
    std::string chapter_pattern;
};

int run_analyze(const AnalyzeArgs& a) {
    AnalysisOptions o;
    if (a.qn_max < 2) throw UsageError("--qn-max must be at least 2");
    o.qn_max = a.qn_max;
    if (!a.window.empty()) {
        o.window = parse_window(a.window);
        if (o.window->first < 1 || o.window->last > o.qn_max || o.window->size() < 2) {
            throw UsageError("--window must lie within 1.." + std::to_string(o.qn_max) + " and span at least 2 values");
        }
    }
    if (!(a.threshold > 0.0)) throw UsageError("--threshold must be positive");
    o.threshold = a.threshold;
    o.tail = a.tail == "two" ? Tail::two : Tail::one;
    o.sigma = a.sigma == "paper" ? SigmaConvention::paper : SigmaConvention::conventional;
    o.boundary = a.circular == "true" ? Boundary::circular : Boundary::truncated;
    o.nyquist = a.nyquist == "half-delta" ? NyquistVariance::half_delta : NyquistVariance::delta;
    o.input = a.input == "text" ? InputKind::text : a.input == "lengths" ? InputKind::lengths : InputKind::automatic;
    o.seed = a.seed;
    o.max_lag = a.max_lag;
    o.baseline_replicas = a.replicas;
    o.split_chapters = a.split;
    if (!a.chapter_pattern.empty()) o.chapter_pattern = a.chapter_pattern;

    ExceptionLexicon lexicon;
    std::string lexicon_path = a.lexicon;
    if (lexicon_path.empty()) {
        if (const char* env = std::getenv("LINEOMETER_LEXICON"); env && *env) lexicon_path = env;
    }
    if (!lexicon_path.empty()) {
        lexicon = load_lexicon_file(lexicon_path);
        o.lexicon_path = lexicon_path;
        o.lexicon_entries = lexicon.size();
    }

    const std::size_t n = a.inputs.size();
    std::vector<std::vector<FileResult>> results(n);
    auto work = [&](std::size_t i) {
        const auto& path = a.inputs[i];
        if (path == "-") {
            try {
                results[i] = analyze_bytes(read_all("-"), "<stdin>", lexicon, o);
            } catch (const InputError& e) {
                results[i] = {FileError{path, ErrorKind::io, e.what()}};
            }
        } else {
            results[i] = analyze_file(path, lexicon, o);
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(n)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i; (i = next++) < n;) work(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    bool failed = false;
    std::vector<const FileResult*> flat;
    for (const auto& rs : results) {
        for (const auto& r : rs) {
            flat.push_back(&r);
            if (const auto* e = std::get_if<FileError>(&r)) {
                failed = true;
                std::cerr << "lineometer: " << e->source << ": " << e->message << "\n";
            }
        }
    }

    std::ostringstream body;
    if (a.format == "json") {
        if (flat.size() == 1) {
            body << to_json(*flat[0]).dump(2) << "\n";
        } else {
            json arr = json::array();
            for (const auto* r : flat) arr.push_back(to_json(*r));
            body << arr.dump(2) << "\n";
        }
    } else if (a.format == "csv") {
        for (const auto* r : flat) {
            if (const auto* rep = std::get_if<AnalysisReport>(r)) write_csv(body, *rep);
        }
    } else {
        for (std::size_t i = 0; i < flat.size(); ++i) {
            if (i) body << "\n";
            write_text(body, *flat[i]);
        }
    }
    emit(a.out, body.str());
    return failed ? exit_input : exit_ok;
}

// ------------------------------------------------------------ generate

struct GenerateArgs {
    std::string kind = "geometric";
    double q = 0.77;
    std::size_t k = 1000;
    std::uint32_t line = 8;
    std::size_t lines = 1000;
    double verse_q = 0.7;
    double long_mean = 1.6;
    double short_mean = 1.2;
    double fraction = 0.0;
    std::size_t block_lines = 14;
    std::uint64_t seed = 0;
    std::string out;
    bool q_set = false;
};

int run_generate(const GenerateArgs& a) {
    std::ostringstream body;
    std::vector<std::string> header{std::string("lineometer ") + version + " generate"};
    try {
        if (a.kind == "isometric") {
            // --q doubles as the in-line boundary probability for pure verse
            const IsometricSpec spec{a.line, a.lines, a.q_set ? a.q : a.verse_q, a.seed};
            header.push_back(describe(spec));
            write_length_lines(body, isometric_line_words(spec.line_syllables, spec.lines, spec.q, spec.seed), header);
        } else {
            GeneratorSpec spec;
            if (a.kind == "geometric") {
                spec = GeometricSpec{a.q, a.k, a.seed};
            } else if (a.kind == "alternating") {
                spec = AlternatingSpec{a.k, a.long_mean, a.short_mean, a.seed};
            } else {
                // prose and verse streams get their own seeds derived from --seed
                spec = MixtureSpec{GeometricSpec{a.q, a.k, a.seed * 3 + 1},
                                   IsometricSpec{a.line, 1, a.verse_q, a.seed * 3 + 2}, a.fraction, a.seed,
                                   a.block_lines};
            }
            header.push_back(describe(spec));
            write_length_sequence(body, generate(spec), header);
        }
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    emit(a.out, body.str());
    return exit_ok;
}

// ---------------------------------------------------------------- plot

struct PlotArgs {
    std::string report;
    std::string kind = "qn";
    std::size_t index = 0;
    std::string out;
};

int run_plot(const PlotArgs& a) {
    json doc;
    try {
        doc = json::parse(read_all(a.report));
    } catch (const json::parse_error& e) {
        throw InputError(a.report + ": not a JSON report (" + e.what() + ")");
    }
    if (doc.is_array()) {
        if (a.index >= doc.size()) {
            throw InputError(a.report + " holds " + std::to_string(doc.size()) + " report(s); --index " +
                             std::to_string(a.index) + " is out of range");
        }
        doc = doc.at(a.index);
    }
    std::string svg_text;
    try {
        svg_text = svg::plot(doc, a.kind);
    } catch (const Error& e) {
        throw InputError(e.what());
    } catch (const json::exception& e) {
        throw InputError(a.report + ": malformed report (" + e.what() + ")");
    }
    emit(a.out, svg_text);
    return exit_ok;
}

// ----------------------------------------------------------- calibrate

struct CalibrateArgs {
    double q = 0.77;
    std::size_t k = 100'000;
    std::size_t seeds = 100;
    std::uint64_t seed = 0;
    std::size_t qn_max = 200;
    double threshold = 0.01;
    std::string tail = "one";
    std::string sigma = "conventional";
    std::string format = "text";
    std::string out;
    unsigned jobs = 1;
};

int run_calibrate(const CalibrateArgs& a) {
    if (a.seeds == 0) throw UsageError("--seeds must be positive");
    if (a.qn_max < 2) throw UsageError("--qn-max must be at least 2");
    if (!(a.threshold > 0.0)) throw UsageError("--threshold must be positive");
    AnalysisOptions o;
    o.qn_max = a.qn_max;
    o.threshold = a.threshold;
    o.tail = a.tail == "two" ? Tail::two : Tail::one;
    o.sigma = a.sigma == "paper" ? SigmaConvention::paper : SigmaConvention::conventional;
    o.baseline_replicas = 0;
    o.max_lag = 1;

    std::vector<char> spectral(a.seeds), qn(a.seeds);
    auto work = [&](std::size_t i) {
        const auto seq = random_segmented(a.q, a.k, a.seed + i);
        const auto r = analyze_sequence(seq, "calibration", o);
        spectral[i] = !r.spectral_peaks.empty();
        qn[i] = !r.qn_sig->flagged.empty();
    };
    try {
        random_segmented(a.q, 1, 0);  // validate before spawning
        const unsigned jobs = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(a.seeds)));
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i; (i = next++) < a.seeds;) work(i);
            });
        }
        for (auto& t : pool) t.join();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    std::size_t n_spec = 0, n_qn = 0, n_any = 0;
    for (std::size_t i = 0; i < a.seeds; ++i) {
        n_spec += spectral[i];
        n_qn += qn[i];
        n_any += spectral[i] || qn[i];
    }
    const double rate = double(n_any) / double(a.seeds);
    std::ostringstream body;
    if (a.format == "json") {
        json j = {{"tool", {{"name", "lineometer"}, {"version", version}}},
                  {"q", a.q},
                  {"K", a.k},
                  {"seeds", a.seeds},
                  {"first_seed", a.seed},
                  {"conventions", conventions_json(o)},
                  {"spectral_flagged", n_spec},
                  {"qn_flagged", n_qn},
                  {"any_flagged", n_any},
                  {"false_positive_rate", rate}};
        body << j.dump(2) << "\n";
    } else {
        body << "false-positive calibration: " << a.seeds << " geometric corpora, q = " << a.q << ", K = " << a.k
             << ", seeds " << a.seed << ".." << a.seed + a.seeds - 1 << "\n"
             << "conventions: tail=" << a.tail << " sigma=" << a.sigma << " threshold=" << a.threshold
             << " qn-max=" << a.qn_max << "\n"
             << "spectral flags: " << n_spec << "\n"
             << "Q_n flags:      " << n_qn << "\n"
             << "any flag:       " << n_any << " (" << rate * 100 << "%)\n";
    }
    emit(a.out, body.str());
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lineometer: detect lineation in the word-length sequence of a text"};
    app.set_version_flag("--version", std::string(lineometer::version));
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Analyze text or length-sequence files");
    analyze->add_option("inputs", an.inputs, "Input files ('-' for stdin)")->required();
    analyze->add_option("--lexicon", an.lexicon, "Syllable exception lexicon (word<TAB>count); default $LINEOMETER_LEXICON");
    analyze->add_option("--qn-max", an.qn_max, "Largest n for Q_n")->capture_default_str();
    analyze->add_option("--window", an.window, "Q_n fit window A..B (default 1..min(200, qn-max))");
    analyze->add_option("--threshold", an.threshold, "Expected-count flag threshold")->capture_default_str();
    analyze->add_option("--tail", an.tail, "Spectral tail convention")->check(CLI::IsMember({"one", "two"}))->capture_default_str();
    analyze->add_option("--sigma", an.sigma, "Q_n spread normalization")
        ->check(CLI::IsMember({"paper", "conventional"}))
        ->capture_default_str();
    analyze->add_option("--circular", an.circular, "Wrap Q_n runs around the text end")
        ->check(CLI::IsMember({"true", "false"}))
        ->capture_default_str();
    analyze->add_option("--nyquist", an.nyquist, "Variance of the real S~_{K/2}")
        ->check(CLI::IsMember({"delta", "half-delta"}))
        ->capture_default_str();
    analyze->add_option("--format", an.format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}))->capture_default_str();
    analyze->add_option("--input", an.input, "Input kind")->check(CLI::IsMember({"auto", "text", "lengths"}))->capture_default_str();
    analyze->add_option("--seed", an.seed, "Seed for the geometric Q_2 baseline")->capture_default_str();
    analyze->add_option("--max-lag", an.max_lag, "Largest correlation lag")->capture_default_str();
    analyze->add_option("--replicas", an.replicas, "Q_2 baseline replicas (0 disables)")->capture_default_str();
    analyze->add_option("--out", an.out, "Output file (default stdout)");
    analyze->add_option("--jobs", an.jobs, "Files analyzed in parallel")->check(CLI::PositiveNumber)->capture_default_str();
    analyze->add_flag("--split-chapters", an.split, "Analyze each chapter of a text separately");
    analyze->add_option("--chapter-pattern", an.chapter_pattern, "Regex matching chapter heading lines");

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a synthetic length-sequence file");
    generate->add_option("--kind", gen.kind, "Generator")
        ->check(CLI::IsMember({"geometric", "isometric", "alternating", "mixture"}))
        ->capture_default_str();
    auto* q_opt = generate->add_option("--q", gen.q, "Boundary probability (prose; verse too for isometric)")->capture_default_str();
    generate->add_option("--k", gen.k, "Number of words")->capture_default_str();
    generate->add_option("--line", gen.line, "Syllables per verse line")->capture_default_str();
    generate->add_option("--lines", gen.lines, "Number of verse lines (isometric)")->capture_default_str();
    generate->add_option("--verse-q", gen.verse_q, "Boundary probability inside verse lines")->capture_default_str();
    generate->add_option("--long-mean", gen.long_mean, "Mean length at odd positions (alternating)")->capture_default_str();
    generate->add_option("--short-mean", gen.short_mean, "Mean length at even positions (alternating)")->capture_default_str();
    generate->add_option("--fraction", gen.fraction, "Verse fraction (mixture)")->capture_default_str();
    generate->add_option("--block-lines", gen.block_lines, "Lines per embedded verse block (mixture)")->capture_default_str();
    generate->add_option("--seed", gen.seed, "Seed")->capture_default_str();
    generate->add_option("--out", gen.out, "Output file (default stdout)");

    PlotArgs pl;
    auto* plot = app.add_subcommand("plot", "Render an SVG chart from a JSON report");
    plot->add_option("report", pl.report, "JSON report from 'analyze --format json' ('-' for stdin)")->required();
    plot->add_option("--kind", pl.kind, "Chart")->check(CLI::IsMember(lineometer::svg::plot_kinds()))->capture_default_str();
    plot->add_option("--index", pl.index, "Report index when the file holds several")->capture_default_str();
    plot->add_option("--out", pl.out, "Output SVG file (default stdout); not created on error");

    CalibrateArgs ca;
    auto* calibrate = app.add_subcommand("calibrate", "False-positive rate of the detectors on random segmentation");
    calibrate->add_option("--q", ca.q, "Boundary probability")->capture_default_str();
    calibrate->add_option("--k", ca.k, "Words per corpus")->capture_default_str();
    calibrate->add_option("--seeds", ca.seeds, "Number of corpora")->capture_default_str();
    calibrate->add_option("--seed", ca.seed, "First seed")->capture_default_str();
    calibrate->add_option("--qn-max", ca.qn_max, "Largest n for Q_n")->capture_default_str();
    calibrate->add_option("--threshold", ca.threshold, "Expected-count flag threshold")->capture_default_str();
    calibrate->add_option("--tail", ca.tail, "Spectral tail convention")->check(CLI::IsMember({"one", "two"}))->capture_default_str();
    calibrate->add_option("--sigma", ca.sigma, "Q_n spread normalization")
        ->check(CLI::IsMember({"paper", "conventional"}))
        ->capture_default_str();
    calibrate->add_option("--format", ca.format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    calibrate->add_option("--out", ca.out, "Output file (default stdout)");
    calibrate->add_option("--jobs", ca.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }
    gen.q_set = q_opt->count() > 0;

    try {
        if (analyze->parsed()) return run_analyze(an);
        if (generate->parsed()) return run_generate(gen);
        if (plot->parsed()) return run_plot(pl);
        if (calibrate->parsed()) return run_calibrate(ca);
    } catch (const UsageError& e) {
        std::cerr << "lineometer: " << e.what() << "\n";
        return exit_usage;
    } catch (const InputError& e) {
        std::cerr << "lineometer: " << e.what() << "\n";
        return exit_input;
    } catch (const lineometer::Error& e) {
        std::cerr << "lineometer: " << e.what() << "\n";
        return exit_input;
    }
    return exit_usage;
}
