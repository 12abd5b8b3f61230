#pragma once

// Self-contained SVG charts built from a JSON analysis report. Output is
// byte-stable: every coordinate goes through one fixed-precision formatter.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lineometer/error.hpp"
#include "lineometer/gaussian.hpp"
#include "lineometer/seqmodel.hpp"

namespace lineometer::svg {

struct Point {
    double x;
    double y;
};

enum class Mark { dots, line, bars, stems };

struct Series {
    std::string label;
    std::vector<Point> points;
    Mark mark = Mark::dots;
    std::string color = "#1f77b4";
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    bool equal_aspect = false;
    std::vector<Series> series;
    std::vector<double> rules;  // horizontal reference lines
};

namespace detail {

inline std::string num(double v) {
    if (std::abs(v) < 5e-4) v = 0.0;  // no "-0.000"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s;
}

inline std::string label_num(double v) {
    if (v == 0.0) return "0";
    char buf[32];
    const double a = std::abs(v);
    if (a >= 1e5 || a < 1e-3) std::snprintf(buf, sizeof buf, "%.0e", v);
    else std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Roughly `count` ticks at 1, 2 or 5 times a power of ten.
inline std::vector<double> nice_ticks(double lo, double hi, int count = 6) {
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / count;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 5.0, 10.0}) {
        step = f * mag;
        if (raw <= step) break;
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) out.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(hi > lo)) {
            const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
            lo -= d;
            hi += d;
        }
        const double d = (hi - lo) * 0.05;
        lo -= d;
        hi += d;
    }
};

} // namespace detail

/// Renders a chart. Throws missing_series when no series has points.
inline std::string render(const Chart& chart) {
    using detail::num;
    const bool any = std::any_of(chart.series.begin(), chart.series.end(),
                                 [](const Series& s) { return !s.points.empty(); });
    if (!any) throw Error(ErrorKind::missing_series, "nothing to plot for '" + chart.title + "'");

    const double W = 720, H = 480, left = 80, right = 20, top = 40, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;

    auto ty = [&](double y) { return chart.log_y ? (y > 0 ? std::log10(y) : std::numeric_limits<double>::quiet_NaN()) : y; };
    detail::Range xr, yr;
    for (const auto& s : chart.series) {
        for (const auto& p : s.points) {
            xr.add(p.x);
            yr.add(ty(p.y));
        }
        if (s.mark == Mark::bars || s.mark == Mark::stems) yr.add(chart.log_y ? yr.lo : 0.0);
    }
    for (double r : chart.rules) yr.add(ty(r));
    if (chart.equal_aspect) {
        const double a = std::max({std::abs(xr.lo), std::abs(xr.hi), std::abs(yr.lo), std::abs(yr.hi)});
        xr = {-a * pw / ph, a * pw / ph};
        yr = {-a, a};
    }
    xr.pad();
    if (chart.log_y) {
        yr.lo = std::floor(yr.lo - 1e-9);
        yr.hi = std::max(std::ceil(yr.hi - 1e-9), yr.lo + 1);
    } else {
        yr.pad();
    }

    auto sx = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto sy = [&](double y) { return top + (yr.hi - ty(y)) / (yr.hi - yr.lo) * ph; };
    auto sy_raw = [&](double t) { return top + (yr.hi - t) / (yr.hi - yr.lo) * ph; };

    std::string o;
    o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" viewBox=\"0 0 " + num(W) + " " + num(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o += "<text x=\"" + num(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         detail::escape(chart.title) + "</text>\n";

    // axes and ticks
    o += "<g stroke=\"#444\" fill=\"none\">\n";
    o += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) + "\"/>\n";
    o += "</g>\n<g fill=\"#222\">\n";
    for (double t : detail::nice_ticks(xr.lo, xr.hi)) {
        const double x = sx(t);
        o += "<line x1=\"" + num(x) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(x) + "\" y2=\"" +
             num(top + ph + 5) + "\" stroke=\"#444\"/>";
        o += "<text x=\"" + num(x) + "\" y=\"" + num(top + ph + 18) + "\" text-anchor=\"middle\">" +
             detail::label_num(t) + "</text>\n";
    }
    const auto yticks = chart.log_y ? [&] {
        std::vector<double> t;
        const double step = std::max(1.0, std::ceil((yr.hi - yr.lo) / 8));
        for (double e = yr.lo; e <= yr.hi + 1e-9; e += step) t.push_back(e);
        return t;
    }()
                                    : detail::nice_ticks(yr.lo, yr.hi);
    for (double t : yticks) {
        const double y = sy_raw(t);
        o += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left) + "\" y2=\"" + num(y) +
             "\" stroke=\"#444\"/>";
        const std::string text = chart.log_y ? "1e" + num(t) : detail::label_num(t);
        o += "<text x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + text + "</text>\n";
    }
    o += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(H - 16) + "\" text-anchor=\"middle\">" +
         detail::escape(chart.x_label) + "</text>\n";
    o += "<text transform=\"translate(18 " + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         detail::escape(chart.y_label) + "</text>\n";
    o += "</g>\n";

    for (double r : chart.rules) {
        if (!std::isfinite(ty(r))) continue;
        o += "<line x1=\"" + num(left) + "\" y1=\"" + num(sy(r)) + "\" x2=\"" + num(left + pw) + "\" y2=\"" +
             num(sy(r)) + "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    }

    const double base = chart.log_y ? sy_raw(yr.lo) : sy(std::clamp(0.0, yr.lo, yr.hi));
    for (const auto& s : chart.series) {
        o += "<g class=\"series\" data-label=\"" + detail::escape(s.label) + "\">\n";
        if (s.mark == Mark::line) {
            std::string pts;
            for (const auto& p : s.points) {
                if (!std::isfinite(ty(p.y))) continue;
                if (!pts.empty()) pts += ' ';
                pts += num(sx(p.x)) + "," + num(sy(p.y));
            }
            o += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        } else if (s.mark == Mark::bars) {
            double width = pw / std::max<std::size_t>(1, s.points.size()) * 0.35;
            width = std::min(width, 24.0);
            for (const auto& p : s.points) {
                if (!std::isfinite(ty(p.y))) continue;
                const double y = sy(p.y);
                o += "<rect x=\"" + num(sx(p.x) - width / 2) + "\" y=\"" + num(std::min(y, base)) + "\" width=\"" +
                     num(width) + "\" height=\"" + num(std::abs(base - y)) + "\" fill=\"" + s.color + "\"/>\n";
            }
        } else if (s.mark == Mark::stems) {
            for (const auto& p : s.points) {
                if (!std::isfinite(ty(p.y))) continue;
                o += "<line x1=\"" + num(sx(p.x)) + "\" y1=\"" + num(base) + "\" x2=\"" + num(sx(p.x)) + "\" y2=\"" +
                     num(sy(p.y)) + "\" stroke=\"" + s.color + "\"/>\n";
            }
        } else {
            for (const auto& p : s.points) {
                if (!std::isfinite(ty(p.y))) continue;
                o += "<circle cx=\"" + num(sx(p.x)) + "\" cy=\"" + num(sy(p.y)) + "\" r=\"2\" fill=\"" + s.color + "\"/>\n";
            }
        }
        o += "</g>\n";
    }

    // legend
    double ly = top + 14;
    for (const auto& s : chart.series) {
        if (s.label.empty()) continue;
        o += "<rect x=\"" + num(left + pw - 170) + "\" y=\"" + num(ly - 9) + "\" width=\"10\" height=\"10\" fill=\"" +
             s.color + "\"/><text x=\"" + num(left + pw - 154) + "\" y=\"" + num(ly) + "\">" +
             detail::escape(s.label) + "</text>\n";
        ly += 16;
    }
    o += "</svg>\n";
    return o;
}

/// Rank plot: for each sign, the fraction of values at least as extreme,
/// against the analytic 2 P(X >= s) for a zero-mean Gaussian of `variance`.
inline Chart rank_chart(std::span<const double> values, double variance, std::string title, std::string x_label) {
    if (values.empty()) throw Error(ErrorKind::missing_series, "no values for '" + title + "'");
    lineometer::detail::require(variance > 0.0, ErrorKind::missing_series, "rank plot needs a positive reference variance");
    const auto ranked = rank_distribution(values);
    Chart c;
    c.title = std::move(title);
    c.x_label = std::move(x_label);
    c.y_label = "fraction at least this extreme";
    c.log_y = true;
    Series pos{"positive", {}, Mark::dots, "#1f77b4"};
    Series neg{"negative", {}, Mark::dots, "#d62728"};
    for (const auto& p : ranked.positive) pos.points.push_back({p.value, p.fraction});
    for (const auto& p : ranked.negative) neg.points.push_back({p.value, p.fraction});
    double top = 0.0;
    for (double v : values) top = std::max(top, std::abs(v));
    Series curve{"Gaussian 2P(X>=s)", {}, Mark::line, "#222222"};
    const int steps = 200;
    const double floor_p = 0.5 / double(values.size());
    for (int i = 0; i <= steps; ++i) {
        const double s = top * i / steps;
        const double p = std::min(1.0, 2.0 * gaussian_tail(s, 0.0, variance));
        if (p < floor_p) break;
        curve.points.push_back({s, p});
    }
    c.series = {pos, neg, curve};
    return c;
}

namespace detail {

inline const nlohmann::ordered_json& need(const nlohmann::ordered_json& j, const char* key, const std::string& kind) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
        throw Error(ErrorKind::missing_series, std::string("report has no ") + key + " series for plot '" + kind + "'");
    }
    return j.at(key);
}

inline std::vector<double> numbers(const nlohmann::ordered_json& a) {
    std::vector<double> out;
    for (const auto& v : a) out.push_back(v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN());
    return out;
}

inline void need_nonempty(bool ok, const std::string& kind) {
    if (!ok) throw Error(ErrorKind::missing_series, "report series for plot '" + kind + "' is empty");
}

} // namespace detail

inline const std::vector<std::string>& plot_kinds() {
    static const std::vector<std::string> kinds{"spectrum", "spectrum-rank", "correlation", "qn", "qn-rank", "histogram"};
    return kinds;
}

/// Builds one chart kind from a report produced by to_json.
inline Chart chart_from_report(const nlohmann::ordered_json& report, const std::string& kind) {
    if (report.contains("error")) throw Error(ErrorKind::missing_series, "report records an analysis error");
    const auto& source = detail::need(report, "source", kind);
    const std::string file = source.value("file", std::string("input"));
    Chart c;

    if (kind == "spectrum") {
        const auto& s = detail::need(report, "spectrum", kind);
        const auto re = detail::numbers(s.at("re")), im = detail::numbers(s.at("im"));
        detail::need_nonempty(re.size() > 1, kind);
        c.title = "Fourier coefficients: " + file;
        c.x_label = "Re S~_m";
        c.y_label = "Im S~_m";
        c.equal_aspect = true;
        Series pts{"m = 1..K/2", {}, Mark::dots};
        for (std::size_t m = 1; m < re.size(); ++m) pts.points.push_back({re[m], im[m]});
        c.series = {pts};
        return c;
    }
    if (kind == "spectrum-rank") {
        const auto& s = detail::need(report, "spectrum", kind);
        auto re = detail::numbers(s.at("re"));
        detail::need_nonempty(re.size() > 1, kind);
        re.erase(re.begin());
        const double K = s.at("K").get<double>();
        if (std::fmod(K, 2.0) == 0.0) re.pop_back();  // the real S~_{K/2} has twice the variance
        detail::need_nonempty(!re.empty(), kind);
        const double delta = source.at("delta").get<double>();
        return rank_chart(re, delta / 2, "Rank plot of Re S~_m: " + file, "|Re S~_m|");
    }
    if (kind == "correlation") {
        const auto& g = detail::need(report, "correlation", kind);
        const auto values = detail::numbers(g.at("G"));
        detail::need_nonempty(values.size() > 1, kind);
        const double K = source.at("K").get<double>();
        c.title = "Word-length correlation: " + file;
        c.x_label = "lag l (words)";
        c.y_label = "G_l";
        Series s{"G_l", {}, Mark::stems};
        for (std::size_t l = 1; l < values.size(); ++l) s.points.push_back({double(l), values[l]});
        c.series = {s};
        c.rules = {2.0 / std::sqrt(K), 0.0, -2.0 / std::sqrt(K)};
        return c;
    }
    if (kind == "qn" || kind == "qn-rank") {
        const auto& q = detail::need(report, "qn", kind);
        const auto values = detail::numbers(q.at("values"));
        detail::need_nonempty(!values.empty(), kind);
        if (kind == "qn") {
            c.title = "Q_n: " + file;
            c.x_label = "n (syllables)";
            c.y_label = "Q_n";
            Series s{"Q_n", {}, Mark::line};
            Series d{"", {}, Mark::dots};
            for (std::size_t n = 0; n < values.size(); ++n) {
                s.points.push_back({double(n + 1), values[n]});
                d.points.push_back({double(n + 1), values[n]});
            }
            c.series = {s, d};
            if (q.contains("mean")) c.rules = {q.at("mean").get<double>()};
            return c;
        }
        if (!q.contains("mean") || !q.contains("window")) {
            throw Error(ErrorKind::missing_series, "report has no Q_n significance for plot 'qn-rank'");
        }
        const double mean = q.at("mean").get<double>();
        const double sigma = q.at("sigma").get<double>();
        if (!(sigma > 0.0)) throw Error(ErrorKind::missing_series, "Q_n spread is zero; nothing to rank");
        const auto first = q.at("window").at(0).get<std::size_t>();
        const auto last = std::min(q.at("window").at(1).get<std::size_t>(), values.size());
        std::vector<double> dev;
        for (std::size_t n = first; n <= last; ++n) dev.push_back(values[n - 1] - mean);
        return rank_chart(dev, sigma * sigma, "Rank plot of Q_n - mean: " + file, "|Q_n - mean|");
    }
    if (kind == "histogram") {
        const auto& h = detail::need(report, "histogram", kind);
        detail::need_nonempty(!h.empty(), kind);
        const auto model = SegmentationModel::from_q(source.at("q").get<double>());
        c.title = "Word-length distribution: " + file;
        c.x_label = "S (syllables)";
        c.y_label = "P{S}";
        Series bars{"empirical", {}, Mark::bars};
        std::uint32_t top = 1;
        for (const auto& row : h) {
            const auto S = row.at("S").get<std::uint32_t>();
            top = std::max(top, S);
            bars.points.push_back({double(S), row.at("p").get<double>()});
        }
        Series curve{"geometric fit", {}, Mark::line, "#222222"};
        for (std::uint32_t S = 1; S <= top + 1; ++S) curve.points.push_back({double(S), geometric_pmf(model, S)});
        c.series = {bars, curve};
        return c;
    }
    throw Error(ErrorKind::invalid_argument, "unknown plot kind '" + kind + "'");
}

inline std::string plot(const nlohmann::ordered_json& report, const std::string& kind) {
    return render(chart_from_report(report, kind));
}

} // namespace lineometer::svg
