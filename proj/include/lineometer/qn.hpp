#pragma once

// Word-boundary correlation Q_n: the probability that a word boundary falls
// exactly n syllables after a word boundary, i.e.
//   Q_n = (1/K) sum_{k=1..n} L_{n,k},
// where L_{n,k} counts runs of k consecutive words totalling n syllables.
// Runs wrap around the end of the text by default, so every k has exactly
// K runs and sum_n L_{n,k} = K.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "lineometer/error.hpp"
#include "lineometer/gaussian.hpp"
#include "lineometer/seqmodel.hpp"
#include "lineometer/synth.hpp"

namespace lineometer {

enum class Boundary { circular, truncated };

inline const char* to_string(Boundary b) { return b == Boundary::circular ? "circular" : "truncated"; }

/// L_{n,k} for one run length k, keyed by n.
inline std::map<std::uint64_t, std::uint64_t> run_sum_counts(const LengthSequence& seq, std::size_t k,
                                                            Boundary boundary = Boundary::circular) {
    detail::require(k >= 1, ErrorKind::invalid_argument, "run length must be >= 1");
    std::map<std::uint64_t, std::uint64_t> out;
    const std::size_t K = seq.size();
    if (K == 0) return out;
    const std::size_t starts = boundary == Boundary::circular ? K : (k <= K ? K - k + 1 : 0);
    for (std::size_t i = 0; i < starts; ++i) {
        std::uint64_t sum = 0;
        for (std::size_t j = 0; j < k; ++j) sum += seq[(i + j) % K];
        ++out[sum];
    }
    return out;
}

/// counts[n] = sum_k L_{n,k} for n = 1..max_n (counts[0] unused).
inline std::vector<std::uint64_t> boundary_counts(const LengthSequence& seq, std::size_t max_n,
                                                  Boundary boundary = Boundary::circular) {
    detail::require(max_n >= 1, ErrorKind::invalid_argument, "Q_n: N must be >= 1");
    std::vector<std::uint64_t> counts(max_n + 1, 0);
    const std::size_t K = seq.size();
    const auto values = seq.values();
    for (std::size_t start = 0; start < K; ++start) {
        std::uint64_t sum = 0;
        std::size_t j = start;
        for (;;) {
            if (j == K) {
                if (boundary == Boundary::truncated) break;
                j = 0;
            }
            sum += values[j++];
            if (sum > max_n) break;
            ++counts[sum];
        }
    }
    return counts;
}

struct QnProfile {
    std::vector<double> values; // values[n-1] = Q_n
    std::size_t N = 0;
    std::size_t K = 0;
    Boundary boundary = Boundary::circular;

    double operator()(std::size_t n) const { return values.at(n - 1); }
};

inline QnProfile qn_profile(const LengthSequence& seq, std::size_t max_n,
                            Boundary boundary = Boundary::circular) {
    require_nonempty(seq, "qn_profile");
    const auto counts = boundary_counts(seq, max_n, boundary);
    QnProfile p;
    p.N = max_n;
    p.K = seq.size();
    p.boundary = boundary;
    p.values.resize(max_n);
    const double k = static_cast<double>(seq.size());
    for (std::size_t n = 1; n <= max_n; ++n) p.values[n - 1] = static_cast<double>(counts[n]) / k;
    return p;
}

// `paper` divides the root of the summed squares by the window size;
// `conventional` is the ordinary population standard deviation.
enum class SigmaConvention { paper, conventional };

inline const char* to_string(SigmaConvention s) {
    return s == SigmaConvention::paper ? "paper" : "conventional";
}

struct QnWindow {
    std::size_t first = 1;
    std::size_t last = 200;

    std::size_t size() const noexcept { return last >= first ? last - first + 1 : 0; }
};

struct QnOptions {
    SigmaConvention sigma = SigmaConvention::conventional;
    double threshold = 0.01;
};

struct QnFlag {
    std::size_t n;
    double q;
    double z;
    double p;
};

struct QnSignificance {
    double mean = 0.0;
    double sigma = 0.0;              // the convention in force
    double sigma_paper = 0.0;
    double sigma_conventional = 0.0;
    SigmaConvention convention = SigmaConvention::conventional;
    QnWindow window;
    double threshold = 0.01;
    std::vector<double> z;           // per n = 1..N, against the window statistics
    std::vector<double> p;           // one-sided upper tail
    std::vector<QnFlag> flagged;     // window members with p * window size < threshold
    bool degenerate_flat = false;
    std::size_t N = 0;
    std::size_t K = 0;
};

/// z-score of a value against a window mean and spread.
inline double qn_zscore(double q, double mean, double sigma) { return (q - mean) / sigma; }

inline QnSignificance qn_significance(const QnProfile& profile, QnWindow window = {},
                                      const QnOptions& opts = {}) {
    if (window.first < 1 || window.last > profile.N || window.size() < 2) {
        throw Error(ErrorKind::degenerate_window,
                    "Q_n window " + std::to_string(window.first) + ".." + std::to_string(window.last) +
                        " must lie within 1.." + std::to_string(profile.N) + " and span >= 2 values");
    }
    QnSignificance sig;
    sig.window = window;
    sig.convention = opts.sigma;
    sig.threshold = opts.threshold;
    sig.N = profile.N;
    sig.K = profile.K;

    const double nw = static_cast<double>(window.size());
    double sum = 0.0;
    for (std::size_t n = window.first; n <= window.last; ++n) sum += profile(n);
    sig.mean = sum / nw;
    double ss = 0.0;
    for (std::size_t n = window.first; n <= window.last; ++n) {
        const double d = profile(n) - sig.mean;
        ss += d * d;
    }
    sig.sigma_paper = std::sqrt(ss) / nw;
    sig.sigma_conventional = std::sqrt(ss / nw);
    sig.sigma = opts.sigma == SigmaConvention::paper ? sig.sigma_paper : sig.sigma_conventional;

    sig.z.assign(profile.N, 0.0);
    sig.p.assign(profile.N, 0.5);
    // spread at rounding level of the values counts as flat
    if (!(sig.sigma > 1e-12 * std::max(1.0, std::abs(sig.mean)))) {
        sig.degenerate_flat = true;
        return sig;
    }
    for (std::size_t n = 1; n <= profile.N; ++n) {
        sig.z[n - 1] = qn_zscore(profile(n), sig.mean, sig.sigma);
        sig.p[n - 1] = normal_tail(sig.z[n - 1]);
    }
    for (std::size_t n = window.first; n <= window.last; ++n) {
        if (sig.p[n - 1] * nw < opts.threshold) {
            sig.flagged.push_back({n, profile(n), sig.z[n - 1], sig.p[n - 1]});
        }
    }
    return sig;
}

struct HarmonicFamily {
    std::size_t fundamental = 0;
    bool fundamental_flagged = false;
    std::vector<std::size_t> members;  // flagged multiples of the fundamental
    std::vector<std::size_t> missing;  // unflagged multiples up to the largest member
    bool isolated = false;             // a single flagged value, no harmonics
};

/// Groups flagged n into families of multiples. Each round picks the
/// fundamental covering the most unassigned values (larger fundamental on
/// ties); an unflagged fundamental needs at least two flagged multiples.
inline std::vector<HarmonicFamily> group_harmonics(std::vector<std::size_t> flagged) {
    std::sort(flagged.begin(), flagged.end());
    flagged.erase(std::unique(flagged.begin(), flagged.end()), flagged.end());
    std::erase(flagged, std::size_t{0});
    const std::set<std::size_t> all(flagged.begin(), flagged.end());
    std::set<std::size_t> open(all);
    std::vector<HarmonicFamily> out;

    while (!open.empty()) {
        std::size_t best_f = 0;
        std::size_t best_cover = 0;
        std::set<std::size_t> candidates;
        for (std::size_t v : open) {
            for (std::size_t d = 1; d * d <= v; ++d) {
                if (v % d == 0) {
                    candidates.insert(d);
                    candidates.insert(v / d);
                }
            }
        }
        for (std::size_t f : candidates) {
            const bool f_flagged = all.count(f) > 0;
            if (!f_flagged && f < 2) continue;
            std::size_t cover = 0;
            for (std::size_t v : open) cover += (v % f == 0);
            if (!f_flagged && cover < 2) continue;
            if (cover > best_cover || (cover == best_cover && f > best_f)) {
                best_cover = cover;
                best_f = f;
            }
        }
        HarmonicFamily fam;
        fam.fundamental = best_f;
        fam.fundamental_flagged = all.count(best_f) > 0;
        for (auto it = open.begin(); it != open.end();) {
            if (*it % best_f == 0) {
                fam.members.push_back(*it);
                it = open.erase(it);
            } else {
                ++it;
            }
        }
        const std::size_t top = fam.members.back();
        for (std::size_t m = best_f; m <= top; m += best_f) {
            if (!std::binary_search(fam.members.begin(), fam.members.end(), m)) fam.missing.push_back(m);
        }
        fam.isolated = fam.members.size() == 1;
        out.push_back(std::move(fam));
    }
    std::sort(out.begin(), out.end(),
              [](const HarmonicFamily& a, const HarmonicFamily& b) { return a.fundamental < b.fundamental; });
    return out;
}

inline std::vector<HarmonicFamily> peak_scan(const QnProfile& profile, const QnSignificance& sig) {
    detail::require(sig.N == profile.N && sig.K == profile.K, ErrorKind::invalid_argument,
                    "peak_scan: significance was computed on a different profile");
    std::vector<std::size_t> ns;
    for (const auto& f : sig.flagged) ns.push_back(f.n);
    return group_harmonics(std::move(ns));
}

// Q_2 of replicate geometric corpora with a fixed q.
struct QnBaseline {
    double q = 0.0;
    std::size_t K = 0;
    std::vector<double> q2;
};

/// Replicate r uses seed + r.
inline QnBaseline geometric_baseline(const SegmentationModel& model, std::size_t K, std::size_t replicas,
                                     std::uint64_t seed, Boundary boundary = Boundary::circular) {
    detail::require(replicas >= 1, ErrorKind::invalid_argument, "baseline needs at least one replica");
    QnBaseline b;
    b.q = model.q;
    b.K = K;
    for (std::size_t r = 0; r < replicas; ++r) {
        const auto seq = random_segmented(model.q, K, seed + r);
        b.q2.push_back(qn_profile(seq, 2, boundary)(2));
    }
    return b;
}

struct Q2Dip {
    double text_q2 = 0.0;
    double baseline_mean = 0.0;
    double baseline_sd = 0.0;
    double deviation = 0.0;       // text - baseline mean
    double standard_error = 0.0;  // of the deviation
    std::size_t replicas = 0;
};

/// Signed deviation of Q_2 from a geometric baseline fitted to the same q.
/// With a single replica the spread falls back to sqrt(q(1-q)/K).
inline Q2Dip q2_dip_report(const QnProfile& profile, const SegmentationModel& model, const QnBaseline& baseline) {
    detail::require(profile.N >= 2, ErrorKind::invalid_argument, "q2_dip_report: profile must include n = 2");
    detail::require(!baseline.q2.empty(), ErrorKind::invalid_argument, "q2_dip_report: empty baseline");
    if (std::abs(baseline.q - model.q) > 1e-12) {
        throw Error(ErrorKind::model_mismatch, "q2_dip_report: baseline q " + std::to_string(baseline.q) +
                                                   " differs from text q " + std::to_string(model.q));
    }
    Q2Dip d;
    d.text_q2 = profile(2);
    d.replicas = baseline.q2.size();
    const double b = static_cast<double>(d.replicas);
    d.baseline_mean = std::accumulate(baseline.q2.begin(), baseline.q2.end(), 0.0) / b;
    if (d.replicas >= 2) {
        double ss = 0.0;
        for (double v : baseline.q2) ss += (v - d.baseline_mean) * (v - d.baseline_mean);
        d.baseline_sd = std::sqrt(ss / (b - 1.0));
    } else {
        d.baseline_sd = std::sqrt(model.q * (1.0 - model.q) / static_cast<double>(baseline.K));
    }
    d.deviation = d.text_q2 - d.baseline_mean;
    d.standard_error = d.baseline_sd * std::sqrt(1.0 + 1.0 / b);
    return d;
}

inline void write_qn_csv(std::ostream& os, const QnProfile& profile, const QnSignificance* sig = nullptr) {
    os << "n,Q_n,z,p\n";
    const auto old = os.precision(17);
    for (std::size_t n = 1; n <= profile.N; ++n) {
        os << n << ',' << profile(n);
        if (sig) os << ',' << sig->z[n - 1] << ',' << sig->p[n - 1];
        else os << ",,";
        os << '\n';
    }
    os.precision(old);
}

} // namespace lineometer
