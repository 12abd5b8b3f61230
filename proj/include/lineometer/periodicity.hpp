#pragma once

// Frequency- and lag-domain periodicity statistics of a length sequence.
//
// Coefficients use the unitary convention
//   S~_m = K^{-1/2} sum_{k=1..K} S_k exp(-2 pi i m k / K),
// so S~_0 = sqrt(K) s and sum |S~_m|^2 = sum S_k^2. Under random
// segmentation each S~_m (m != 0) has E|S~_m|^2 = delta; the real and
// imaginary parts each carry delta/2, except at m = K/2 where the
// coefficient is real and carries all of delta.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lineometer/error.hpp"
#include "lineometer/fft.hpp"
#include "lineometer/gaussian.hpp"
#include "lineometer/seqmodel.hpp"

namespace lineometer {

struct Spectrum {
    std::vector<std::complex<double>> coefficients;
    SegmentationModel model;

    std::size_t K() const noexcept { return coefficients.size(); }
};

inline Spectrum dft(const LengthSequence& seq) {
    detail::require(seq.size() >= 2, ErrorKind::invalid_argument, "dft: need at least two words");
    const std::size_t k = seq.size();
    // index k = K is congruent to 0, so S_K goes first
    std::vector<fft::cd> rotated(k);
    rotated[0] = static_cast<double>(seq[k - 1]);
    for (std::size_t j = 1; j < k; ++j) rotated[j] = static_cast<double>(seq[j - 1]);
    auto coeffs = fft::forward(rotated);
    const double norm = 1.0 / std::sqrt(static_cast<double>(k));
    for (auto& c : coeffs) c *= norm;
    return {std::move(coeffs), fit_model(seq)};
}

enum class Component { real, imaginary };
enum class Tail { one, two };

// Variance assigned to the real coefficient at m = K/2. `delta` is the
// white-noise value; `half_delta` reproduces the figure quoted for the
// period-2 peak in the published analysis.
enum class NyquistVariance { delta, half_delta };

inline const char* to_string(Component c) { return c == Component::real ? "real" : "imaginary"; }
inline const char* to_string(Tail t) { return t == Tail::one ? "one" : "two"; }

struct SpectralOptions {
    Tail tail = Tail::one;
    double threshold = 0.01;
    NyquistVariance nyquist = NyquistVariance::delta;
};

struct SpectralPeak {
    std::size_t m = 0;
    Component component = Component::real;
    double value = 0.0;
    double period = 0.0;      // K / m words
    double variance = 0.0;
    double z = 0.0;
    double one_sided_p = 0.0; // P(X >= |value|)
    double two_sided_p = 0.0; // P(|X| >= |value|)
    double tail_probability = 0.0;
    std::size_t comparisons = 0;
    double expected_count = 0.0;
    bool flagged = false;
};

inline double component_variance(std::size_t m, std::size_t K, double delta, NyquistVariance nyquist) {
    if (2 * m == K && nyquist == NyquistVariance::delta) return delta;
    return delta / 2.0;
}

// Real parts are tested at m = 1..floor(K/2); imaginary parts at m < K/2.
inline std::size_t comparable_points(std::size_t K, Component c) {
    return c == Component::real ? K / 2 : (K - 1) / 2;
}

/// Scores one coefficient component against a zero-mean Gaussian.
inline SpectralPeak assess_component(double value, double variance, std::size_t comparisons,
                                     const SpectralOptions& opts) {
    detail::require(variance > 0.0, ErrorKind::invalid_argument,
                    "assess_component: variance must be positive");
    SpectralPeak p;
    p.value = value;
    p.variance = variance;
    p.z = value / std::sqrt(variance);
    p.one_sided_p = gaussian_tail(std::abs(value), 0.0, variance);
    p.two_sided_p = std::min(1.0, 2.0 * p.one_sided_p);
    p.tail_probability = opts.tail == Tail::one ? p.one_sided_p : p.two_sided_p;
    p.comparisons = comparisons;
    p.expected_count = p.tail_probability * static_cast<double>(comparisons);
    p.flagged = p.expected_count < opts.threshold;
    return p;
}

/// Every tested component, in order of m (real before imaginary).
inline std::vector<SpectralPeak> score_components(const Spectrum& spec, const SpectralOptions& opts = {}) {
    std::vector<SpectralPeak> out;
    const std::size_t K = spec.K();
    const double delta = spec.model.delta;
    if (K < 2 || !(delta > 0.0)) return out;
    const std::size_t n_real = comparable_points(K, Component::real);
    const std::size_t n_imag = comparable_points(K, Component::imaginary);
    out.reserve(n_real + n_imag);
    for (std::size_t m = 1; 2 * m <= K; ++m) {
        const double var = component_variance(m, K, delta, opts.nyquist);
        auto add = [&](Component c, double value, std::size_t count) {
            auto p = assess_component(value, var, count, opts);
            p.m = m;
            p.component = c;
            p.period = static_cast<double>(K) / static_cast<double>(m);
            out.push_back(p);
        };
        add(Component::real, spec.coefficients[m].real(), n_real);
        if (2 * m < K) add(Component::imaginary, spec.coefficients[m].imag(), n_imag);
    }
    return out;
}

/// Components whose expected count under white noise falls below the
/// threshold. Empty when the model variance is zero.
inline std::vector<SpectralPeak> coefficient_significance(const Spectrum& spec,
                                                          const SpectralOptions& opts = {}) {
    auto all = score_components(spec, opts);
    std::erase_if(all, [](const SpectralPeak& p) { return !p.flagged; });
    return all;
}

/// Most extreme component of the given kind, flagged or not.
inline std::optional<SpectralPeak> strongest_component(const Spectrum& spec, Component c,
                                                       const SpectralOptions& opts = {}) {
    std::optional<SpectralPeak> best;
    for (const auto& p : score_components(spec, opts)) {
        if (p.component != c) continue;
        if (!best || std::abs(p.z) > std::abs(best->z)) best = p;
    }
    return best;
}

struct CorrelationProfile {
    std::vector<double> values; // G_0..G_Lmax
    std::size_t K = 0;
};

/// Circular autocorrelation of deviations from the mean, normalized so
/// G_0 = 1. Indices wrap modulo K.
inline CorrelationProfile correlation(const LengthSequence& seq, std::size_t max_lag) {
    const std::size_t K = seq.size();
    detail::require(K >= 2, ErrorKind::invalid_argument, "correlation: need at least two words");
    detail::require(max_lag < K, ErrorKind::invalid_argument, "correlation: max lag must be < K");
    const double mean = static_cast<double>(seq.total_syllables()) / static_cast<double>(K);
    std::vector<double> d(K);
    double denom = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        d[i] = static_cast<double>(seq[i]) - mean;
        denom += d[i] * d[i];
    }
    if (denom == 0.0) {
        throw Error(ErrorKind::degenerate_constant,
                    "correlation: all word lengths are equal, G is undefined");
    }
    CorrelationProfile out;
    out.K = K;
    out.values.resize(max_lag + 1);
    out.values[0] = 1.0;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i < K - lag; ++i) acc += d[i] * d[i + lag];
        for (std::size_t i = K - lag; i < K; ++i) acc += d[i] * d[i + lag - K];
        out.values[lag] = std::clamp(acc / denom, -1.0, 1.0);
    }
    return out;
}

inline void write_spectrum_csv(std::ostream& os, const Spectrum& spec) {
    os << "m,re,im\n";
    const auto old = os.precision(17);
    for (std::size_t m = 0; m < spec.K(); ++m) {
        os << m << ',' << spec.coefficients[m].real() << ',' << spec.coefficients[m].imag() << '\n';
    }
    os.precision(old);
}

inline void write_correlation_csv(std::ostream& os, const CorrelationProfile& g) {
    os << "lag,G\n";
    const auto old = os.precision(17);
    for (std::size_t l = 0; l < g.values.size(); ++l) os << l << ',' << g.values[l] << '\n';
    os.precision(old);
}

} // namespace lineometer
