#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lineometer/error.hpp"

namespace lineometer {

/// Ordered syllable counts S_1..S_K, one per word. Every entry is >= 1.
class LengthSequence {
public:
    using value_type = std::uint32_t;

    LengthSequence() = default;

    explicit LengthSequence(std::vector<value_type> lengths) : lengths_(std::move(lengths)) {
        for (std::size_t i = 0; i < lengths_.size(); ++i) {
            if (lengths_[i] == 0) {
                throw Error(ErrorKind::invalid_argument,
                            "word " + std::to_string(i + 1) + " has zero syllables");
            }
        }
    }

    std::size_t size() const noexcept { return lengths_.size(); }
    bool empty() const noexcept { return lengths_.empty(); }
    value_type operator[](std::size_t i) const { return lengths_[i]; }
    std::span<const value_type> values() const noexcept { return lengths_; }
    auto begin() const noexcept { return lengths_.begin(); }
    auto end() const noexcept { return lengths_.end(); }

    std::uint64_t total_syllables() const {
        return std::accumulate(lengths_.begin(), lengths_.end(), std::uint64_t{0});
    }

    friend bool operator==(const LengthSequence&, const LengthSequence&) = default;

private:
    std::vector<value_type> lengths_;
};

/// Random-segmentation model: a word boundary follows each syllable with
/// constant probability q, so word lengths are geometric with mean 1/q and
/// variance (1-q)/q^2.
struct SegmentationModel {
    double q = 1.0;
    double s = 1.0;
    double delta = 0.0;

    static SegmentationModel from_q(double q) {
        detail::require(q > 0.0 && q <= 1.0, ErrorKind::invalid_argument,
                        "boundary probability q must lie in (0, 1]");
        return {q, 1.0 / q, (1.0 - q) / (q * q)};
    }

    static SegmentationModel from_mean(double s) {
        detail::require(s >= 1.0 && std::isfinite(s), ErrorKind::invalid_argument,
                        "mean syllable length must be >= 1");
        const double q = 1.0 / s;
        return {q, s, (1.0 - q) / (q * q)};
    }
};

inline void require_nonempty(const LengthSequence& seq, const char* what) {
    detail::require(!seq.empty(), ErrorKind::empty_input,
                    std::string(what) + ": length sequence is empty");
}

/// Fits by matching the mean: s = sum(S_k)/K, q = 1/s.
inline SegmentationModel fit_model(const LengthSequence& seq) {
    require_nonempty(seq, "fit_model");
    const double s = static_cast<double>(seq.total_syllables()) / static_cast<double>(seq.size());
    return SegmentationModel::from_mean(s);
}

// Population variance of the observed lengths; diagnostic only.
inline double empirical_variance(const LengthSequence& seq) {
    require_nonempty(seq, "empirical_variance");
    const double k = static_cast<double>(seq.size());
    const double mean = static_cast<double>(seq.total_syllables()) / k;
    double acc = 0.0;
    for (auto v : seq) {
        const double d = static_cast<double>(v) - mean;
        acc += d * d;
    }
    return acc / k;
}

struct LengthHistogram {
    std::map<std::uint32_t, double> probabilities;
    std::size_t K = 0;

    double at(std::uint32_t syllables) const {
        auto it = probabilities.find(syllables);
        return it == probabilities.end() ? 0.0 : it->second;
    }
};

inline LengthHistogram histogram(const LengthSequence& seq) {
    require_nonempty(seq, "histogram");
    std::map<std::uint32_t, std::size_t> counts;
    for (auto v : seq) ++counts[v];
    LengthHistogram h;
    h.K = seq.size();
    const double k = static_cast<double>(seq.size());
    for (auto [s, c] : counts) h.probabilities[s] = static_cast<double>(c) / k;
    return h;
}

/// P{S_k = S} = q (1-q)^(S-1).
inline double geometric_pmf(const SegmentationModel& model, std::int64_t syllables) {
    detail::require(syllables >= 1, ErrorKind::invalid_argument,
                    "geometric_pmf: syllable count must be >= 1");
    return model.q * std::pow(1.0 - model.q, static_cast<double>(syllables - 1));
}

struct ExcessRow {
    std::uint32_t syllables;
    double p_empirical;
    double p_geometric;
    double excess; // p_empirical - p_geometric
};

inline std::vector<ExcessRow> excess_table(const LengthHistogram& hist,
                                           const SegmentationModel& model,
                                           std::uint32_t max_syllables) {
    detail::require(max_syllables >= 1, ErrorKind::invalid_argument,
                    "excess_table: S_max must be >= 1");
    std::vector<ExcessRow> rows;
    rows.reserve(max_syllables);
    for (std::uint32_t s = 1; s <= max_syllables; ++s) {
        const double emp = hist.at(s);
        const double geo = geometric_pmf(model, s);
        rows.push_back({s, emp, geo, emp - geo});
    }
    return rows;
}

inline void write_excess_csv(std::ostream& os, std::span<const ExcessRow> rows) {
    os << "S,p_empirical,p_geometric,excess\n";
    const auto old = os.precision(17);
    for (const auto& r : rows) {
        os << r.syllables << ',' << r.p_empirical << ',' << r.p_geometric << ',' << r.excess << '\n';
    }
    os.precision(old);
}

} // namespace lineometer
