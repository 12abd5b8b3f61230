#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "lineometer/error.hpp"

namespace lineometer {

/// Upper tail P(X >= x) for X ~ N(mean, variance).
inline double gaussian_tail(double x, double mean, double variance) {
    detail::require(variance > 0.0 && std::isfinite(variance), ErrorKind::invalid_argument,
                    "gaussian_tail: variance must be positive");
    const double z = (x - mean) / std::sqrt(variance);
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

/// Standard-normal upper tail at z.
inline double normal_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

struct RankPoint {
    double value;     // absolute value for the negative branch
    double fraction;  // rank / number of values on that branch
};

// Positive and negative values ranked separately, largest magnitude first.
// Zeros belong to neither branch.
struct RankedValues {
    std::vector<RankPoint> positive;
    std::vector<RankPoint> negative;
};

inline RankedValues rank_distribution(std::span<const double> values) {
    detail::require(!values.empty(), ErrorKind::empty_input, "rank_distribution: no values");
    std::vector<double> pos, neg;
    for (double v : values) {
        if (v > 0.0) pos.push_back(v);
        else if (v < 0.0) neg.push_back(-v);
    }
    auto rank = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end(), std::greater<>());
        std::vector<RankPoint> out;
        out.reserve(v.size());
        const double total = static_cast<double>(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back({v[i], static_cast<double>(i + 1) / total});
        }
        return out;
    };
    return {rank(pos), rank(neg)};
}

} // namespace lineometer
