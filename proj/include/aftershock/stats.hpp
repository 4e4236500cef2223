#pragma once

#include "aftershock/error.hpp"
#include "aftershock/ingest.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace aftershock {

/// One-minute fractional returns; r[i] belongs to exchange minute first + i.
struct ReturnSeries {
    std::int64_t first = 0;
    std::vector<double> r;

    [[nodiscard]] std::size_t size() const noexcept { return r.size(); }
    [[nodiscard]] std::int64_t index_at(std::size_t i) const noexcept {
        return first + static_cast<std::int64_t>(i);
    }
    [[nodiscard]] std::int64_t end_index() const noexcept { return index_at(r.size()); }
    [[nodiscard]] double at(std::int64_t t) const { return r.at(static_cast<std::size_t>(t - first)); }
};

struct WindowStats {
    double mean = 0.0;
    double variance = 0.0;
    double sigma = 0.0;
    std::int64_t t0 = 0;
    std::int64_t length = 0;  // samples t0 .. t0 + length - 1
};

/// r(t) = (x(t+1) - x(t)) / x(t) on the compacted axis, gaps included.
inline ReturnSeries compute_returns(const PriceSeries& series) {
    if (series.size() < 2) throw DataError("need at least 2 prices to form a return");
    ReturnSeries out;
    out.first = series.first_index();
    out.r.reserve(series.size() - 1);
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        out.r.push_back((series.x[k + 1] - series.x[k]) / series.x[k]);
    }
    return out;
}

/// Population mean and variance (divisor = sample count) of the window
/// holding `length` returns starting at minute t0.
inline WindowStats window_stats(const ReturnSeries& returns, std::int64_t t0, std::int64_t length) {
    if (length <= 0) throw DataError("empty statistics window");
    if (t0 < returns.first || t0 + length > returns.end_index()) {
        throw DataError("window [" + std::to_string(t0) + ", " + std::to_string(t0 + length) +
                        ") outside return series [" + std::to_string(returns.first) + ", " +
                        std::to_string(returns.end_index()) + ")");
    }
    const auto begin = static_cast<std::size_t>(t0 - returns.first);
    const std::span<const double> w(returns.r.data() + begin, static_cast<std::size_t>(length));

    // Deviations from the first sample: exact for constant windows and
    // better conditioned than a raw sum.
    const double pivot = w.front();
    double sum = 0.0;
    for (double v : w) sum += v - pivot;
    const double n = static_cast<double>(w.size());
    const double mean = pivot + sum / n;
    double ss = 0.0;
    for (double v : w) ss += (v - mean) * (v - mean);

    WindowStats s;
    s.mean = mean;
    s.variance = ss / n;
    s.sigma = std::sqrt(s.variance);
    s.t0 = t0;
    s.length = length;
    return s;
}

}  // namespace aftershock
