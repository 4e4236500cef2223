#pragma once

#include "aftershock/error.hpp"
#include "aftershock/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aftershock {

struct Threshold {
    double value = 0.0;                    // R_th, same units as r(t)
    std::optional<double> sigma_multiple;  // R_th / sigma when derived from a window

    bool operator==(const Threshold&) const = default;
};

/// Half-open range of exchange minutes [begin, end) an event scan covered.
struct MinuteRange {
    std::int64_t begin = 0;
    std::int64_t end = 0;

    bool operator==(const MinuteRange&) const = default;
};

/// Ordered occurrence times (minutes since the crash) of threshold
/// exceedances. Times are integral for detected events and continuous for
/// synthetic catalogs.
struct EventSequence {
    std::vector<double> times;
    Threshold threshold;
    std::optional<MinuteRange> source_window;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] bool empty() const noexcept { return times.empty(); }
};

struct WaitingTimes {
    std::vector<double> taus;

    [[nodiscard]] std::size_t size() const noexcept { return taus.size(); }
    [[nodiscard]] bool empty() const noexcept { return taus.empty(); }
};

/// Throws unless times are finite, nonnegative and strictly increasing.
inline void check_event_times(const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0.0) {
            throw DataError("event " + std::to_string(i) + " has invalid time");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw DataError("event times not strictly increasing at index " + std::to_string(i));
        }
    }
}

/// Every minute t in [0, end) with |r(t)| > r_th is one event. Consecutive
/// exceedances are kept as separate events.
inline EventSequence detect_events(const ReturnSeries& returns, double r_th,
                                   std::optional<std::int64_t> end = std::nullopt) {
    if (!(r_th > 0.0)) throw std::invalid_argument("threshold must be positive");
    const std::int64_t begin = std::max<std::int64_t>(0, returns.first);
    const std::int64_t stop = std::min(end.value_or(returns.end_index()), returns.end_index());

    EventSequence ev;
    ev.threshold.value = r_th;
    ev.source_window = MinuteRange{begin, std::max(begin, stop)};
    for (std::int64_t t = begin; t < stop; ++t) {
        if (std::abs(returns.at(t)) > r_th) ev.times.push_back(static_cast<double>(t));
    }
    return ev;
}

inline EventSequence detect_events(const ReturnSeries& returns, const Threshold& threshold,
                                   std::optional<std::int64_t> end = std::nullopt) {
    auto ev = detect_events(returns, threshold.value, end);
    ev.threshold = threshold;
    return ev;
}

/// tau_i = t_{i+1} - t_i. Fewer than two events gives an empty list.
inline WaitingTimes waiting_times(const EventSequence& events) {
    WaitingTimes w;
    const auto& t = events.times;
    if (t.size() < 2) return w;
    w.taus.reserve(t.size() - 1);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (!(t[i + 1] > t[i])) {
            throw DataError("event times not strictly increasing at index " + std::to_string(i + 1));
        }
        w.taus.push_back(t[i + 1] - t[i]);
    }
    return w;
}

/// Inverse of waiting_times: cumulative sums starting from `start`.
inline EventSequence events_from_waits(const WaitingTimes& waits, double start = 0.0) {
    EventSequence ev;
    ev.times.reserve(waits.size() + 1);
    ev.times.push_back(start);
    double t = start;
    for (double tau : waits.taus) {
        t += tau;
        ev.times.push_back(t);
    }
    return ev;
}

}  // namespace aftershock
