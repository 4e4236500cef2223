#pragma once

#include "aftershock/error.hpp"
#include "aftershock/events.hpp"
#include "aftershock/omori.hpp"
#include "aftershock/rng.hpp"
#include "aftershock/waiting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aftershock {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] bool contains(double v) const noexcept { return lo <= v && v <= hi; }
    bool operator==(const Interval&) const = default;
};

enum class Verdict { Satisfied, Violated, NotApplicable };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return "satisfied";
        case Verdict::Violated: return "violated";
        case Verdict::NotApplicable: return "not-applicable";
    }
    return "unknown";
}

/// Check of the relation p + mu = 1, meaningful only when both exponents
/// lie in (0, 1).
struct MarkovCheck {
    double p = 0.0;
    double mu = 0.0;
    double sum = 0.0;
    Interval ci;  // interval for the sum
    bool applicable = false;
    Verdict verdict = Verdict::NotApplicable;
};

inline MarkovCheck markov_relation(double p, double mu, Interval ci) {
    MarkovCheck m;
    m.p = p;
    m.mu = mu;
    m.sum = p + mu;
    m.ci = ci;
    m.applicable = p > 0.0 && p < 1.0 && mu > 0.0 && mu < 1.0;
    if (!m.applicable) {
        m.verdict = Verdict::NotApplicable;
    } else {
        m.verdict = ci.contains(1.0) ? Verdict::Satisfied : Verdict::Violated;
    }
    return m;
}

inline MarkovCheck markov_relation(const OmoriFit& omori, const WaitingFit& waiting, Interval ci) {
    return markov_relation(omori.p, waiting.mu, ci);
}

enum class Estimator { OmoriP, Mu };

struct BootstrapOptions {
    // Omori estimator
    double grid_step = 1.0;
    double horizon = 0.0;  // 0: last event time
    bool c_search = false;
    // waiting-time estimator
    double bin_size = 1.0;
    std::optional<FitRange> fit_range;  // default: default_fit_range per resample
    FitMethod method = FitMethod::LogLogLsq;
};

struct BootstrapResult {
    Interval interval;
    std::vector<std::optional<double>> replicates;  // indexed by resample
    std::size_t failures = 0;
};

/// Linear-interpolation quantile of sorted data, q in [0, 1].
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= sorted.size()) return sorted.back();
    const double w = pos - static_cast<double>(i);
    return sorted[i] * (1.0 - w) + sorted[i + 1] * w;
}

/// 2.5% / 97.5% percentile interval of the successful replicates.
inline Interval percentile_interval(const std::vector<std::optional<double>>& replicates) {
    std::vector<double> ok;
    for (const auto& r : replicates) {
        if (r) ok.push_back(*r);
    }
    std::sort(ok.begin(), ok.end());
    return {quantile_sorted(ok, 0.025), quantile_sorted(ok, 0.975)};
}

namespace detail {

inline double omori_estimate(std::vector<double> times, const BootstrapOptions& opt) {
    std::sort(times.begin(), times.end());
    const double horizon = opt.horizon > 0.0 ? opt.horizon : times.back();
    return fit_omori(std::span<const double>(times), opt.grid_step, horizon, opt.c_search).p;
}

inline double mu_estimate(const WaitingTimes& waits, const BootstrapOptions& opt) {
    const auto hist = build_histogram(waits, opt.bin_size);
    return fit_mu_raw(hist, opt.fit_range.value_or(default_fit_range(hist)), opt.method).mu;
}

}  // namespace detail

/// Point estimate with the same settings bootstrap_ci uses.
inline double point_estimate(const EventSequence& events, Estimator estimator,
                             const BootstrapOptions& opt = {}) {
    if (estimator == Estimator::OmoriP) return detail::omori_estimate(events.times, opt);
    return detail::mu_estimate(waiting_times(events), opt);
}

/// Percentile bootstrap. For mu, waiting times are resampled with
/// replacement and the sequence rebuilt from the first event. For the Omori
/// exponent, event times are resampled with replacement: given the count,
/// Poisson event times are i.i.d. with density proportional to the rate, so
/// this keeps the decay that a shuffled-waits resample would erase.
/// Resample b draws from derive_seed(seed, b).
inline BootstrapResult bootstrap_ci(const EventSequence& events, Estimator estimator,
                                    std::size_t resamples, std::uint64_t seed,
                                    const BootstrapOptions& opt = {}) {
    if (resamples < 100) throw std::invalid_argument("bootstrap needs at least 100 resamples");
    if (events.size() < 2) throw DataError("bootstrap needs at least 2 events");
    const auto waits = waiting_times(events);

    BootstrapResult out;
    out.replicates.resize(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        Rng rng(derive_seed(seed, b));
        try {
            if (estimator == Estimator::OmoriP) {
                std::vector<double> times(events.size());
                for (auto& t : times) t = events.times[rng.below(events.size())];
                out.replicates[b] = detail::omori_estimate(std::move(times), opt);
            } else {
                WaitingTimes drawn;
                drawn.taus.resize(waits.size());
                for (auto& tau : drawn.taus) tau = waits.taus[rng.below(waits.size())];
                const auto rebuilt = events_from_waits(drawn, events.times.front());
                out.replicates[b] = detail::mu_estimate(waiting_times(rebuilt), opt);
            }
        } catch (const DataError&) {
            ++out.failures;
        }
    }
    if (out.failures * 10 > resamples) {
        throw DataError("bootstrap: estimator failed on " + std::to_string(out.failures) + " of " +
                        std::to_string(resamples) + " resamples");
    }
    out.interval = percentile_interval(out.replicates);
    return out;
}

/// Interval for p + mu from replicate-wise sums of two bootstrap runs.
inline Interval sum_interval(const BootstrapResult& p, const BootstrapResult& mu) {
    std::vector<std::optional<double>> sums;
    const std::size_t n = std::min(p.replicates.size(), mu.replicates.size());
    for (std::size_t b = 0; b < n; ++b) {
        if (p.replicates[b] && mu.replicates[b]) sums.push_back(*p.replicates[b] + *mu.replicates[b]);
    }
    return percentile_interval(sums);
}

}  // namespace aftershock
