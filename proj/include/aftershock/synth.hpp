#pragma once

#include "aftershock/events.hpp"
#include "aftershock/omori.hpp"
#include "aftershock/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace aftershock {

struct OmoriGenSpec {
    double p = 0.5;
    double A = 5.0;
    double c = 0.0;
    double horizon = 1e4;  // minutes
    std::uint64_t seed = 1;
    bool round_to_minute = false;
};

struct ParetoGenSpec {
    double mu = 1.0;
    double tau_min = 1.0;
    std::size_t count = 1000;
    std::uint64_t seed = 1;
};

struct GeneratedEvents {
    EventSequence events;
    std::size_t collapsed_ties = 0;  // events merged by minute rounding
};

namespace detail {

inline void round_and_collapse(GeneratedEvents& g) {
    auto& t = g.events.times;
    std::vector<double> out;
    out.reserve(t.size());
    for (double v : t) {
        const double m = std::floor(v);
        if (!out.empty() && out.back() == m) {
            ++g.collapsed_ties;
            continue;
        }
        out.push_back(m);
    }
    t = std::move(out);
}

}  // namespace detail

/// Inhomogeneous Poisson catalog with rate A (t + c)^-p on [0, horizon],
/// by mapping unit-rate arrivals through the inverse cumulative law.
inline GeneratedEvents gen_omori(const OmoriGenSpec& spec) {
    check_omori_params(spec.p, spec.A, spec.c);
    if (!(spec.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    Rng rng(spec.seed);
    GeneratedEvents g;
    const double total = omori_model(spec.horizon, spec.p, spec.A, spec.c);
    double s = 0.0;
    while (true) {
        s += rng.exponential();
        if (s > total) break;
        const double t = omori_inverse(s, spec.p, spec.A, spec.c);
        if (!(t <= spec.horizon)) break;
        if (!g.events.times.empty() && !(t > g.events.times.back())) {
            ++g.collapsed_ties;
            continue;
        }
        g.events.times.push_back(t);
    }
    if (spec.round_to_minute) detail::round_and_collapse(g);
    return g;
}

/// Superposition of `copies` independent catalogs (seeds derived from
/// spec.seed); equivalent in law to one catalog with amplitude copies * A.
inline GeneratedEvents gen_omori_stacked(const OmoriGenSpec& spec, std::size_t copies) {
    if (copies == 0) throw std::invalid_argument("need at least one copy");
    std::vector<double> all;
    for (std::size_t i = 0; i < copies; ++i) {
        auto one = spec;
        one.seed = derive_seed(spec.seed, i);
        one.round_to_minute = false;
        auto g = gen_omori(one);
        all.insert(all.end(), g.events.times.begin(), g.events.times.end());
    }
    std::sort(all.begin(), all.end());
    GeneratedEvents g;
    for (double t : all) {
        if (!g.events.times.empty() && !(t > g.events.times.back())) {
            ++g.collapsed_ties;
            continue;
        }
        g.events.times.push_back(t);
    }
    if (spec.round_to_minute) detail::round_and_collapse(g);
    return g;
}

/// tau = tau_min (1 - U)^(-1/mu), U uniform on [0, 1).
inline WaitingTimes gen_pareto_waits(const ParetoGenSpec& spec) {
    if (!(spec.mu > 0.0) || !std::isfinite(spec.mu)) throw std::invalid_argument("mu must be > 0");
    if (!(spec.tau_min > 0.0)) throw std::invalid_argument("tau_min must be > 0");
    Rng rng(spec.seed);
    WaitingTimes w;
    w.taus.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        w.taus.push_back(spec.tau_min * std::pow(1.0 - rng.uniform(), -1.0 / spec.mu));
    }
    return w;
}

/// Homogeneous Poisson catalog: exponential gaps with mean 1 / rate.
inline EventSequence gen_stationary(double rate, double horizon, std::uint64_t seed) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("rate must be > 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    Rng rng(seed);
    EventSequence ev;
    double t = 0.0;
    while (true) {
        t += rng.exponential() / rate;
        if (t > horizon) break;
        if (!ev.times.empty() && !(t > ev.times.back())) continue;
        ev.times.push_back(t);
    }
    return ev;
}

}  // namespace aftershock
