#pragma once

#include "aftershock/error.hpp"
#include "aftershock/events.hpp"
#include "aftershock/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aftershock {

/// |p - 1| below this uses the logarithmic branch of the cumulative law.
inline constexpr double kLogBranchTolerance = 1e-6;

struct OmoriFit {
    double p = 0.0;
    double A = 0.0;
    double c = 0.0;  // minutes
    double rss = 0.0;
    double grid_step = 1.0;
    double horizon = 0.0;
    std::size_t grid_points = 0;
    std::size_t events = 0;
};

/// Maximum-likelihood counterpart of OmoriFit for the rate A (t + c)^-p.
struct OmoriMle {
    double p = 0.0;
    double A = 0.0;
    double c = 0.0;
    double log_likelihood = 0.0;
    double horizon = 0.0;
    std::size_t events = 0;
};

struct CountPoint {
    double t = 0.0;
    std::size_t n = 0;

    bool operator==(const CountPoint&) const = default;
};

/// Cumulative-count samples used as the least-squares target.
struct CountCurve {
    std::vector<double> t;
    std::vector<double> y;
};

/// Throws std::invalid_argument unless (p, A, c) is a valid parameter set.
inline void check_omori_params(double p, double A, double c) {
    if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("Omori p must be >= 0");
    if (!std::isfinite(A) || !(A > 0.0)) throw std::invalid_argument("Omori A must be > 0");
    if (!std::isfinite(c) || c < 0.0) throw std::invalid_argument("Omori c must be >= 0");
    if (c == 0.0 && p > 1.0 - kLogBranchTolerance) {
        throw std::invalid_argument("Omori c = 0 requires p < 1");
    }
}

namespace detail {

// Unit-amplitude cumulative law without domain checks. With q = 1 - p,
// [(t+c)^q - c^q] / q = c^q expm1(q log1p(t/c)) / q, which stays accurate
// as q -> 0.
inline double omori_unit(double t, double p, double c) noexcept {
    const double q = 1.0 - p;
    if (std::abs(q) < kLogBranchTolerance) return std::log1p(t / c);
    if (c == 0.0) return std::pow(t, q) / q;
    return std::pow(c, q) * std::expm1(q * std::log1p(t / c)) / q;
}

}  // namespace detail

/// Expected number of events in [0, t] for the rate A (t + c)^-p.
inline double omori_model(double t, double p, double A, double c) {
    check_omori_params(p, A, c);
    if (!(t >= 0.0)) throw std::invalid_argument("Omori model needs t >= 0");
    return A * detail::omori_unit(t, p, c);
}

/// Inverse of omori_model in t. Returns +inf when s is at or beyond the
/// total expected count (finite only for p > 1).
inline double omori_inverse(double s, double p, double A, double c) {
    check_omori_params(p, A, c);
    if (!(s >= 0.0)) throw std::invalid_argument("Omori inverse needs s >= 0");
    const double u = s / A;
    const double q = 1.0 - p;
    if (std::abs(q) < kLogBranchTolerance) return c * std::expm1(u);
    if (c == 0.0) return std::pow(q * u, 1.0 / q);
    // (t + c)^q = c^q + q u  =>  t = c [(1 + q u c^-q)^(1/q) - 1]
    const double z = q * u * std::pow(c, -q);
    if (z <= -1.0) return std::numeric_limits<double>::infinity();
    return c * std::expm1(std::log1p(z) / q);
}

/// N(t) = number of events with time <= t, for each grid point.
inline std::vector<CountPoint> cumulative_count(std::span<const double> sorted_times,
                                                std::span<const double> grid) {
    std::vector<CountPoint> out;
    out.reserve(grid.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0 && grid[i] < grid[i - 1]) throw std::invalid_argument("count grid is not sorted");
        if (grid[i] < 0.0) throw std::invalid_argument("count grid has negative times");
        while (k < sorted_times.size() && sorted_times[k] <= grid[i]) ++k;
        out.push_back({grid[i], k});
    }
    return out;
}

inline std::vector<CountPoint> cumulative_count(const EventSequence& events,
                                                std::span<const double> grid) {
    return cumulative_count(std::span<const double>(events.times), grid);
}

/// Points 0, step, 2 step, ... up to horizon.
inline std::vector<double> uniform_grid(double step, double horizon) {
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    const auto last = static_cast<std::size_t>(std::floor(horizon / step + 1e-9));
    std::vector<double> g(last + 1);
    for (std::size_t j = 0; j <= last; ++j) g[j] = static_cast<double>(j) * step;
    return g;
}

/// Residual sum of squares of A * unit model against the curve.
inline double omori_rss(const CountCurve& curve, double p, double A, double c) {
    double rss = 0.0;
    for (std::size_t j = 0; j < curve.t.size(); ++j) {
        const double e = curve.y[j] - A * detail::omori_unit(curve.t[j], p, c);
        rss += e * e;
    }
    return rss;
}

/// Least-squares amplitude for fixed (p, c): A = sum(y g) / sum(g^2).
inline double best_amplitude(const CountCurve& curve, double p, double c) {
    double yg = 0.0, gg = 0.0;
    for (std::size_t j = 0; j < curve.t.size(); ++j) {
        const double g = detail::omori_unit(curve.t[j], p, c);
        yg += curve.y[j] * g;
        gg += g * g;
    }
    return gg > 0.0 ? yg / gg : 0.0;
}

namespace detail {

// log1p(t/c) per sample (log t when c = 0), shared by every p at this c.
struct UnitBasis {
    double c = 0.0;
    std::vector<double> logs;
};

inline UnitBasis make_basis(std::span<const double> t, double c) {
    UnitBasis b;
    b.c = c;
    b.logs.reserve(t.size());
    for (double v : t) b.logs.push_back(c > 0.0 ? std::log1p(v / c) : std::log(v));
    return b;
}

struct ProfilePoint {
    double rss = std::numeric_limits<double>::infinity();
    double A = 0.0;
};

inline bool valid_cell(double p, double c) noexcept {
    return p > 0.0 && c >= 0.0 && !(c == 0.0 && p > 1.0 - kLogBranchTolerance);
}

// rss minimised over A for fixed (p, c); +inf outside the valid domain.
inline ProfilePoint profile_rss(const CountCurve& curve, const UnitBasis& basis, double p) {
    const double c = basis.c;
    if (!valid_cell(p, c)) return {};
    const double q = 1.0 - p;
    const bool log_branch = std::abs(q) < kLogBranchTolerance;
    const double scale = c > 0.0 ? std::pow(c, q) / q : 1.0 / q;
    double yy = 0.0, yg = 0.0, gg = 0.0;
    for (std::size_t j = 0; j < curve.t.size(); ++j) {
        const double L = basis.logs[j];
        const double g =
            log_branch ? L : (c > 0.0 ? scale * std::expm1(q * L) : scale * std::exp(q * L));
        yy += curve.y[j] * curve.y[j];
        yg += curve.y[j] * g;
        gg += g * g;
    }
    if (!(gg > 0.0) || !(yg > 0.0)) return {};
    return {std::max(0.0, yy - yg * yg / gg), yg / gg};
}

inline ProfilePoint profile_rss(const CountCurve& curve, double p, double c) {
    if (!valid_cell(p, c)) return {};
    return profile_rss(curve, make_basis(curve.t, c), p);
}

inline constexpr double kPMin = 0.05;
inline constexpr double kPMax = 2.5;
inline constexpr double kPStep = 0.01;
inline constexpr std::size_t kCoarsePoints = 4096;

inline std::vector<double> p_grid() {
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::lround((kPMax - kPMin) / kPStep));
    for (std::size_t i = 0; i <= n; ++i) g.push_back(kPMin + kPStep * static_cast<double>(i));
    return g;
}

// {0} followed by 10 points per decade over [0.1, 1e4] minutes.
inline std::vector<double> c_grid(bool search) {
    std::vector<double> g{0.0};
    if (!search) return g;
    for (int i = 0; i <= 50; ++i) g.push_back(std::pow(10.0, -1.0 + 0.1 * i));
    return g;
}

// Every stride-th sample plus the last, so the coarse pass stays cheap on
// long horizons.
inline CountCurve decimate(const CountCurve& curve, std::size_t max_points) {
    const std::size_t n = curve.t.size();
    if (n <= max_points) return curve;
    const std::size_t stride = (n + max_points - 1) / max_points;
    CountCurve out;
    for (std::size_t j = 0; j < n; j += stride) {
        out.t.push_back(curve.t[j]);
        out.y.push_back(curve.y[j]);
    }
    if (out.t.back() != curve.t.back()) {
        out.t.push_back(curve.t.back());
        out.y.push_back(curve.y.back());
    }
    return out;
}

// Coarse (p, c) grid with ties broken by smallest p then smallest c,
// followed by alternating golden-section refinement on the full curve.
inline OmoriFit search_omori(const CountCurve& curve, const CountCurve& coarse, bool c_search) {
    const auto ps = p_grid();
    const auto cs = c_grid(c_search);

    std::size_t best_i = 0, best_k = 0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<UnitBasis> bases;
    for (double c : cs) bases.push_back(make_basis(coarse.t, c));
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t k = 0; k < cs.size(); ++k) {
            const double v = profile_rss(coarse, bases[k], ps[i]).rss;
            if (v < best) {
                best = v;
                best_i = i;
                best_k = k;
            }
        }
    }
    if (!std::isfinite(best)) throw DataError("Omori fit: no valid parameter cell");

    double p = ps[best_i];
    double c = cs[best_k];
    const double p_lo = ps[best_i >= 2 ? best_i - 2 : 0];
    const double p_hi = ps[std::min(best_i + 2, ps.size() - 1)];
    double c_lo = 0.0, c_hi = 0.0;
    if (c_search) {
        c_lo = best_k >= 1 ? cs[best_k - 1] : 0.0;
        c_hi = cs[std::min(best_k + 1, cs.size() - 1)];
    }

    double current = profile_rss(curve, p, c).rss;
    for (int round = 0; round < 6; ++round) {
        const double before = current;
        const auto basis = make_basis(curve.t, c);
        auto in_p = numeric::golden_section(
            [&](double pp) { return profile_rss(curve, basis, pp).rss; }, p_lo, p_hi, 1e-9);
        if (in_p.value < current) {
            p = in_p.x;
            current = in_p.value;
        }
        if (!c_search) break;
        const bool log_scale = c_lo > 0.0;
        auto in_c = numeric::golden_section(
            [&](double u) { return profile_rss(curve, p, log_scale ? std::exp(u) : u).rss; },
            log_scale ? std::log(c_lo) : c_lo, log_scale ? std::log(c_hi) : c_hi, 1e-9);
        if (in_c.value < current) {
            c = log_scale ? std::exp(in_c.x) : in_c.x;
            current = in_c.value;
        }
        if (!(current < before * (1.0 - 1e-12))) break;
    }

    const auto fin = profile_rss(curve, p, c);
    OmoriFit fit;
    fit.p = p;
    fit.c = c;
    fit.A = fin.A;
    fit.rss = fin.rss;
    fit.grid_points = curve.t.size();
    return fit;
}

}  // namespace detail

/// Least-squares fit of the cumulative law to arbitrary (t, N) samples.
/// `coarse`, when given, is used for the grid pass in place of `curve`.
inline OmoriFit fit_count_curve(const CountCurve& curve, bool c_search,
                                const CountCurve* coarse = nullptr) {
    if (curve.t.size() != curve.y.size() || curve.t.size() < 3) {
        throw DataError("Omori fit needs at least 3 curve samples");
    }
    return detail::search_omori(curve, coarse ? *coarse : curve, c_search);
}

/// Fits omori_model to the empirical N(t) on a uniform grid of `grid_step`
/// minutes up to `horizon`. With c_search false, c is held at 0.
/// `sorted_times` must be nondecreasing; ties are allowed (bootstrap input).
inline OmoriFit fit_omori(std::span<const double> sorted_times, double grid_step, double horizon,
                          bool c_search) {
    const auto grid = uniform_grid(grid_step, horizon);
    const auto in_horizon = static_cast<std::size_t>(
        std::upper_bound(sorted_times.begin(), sorted_times.end(), horizon) - sorted_times.begin());
    if (in_horizon < 10) {
        throw DataError("Omori fit needs at least 10 events within the horizon, got " +
                        std::to_string(in_horizon));
    }
    if (sorted_times.front() == sorted_times[in_horizon - 1]) {
        throw DataError("Omori fit: all events at one time");
    }
    CountCurve curve;
    curve.t = grid;
    curve.y.reserve(grid.size());
    for (const auto& pt : cumulative_count(sorted_times, grid)) {
        curve.y.push_back(static_cast<double>(pt.n));
    }
    const auto coarse = detail::decimate(curve, detail::kCoarsePoints);
    auto fit = detail::search_omori(curve, coarse, c_search);
    fit.grid_step = grid_step;
    fit.horizon = horizon;
    fit.events = in_horizon;
    return fit;
}

inline OmoriFit fit_omori(const EventSequence& events, double grid_step, double horizon,
                          bool c_search) {
    return fit_omori(std::span<const double>(events.times), grid_step, horizon, c_search);
}

/// Profile maximum likelihood for the inhomogeneous Poisson rate
/// A (t + c)^-p on [0, horizon]; A is profiled out as n / unit(horizon).
/// c is searched over (0.1, 1e4] minutes since c = 0 makes an event at
/// t = 0 infinitely likely.
inline OmoriMle fit_omori_mle(std::span<const double> sorted_times, double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    const auto end = std::upper_bound(sorted_times.begin(), sorted_times.end(), horizon);
    const std::span<const double> ts(sorted_times.begin(), end);
    if (ts.size() < 10) throw DataError("Omori MLE needs at least 10 events");
    const double n = static_cast<double>(ts.size());

    auto sum_log = [&](double c) {
        double s = 0.0;
        for (double t : ts) s += std::log(t + c);
        return s;
    };
    auto loglik = [&](double p, double c, double slog) {
        const double g = detail::omori_unit(horizon, p, c);
        if (!(g > 0.0)) return -std::numeric_limits<double>::infinity();
        return n * std::log(n / g) - p * slog - n;
    };

    const auto ps = detail::p_grid();
    auto cs = detail::c_grid(true);
    cs.erase(cs.begin());
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bk = 0;
    for (std::size_t k = 0; k < cs.size(); ++k) {
        const double slog = sum_log(cs[k]);
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const double v = loglik(ps[i], cs[k], slog);
            if (v > best) {
                best = v;
                bi = i;
                bk = k;
            }
        }
    }
    double p = ps[bi], c = cs[bk];
    const double p_lo = ps[bi >= 2 ? bi - 2 : 0], p_hi = ps[std::min(bi + 2, ps.size() - 1)];
    const double u_lo = std::log(cs[bk >= 1 ? bk - 1 : 0]);
    const double u_hi = std::log(cs[std::min(bk + 1, cs.size() - 1)]);
    for (int round = 0; round < 6; ++round) {
        const double slog = sum_log(c);
        auto mp = numeric::golden_section([&](double pp) { return -loglik(pp, c, slog); }, p_lo,
                                          p_hi, 1e-9);
        if (-mp.value > best) {
            best = -mp.value;
            p = mp.x;
        }
        auto mc = numeric::golden_section(
            [&](double u) { return -loglik(p, std::exp(u), sum_log(std::exp(u))); }, u_lo, u_hi,
            1e-9);
        const double before = best;
        if (-mc.value > best) {
            best = -mc.value;
            c = std::exp(mc.x);
        }
        if (!(best > before + 1e-12 * std::abs(before))) break;
    }
    OmoriMle fit;
    fit.p = p;
    fit.c = c;
    fit.A = n / detail::omori_unit(horizon, p, c);
    fit.log_likelihood = best;
    fit.horizon = horizon;
    fit.events = ts.size();
    return fit;
}

}  // namespace aftershock
