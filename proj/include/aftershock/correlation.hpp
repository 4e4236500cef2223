#pragma once

#include "aftershock/error.hpp"
#include "aftershock/events.hpp"
#include "aftershock/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aftershock {

struct CorrelationPoint {
    std::size_t n = 0;
    double C = 0.0;
    std::size_t M = 0;  // shifted-window length used for this point
};

/// C(n + n_w, n_w) for n = 0..n_max.
struct CorrelationCurve {
    std::size_t n_w = 0;
    std::vector<CorrelationPoint> points;
};

struct ScalingLaw {
    double a = 0.0;
    double gamma = 0.0;
    std::size_t points = 0;
};

struct CollapseResult {
    std::size_t reference_n_w = 0;
    std::map<std::size_t, double> scale_factors;    // n_w -> f(n_w)
    std::map<std::size_t, double> residual_before;  // mean squared residual at f = 1
    std::map<std::size_t, double> residual_after;   // ... at the fitted f
    double collapse_residual = 0.0;                 // sum of residual_after
    std::optional<ScalingLaw> law;                  // set once fit_f has run
};

/// Event-event correlation of the shifted sequences {t_{m+k}} and
/// {t_{n+k}}, k = 0..M-1 with M = L - max(m, n).
inline double event_corr(std::span<const double> t, std::size_t m, std::size_t n) {
    const std::size_t shift = std::max(m, n);
    if (t.size() < shift + 2) {
        throw DataError("event_corr: need at least 2 overlapping events (L = " +
                        std::to_string(t.size()) + ", max(m, n) = " + std::to_string(shift) + ")");
    }
    const std::size_t M = t.size() - shift;
    const double inv = 1.0 / static_cast<double>(M);
    double mean_m = 0.0, mean_n = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
        mean_m += t[m + k];
        mean_n += t[n + k];
    }
    mean_m *= inv;
    mean_n *= inv;
    double var_m = 0.0, var_n = 0.0, cov = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
        const double dm = t[m + k] - mean_m;
        const double dn = t[n + k] - mean_n;
        var_m += dm * dm;
        var_n += dn * dn;
        cov += dm * dn;
    }
    if (!(var_m > 0.0) || !(var_n > 0.0)) throw DataError("event_corr: zero variance window");
    if (m == n) return 1.0;
    return std::clamp(cov / std::sqrt(var_m * var_n), -1.0, 1.0);
}

inline double event_corr(const EventSequence& events, std::size_t m, std::size_t n) {
    return event_corr(std::span<const double>(events.times), m, n);
}

/// One curve per waiting event time, ordered as given.
inline std::vector<CorrelationCurve> aging_curves(const EventSequence& events,
                                                  const std::vector<std::size_t>& n_w_list,
                                                  std::size_t n_max) {
    const std::size_t L = events.size();
    std::vector<CorrelationCurve> curves;
    curves.reserve(n_w_list.size());
    for (std::size_t n_w : n_w_list) {
        if (L < n_w + n_max + 2) {
            throw DataError("aging_curves: n_max = " + std::to_string(n_max) + " with n_w = " +
                            std::to_string(n_w) + " needs at least " +
                            std::to_string(n_w + n_max + 2) + " events, have " + std::to_string(L));
        }
        CorrelationCurve curve;
        curve.n_w = n_w;
        for (std::size_t n = 0; n <= n_max; ++n) {
            curve.points.push_back({n, event_corr(events, n + n_w, n_w), L - (n + n_w)});
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

namespace detail {

// Linear interpolation of a curve sampled at consecutive integers n = 0..N.
inline std::optional<double> interpolate(const std::vector<double>& ref, double x) {
    if (x < 0.0 || x > static_cast<double>(ref.size() - 1)) return std::nullopt;
    const auto i = static_cast<std::size_t>(std::floor(x));
    if (i + 1 >= ref.size()) return ref.back();
    const double w = x - static_cast<double>(i);
    return ref[i] * (1.0 - w) + ref[i + 1] * w;
}

// Mean squared difference between C(n) and C_ref(n / f) over the points
// where n / f stays inside the reference support.
inline double collapse_residual(const std::vector<double>& ref, const std::vector<double>& curve,
                                double f) {
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t n = 0; n < curve.size(); ++n) {
        const auto r = interpolate(ref, static_cast<double>(n) / f);
        if (!r) continue;
        const double d = curve[n] - *r;
        sum += d * d;
        ++used;
    }
    if (used < 3) return std::numeric_limits<double>::infinity();
    return sum / static_cast<double>(used);
}

inline constexpr double kFMin = 0.2;
inline constexpr double kFMax = 50.0;
inline constexpr int kFGrid = 240;

}  // namespace detail

/// Finds f(n_w) so that C_{n_w}(n) ~ C_ref(n / f) for every curve.
inline CollapseResult collapse(const std::vector<CorrelationCurve>& curves,
                               std::size_t reference_n_w = 0, std::size_t n_max = 60) {
    auto values = [n_max](const CorrelationCurve& c) {
        std::vector<double> v;
        for (const auto& pt : c.points) {
            if (pt.n > n_max) break;
            v.push_back(pt.C);
        }
        return v;
    };
    const auto ref_it = std::find_if(curves.begin(), curves.end(),
                                     [&](const auto& c) { return c.n_w == reference_n_w; });
    if (ref_it == curves.end()) {
        throw DataError("collapse: no curve for reference n_w = " + std::to_string(reference_n_w));
    }
    const auto ref = values(*ref_it);
    if (ref.size() < 3) throw DataError("collapse: reference curve shorter than 3 points");

    std::vector<double> f_grid;
    for (int i = 0; i <= detail::kFGrid; ++i) {
        f_grid.push_back(detail::kFMin *
                         std::pow(detail::kFMax / detail::kFMin, static_cast<double>(i) / detail::kFGrid));
    }
    f_grid.push_back(1.0);
    std::sort(f_grid.begin(), f_grid.end());

    CollapseResult result;
    result.reference_n_w = reference_n_w;
    for (const auto& curve : curves) {
        const auto v = values(curve);
        const double before = detail::collapse_residual(ref, v, 1.0);
        if (curve.n_w == reference_n_w) {
            result.scale_factors[curve.n_w] = 1.0;
            result.residual_before[curve.n_w] = before;
            result.residual_after[curve.n_w] = before;
            continue;
        }
        std::size_t best_i = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < f_grid.size(); ++i) {
            const double r = detail::collapse_residual(ref, v, f_grid[i]);
            if (r < best) {
                best = r;
                best_i = i;
            }
        }
        if (!std::isfinite(best)) {
            throw DataError("collapse: no overlap after rescaling for n_w = " +
                            std::to_string(curve.n_w));
        }
        double f = f_grid[best_i];
        if (best > 0.0) {
            const double lo = std::log(f_grid[best_i > 0 ? best_i - 1 : 0]);
            const double hi = std::log(f_grid[std::min(best_i + 1, f_grid.size() - 1)]);
            const auto m = numeric::golden_section(
                [&](double u) { return detail::collapse_residual(ref, v, std::exp(u)); }, lo, hi,
                1e-12);
            if (m.value < best) {
                best = m.value;
                f = std::exp(m.x);
            }
        }
        result.scale_factors[curve.n_w] = f;
        result.residual_before[curve.n_w] = before;
        result.residual_after[curve.n_w] = best;
        result.collapse_residual += best;
    }
    return result;
}

/// Fits f(n_w) = a n_w^gamma + 1 by least squares of log(f - 1) on
/// log(n_w); entries with n_w = 0 or f <= 1 are skipped.
inline ScalingLaw fit_f(const std::map<std::size_t, double>& scale_factors) {
    std::vector<double> x, y;
    for (const auto& [n_w, f] : scale_factors) {
        if (n_w == 0 || !(f > 1.0)) continue;
        x.push_back(std::log(static_cast<double>(n_w)));
        y.push_back(std::log(f - 1.0));
    }
    if (x.size() < 2) {
        throw DataError("fit_f needs at least 2 entries with n_w > 0 and f > 1, got " +
                        std::to_string(x.size()));
    }
    const auto line = numeric::fit_line(x, y);
    return {std::exp(line.intercept), line.slope, x.size()};
}

}  // namespace aftershock
