#pragma once

#include "aftershock/error.hpp"
#include "aftershock/events.hpp"
#include "aftershock/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aftershock {

/// Waiting-time histogram. Bin j covers [origin + j*bin_size, origin +
/// (j+1)*bin_size); with 1-minute bins and integer waits, bin j holds
/// exactly tau = 1 + j.
struct WaitingHistogram {
    double bin_size = 1.0;
    double origin = 1.0;
    bool discrete = false;    // every sample integral and bin_size integral
    bool normalized = false;  // report densities instead of raw counts
    std::map<std::int64_t, std::size_t> counts;  // empty bins absent
    std::vector<double> samples;                 // sorted raw waits

    [[nodiscard]] std::size_t total() const noexcept { return samples.size(); }
    [[nodiscard]] double lower(std::int64_t j) const noexcept {
        return origin + static_cast<double>(j) * bin_size;
    }
    /// Last value in the bin: the largest integer for discrete bins.
    [[nodiscard]] double upper(std::int64_t j) const noexcept {
        return lower(j) + (discrete ? bin_size - 1.0 : bin_size);
    }
    /// Geometric centre of the bin's support; the log-log abscissa.
    [[nodiscard]] double center(std::int64_t j) const noexcept {
        const double lo = lower(j), hi = upper(j);
        return lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    }
    /// Count, or count / (n * bin_size) when normalized.
    [[nodiscard]] double value(std::int64_t j) const {
        const auto it = counts.find(j);
        const double n = it == counts.end() ? 0.0 : static_cast<double>(it->second);
        return normalized ? n / (static_cast<double>(total()) * bin_size) : n;
    }
};

enum class FitMethod { LogLogLsq, Mle };

inline std::string_view to_string(FitMethod m) {
    return m == FitMethod::Mle ? "continuous_mle" : "loglog_lsq";
}

struct FitRange {
    double lo = 1.0;
    double hi = 0.0;
};

struct WaitingFit {
    double mu = 0.0;
    FitRange fit_range;
    FitMethod method = FitMethod::LogLogLsq;
    double stderr_mu = 0.0;
    std::size_t points = 0;  // bins (LSQ) or samples (MLE) used
};

inline WaitingHistogram build_histogram(const WaitingTimes& waits, double bin_size = 1.0,
                                        double origin = 1.0) {
    if (!(bin_size > 0.0) || !std::isfinite(bin_size)) {
        throw std::invalid_argument("bin size must be positive");
    }
    WaitingHistogram h;
    h.bin_size = bin_size;
    h.origin = origin;
    h.samples = waits.taus;
    std::sort(h.samples.begin(), h.samples.end());
    bool integral = std::floor(bin_size) == bin_size && std::floor(origin) == origin;
    for (double tau : h.samples) {
        if (!(tau > 0.0) || !std::isfinite(tau)) throw DataError("waiting times must be positive");
        integral = integral && std::floor(tau) == tau;
        ++h.counts[static_cast<std::int64_t>(std::floor((tau - origin) / bin_size))];
    }
    h.discrete = integral;
    return h;
}

/// [origin, upper edge of the leading run of bins holding at least 2 waits].
inline FitRange default_fit_range(const WaitingHistogram& hist) {
    FitRange r{hist.origin, hist.origin};
    std::int64_t j = 0;
    while (true) {
        const auto it = hist.counts.find(j);
        if (it == hist.counts.end() || it->second < 2) break;
        r.hi = hist.upper(j);
        ++j;
    }
    return r;
}

namespace detail {

// fit_mu without the mu > 0 check; bootstrap replicates keep their sign.
inline WaitingFit fit_mu_raw(const WaitingHistogram& hist, FitRange range, FitMethod method);

}  // namespace detail

/// Power-law exponent mu of P(tau) ~ tau^-(1+mu).
///
/// LogLogLsq regresses log(value) on log(center) over nonempty bins whose
/// centre lies in the range; slope = -(1 + mu). Mle is the continuous
/// power-law (Hill) estimate mu = n / sum ln(tau_i / tau_min) over
/// tau >= range.lo; for minute-grid waits tau_min is shifted down by half a
/// bin, the usual discrete correction.
inline WaitingFit fit_mu(const WaitingHistogram& hist, FitRange range, FitMethod method) {
    auto fit = detail::fit_mu_raw(hist, range, method);
    if (!(fit.mu > 0.0)) throw DataError("waiting-time fit gave non-positive mu");
    return fit;
}

inline WaitingFit detail::fit_mu_raw(const WaitingHistogram& hist, FitRange range, FitMethod method) {
    WaitingFit fit;
    fit.method = method;
    fit.fit_range = range;
    if (method == FitMethod::LogLogLsq) {
        std::vector<double> x, y;
        for (const auto& [j, n] : hist.counts) {
            const double tc = hist.center(j);
            if (n == 0 || tc < range.lo || tc > range.hi) continue;
            x.push_back(std::log(tc));
            y.push_back(std::log(hist.value(j)));
        }
        if (x.size() < 5) {
            throw DataError("waiting-time LSQ needs at least 5 nonempty bins in range, got " +
                            std::to_string(x.size()));
        }
        if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
            throw DataError("waiting-time LSQ: no spread in tau");
        }
        const auto line = numeric::fit_line(x, y);
        fit.mu = -line.slope - 1.0;
        fit.stderr_mu = line.slope_stderr;
        fit.points = x.size();
    } else {
        if (!(range.lo > 0.0)) throw std::invalid_argument("MLE needs tau_min > 0");
        const auto first = std::lower_bound(hist.samples.begin(), hist.samples.end(), range.lo);
        const std::size_t n = static_cast<std::size_t>(hist.samples.end() - first);
        if (n < 50) {
            throw DataError("waiting-time MLE needs at least 50 samples >= tau_min, got " +
                            std::to_string(n));
        }
        const double tau_min = hist.discrete ? range.lo - 0.5 * hist.bin_size : range.lo;
        double s = 0.0;
        for (auto it = first; it != hist.samples.end(); ++it) s += std::log(*it / tau_min);
        if (!(s > 0.0)) throw DataError("waiting-time MLE: all tau equal to tau_min");
        fit.mu = static_cast<double>(n) / s;
        fit.stderr_mu = fit.mu / std::sqrt(static_cast<double>(n));
        fit.points = n;
        fit.fit_range.hi = hist.samples.back();
    }
    return fit;
}

inline WaitingFit fit_mu(const WaitingHistogram& hist, FitMethod method = FitMethod::LogLogLsq) {
    return fit_mu(hist, default_fit_range(hist), method);
}

}  // namespace aftershock
