#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

namespace aftershock::numeric {

struct Minimum {
    double x = 0.0;
    double value = std::numeric_limits<double>::infinity();
};

/// Golden-section search for a minimum of `f` on [lo, hi]. Returns the best
/// point evaluated, so the result is never worse than either bracket end.
template <class F>
Minimum golden_section(F&& f, double lo, double hi, double tol = 1e-10, int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498949;
    Minimum best{lo, f(lo)};
    auto consider = [&best](double x, double v) {
        if (v < best.value) best = {x, v};
    };
    consider(hi, f(hi));
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    consider(x1, f1);
    consider(x2, f2);
    for (int i = 0; i < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
            consider(x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
            consider(x2, f2);
        }
    }
    return best;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("fit_line: need at least 2 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: zero variance in x");
    LineFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = y[i] - fit.intercept - fit.slope * x[i];
            sse += e * e;
        }
        fit.slope_stderr = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
    }
    return fit;
}

}  // namespace aftershock::numeric
