#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "equation.hpp"
#include "series.hpp"

namespace p3root {

// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("degenerate grid for slope fit");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("slope fit needs positive values");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (!(std::abs(den) > 1e-300)) throw std::invalid_argument("degenerate grid for slope fit");
    return (n * sxy - sx * sy) / den;
}

template <class T>
T series_residual(const DtSeries<T>& lam, const EquationParams& p, const T& dt) {
    const T l = series_eval(lam, dt), ld = series_eval_deriv(lam, dt), ldd = series_eval_deriv(lam, dt, 2);
    return ldd - rhs_scalar(T(lam.anchor.t0) + dt, l, ld, p);
}

// Fitted order of the equation residual of an assembled root series.
template <class T>
double residual_order(const DtSeries<T>& lam, const EquationParams& p, const std::vector<T>& dt_grid) {
    std::vector<double> x, y;
    for (const auto& dt : dt_grid) {
        using std::abs;
        if (dt == T(0)) throw std::invalid_argument("grid point at the anchor");
        x.push_back(static_cast<double>(abs(dt)));
        y.push_back(static_cast<double>(abs(series_residual(lam, p, dt))));
    }
    return loglog_slope(x, y);
}

// Logarithmically spaced offsets t0 * 10^e for e in [e_lo, e_hi].
template <class T>
std::vector<T> log_grid(double t0, double e_lo, double e_hi, int n) {
    std::vector<T> g;
    for (int i = 0; i < n; ++i) {
        using std::pow;
        const T e = T(e_lo) + (T(e_hi) - T(e_lo)) * T(i) / T(n - 1);
        g.push_back(T(t0) * pow(T(10), e));
    }
    return g;
}

}  // namespace p3root
