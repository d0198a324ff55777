#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "scheme.hpp"

namespace p3root {

struct BoundSet {
    double M_lambda = 1, M_mu = 1;
    double B_mu_lambda = 1, B_mu_mu = 1, B_xi_lambda = 1, B_xi_mu = 1;
    double Q1 = 1, Q2 = 1, beta = 1;
    double alpha = 0.5, alpha_tilde = 0.5;
};

namespace detail {

// sup of |poly(dt)| over [-e, e]: endpoints, grid values and bisected critical points.
inline double sup_abs_on_interval(const std::vector<double>& c, double e) {
    auto f = [&](double x) {
        double r = 0;
        for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) r = r * x + c[k];
        return r;
    };
    const auto dc = poly::derivative(c);
    auto df = [&](double x) {
        double r = 0;
        for (int k = static_cast<int>(dc.size()) - 1; k >= 0; --k) r = r * x + dc[k];
        return r;
    };
    const int n = 4096;
    double best = std::max(std::abs(f(-e)), std::abs(f(e)));
    double xa = -e, da = df(xa);
    for (int i = 1; i <= n; ++i) {
        const double xb = -e + 2.0 * e * i / n, db = df(xb);
        best = std::max(best, std::abs(f(xb)));
        if ((da < 0) != (db < 0)) {
            double lo = xa, hi = xb, dlo = da;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, e); ++it) {
                const double mid = 0.5 * (lo + hi), dm = df(mid);
                if ((dm < 0) == (dlo < 0)) {
                    lo = mid;
                    dlo = dm;
                } else {
                    hi = mid;
                }
            }
            best = std::max(best, std::abs(f(0.5 * (lo + hi))));
        }
        xa = xb;
        da = db;
    }
    return best;
}

}  // namespace detail

// Constants of the convergence theorem for the difference iteration, on the domain
// |t - t0| <= |t0| alpha. The B constants are triangle-inequality majorants of the
// increment kernel factors over the admissible argument ranges.
inline BoundSet convergence_bounds(const RootAnchor& a, const EquationParams& p, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    const auto start = init_pair<double>(a, p);
    const double at0 = std::abs(a.t0), e = at0 * alpha;
    BoundSet b;
    b.alpha = alpha;
    b.M_lambda = std::max(1.0, 2.0 * detail::sup_abs_on_interval(start.lam.coeffs, e));
    b.M_mu = std::max(1.0, 2.0 * detail::sup_abs_on_interval(start.mu.coeffs, e));
    const double Ml = b.M_lambda, Mm = b.M_mu;
    const double c0 = p.chi0, sg = int(a.sgn);
    const double e3 = e * e * e;
    // bound on |sgn - eta (chi0 - sgn)/(2 t0) + eta^2 lam_hat|
    const double g = 1.0 + e * std::abs(c0 - sg) / (2.0 * at0) + e * e * Ml;
    b.B_mu_lambda = std::max(1.0, 0.5 * e3 * (8.0 * Mm * Mm + 4.0 * Mm));
    b.B_mu_mu = std::max(1.0, std::abs(c0) + 2.0 * e * (2.0 * Mm + 1.0) * g);
    b.B_xi_lambda = std::max(1.0, 3.0 * at0 * std::abs(c0 - 2.0 * sg) + 6.0 * at0 * e * (2.0 * Mm + 1.0) * g +
                                      4.0 * e3 * (2.0 * Mm * Mm + Mm));
    b.B_xi_mu = std::max(1.0, 8.0 * std::abs(c0) + 3.0 * e * (c0 - sg) * (c0 - sg) / (2.0 * at0) +
                                  4.0 * e * (2.0 * Mm + 1.0 + 3.0 * at0 * Ml) * g + 12.0 * e3 * at0 * Ml * Ml);
    b.Q1 = 1.0 + b.B_mu_mu + b.B_mu_lambda * Ml / Mm;
    b.Q2 = 1.0 + (2.0 * b.B_mu_lambda + b.B_xi_lambda / std::sqrt(7.0)) / (3.0 * at0) +
           (2.0 * b.B_mu_mu / std::sqrt(3.0) + b.B_xi_mu / 3.0) * Mm / (6.0 * at0 * Ml);
    b.beta = std::max(b.Q1, b.Q2);
    b.alpha_tilde = std::min(alpha, 1.0 / (2.0 * b.beta));
    return b;
}

struct IncrementSample {
    int n = 0;
    double t = 0;
    double dlam = 0, dmu = 0;            // |increment| at t
    double bound_lam = 0, bound_mu = 0;  // geometric majorants
    double lam = 0, mu = 0;              // partial sums through n
};

struct IncrementReport {
    BoundSet bounds;
    std::vector<IncrementSample> samples;  // ordered by n, then by sample
};

// Runs the difference form of the iteration on truncated power series in dt and
// reports the increments at the sample points against the geometric majorant.
inline IncrementReport algorithm_increments(const RootAnchor& a, const EquationParams& p, int n_max,
                                            const std::vector<double>& t_samples, const BoundSet& bounds,
                                            int degree_cap = 96) {
    const double at0 = std::abs(a.t0);
    for (double t : t_samples)
        if (!(std::abs(t - a.t0) < at0 * bounds.alpha_tilde))
            throw std::invalid_argument("sample point outside the convergence domain");
    using V = std::vector<double>;
    using namespace poly;
    const int D = degree_cap;
    const kernel::Consts<double> c(a, p);
    const auto start = init_pair<double>(a, p);
    V lam_prev{0.0}, mu_prev{0.0};
    V dlam = trunc(start.lam.coeffs, D), dmu = trunc(start.mu.coeffs, D);

    IncrementReport rep;
    rep.bounds = bounds;
    auto eval = [](const V& v, double x) {
        double r = 0;
        for (int k = static_cast<int>(v.size()) - 1; k >= 0; --k) r = r * x + v[k];
        return r;
    };
    auto record = [&](int n, const V& lam_sum, const V& mu_sum) {
        for (double t : t_samples) {
            const double dt = t - a.t0;
            const double q = std::pow(bounds.beta * std::abs(dt) / at0, n - 1);
            rep.samples.push_back({n, t, std::abs(eval(dlam, dt)), std::abs(eval(dmu, dt)), 0.5 * bounds.M_lambda * q,
                                   0.5 * bounds.M_mu * q, eval(lam_sum, dt), eval(mu_sum, dt)});
        }
    };
    auto avg = [&](const V& eta_poly, int extra) {
        return sigma_average(SigmaDtPoly<double>::from_eta(eta_poly), extra).coeffs;
    };

    for (int n = 1;; ++n) {
        const V lam_n = add(lam_prev, dlam), mu_n = add(mu_prev, dmu);
        record(n, lam_n, mu_n);
        if (n == n_max) break;
        const V lam_half = add(lam_prev, scale(dlam, 0.5));
        const V mu_half = add(mu_prev, scale(dmu, 0.5));
        V int_mu = add(mul(dmu, kernel::d_mu_mu(lam_half, mu_half, c, D), D),
                       mul(dlam, kernel::d_mu_lam(mu_half, dmu, c, D), D));
        V dmu_next = trunc(scale(shift(add(scale(dmu, -1.0), avg(int_mu, 0)), 1), 1.0 / a.t0), D);

        const V mu_half2 = add(mu_n, scale(dmu_next, 0.5));
        V w_mu = add(mul(dmu_next, kernel::d_mu_mu(lam_half, mu_half2, c, D), D),
                     mul(dlam, kernel::d_mu_lam(mu_half2, dmu_next, c, D), D));
        V w_xi = add(mul(dmu_next, kernel::d_xi_mu(lam_half, mu_half2, dlam, c, D), D),
                     mul(dlam, kernel::d_xi_lam(lam_half, mu_half2, dmu_next, c, D), D));
        V hat = add(scale(avg(w_mu, 0), 2.0), avg(w_xi, 3));
        V dlam_next = trunc(
            scale(shift(add(scale(dlam, -1.0), scale(hat, 1.0 / (3.0 * a.t0))), 1), 1.0 / a.t0), D);

        lam_prev = lam_n;
        mu_prev = mu_n;
        dlam = std::move(dlam_next);
        dmu = std::move(dmu_next);
    }
    return rep;
}

}  // namespace p3root
