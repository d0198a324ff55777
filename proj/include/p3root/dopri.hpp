#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace p3root {

template <std::size_t N>
using Vec = std::array<double, N>;

// One accepted Dormand-Prince step with its continuous extension.
template <std::size_t N>
struct DenseStep {
    double t = 0, h = 0;
    std::array<Vec<N>, 5> r{};

    double lo() const { return std::min(t, t + h); }
    double hi() const { return std::max(t, t + h); }
    Vec<N> eval(double x) const {
        const double th = (x - t) / h, th1 = 1.0 - th;
        Vec<N> y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        return y;
    }
};

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double pole_cap = 1e6;
    double switch_factor = 1e-4;
    long max_steps = 2000000;
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t) : std::runtime_error(what), t_(t) {}
    double where() const { return t_; }

private:
    double t_;
};

template <std::size_t N, class F>
class Dopri5 {
public:
    explicit Dopri5(F f) : f_(std::move(f)) {}

    Vec<N> rhs(double t, const Vec<N>& y) const { return f_(t, y); }

    struct Trial {
        Vec<N> y{}, k7{};
        double err = 0;
        DenseStep<N> dense;
    };

    Trial attempt(double t, const Vec<N>& y, const Vec<N>& k1, double h, double rtol, double atol) const {
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                         a65 = -5103.0 / 18656;
        constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                         a76 = 11.0 / 84;
        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                         e6 = 22.0 / 525, e7 = -1.0 / 40;
        constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                         d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                         d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

        Vec<N> s;
        auto stage = [&](auto&&... terms) {
            for (std::size_t i = 0; i < N; ++i) s[i] = y[i] + h * (0.0 + ... + (terms.first * (*terms.second)[i]));
            return s;
        };
        using P = std::pair<double, const Vec<N>*>;
        const Vec<N> k2 = f_(t + h / 5, stage(P{a21, &k1}));
        const Vec<N> k3 = f_(t + 3 * h / 10, stage(P{a31, &k1}, P{a32, &k2}));
        const Vec<N> k4 = f_(t + 4 * h / 5, stage(P{a41, &k1}, P{a42, &k2}, P{a43, &k3}));
        const Vec<N> k5 = f_(t + 8 * h / 9, stage(P{a51, &k1}, P{a52, &k2}, P{a53, &k3}, P{a54, &k4}));
        const Vec<N> k6 = f_(t + h, stage(P{a61, &k1}, P{a62, &k2}, P{a63, &k3}, P{a64, &k4}, P{a65, &k5}));
        Trial tr;
        tr.y = stage(P{a71, &k1}, P{a73, &k3}, P{a74, &k4}, P{a75, &k5}, P{a76, &k6});
        tr.k7 = f_(t + h, tr.y);
        double sum = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * tr.k7[i]);
            const double sk = atol + rtol * std::max(std::abs(y[i]), std::abs(tr.y[i]));
            sum += (e / sk) * (e / sk);
        }
        tr.err = std::sqrt(sum / N);
        tr.dense.t = t;
        tr.dense.h = h;
        for (std::size_t i = 0; i < N; ++i) {
            const double ydiff = tr.y[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            tr.dense.r[0][i] = y[i];
            tr.dense.r[1][i] = ydiff;
            tr.dense.r[2][i] = bspl;
            tr.dense.r[3][i] = ydiff - h * tr.k7[i] - bspl;
            tr.dense.r[4][i] =
                h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * tr.k7[i]);
        }
        return tr;
    }

private:
    F f_;
};

enum class StepAction { Continue, Stop, Restart };

enum class DriveStatus { Reached, Stopped };

// Adaptive driver. `limit(t, y, h)` may shrink a proposed step; `accept(step, t, y)` is
// called after each accepted step and may stop, continue, or replace (t, y) and restart.
// `reject(t, y, trial)` may veto an otherwise acceptable trial.
template <std::size_t N, class F, class Limit, class Accept, class Veto>
DriveStatus drive(const Dopri5<N, F>& rk, double t, Vec<N> y, double t_end, const OdeOptions& o, Limit&& limit,
                  Accept&& accept, Veto&& veto) {
    const double dir = t_end >= t ? 1.0 : -1.0;
    Vec<N> k1 = rk.rhs(t, y);
    double h;
    {
        // initial step from the size of the derivative
        double d0 = 0, d1 = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = o.abs_tol + o.rel_tol * std::abs(y[i]);
            d0 += (y[i] / sk) * (y[i] / sk);
            d1 += (k1[i] / sk) * (k1[i] / sk);
        }
        d0 = std::sqrt(d0 / N);
        d1 = std::sqrt(d1 / N);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, std::abs(t_end - t));
        h = std::max(h, 1e-12 * std::max(1.0, std::abs(t)));
    }
    long steps = 0;
    bool last_rejected = false;
    while (dir * (t_end - t) > 0) {
        if (++steps > o.max_steps) throw IntegrationError("step limit exceeded", t);
        double hs = dir * std::min(std::abs(h), std::abs(t_end - t));
        hs = limit(t, y, hs);
        const double hmin = 1e-14 * std::max(1.0, std::abs(t));
        if (std::abs(hs) < hmin)
            throw IntegrationError("step size underflow at t = " + std::to_string(t), t);
        auto tr = rk.attempt(t, y, k1, hs, o.rel_tol, o.abs_tol);
        bool ok = std::isfinite(tr.err) && tr.err <= 1.0;
        for (double v : tr.y) ok = ok && std::isfinite(v);
        if (ok && veto(t, y, tr.y)) {
            h = 0.25 * hs;
            last_rejected = true;
            continue;
        }
        if (!ok) {
            const double fac = std::isfinite(tr.err) ? std::max(0.1, 0.9 * std::pow(tr.err, -0.2)) : 0.1;
            h = hs * fac;
            last_rejected = true;
            continue;
        }
        const double t_new = (std::abs(t_end - (t + hs)) <= 1e-15 * std::abs(t_end)) ? t_end : t + hs;
        double fac = tr.err > 0 ? 0.9 * std::pow(tr.err, -0.2) : 5.0;
        fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
        last_rejected = false;
        h = hs * fac;
        t = t_new;
        y = tr.y;
        k1 = tr.k7;
        const StepAction act = accept(tr.dense, t, y);
        if (act == StepAction::Stop) return DriveStatus::Stopped;
        if (act == StepAction::Restart) k1 = rk.rhs(t, y);
    }
    return DriveStatus::Reached;
}

// Accepted steps of a plain integration, ordered by increasing t.
template <std::size_t N>
class DenseTrajectory {
public:
    std::vector<DenseStep<N>> steps;

    double lo() const { return steps.empty() ? 0 : steps.front().lo(); }
    double hi() const { return steps.empty() ? 0 : steps.back().hi(); }
    Vec<N> eval(double t) const {
        if (steps.empty() || t < lo() - 1e-14 * std::abs(t) || t > hi() + 1e-14 * std::abs(t))
            throw std::out_of_range("evaluation outside the integrated span");
        auto it = std::lower_bound(steps.begin(), steps.end(), t,
                                   [](const DenseStep<N>& s, double x) { return s.hi() < x; });
        if (it == steps.end()) --it;
        return it->eval(t);
    }
};

// Integrates y' = f(t, y) from (t0, y0) to both ends of [a, b].
template <std::size_t N, class F>
DenseTrajectory<N> integrate_system(F f, double t0, const Vec<N>& y0, double a, double b, const OdeOptions& o) {
    Dopri5<N, F> rk(std::move(f));
    std::vector<DenseStep<N>> back, fwd;
    auto no_limit = [](double, const Vec<N>&, double h) { return h; };
    auto no_veto = [](double, const Vec<N>&, const Vec<N>&) { return false; };
    if (b > t0)
        drive(rk, t0, y0, b, o, no_limit,
              [&](const DenseStep<N>& s, double, const Vec<N>&) {
                  fwd.push_back(s);
                  return StepAction::Continue;
              },
              no_veto);
    if (a < t0)
        drive(rk, t0, y0, a, o, no_limit,
              [&](const DenseStep<N>& s, double, const Vec<N>&) {
                  back.push_back(s);
                  return StepAction::Continue;
              },
              no_veto);
    DenseTrajectory<N> tr;
    tr.steps.assign(back.rbegin(), back.rend());
    tr.steps.insert(tr.steps.end(), fwd.begin(), fwd.end());
    return tr;
}

}  // namespace p3root
