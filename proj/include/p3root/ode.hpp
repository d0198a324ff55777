#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dopri.hpp"
#include "equation.hpp"
#include "scheme.hpp"

namespace p3root {

struct RootInfo {
    double t0 = 0;
    int sgn = 1;
    double lam3 = 0;
};

// Record left by the integrator when it replaced the neighbourhood of a root by the
// local series.
struct RootCrossing {
    double t0 = 0;
    int sgn = 1;
    double lam3 = 0;
    double t_enter = 0, t_exit = 0;
};

class DenseSolution {
public:
    struct Node {
        double t, lam, lamdot;
    };
    struct SeriesPiece {
        double lo, hi;
        DtSeries<double> lam;  // assembled, anchored at the crossed root
    };

    EquationParams params;
    OdeOptions options;
    std::vector<Node> mesh;
    std::vector<RootCrossing> crossings;
    bool pole_lo = false, pole_hi = false;

    double lo() const { return pieces_.empty() ? 0 : pieces_.front().lo; }
    double hi() const { return pieces_.empty() ? 0 : pieces_.back().hi; }
    bool covers(double t) const { return !pieces_.empty() && t >= lo() && t <= hi(); }

    // (lambda, lambda_dot) at t
    std::pair<double, double> eval(double t) const {
        if (!covers(t)) throw std::out_of_range("t outside the solution span");
        auto it = std::lower_bound(pieces_.begin(), pieces_.end(), t,
                                   [](const Piece& p, double x) { return p.hi < x; });
        if (it == pieces_.end()) --it;
        if (it->series < 0) {
            const auto y = rk_[it->index].eval(t);
            return {y[0], y[1]};
        }
        const auto& s = series_[it->series];
        const double dt = t - s.lam.anchor.t0;
        return {series_eval(s.lam, dt), series_eval_deriv(s.lam, dt)};
    }
    double lambda(double t) const { return eval(t).first; }
    double lambda_dot(double t) const { return eval(t).second; }

    const std::vector<SeriesPiece>& series_pieces() const { return series_; }

    // Assembly helpers for the integrator.
    void add_rk(const DenseStep<2>& s) {
        pieces_.push_back({s.lo(), s.hi(), static_cast<int>(rk_.size()), -1});
        rk_.push_back(s);
    }
    void add_series(double a, double b, DtSeries<double> lam) {
        const double l = std::min(a, b), h = std::max(a, b);
        pieces_.push_back({l, h, -1, static_cast<int>(series_.size())});
        series_.push_back({l, h, std::move(lam)});
    }
    void finalize() {
        std::sort(pieces_.begin(), pieces_.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
        std::sort(mesh.begin(), mesh.end(), [](const Node& a, const Node& b) { return a.t < b.t; });
        mesh.erase(std::unique(mesh.begin(), mesh.end(), [](const Node& a, const Node& b) { return a.t == b.t; }),
                   mesh.end());
        std::sort(crossings.begin(), crossings.end(),
                  [](const RootCrossing& a, const RootCrossing& b) { return a.t0 < b.t0; });
    }

private:
    struct Piece {
        double lo, hi;
        int index;
        int series;
    };
    std::vector<Piece> pieces_;
    std::vector<DenseStep<2>> rk_;
    std::vector<SeriesPiece> series_;
};

namespace detail {

inline DtSeries<double> root_series(double t0, int sgn, double lam3, const EquationParams& p, int order = 3) {
    const RootAnchor a(t0, SignSwitch(sgn), lam3);
    return assemble_lambda(run_scheme<double>(a, p, order).lam, p);
}

// Anchor (t0, lam3) of the root expansion through (t, lam, lamdot), sgn fixed.
inline std::pair<double, double> fit_root_anchor(double t, double lam, double lamdot, int sgn,
                                                 const EquationParams& p, int order = 3) {
    double t0 = t - lam / lamdot;
    const double c2 = (sgn - p.chi0) / (2.0 * t0);
    const double dt0 = t - t0;
    double L = 0.0;
    if (std::abs(dt0) > 0) {
        const double lddot = rhs_scalar(t, lam, lamdot, p);
        L = (lddot - 2.0 * c2) / (6.0 * dt0);
    }
    auto resid = [&](double tt, double LL) {
        const auto s = root_series(tt, sgn, LL, p, order);
        const double d = t - tt;
        return std::array<double, 2>{series_eval(s, d) - lam, series_eval_deriv(s, d) - lamdot};
    };
    for (int it = 0; it < 30; ++it) {
        const auto r = resid(t0, L);
        const double ht = 1e-7 * std::max(std::abs(t - t0), 1e-3 * std::abs(t0));
        const double hl = 1e-3 * std::max(1.0, std::abs(L));
        const auto rtp = resid(t0 + ht, L), rtm = resid(t0 - ht, L);
        const auto rlp = resid(t0, L + hl), rlm = resid(t0, L - hl);
        const double j11 = (rtp[0] - rtm[0]) / (2 * ht), j21 = (rtp[1] - rtm[1]) / (2 * ht);
        const double j12 = (rlp[0] - rlm[0]) / (2 * hl), j22 = (rlp[1] - rlm[1]) / (2 * hl);
        const double det = j11 * j22 - j12 * j21;
        if (det == 0 || !std::isfinite(det)) break;
        const double dt = (r[0] * j22 - r[1] * j12) / det;
        const double dl = (j11 * r[1] - j21 * r[0]) / det;
        t0 -= dt;
        L -= dl;
        if (std::abs(dt) <= 1e-16 * std::abs(t0) && std::abs(dl) <= 1e-10 * (1.0 + std::abs(L))) break;
    }
    return {t0, L};
}

}  // namespace detail

// Integrates the scalar equation from (t_init, lam0, lamdot0) over [span_lo, span_hi].
// Roots are crossed with the local series; a pole stops integration in that direction.
inline DenseSolution integrate(const EquationParams& p, double t_init, double lam0, double lamdot0, double span_lo,
                               double span_hi, const OdeOptions& opts = {}) {
    if (!(span_lo < span_hi)) throw std::invalid_argument("empty integration span");
    if (t_init < span_lo || t_init > span_hi) throw std::invalid_argument("initial time outside the span");
    if (span_lo <= 0.0 && span_hi >= 0.0) throw std::invalid_argument("span must not contain t = 0");
    if (lam0 == 0.0) throw std::invalid_argument("initial lambda must be nonzero");

    DenseSolution sol;
    sol.params = p;
    sol.options = opts;
    auto f = [p](double t, const Vec<2>& y) { return Vec<2>{y[1], rhs_scalar(t, y[0], y[1], p)}; };
    Dopri5<2, decltype(f)> rk(f);
    sol.mesh.push_back({t_init, lam0, lamdot0});

    for (double t_end : {span_hi, span_lo}) {
        if (t_end == t_init) continue;
        const double dir = t_end > t_init ? 1.0 : -1.0;
        auto toward_zero = [dir](const Vec<2>& y) { return dir * y[0] * y[1] < 0; };
        auto limit = [&](double, const Vec<2>& y, double h) {
            if (toward_zero(y) && y[1] != 0.0) {
                const double hmax = 0.5 * std::abs(y[0] / y[1]);
                if (std::abs(h) > hmax) h = dir * hmax;
            }
            return h;
        };
        auto veto = [](double, const Vec<2>& y, const Vec<2>& yn) { return (y[0] > 0) != (yn[0] > 0); };
        // crossing: returns new (t, y) past the root, or nothing if the end is reached first
        auto cross = [&](double t, const Vec<2>& y) -> std::optional<std::pair<double, Vec<2>>> {
            const int sgn = y[1] > 0 ? 1 : -1;
            const auto [t0, L] = detail::fit_root_anchor(t, y[0], y[1], sgn, p);
            auto s = detail::root_series(t0, sgn, L, p);
            double tb = 2.0 * t0 - t;
            bool done = false;
            if (dir * (tb - t_end) >= 0) {
                tb = t_end;
                done = true;
            }
            sol.crossings.push_back({t0, sgn, L, t, tb});
            const Vec<2> yb{series_eval(s, tb - t0), series_eval_deriv(s, tb - t0)};
            sol.add_series(t, tb, std::move(s));
            sol.mesh.push_back({tb, yb[0], yb[1]});
            if (done) return std::nullopt;
            return std::make_pair(tb, yb);
        };

        double t = t_init;
        Vec<2> y{lam0, lamdot0};
        if (std::abs(y[0]) < opts.switch_factor * std::abs(t) && toward_zero(y)) {
            auto nxt = cross(t, y);
            if (!nxt) continue;
            t = nxt->first;
            y = nxt->second;
        }
        bool pole = false;
        auto accept = [&](const DenseStep<2>& s, double& tn, Vec<2>& yn) {
            sol.add_rk(s);
            sol.mesh.push_back({tn, yn[0], yn[1]});
            if (std::abs(yn[0]) > opts.pole_cap) {
                pole = true;
                return StepAction::Stop;
            }
            if (std::abs(yn[0]) < opts.switch_factor * std::abs(tn) && toward_zero(yn)) {
                auto nxt = cross(tn, yn);
                if (!nxt) return StepAction::Stop;
                tn = nxt->first;
                yn = nxt->second;
                return StepAction::Restart;
            }
            return StepAction::Continue;
        };
        // drive() passes (t, y) by value to the accept hook; wrap to allow restarts
        for (;;) {
            double t_restart = t;
            Vec<2> y_restart = y;
            bool restarted = false;
            auto hook = [&](const DenseStep<2>& s, double tn, const Vec<2>& yn) {
                double tt = tn;
                Vec<2> yy = yn;
                const auto act = accept(s, tt, yy);
                if (act == StepAction::Restart) {
                    t_restart = tt;
                    y_restart = yy;
                    restarted = true;
                    return StepAction::Stop;
                }
                return act;
            };
            drive(rk, t, y, t_end, opts, limit, hook, veto);
            if (!restarted) break;
            t = t_restart;
            y = y_restart;
        }
        if (pole) (dir > 0 ? sol.pole_hi : sol.pole_lo) = true;
    }
    sol.finalize();
    return sol;
}

// Sign changes of lambda on the mesh, refined by bisection and Newton on the interpolant.
inline std::vector<RootInfo> find_roots(const DenseSolution& sol) {
    std::vector<RootInfo> out;
    const auto& m = sol.mesh;
    const double tol = sol.options.abs_tol;
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
        if ((m[i].lam > 0) == (m[i + 1].lam > 0) || m[i].lam == 0.0) continue;
        double a = m[i].t, b = m[i + 1].t, fa = m[i].lam;
        for (int it = 0; it < 200 && b - a > 4e-16 * std::abs(a); ++it) {
            const double c = 0.5 * (a + b), fc = sol.lambda(c);
            if (std::abs(fc) <= tol * 1e-3) {
                a = b = c;
                break;
            }
            if ((fc > 0) == (fa > 0)) {
                a = c;
                fa = fc;
            } else {
                b = c;
            }
        }
        double r = 0.5 * (a + b);
        for (int it = 0; it < 5; ++it) {
            const auto [l, ld] = sol.eval(r);
            if (ld == 0.0) break;
            const double rn = r - l / ld;
            if (!sol.covers(rn) || std::abs(sol.lambda(rn)) >= std::abs(l)) break;
            r = rn;
        }
        out.push_back({r, sol.lambda_dot(r) > 0 ? 1 : -1, 0.0});
    }
    return out;
}

// lam3 = third derivative / 6 at the root, from a quartic least-squares fit of the
// third derivative at mesh nodes around (but not too close to) the root.
inline double lam3_at_root(const DenseSolution& sol, const RootInfo& root, const EquationParams& p) {
    const double t0 = root.t0;
    const double excl = 1e-3 * std::max(1.0, std::abs(t0));
    const double half = 0.1 * std::abs(t0);
    std::vector<DenseSolution::Node> nodes;
    for (const auto& n : sol.mesh)
        if (std::abs(n.t - t0) <= half && std::abs(n.lam) > excl) nodes.push_back(n);
    std::sort(nodes.begin(), nodes.end(),
              [&](const auto& a, const auto& b) { return std::abs(a.t - t0) < std::abs(b.t - t0); });
    if (nodes.size() > 41) nodes.resize(41);
    if (nodes.size() < 5) throw std::runtime_error("too few mesh nodes near the root for the lam3 fit");
    double w = 0;
    for (const auto& n : nodes) w = std::max(w, std::abs(n.t - t0));
    Eigen::MatrixXd A(nodes.size(), 5);
    Eigen::VectorXd rhs(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double x = (nodes[i].t - t0) / w;
        double xp = 1;
        for (int k = 0; k < 5; ++k, xp *= x) A(i, k) = xp;
        rhs(i) = third_derivative(nodes[i].t, nodes[i].lam, nodes[i].lamdot, p);
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
    return c(0) / 6.0;
}

// Residual of the equation with the second derivative from a central difference of the
// interpolated first derivative.
inline std::vector<std::pair<double, double>> residual_scan(const DenseSolution& sol, const std::vector<double>& grid,
                                                            double fd_step) {
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    for (double t : grid) {
        const auto [l, ld] = sol.eval(t);
        const double ldd = (sol.lambda_dot(t + fd_step) - sol.lambda_dot(t - fd_step)) / (2.0 * fd_step);
        out.emplace_back(t, ldd - rhs_scalar(t, l, ld, sol.params));
    }
    return out;
}

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return g;
}

inline double compare_series(const DenseSolution& sol, const DtSeries<double>& lam_series, double w_lo, double w_hi,
                             int samples = 2001) {
    if (!sol.covers(w_lo) || !sol.covers(w_hi)) throw std::out_of_range("window outside the solution span");
    double dev = 0;
    for (double t : linspace(w_lo, w_hi, samples))
        dev = std::max(dev, std::abs(series_eval(lam_series, t - lam_series.anchor.t0) - sol.lambda(t)));
    return dev;
}

// Integrates the parameter-swapped equation from the image t/lambda at the grid point
// nearest the middle, and returns the largest deviation between t/lambda and that solution.
inline double symmetry_check(const DenseSolution& sol, const EquationParams& p, const std::vector<double>& grid,
                             const OdeOptions& opts = {}) {
    if (grid.empty()) return 0.0;
    const auto [gmin, gmax] = std::minmax_element(grid.begin(), grid.end());
    const double mid = 0.5 * (*gmin + *gmax);
    double ta = grid.front();
    for (double t : grid)
        if (std::abs(t - mid) < std::abs(ta - mid)) ta = t;
    for (double t : grid)
        if (std::abs(sol.lambda(t)) < 1e-8 * std::max(1.0, std::abs(t)))
            throw std::domain_error("grid point too close to a zero of lambda");
    const auto [l, ld] = sol.eval(ta);
    const auto img = integrate(swapped(p), ta, ta / l, (l - ta * ld) / (l * l), *gmin, *gmax, opts);
    double dev = 0;
    for (double t : grid) dev = std::max(dev, std::abs(t / sol.lambda(t) - img.lambda(t)));
    return dev;
}

// Integrates the Hamilton equations with fixed sgn from (t_init, lam0, mu0) over [a, b].
inline DenseTrajectory<2> integrate_hamiltonian(const EquationParams& p, SignSwitch s, double t_init, double lam0,
                                                double mu0, double a, double b, const OdeOptions& opts = {}) {
    auto f = [p, s](double t, const Vec<2>& y) {
        const auto [ld, md] = hamilton_rhs(PhasePoint{t, y[0], y[1]}, p, s);
        return Vec<2>{ld, md};
    };
    return integrate_system<2>(f, t_init, Vec<2>{lam0, mu0}, a, b, opts);
}

}  // namespace p3root
