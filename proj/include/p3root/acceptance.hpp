#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "appendix.hpp"
#include "bounds.hpp"
#include "fit.hpp"
#include "pole.hpp"

namespace p3root::acceptance {

inline constexpr std::uint64_t default_seed = 20240611;

using Wide = boost::multiprecision::cpp_bin_float_50;

// Uniform doubles from the raw 64-bit stream, independent of the library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}
    double uniform(double a, double b) { return a + (b - a) * static_cast<double>(g_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 g_;
};

struct Draw {
    EquationParams p;
    RootAnchor a;
};

// chi0, chi_inf in [-3, 3], t0 in +-[0.3, 3], lam3 in [-10, 10]; sgn alternates.
inline std::vector<Draw> parameter_draws(std::uint64_t seed, int n) {
    Rng rng(seed);
    std::vector<Draw> out;
    for (int i = 0; i < n; ++i) {
        const double c0 = rng.uniform(-3, 3), ci = rng.uniform(-3, 3);
        const double mag = rng.uniform(0.3, 3);
        const double t0 = rng.uniform(0, 1) < 0.5 ? -mag : mag;
        const double l3 = rng.uniform(-10, 10);
        out.push_back({{c0, ci}, RootAnchor(t0, SignSwitch(i % 2 == 0 ? 1 : -1), l3)});
    }
    return out;
}

struct Result {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

namespace detail {
inline std::string fmt(const char* f, double v) {
    char b[64];
    std::snprintf(b, sizeof b, f, v);
    return b;
}
inline double coeff_error(double got, double ref) {
    const double d = std::abs(got - ref);
    return std::abs(ref) < 1.0 ? d : d / std::abs(ref);
}
}  // namespace detail

inline Result closed_form_equivalence(std::uint64_t seed) {
    Result r{1, "closed-form oracle equivalence (20 draws, 1e-12)"};
    double worst = 0;
    for (const auto& d : parameter_draws(seed, 20)) {
        const auto got = run_scheme<double>(d.a, d.p, 5).lam;
        const auto ref = lam6_reference<double>(d.a, d.p);
        for (int k = 0; k <= 5; ++k) worst = std::max(worst, detail::coeff_error(got.coeff(k), ref.coeff(k)));
    }
    r.pass = worst <= 1e-12;
    r.detail = "max error " + detail::fmt("%.3g", worst);
    return r;
}

// Residual slope of the assembled root series with the cubic coefficient trusted through k.
inline double root_residual_slope(const RootAnchor& a, const EquationParams& p, int k) {
    const auto lam = assemble_lambda(run_scheme<Wide>(a, p, k).lam, p);
    return residual_order(lam, p, log_grid<Wide>(std::abs(a.t0), -3, -1, 21));
}

inline Result residual_order_at_root() {
    Result r{2, "residual order at a root"};
    bool ok = true;
    std::string det;
    const std::array<RootAnchor, 2> anchors{RootAnchor(appendix::roots[4], SignSwitch(1), appendix::lam3_plus),
                                            RootAnchor(appendix::roots[5], SignSwitch(-1), appendix::lam3_minus)};
    for (const auto& a : anchors) {
        for (int k = 0; k <= 5; ++k) {
            const double s = root_residual_slope(a, appendix::params, k);
            ok = ok && (k == 5 ? s >= 6.5 : std::abs(s - (k + 2)) <= 0.3);
            det += detail::fmt(k == 0 ? " [%.2f" : " %.2f", s);
        }
        det += "]";
    }
    r.pass = ok;
    r.detail = "slopes k=0..5:" + det;
    return r;
}

// lambda_dot at a root, extrapolated from the last integrator node before the crossing
// so that the value does not come from the local series.
inline double slope_from_steps(const DenseSolution& sol, double root) {
    const RootCrossing* best = nullptr;
    for (const auto& c : sol.crossings)
        if (!best || std::abs(c.t0 - root) < std::abs(best->t0 - root)) best = &c;
    if (!best) throw std::runtime_error("no crossing recorded near the root");
    const auto it = std::find_if(sol.mesh.begin(), sol.mesh.end(),
                                 [&](const DenseSolution::Node& m) { return m.t == best->t_enter; });
    if (it == sol.mesh.end()) throw std::runtime_error("crossing entry node missing from the mesh");
    const double h = root - it->t;
    return it->lamdot + h * rhs_scalar(it->t, it->lam, it->lamdot, sol.params) +
           0.5 * h * h * third_derivative(it->t, it->lam, it->lamdot, sol.params);
}

inline Result reference_reproduction(const appendix::Run& run) {
    Result r{3, "reference solution reproduction (six roots, lam3, unit slopes)"};
    const auto& roots = run.roots;
    bool ok = roots.size() == appendix::roots.size();
    double root_err = 0, slope_err = 0, l3_err = 0;
    if (ok) {
        for (std::size_t i = 0; i < roots.size(); ++i) {
            root_err = std::max(root_err, std::abs(roots[i].t0 - appendix::roots[i]));
            slope_err = std::max(slope_err, std::abs(std::abs(slope_from_steps(run.sol, roots[i].t0)) - 1.0));
        }
        l3_err = std::max(std::abs(roots[4].lam3 / appendix::lam3_plus - 1.0),
                          std::abs(roots[5].lam3 / appendix::lam3_minus - 1.0));
        ok = root_err <= 1e-3 && slope_err <= 1e-3 && l3_err <= 0.01 && roots[4].sgn == 1 && roots[5].sgn == -1;
    }
    r.pass = ok;
    r.detail = std::to_string(roots.size()) + " roots, max root error " + detail::fmt("%.3g", root_err) +
               ", lam3 rel error " + detail::fmt("%.3g", l3_err) + ", slope error " + detail::fmt("%.3g", slope_err);
    return r;
}

inline DtSeries<double> reference_series(const RootInfo& root, int order = 5) {
    const RootAnchor a(root.t0, SignSwitch(root.sgn), root.lam3);
    return assemble_lambda(run_scheme<double>(a, appendix::params, order).lam, appendix::params);
}

inline Result series_overlap(const appendix::Run& run) {
    Result r{4, "series/solution overlap"};
    if (run.roots.size() < 6) {
        r.detail = "roots missing";
        return r;
    }
    const auto& rp = run.roots[4];
    const auto& rm = run.roots[5];
    const double dp = compare_series(run.sol, reference_series(rp), appendix::roots[4], 0.85);
    const double dm = compare_series(run.sol, reference_series(rm), 0.7, appendix::roots[5]);
    r.pass = dp <= 1e-2 && dm <= 1e-2;
    r.detail = "sgn=+1 " + detail::fmt("%.3g", dp) + ", sgn=-1 " + detail::fmt("%.3g", dm);
    return r;
}

inline Result theorem_decay() {
    Result r{5, "geometric decay of iteration increments"};
    bool ok = true;
    double worst_ratio = 0, worst_sum = 0;
    const std::array<RootAnchor, 2> anchors{RootAnchor(appendix::roots[4], SignSwitch(1), appendix::lam3_plus),
                                            RootAnchor(appendix::roots[5], SignSwitch(-1), appendix::lam3_minus)};
    for (const auto& a : anchors) {
        const auto b = convergence_bounds(a, appendix::params, 0.5);
        std::vector<double> ts;
        for (double f : {-0.95, -0.5, 0.1, 0.55, 0.95}) ts.push_back(a.t0 + f * std::abs(a.t0) * b.alpha_tilde);
        const auto rep = algorithm_increments(a, appendix::params, 40, ts, b);
        const auto exact = run_scheme<double>(a, appendix::params, 40);
        for (const auto& s : rep.samples) {
            if (s.n <= 15) {
                worst_ratio = std::max({worst_ratio, s.dlam / s.bound_lam, s.dmu / s.bound_mu});
            }
            if (s.n == 40) {
                const double dt = s.t - a.t0;
                worst_sum = std::max({worst_sum, std::abs(s.lam - series_eval(exact.lam, dt)),
                                      std::abs(s.mu - series_eval(exact.mu, dt))});
            }
        }
    }
    ok = worst_ratio <= 1.0 && worst_sum <= 1e-10;
    r.pass = ok;
    r.detail = "max increment/majorant " + detail::fmt("%.3g", worst_ratio) + ", partial-sum error " +
               detail::fmt("%.3g", worst_sum);
    return r;
}

inline Result momentum_dichotomy(const appendix::Run& run) {
    Result r{6, "momentum dichotomy at a root"};
    if (run.roots.size() < 6) {
        r.detail = "roots missing";
        return r;
    }
    const auto& root = run.roots[4];
    const EquationParams& p = appendix::params;
    const double mu0 = mu_at_root<double>(RootAnchor(root.t0, SignSwitch(1), root.lam3), p);
    double mx = 0;
    for (double e : log_grid<double>(1.0, -4, -3, 41)) {
        const auto [l, ld] = run.sol.eval(root.t0 + e);
        mx = std::max(mx, std::abs(mu_from_lambda(root.t0 + e, l, ld, p, SignSwitch(1))));
    }
    double lo = INFINITY, hi = -INFINITY;
    for (double e : log_grid<double>(1.0, -4, -3, 41)) {
        const auto [l, ld] = run.sol.eval(root.t0 + e);
        const double v = mu_from_lambda(root.t0 + e, l, ld, p, SignSwitch(-1)) * e * e;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double var = (hi - lo) / std::abs(hi);
    r.pass = mx <= 10 * std::abs(mu0) && var <= 0.05 && std::abs(lo) > 0;
    r.detail = "max|mu| " + detail::fmt("%.4g", mx) + " vs |mu(t0)| " + detail::fmt("%.4g", std::abs(mu0)) +
               "; mu*dt^2 in [" + detail::fmt("%.6g", lo) + ", " + detail::fmt("%.6g", hi) + "]";
    return r;
}

inline Result pole_expansion(std::uint64_t seed) {
    Result r{7, "pole expansion"};
    double worst = 0;
    for (const auto& d : parameter_draws(seed, 20)) {
        const auto got = root_to_pole<double>(d.a, d.p, 4);
        const auto ref = pole_b5_reference<double>(d.a, d.p);
        worst = std::max(worst, detail::coeff_error(got.residue, ref.residue));
        for (int k = 0; k <= 4; ++k) worst = std::max(worst, detail::coeff_error(got.d(k), ref.d(k)));
    }
    const RootAnchor a(appendix::roots[4], SignSwitch(1), appendix::lam3_plus);
    const auto grid = log_grid<Wide>(a.t0, -3, -1, 21);
    const double s4 = pole_residual_order(pole_b5_reference<Wide>(a, appendix::params), grid);
    const double s6 = pole_residual_order(root_to_pole<Wide>(a, appendix::params, 6), grid);
    r.pass = worst <= 1e-12 && s4 >= 2.5 && s6 >= 4.5;
    r.detail = "max error " + detail::fmt("%.3g", worst) + ", slopes " + detail::fmt("%.3f", s4) + " / " +
               detail::fmt("%.3f", s6);
    return r;
}

inline Result symmetry(const appendix::Run& run, std::uint64_t seed) {
    Result r{8, "reciprocal symmetry and parameter conversion"};
    const double dev = symmetry_check(run.sol, appendix::params, linspace(0.6, 1.3, 71));
    Rng rng(seed);
    double rt = 0;
    for (int i = 0; i < 20; ++i) {
        const P3FormParams q{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0.1, 4), -rng.uniform(0.1, 4)};
        const auto c = convert_p3_to_p3prime(q);
        const auto back = convert_p3prime_to_p3(c.params, q.gamma, q.delta);
        rt = std::max({rt, std::abs(back.alpha - q.alpha) / std::max(1.0, std::abs(q.alpha)),
                       std::abs(back.beta - q.beta) / std::max(1.0, std::abs(q.beta))});
    }
    r.pass = dev <= 1e-6 && rt <= 1e-14;
    r.detail = "symmetry deviation " + detail::fmt("%.3g", dev) + ", round trip " + detail::fmt("%.3g", rt);
    return r;
}

inline Result cross_formulation(const appendix::Run& run, std::uint64_t seed) {
    Result r{9, "scalar vs Hamiltonian formulation"};
    if (run.roots.size() < 6) {
        r.detail = "roots missing";
        return r;
    }
    const EquationParams& p = appendix::params;
    const double tc = appendix::tc, left = run.roots[4].t0, right = run.roots[5].t0;
    const auto [lc, ldc] = run.sol.eval(tc);
    double dev = 0;
    const auto fwd = integrate_hamiltonian(p, SignSwitch(-1), tc, lc, mu_from_lambda(tc, lc, ldc, p, SignSwitch(-1)),
                                           tc, right);
    for (double t : linspace(tc, right, 400)) dev = std::max(dev, std::abs(fwd.eval(t)[0] - run.sol.lambda(t)));
    const auto bwd = integrate_hamiltonian(p, SignSwitch(1), tc, lc, mu_from_lambda(tc, lc, ldc, p, SignSwitch(1)),
                                           left, tc);
    for (double t : linspace(left, tc, 400)) dev = std::max(dev, std::abs(bwd.eval(t)[0] - run.sol.lambda(t)));

    Rng rng(seed);
    double grad = 0;
    const double h = 1e-5;
    for (int i = 0; i < 100; ++i) {
        const EquationParams q{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const double mag = rng.uniform(0.3, 3);
        const double t = rng.uniform(0, 1) < 0.5 ? -mag : mag;
        const PhasePoint pt{t, rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const SignSwitch s(rng.uniform(0, 1) < 0.5 ? 1 : -1);
        const auto [ld, md] = hamilton_rhs(pt, q, s);
        const double dHdmu = (hamiltonian({t, pt.lambda, pt.mu + h}, q, s) - hamiltonian({t, pt.lambda, pt.mu - h}, q, s)) / (2 * h);
        const double dHdl = (hamiltonian({t, pt.lambda + h, pt.mu}, q, s) - hamiltonian({t, pt.lambda - h, pt.mu}, q, s)) / (2 * h);
        grad = std::max({grad, std::abs(ld - dHdmu) / std::max(1.0, std::abs(ld)),
                         std::abs(md + dHdl) / std::max(1.0, std::abs(md))});
    }
    r.pass = dev <= 1e-6 && grad <= 1e-7;
    r.detail = "trajectory deviation " + detail::fmt("%.3g", dev) + ", gradient error " + detail::fmt("%.3g", grad);
    return r;
}

// Runs every criterion; the reference solution is integrated once and shared.
inline std::vector<Result> run_all(std::uint64_t seed = default_seed) {
    std::vector<Result> out;
    auto timed = [&](const std::function<Result()>& f) {
        const auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = f();
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
            r.pass = false;
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(r);
    };
    timed([&] { return closed_form_equivalence(seed); });
    timed([] { return residual_order_at_root(); });
    appendix::Run run;
    {
        const auto t0 = std::chrono::steady_clock::now();
        run = appendix::run();
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        timed([&] { return reference_reproduction(run); });
        out.back().seconds += dt;
    }
    timed([&] { return series_overlap(run); });
    timed([] { return theorem_decay(); });
    timed([&] { return momentum_dichotomy(run); });
    timed([&] { return pole_expansion(seed); });
    timed([&] { return symmetry(run, seed); });
    timed([&] { return cross_formulation(run, seed); });
    return out;
}

}  // namespace p3root::acceptance
