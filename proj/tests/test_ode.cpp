#include <cmath>

#include <gtest/gtest.h>

#include "p3root/appendix.hpp"
#include "p3root/ode.hpp"

using namespace p3root;

namespace {

const appendix::Run& reference_run() {
    static const appendix::Run r = appendix::run();
    return r;
}

DtSeries<double> deep_series(const RootAnchor& a, const EquationParams& p, int order = 24) {
    return assemble_lambda(run_scheme<double>(a, p, order).lam, p);
}

// Solution launched from the root series of a at t0 + off.
DenseSolution from_series(const RootAnchor& a, const EquationParams& p, double off, double lo, double hi,
                          const OdeOptions& o = {}) {
    const auto s = deep_series(a, p);
    return integrate(p, a.t0 + off, series_eval(s, off), series_eval_deriv(s, off), lo, hi, o);
}

// Least-squares polynomial fit of lambda and lambda_dot samples; returns Taylor coefficients at t0.
std::vector<double> taylor_fit(const DenseSolution& sol, double t0, const std::vector<double>& ts, int deg) {
    double w = 0;
    for (double t : ts) w = std::max(w, std::abs(t - t0));
    Eigen::MatrixXd A(2 * ts.size(), deg + 1);
    Eigen::VectorXd b(2 * ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double x = (ts[i] - t0) / w;
        const auto [l, ld] = sol.eval(ts[i]);
        for (int k = 0; k <= deg; ++k) {
            A(2 * i, k) = std::pow(x, k);
            A(2 * i + 1, k) = k == 0 ? 0.0 : k * std::pow(x, k - 1) / w;
        }
        b(2 * i) = l;
        b(2 * i + 1) = ld;
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    std::vector<double> out(deg + 1);
    for (int k = 0; k <= deg; ++k) out[k] = c(k) / std::pow(w, k);
    return out;
}

}  // namespace

TEST(Integrate, SquareRootSolution) {
    const EquationParams p{0.7, 0.7};
    for (int s : {1, -1}) {
        const auto sol = integrate(p, 4.0, 2.0 * s, 0.25 * s, 1.0, 9.0);
        EXPECT_DOUBLE_EQ(sol.lo(), 1.0);
        EXPECT_DOUBLE_EQ(sol.hi(), 9.0);
        for (double t : linspace(1, 9, 101)) {
            EXPECT_NEAR(sol.lambda(t), s * std::sqrt(t), 1e-8);
            EXPECT_NEAR(sol.lambda_dot(t), s * 0.5 / std::sqrt(t), 1e-8);
        }
        EXPECT_TRUE(find_roots(sol).empty());
        EXPECT_TRUE(sol.crossings.empty());
        EXPECT_FALSE(sol.pole_lo || sol.pole_hi);
    }
}

TEST(Integrate, MeshAndInterpolantContinuity) {
    const auto& sol = reference_run().sol;
    ASSERT_GT(sol.mesh.size(), 10u);
    for (std::size_t i = 0; i + 1 < sol.mesh.size(); ++i) EXPECT_LT(sol.mesh[i].t, sol.mesh[i + 1].t);
    for (const auto& n : sol.mesh) {
        if (n.t <= sol.lo() || n.t >= sol.hi()) continue;
        const double h = 1e-12 * n.t;
        const auto [l1, d1] = sol.eval(n.t - h);
        const auto [l2, d2] = sol.eval(n.t + h);
        EXPECT_NEAR(l1, n.lam, 1e-9 * std::max(1.0, std::abs(n.lam)));
        EXPECT_NEAR(l2, n.lam, 1e-9 * std::max(1.0, std::abs(n.lam)));
        EXPECT_NEAR(d1, d2, 1e-6 * std::max(1.0, std::abs(n.lamdot)));
    }
    EXPECT_THROW(sol.eval(sol.hi() + 1.0), std::out_of_range);
}

TEST(Integrate, Reversibility) {
    const auto& p = appendix::params;
    const OdeOptions o;
    const double tc = appendix::tc, lc = appendix::lam_c;
    const auto fwd = integrate(p, tc, lc, appendix::lamdot_c, tc, 1.3, o);
    ASSERT_TRUE(fwd.crossings.empty());
    const auto [l1, d1] = fwd.eval(1.3);
    const auto back = integrate(p, 1.3, l1, d1, tc, 1.3, o);
    EXPECT_NEAR(back.lambda(tc), lc, 10 * o.rel_tol);
}

TEST(Integrate, SeriesInitialDataStaysOnSeries) {
    const std::vector<std::pair<EquationParams, RootAnchor>> cases{
        {appendix::params, RootAnchor(0.511115, SignSwitch(1), -9.01149)},
        {{0.3, -0.4}, RootAnchor(1.2, SignSwitch(-1), 0.8)},
        {{-1.5, 2.0}, RootAnchor(-2.0, SignSwitch(1), 0.25)},
    };
    for (const auto& [p, a] : cases) {
        const double e = 0.05 * std::abs(a.t0);
        const auto sol = from_series(a, p, 0.01, a.t0 - e, a.t0 + e);
        const auto s = deep_series(a, p);
        for (double t : linspace(a.t0 - e, a.t0 + e, 401))
            EXPECT_NEAR(sol.lambda(t), series_eval(s, t - a.t0), 1e-6) << "t = " << t;
        EXPECT_LE(compare_series(sol, s, a.t0 - 0.01, a.t0 + 0.01), 1e-8);
        ASSERT_EQ(sol.crossings.size(), 1u);
        EXPECT_NEAR(sol.crossings[0].t0, a.t0, 1e-10);
        EXPECT_EQ(sol.crossings[0].sgn, int(a.sgn));
    }
}

TEST(FindRoots, ReferenceSolution) {
    const auto& run = reference_run();
    ASSERT_EQ(run.roots.size(), appendix::roots.size());
    for (std::size_t i = 0; i < run.roots.size(); ++i) {
        const auto& r = run.roots[i];
        EXPECT_NEAR(r.t0, appendix::roots[i], 1e-3);
        EXPECT_LE(std::abs(run.sol.lambda(r.t0)), 1e-12);
        EXPECT_NEAR(std::abs(run.sol.lambda_dot(r.t0)), 1.0, 1e-3);
        EXPECT_EQ(r.sgn, run.sol.lambda_dot(r.t0) > 0 ? 1 : -1);
        if (i > 0) EXPECT_EQ(r.sgn, -run.roots[i - 1].sgn);
    }
    EXPECT_EQ(run.roots[4].sgn, 1);
    EXPECT_EQ(run.roots[5].sgn, -1);
    EXPECT_NEAR(run.roots[4].lam3, appendix::lam3_plus, 0.01 * std::abs(appendix::lam3_plus));
    EXPECT_NEAR(run.roots[5].lam3, appendix::lam3_minus, 0.01 * std::abs(appendix::lam3_minus));
}

TEST(FindRoots, RootFreeInterval) {
    const auto sol = integrate(appendix::params, appendix::tc, appendix::lam_c, appendix::lamdot_c, 0.6, 1.3);
    EXPECT_TRUE(find_roots(sol).empty());
}

TEST(Lam3AtRoot, RecoversSeriesAnchor) {
    const std::vector<std::pair<EquationParams, RootAnchor>> cases{
        {{0.3, -0.4}, RootAnchor(1.2, SignSwitch(-1), 0.8)},
        {{-1.5, 2.0}, RootAnchor(-2.0, SignSwitch(1), 0.25)},
        {{2.2, 0.9}, RootAnchor(0.7, SignSwitch(1), -3.0)},
    };
    for (const auto& [p, a] : cases) {
        const double e = 0.2 * std::abs(a.t0);
        const auto sol = from_series(a, p, 0.05 * std::abs(a.t0), a.t0 - e, a.t0 + e);
        const auto roots = find_roots(sol);
        ASSERT_EQ(roots.size(), 1u);
        EXPECT_NEAR(roots[0].t0, a.t0, 1e-10);
        EXPECT_NEAR(lam3_at_root(sol, roots[0], p), a.lam3, 1e-3 * std::abs(a.lam3));
    }
}

TEST(Lam3AtRoot, TooFewNodes) {
    const auto sol = integrate({0.7, 0.7}, 4.0, 2.0, 0.25, 3.99, 4.01);
    EXPECT_THROW(lam3_at_root(sol, {4.0, 1, 0}, {0.7, 0.7}), std::runtime_error);
}

TEST(ResidualScan, ReferenceSolutionAwayFromRoots) {
    const auto& sol = reference_run().sol;
    double mx = 0;
    int used = 0;
    for (double t : linspace(0.02, 1.99, 4000)) {
        if (std::abs(sol.lambda(t)) < 1e-2) continue;
        mx = std::max(mx, std::abs(residual_scan(sol, {t}, 1e-5 * t).front().second));
        ++used;
    }
    EXPECT_GT(used, 3000);
    EXPECT_LE(mx, 1e-4);
}

TEST(ResidualScan, ShrinksWithTolerance) {
    auto max_res = [](double rtol) {
        OdeOptions o;
        o.rel_tol = rtol;
        o.abs_tol = rtol * 1e-2;
        const auto sol = integrate(appendix::params, appendix::tc, appendix::lam_c, appendix::lamdot_c, 0.6, 1.3, o);
        double mx = 0;
        for (const auto& [t, r] : residual_scan(sol, linspace(0.61, 1.29, 2000), 1e-4)) mx = std::max(mx, std::abs(r));
        return mx;
    };
    const double coarse = max_res(1e-5), fine = max_res(1e-6);
    EXPECT_GE(coarse / fine, 5.0) << coarse << " " << fine;
}

TEST(CompareSeries, WindowOutsideSpan) {
    const auto& sol = reference_run().sol;
    const auto s = deep_series(RootAnchor(0.511115, SignSwitch(1), -9.01149), appendix::params, 5);
    EXPECT_THROW(compare_series(sol, s, 0.001, 0.6), std::out_of_range);
}

TEST(RootCrossing, RefitMatchesFamilyCoefficients) {
    const auto& run = reference_run();
    ASSERT_EQ(run.sol.crossings.size(), 6u);
    for (const auto& c : run.sol.crossings) {
        // far side only: the crossing may leave a small lam3 jump between the two sides
        const double w = 0.1 * c.t0, gap = std::abs(c.t_exit - c.t0), side = c.t_exit > c.t0 ? 1.0 : -1.0;
        std::vector<double> ts;
        for (double x : linspace(gap * 1.5, w, 30)) ts.push_back(c.t0 + side * x);
        const auto fit = taylor_fit(run.sol, c.t0, ts, 8);
        EXPECT_NEAR(fit[1], c.sgn, 1e-6) << "root " << c.t0;
        EXPECT_NEAR(fit[2], (c.sgn - appendix::params.chi0) / (2 * c.t0), 1e-6) << "root " << c.t0;
    }
}

TEST(SymmetryCheck, ReferenceSolutionAndInvolution) {
    const auto& run = reference_run();
    const auto& p = appendix::params;
    const auto grid = linspace(0.6, 1.3, 141);
    EXPECT_LE(symmetry_check(run.sol, p, grid), 1e-6);

    const double ta = 0.95;
    const auto [l, ld] = run.sol.eval(ta);
    const auto img = integrate(swapped(p), ta, ta / l, (l - ta * ld) / (l * l), 0.6, 1.3);
    EXPECT_LE(symmetry_check(img, swapped(p), grid), 1e-6);
    double dev = 0;
    for (double t : grid) dev = std::max(dev, std::abs(t / img.lambda(t) - run.sol.lambda(t)));
    EXPECT_LE(dev, 1e-6);
}

TEST(SymmetryCheck, EqualParametersSelfMap) {
    const EquationParams p{0.45, 0.45};
    EXPECT_EQ(swapped(p).chi0, p.chi0);
    EXPECT_EQ(swapped(p).chi_inf, p.chi_inf);
    const auto sol = integrate(p, 1.0, 0.8, 0.3, 0.5, 2.0);
    const auto grid = linspace(0.6, 1.9, 101);
    double minabs = 1e300;
    for (double t : grid) minabs = std::min(minabs, std::abs(sol.lambda(t)));
    ASSERT_GT(minabs, 1e-3);
    EXPECT_LE(symmetry_check(sol, p, grid), 1e-6);
}

TEST(SymmetryCheck, GridOnRootThrows) {
    const auto& run = reference_run();
    EXPECT_THROW(symmetry_check(run.sol, appendix::params, {0.45, run.roots[4].t0, 0.6}), std::domain_error);
}

TEST(Hamiltonian, MatchesScalarBetweenRoots) {
    const EquationParams p{0.3, -0.4};
    const RootAnchor a(1.2, SignSwitch(-1), 0.8);
    const auto sol = from_series(a, p, 0.2, 0.9, 1.5);
    const double t1 = 1.45;
    const auto [l, ld] = sol.eval(t1);
    for (int s : {1, -1}) {
        const auto h = integrate_hamiltonian(p, SignSwitch(s), t1, l, mu_from_lambda(t1, l, ld, p, SignSwitch(s)), 1.25, 1.5);
        for (double t : linspace(1.25, 1.5, 101)) EXPECT_NEAR(h.eval(t)[0], sol.lambda(t), 1e-6);
    }
}

TEST(Integrate, ArgumentErrors) {
    const EquationParams p{0.2, 0.1};
    EXPECT_THROW(integrate(p, 1.0, 1.0, 0.0, 2.0, 1.0), std::invalid_argument);
    EXPECT_THROW(integrate(p, 3.0, 1.0, 0.0, 1.0, 2.0), std::invalid_argument);
    EXPECT_THROW(integrate(p, 1.0, 1.0, 0.0, -1.0, 2.0), std::invalid_argument);
    EXPECT_THROW(integrate(p, 1.0, 0.0, 1.0, 0.5, 2.0), std::invalid_argument);
}
