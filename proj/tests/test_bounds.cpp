#include <cmath>

#include <gtest/gtest.h>

#include "common.hpp"
#include "p3root/bounds.hpp"
#include "p3root/kernels.hpp"

using namespace p3root;
using testing_util::Draws;

namespace {

struct Setup {
    RootAnchor a;
    EquationParams p;
};

Setup draw_setup(Draws& d) {
    return {RootAnchor(d.uniform(0.3, 3) * d.sign(), SignSwitch(d.sign()), d.uniform(-10, 10)),
            {d.uniform(-3, 3), d.uniform(-3, 3)}};
}

double at(const std::vector<double>& c, double x) {
    double r = 0;
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) r = r * x + c[k];
    return r;
}

struct KernelValues {
    double mu_lam, mu_mu, xi_lam, xi_mu;
};

KernelValues kernel_values(const Setup& s, double eta, double lh, double mh, double dl, double dm) {
    const kernel::Consts<double> c(s.a, s.p);
    const std::vector<double> L{lh}, M{mh}, DL{dl}, DM{dm};
    const int n = 8;
    return {std::abs(at(kernel::d_mu_lam(M, DM, c, n), eta)), std::abs(at(kernel::d_mu_mu(L, M, c, n), eta)),
            std::abs(at(kernel::d_xi_lam(L, M, DM, c, n), eta)), std::abs(at(kernel::d_xi_mu(L, M, DL, c, n), eta))};
}

// Admissible tuple: random interior point or, with probability 1/4, a corner.
KernelValues sample(const Setup& s, const BoundSet& b, double alpha, Draws& d) {
    const double e = std::abs(s.a.t0) * alpha;
    if (d.uniform(0, 1) < 0.25)
        return kernel_values(s, e * d.sign(), b.M_lambda * d.sign(), b.M_mu * d.sign(), 2 * b.M_lambda * d.sign(),
                             2 * b.M_mu * d.sign());
    return kernel_values(s, d.uniform(-e, e), d.uniform(-b.M_lambda, b.M_lambda), d.uniform(-b.M_mu, b.M_mu),
                         d.uniform(-2 * b.M_lambda, 2 * b.M_lambda), d.uniform(-2 * b.M_mu, 2 * b.M_mu));
}

// corners attain some majorants exactly, so allow rounding
void expect_dominated(const KernelValues& v, const BoundSet& b) {
    const double r = 1 + 1e-12;
    EXPECT_LE(v.mu_lam, b.B_mu_lambda * r);
    EXPECT_LE(v.mu_mu, b.B_mu_mu * r);
    EXPECT_LE(v.xi_lam, b.B_xi_lambda * r);
    EXPECT_LE(v.xi_mu, b.B_xi_mu * r);
}

}  // namespace

TEST(ConvergenceBounds, Invariants) {
    Draws d(71);
    for (int i = 0; i < 200; ++i) {
        const auto s = draw_setup(d);
        const double alpha = d.uniform(0.05, 0.95);
        const auto b = convergence_bounds(s.a, s.p, alpha);
        EXPECT_GE(b.beta, b.Q1);
        EXPECT_GE(b.beta, b.Q2);
        EXPECT_LE(b.alpha_tilde * b.beta, 0.5);
        EXPECT_LE(b.alpha_tilde, alpha);
        EXPECT_GT(b.alpha_tilde, 0.0);
        EXPECT_EQ(b.alpha, alpha);
        for (double x : {b.M_lambda, b.M_mu, b.B_mu_lambda, b.B_mu_mu, b.B_xi_lambda, b.B_xi_mu, b.Q1, b.Q2, b.beta})
            EXPECT_GE(x, 1.0);
    }
}

TEST(ConvergenceBounds, AlphaOutsideUnitInterval) {
    const RootAnchor a(1, SignSwitch(1), 0);
    for (double alpha : {0.0, 1.0, -0.2, 1.5, std::nan("")})
        EXPECT_THROW(convergence_bounds(a, {}, alpha), std::invalid_argument);
}

TEST(ConvergenceBounds, MDominatesStartingPair) {
    Draws d(72);
    for (int i = 0; i < 50; ++i) {
        const auto s = draw_setup(d);
        const double alpha = d.uniform(0.1, 0.9);
        const auto b = convergence_bounds(s.a, s.p, alpha);
        const auto ip = init_pair<double>(s.a, s.p);
        const double e = std::abs(s.a.t0) * alpha;
        for (int k = 0; k <= 1000; ++k) {
            const double dt = -e + 2 * e * k / 1000;
            EXPECT_LE(std::abs(at(ip.lam.coeffs, dt)), 0.5 * b.M_lambda * (1 + 1e-12));
            EXPECT_LE(std::abs(at(ip.mu.coeffs, dt)), 0.5 * b.M_mu * (1 + 1e-12));
        }
    }
}

TEST(ConvergenceBounds, MajorantsDominateSampledKernels) {
    Draws d(73);
    int count = 0;
    for (int i = 0; i < 20; ++i) {
        const auto s = draw_setup(d);
        const double alpha = d.uniform(0.1, 0.9);
        const auto b = convergence_bounds(s.a, s.p, alpha);
        for (int j = 0; j < 500; ++j, ++count) expect_dominated(sample(s, b, alpha, d), b);
    }
    EXPECT_EQ(count, 10000);
}

TEST(ConvergenceBounds, SmallerAlphaKeepsBoundsValid) {
    Draws d(74);
    for (int i = 0; i < 20; ++i) {
        const auto s = draw_setup(d);
        const double alpha = d.uniform(0.3, 0.9), smaller = alpha * d.uniform(0.1, 0.9);
        const auto b = convergence_bounds(s.a, s.p, alpha), bs = convergence_bounds(s.a, s.p, smaller);
        EXPECT_LE(bs.M_lambda, b.M_lambda * (1 + 1e-12));
        EXPECT_LE(bs.M_mu, b.M_mu * (1 + 1e-12));
        EXPECT_LE(bs.B_mu_lambda, b.B_mu_lambda);
        EXPECT_LE(bs.B_mu_mu, b.B_mu_mu);
        EXPECT_LE(bs.B_xi_lambda, b.B_xi_lambda);
        EXPECT_LE(bs.B_xi_mu, b.B_xi_mu);
        for (int j = 0; j < 200; ++j) expect_dominated(sample(s, b, smaller, d), b);
    }
}

TEST(AlgorithmIncrements, FirstIncrementAndMajorant) {
    Draws d(75);
    for (int i = 0; i < 6; ++i) {
        const auto s = draw_setup(d);
        const auto b = convergence_bounds(s.a, s.p, 0.5);
        const double r = std::abs(s.a.t0) * b.alpha_tilde;
        std::vector<double> ts;
        for (double f : {-0.9, -0.4, 0.2, 0.6, 0.9}) ts.push_back(s.a.t0 + f * r);
        const auto rep = algorithm_increments(s.a, s.p, 12, ts, b, 64);
        ASSERT_EQ(rep.samples.size(), 12 * ts.size());
        for (const auto& x : rep.samples) {
            if (x.n == 1) {
                EXPECT_LE(x.dlam, 0.5 * b.M_lambda);
                EXPECT_LE(x.dmu, 0.5 * b.M_mu);
                EXPECT_DOUBLE_EQ(x.bound_lam, 0.5 * b.M_lambda);
            }
            EXPECT_LE(x.dlam, x.bound_lam) << "n = " << x.n << " t = " << x.t;
            EXPECT_LE(x.dmu, x.bound_mu) << "n = " << x.n << " t = " << x.t;
        }
    }
}

TEST(AlgorithmIncrements, SampleOutsideDomain) {
    const RootAnchor a(1.0, SignSwitch(1), 0.5);
    const auto b = convergence_bounds(a, {0.3, 0.2}, 0.5);
    EXPECT_THROW(algorithm_increments(a, {0.3, 0.2}, 3, {1.0 + b.alpha_tilde * 1.01}, b), std::invalid_argument);
    EXPECT_NO_THROW(algorithm_increments(a, {0.3, 0.2}, 3, {1.0 + b.alpha_tilde * 0.99}, b));
}
