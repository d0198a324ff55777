#pragma once

#include <algorithm>
#include <vector>

#include "params.hpp"
#include "series.hpp"

namespace p3root {

// Kernel functions depend on sigma and dt only through eta = sigma*dt, so they are
// built as eta-polynomials (the argument series' coefficients reinterpreted in eta)
// and lifted to SigmaDtPoly at the end.
namespace kernel {

template <class T>
struct Consts {
    T sg, t0, chi0, chiinf;
    Consts(const RootAnchor& a, const EquationParams& p)
        : sg(int(a.sgn)), t0(a.t0), chi0(p.chi0), chiinf(p.chi_inf) {}
    // sgn - eta (chi0 - sgn)/(2 t0) as a coefficient vector
    std::vector<T> drift() const { return {sg, -(chi0 - sg) / (T(2) * t0)}; }
    // (chi0 - sgn)/(2 t0) - eta * lam
    std::vector<T> quad_base(const std::vector<T>& lam) const {
        return poly::add_const(poly::scale(poly::shift(lam, 1), T(-1)), (chi0 - sg) / (T(2) * t0));
    }
};

template <class T>
std::vector<T> omega_mu(const std::vector<T>& lam, const std::vector<T>& mu, const Consts<T>& c, int n) {
    using namespace poly;
    const auto inner = add(c.drift(), shift(lam, 2));
    const auto one_minus = add_const(scale(mu, T(-1)), T(1));
    const auto tail = mul(shift(scale(one_minus, T(2)), 1), inner, n);
    return mul(mu, add_const(tail, c.sg * c.chi0), n);
}

template <class T>
std::vector<T> omega_lambda(const std::vector<T>& lam, const std::vector<T>& mu, const Consts<T>& c, int n) {
    using namespace poly;
    const auto tm = add_const(scale(mu, T(2)), T(-1));
    auto r = add_const(scale(mu, T(2)), c.sg * (c.chi0 * c.chi0 - T(1)) / (T(2) * c.t0) - T(1));
    const auto lin = add(scale(lam, c.chi0 - T(2) * c.sg), scale(tm, (c.chi0 - c.sg) / c.t0));
    r = add(r, scale(shift(lin, 1), -c.sg));
    const auto q = c.quad_base(lam);
    r = add(r, shift(mul(tm, add(scale(lam, T(2) * c.sg), mul(q, q, n)), n), 2));
    return trunc(r, n);
}

template <class T>
std::vector<T> omega_xi(const std::vector<T>& lam, const std::vector<T>& mu, const Consts<T>& c, int n) {
    using namespace poly;
    const auto tm = add_const(scale(mu, T(2)), T(-1));
    auto r = add_const(add(scale(mu, T(-8) * c.chi0), scale(lam, T(-3) * (c.chi0 - T(2) * c.sg) * c.t0)),
                       T(3) * (c.chi0 - c.sg));
    r = scale(r, c.sg);
    const auto q = c.quad_base(lam);
    r = add(r, scale(shift(mul(tm, add(scale(lam, T(2) * c.sg), mul(q, q, n)), n), 1), T(3) * c.t0));
    const auto inner = add(c.drift(), shift(lam, 2));
    const auto mm1 = mul(add_const(mu, T(-1)), mu, n);
    r = add(r, scale(shift(mul(mm1, inner, n), 1), T(4)));
    return trunc(r, n);
}

// Factors of the increment decompositions
//   dOmega_mu = dlam * A_mu_lam[mu_hat, dmu] + dmu * A_mu_mu[lam_hat, mu_hat]
//   dOmega_xi = dlam * A_xi_lam[lam_hat, mu_hat, dmu] + dmu * A_xi_mu[lam_hat, mu_hat, dlam]
// where hats are midpoints of the two argument pairs and d* their differences.
template <class T>
std::vector<T> d_mu_lam(const std::vector<T>& mu_hat, const std::vector<T>& dmu, const Consts<T>&, int n) {
    using namespace poly;
    const auto tm = add_const(scale(mu_hat, T(2)), T(-1));
    auto r = add_const(add(mul(tm, tm, n), mul(dmu, dmu, n)), T(-1));
    return trunc(scale(shift(r, 3), T(-1) / T(2)), n);
}

template <class T>
std::vector<T> d_mu_mu(const std::vector<T>& lam_hat, const std::vector<T>& mu_hat, const Consts<T>& c, int n) {
    using namespace poly;
    const auto tm = add_const(scale(mu_hat, T(2)), T(-1));
    const auto inner = add(c.drift(), shift(lam_hat, 2));
    return trunc(add_const(scale(shift(mul(tm, inner, n), 1), T(-2)), c.sg * c.chi0), n);
}

template <class T>
std::vector<T> d_xi_lam(const std::vector<T>& lam_hat, const std::vector<T>& mu_hat, const std::vector<T>& dmu,
                        const Consts<T>& c, int n) {
    using namespace poly;
    const auto tm = add_const(scale(mu_hat, T(2)), T(-1));
    const auto inner = add(c.drift(), shift(lam_hat, 2));
    auto r = scale(shift(mul(tm, inner, n), 1), T(6) * c.t0);
    const auto quad = add(mul(mu_hat, add_const(mu_hat, T(-1)), n), scale(mul(dmu, dmu, n), T(1) / T(4)));
    r = add(r, scale(shift(quad, 3), T(4)));
    return trunc(add_const(r, T(-3) * c.sg * c.t0 * (c.chi0 - T(2) * c.sg)), n);
}

template <class T>
std::vector<T> d_xi_mu(const std::vector<T>& lam_hat, const std::vector<T>& mu_hat, const std::vector<T>& dlam,
                       const Consts<T>& c, int n) {
    using namespace poly;
    const auto inner = add(c.drift(), shift(lam_hat, 2));
    const auto lead = add_const(add(scale(mu_hat, T(2)), scale(lam_hat, T(3) * c.t0)), T(-1));
    auto r = scale(shift(mul(lead, inner, n), 1), T(4));
    const T a = c.chi0 - c.sg;
    r = add(r, std::vector<T>{T(0), T(3) * a * a / (T(2) * c.t0)});
    const auto sq = add(mul(lam_hat, lam_hat, n), scale(mul(dlam, dlam, n), T(-1) / T(4)));
    r = add(r, scale(shift(sq, 3), T(-6) * c.t0));
    return trunc(add_const(r, T(-8) * c.sg * c.chi0), n);
}

template <class T>
int full_degree(const DtSeries<T>& lam, const DtSeries<T>& mu) {
    return 2 * (lam.degree() + mu.degree()) + 6;
}

}  // namespace kernel

template <class T>
SigmaDtPoly<T> kernel_omega_lambda(const DtSeries<T>& lam, const DtSeries<T>& mu, const RootAnchor& a,
                                   const EquationParams& p, int max_degree = -1) {
    check_same_anchor(lam.anchor, mu.anchor);
    check_same_anchor(lam.anchor, a);
    const int n = max_degree < 0 ? kernel::full_degree(lam, mu) : max_degree;
    return SigmaDtPoly<T>::from_eta(kernel::omega_lambda(lam.coeffs, mu.coeffs, kernel::Consts<T>(a, p), n));
}

template <class T>
SigmaDtPoly<T> kernel_omega_mu(const DtSeries<T>& lam, const DtSeries<T>& mu, const RootAnchor& a,
                               const EquationParams& p, int max_degree = -1) {
    check_same_anchor(lam.anchor, mu.anchor);
    check_same_anchor(lam.anchor, a);
    const int n = max_degree < 0 ? kernel::full_degree(lam, mu) : max_degree;
    return SigmaDtPoly<T>::from_eta(kernel::omega_mu(lam.coeffs, mu.coeffs, kernel::Consts<T>(a, p), n));
}

template <class T>
SigmaDtPoly<T> kernel_omega_xi(const DtSeries<T>& lam, const DtSeries<T>& mu, const RootAnchor& a,
                               const EquationParams& p, int max_degree = -1) {
    check_same_anchor(lam.anchor, mu.anchor);
    check_same_anchor(lam.anchor, a);
    const int n = max_degree < 0 ? kernel::full_degree(lam, mu) : max_degree;
    return SigmaDtPoly<T>::from_eta(kernel::omega_xi(lam.coeffs, mu.coeffs, kernel::Consts<T>(a, p), n));
}

// 2 Omega_mu + sigma^3 Omega_xi
template <class T>
SigmaDtPoly<T> kernel_omega_lambda_hat(const DtSeries<T>& lam, const DtSeries<T>& mu, const RootAnchor& a,
                                       const EquationParams& p, int max_degree = -1) {
    check_same_anchor(lam.anchor, mu.anchor);
    check_same_anchor(lam.anchor, a);
    const int n = max_degree < 0 ? kernel::full_degree(lam, mu) : max_degree;
    const kernel::Consts<T> c(a, p);
    auto r = SigmaDtPoly<T>::from_eta(kernel::omega_mu(lam.coeffs, mu.coeffs, c, n));
    r *= T(2);
    r += SigmaDtPoly<T>::from_eta(kernel::omega_xi(lam.coeffs, mu.coeffs, c, n), 3);
    return r;
}

}  // namespace p3root
