#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "equation.hpp"
#include "kernels.hpp"
#include "series.hpp"

namespace p3root {

template <class T>
T mu_at_root(const RootAnchor& a, const EquationParams& p) {
    const T sg(int(a.sgn)), t0(a.t0), chi0(p.chi0);
    return (T(1) + sg * (T(1) - chi0 * chi0) / (T(2) * t0) + T(3) * t0 * T(a.lam3)) / T(2);
}

namespace detail {
template <class T>
T shifted_chi(const RootAnchor& a, const EquationParams& p) {
    return T(p.chi_inf) + T(int(a.sgn)) * T(p.chi0) - T(1);
}
}  // namespace detail

template <class T>
struct SeriesPair {
    DtSeries<T> lam;
    DtSeries<T> mu;
};

// Starting pair of the difference iteration: mu1 is linear, lam1 of degree five.
template <class T>
SeriesPair<T> init_pair(const RootAnchor& a, const EquationParams& p) {
    const T sg(int(a.sgn)), t0(a.t0), c0(p.chi0), ci(p.chi_inf), L(a.lam3);
    const T K = detail::shifted_chi<T>(a, p);
    const T A = sg * (c0 * c0 - T(1)) / (T(2) * t0) - T(3) * t0 * L;
    const T d = T(1) / t0;
    std::vector<T> mu1{mu_at_root<T>(a, p), -K / (T(2) * t0)};
    std::vector<T> lam1(6);
    lam1[0] = L;
    lam1[1] = -ci / (T(4) * t0) * d;
    lam1[2] = (sg * (T(1) - (sg * c0 * (c0 - sg) / t0 - T(3) * t0 * L) * A) / T(10) + K * sg * c0 / (T(10) * t0)) *
              d * d;
    lam1[3] = (-K * ((c0 - sg) * (c0 - sg) / (T(4) * t0) + (c0 * c0 - T(1)) / (T(3) * t0) - T(2) * sg * t0 * L) / T(6) +
               (c0 - sg) * (A * A - T(1)) / T(36)) *
              d * d * d;
    lam1[4] = (K * (c0 - sg) * A / T(28) - K * K * sg / T(28)) * d * d * d * d;
    lam1[5] = K * K * (c0 - sg) / T(80) * d * d * d * d * d;
    return {DtSeries<T>(a, std::move(lam1), 0), DtSeries<T>(a, std::move(mu1), 0)};
}

template <class T>
DtSeries<T> step_mu(const DtSeries<T>& lam, const DtSeries<T>& mu, const RootAnchor& a, const EquationParams& p) {
    check_same_anchor(lam.anchor, mu.anchor);
    check_same_anchor(lam.anchor, a);
    const int v = std::min(mu.valid_order + 1, lam.valid_order + 4);
    const kernel::Consts<T> c(a, p);
    const int n = std::max(v - 1, 0);
    auto integral = sigma_average(SigmaDtPoly<T>::from_eta(kernel::omega_mu(lam.coeffs, mu.coeffs, c, n)), 0);
    auto inner = poly::add(poly::trunc(poly::scale(mu.coeffs, T(-1)), n), integral.coeffs);
    inner = poly::add_const(inner, -detail::shifted_chi<T>(a, p) / T(2));
    auto out = poly::add_const(poly::scale(poly::shift(inner, 1), T(1) / c.t0), mu_at_root<T>(a, p));
    return DtSeries<T>(a, poly::trunc(out, v), v);
}

template <class T>
DtSeries<T> step_lambda(const DtSeries<T>& lam, const DtSeries<T>& mu, const RootAnchor& a,
                        const EquationParams& p) {
    check_same_anchor(lam.anchor, mu.anchor);
    check_same_anchor(lam.anchor, a);
    const int v = std::min(lam.valid_order + 1, mu.valid_order);
    const kernel::Consts<T> c(a, p);
    auto integral = sigma_average(SigmaDtPoly<T>::from_eta(kernel::omega_lambda(lam.coeffs, mu.coeffs, c, v)), 2);
    auto out = poly::add(poly::scale(poly::shift(lam.coeffs, 1), T(-1)), integral.coeffs);
    return DtSeries<T>(a, poly::trunc(poly::scale(out, T(1) / c.t0), v), v);
}

namespace detail {
template <class T>
std::vector<T> omega_hat_average(const std::vector<T>& lam, const std::vector<T>& mu, const kernel::Consts<T>& c,
                                 int n) {
    auto q = SigmaDtPoly<T>::from_eta(kernel::omega_mu(lam, mu, c, n));
    q *= T(2);
    q += SigmaDtPoly<T>::from_eta(kernel::omega_xi(lam, mu, c, n), 3);
    return sigma_average(q, 0).coeffs;
}
}  // namespace detail

template <class T>
DtSeries<T> step_lambda_refined(const DtSeries<T>& lam, const DtSeries<T>& mu, const RootAnchor& a,
                                const EquationParams& p) {
    check_same_anchor(lam.anchor, mu.anchor);
    check_same_anchor(lam.anchor, a);
    const int v = std::min(lam.valid_order + 1, mu.valid_order);
    const kernel::Consts<T> c(a, p);
    const int n = std::max(v - 1, 0);
    auto hat = poly::trunc(detail::omega_hat_average(lam.coeffs, mu.coeffs, c, n), n);
    auto inner = poly::add(poly::trunc(lam.coeffs, n), poly::scale(hat, T(-1) / (T(3) * c.t0)));
    inner = poly::add_const(inner, detail::shifted_chi<T>(a, p) / (T(4) * c.t0));
    auto out = poly::add_const(poly::scale(poly::shift(inner, 1), T(-1) / c.t0), T(a.lam3));
    return DtSeries<T>(a, poly::trunc(out, v), v);
}

template <class T>
DtSeries<T> xi_series(const DtSeries<T>& lam, const DtSeries<T>& mu, const RootAnchor& a, const EquationParams& p) {
    check_same_anchor(lam.anchor, mu.anchor);
    check_same_anchor(lam.anchor, a);
    const int v = std::min(lam.valid_order, mu.valid_order);
    const kernel::Consts<T> c(a, p);
    auto integral = sigma_average(SigmaDtPoly<T>::from_eta(kernel::omega_xi(lam.coeffs, mu.coeffs, c, v)), 3);
    auto lin = poly::add(poly::scale(poly::trunc(mu.coeffs, v), T(2)),
                         poly::scale(poly::trunc(lam.coeffs, v), T(-3) * c.t0));
    lin = poly::add_const(lin, detail::shifted_chi<T>(a, p) / T(4));
    auto out = poly::scale(poly::add(lin, integral.coeffs), T(-1) / c.t0);
    return DtSeries<T>(a, poly::trunc(out, v), v);
}

// Alternates four mu updates and four lambda updates until the cubic coefficient
// function is trusted through order n.
template <class T>
SeriesPair<T> run_scheme(const RootAnchor& a, const EquationParams& p, int n) {
    if (n < 0) throw std::invalid_argument("target order must be nonnegative");
    DtSeries<T> lam(a, {T(a.lam3)}, 0);
    DtSeries<T> mu(a, {mu_at_root<T>(a, p)}, 0);
    while (lam.valid_order < n) {
        for (int i = 0; i < 4; ++i) mu = step_mu(lam, mu, a, p);
        for (int i = 0; i < 4; ++i) lam = step_lambda(lam, mu, a, p);
    }
    return {truncated(lam, n), truncated(mu, std::min(mu.valid_order, n))};
}

// lambda = sgn dt + (sgn - chi0) dt^2/(2 t0) + dt^3 lam3(dt)
template <class T>
DtSeries<T> assemble_lambda(const DtSeries<T>& lam3, const EquationParams& p) {
    const RootAnchor& a = lam3.anchor;
    const T sg(int(a.sgn));
    std::vector<T> c(lam3.coeffs.size() + 3, T(0));
    c[1] = sg;
    c[2] = (sg - T(p.chi0)) / (T(2) * T(a.t0));
    for (std::size_t k = 0; k < lam3.coeffs.size(); ++k) c[k + 3] = lam3.coeffs[k];
    return DtSeries<T>(a, std::move(c), lam3.valid_order + 3);
}

// Closed form of the order-5 cubic coefficient function.
template <class T>
DtSeries<T> lam6_reference(const RootAnchor& a, const EquationParams& p) {
    const T s(int(a.sgn)), t0(a.t0), c0(p.chi0), ci(p.chi_inf), L(a.lam3);
    const T t2 = t0 * t0, t3 = t2 * t0, t4 = t3 * t0, t5 = t4 * t0, t6 = t5 * t0;
    std::vector<T> c(6);
    c[0] = L;
    c[1] = -(ci + (s * c0 + T(2)) * t0 * L) / (T(4) * t2);
    c[2] = s * (T(2) + T(3) * ci * (c0 + s) / t0 + (T(5) * c0 + T(7) * s) * L + T(6) * t2 * L * L) / (T(20) * t2);
    c[3] = -(ci * ((c0 + s) * (T(9) * c0 + T(46) * s) / t0 + T(90) * s * t0 * L) + T(2) * (T(18) * c0 + T(7) * s) +
             T(9) * s * (T(9) * c0 + T(11) * s) * L + T(18) * (c0 + T(9) * s) * t2 * L * L) /
           (T(360) * t3);
    c[4] = (T(90) * s * t0 * ci * ci + ci * ((c0 + s) * (T(91) * c0 + T(284) * s) + T(18) * (T(18) * c0 + T(53) * s) * t2 * L) +
            T(2) * (T(97) * c0 + s * (T(45) * c0 * c0 + T(53))) * t0 +
            T(36) * (T(11) * t2 + T(14) * s * c0 + T(16)) * t0 * L + T(18) * (T(14) * c0 + T(73) * s) * t3 * L * L +
            T(108) * t5 * L * L * L) /
           (T(2520) * t5);
    c[5] = -(T(18) * (T(33) * c0 + T(65) * s) * t0 * ci * ci +
             ci * ((c0 + s) * (T(830) * c0 + T(2047) * s) + T(756) * t2 +
                   T(36) * s * (T(9) * c0 * c0 + T(140) * s * c0 + T(257)) * t2 * L + T(2268) * t4 * L * L) +
             T(2) * (T(45) * c0 * c0 * c0 + T(423) * s * c0 * c0 + T(761) * c0 + T(388) * s) * t0 +
             T(36) * (T(100) * s * c0 + T(110) + T(27) * (T(3) * s * c0 + T(4)) * t2) * t0 * L +
             T(18) * (T(157) * c0 + T(620) * s) * t3 * L * L + T(108) * (s * c0 + T(20)) * t5 * L * L * L) /
           (T(20160) * t6);
    return DtSeries<T>(a, std::move(c), 5);
}

}  // namespace p3root
