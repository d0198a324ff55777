#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "params.hpp"

namespace p3root {

namespace detail {
template <class T>
void require_nonzero(const T& v, const char* what) {
    if (v == T(0)) throw std::domain_error(std::string(what) + " must be nonzero");
}
}  // namespace detail

// Second derivative of lambda prescribed by the equation.
template <class T>
T rhs_scalar(const T& t, const T& lam, const T& lamdot, const EquationParams& p) {
    detail::require_nonzero(t, "t");
    detail::require_nonzero(lam, "lambda");
    const T chi0(p.chi0), chiinf(p.chi_inf);
    const T t2 = t * t;
    return lamdot * lamdot / lam - lamdot / t - chiinf * lam * lam / t2 + lam * lam * lam / t2 +
           chi0 / t - T(1) / lam;
}

// d/dt of rhs_scalar along solutions: F_t + F_lam * lamdot + F_lamdot * F.
template <class T>
T third_derivative(const T& t, const T& lam, const T& lamdot, const EquationParams& p) {
    const T f = rhs_scalar(t, lam, lamdot, p);
    const T chi0(p.chi0), chiinf(p.chi_inf);
    const T t2 = t * t, t3 = t2 * t, l2 = lam * lam;
    const T f_t = lamdot / t2 + T(2) * chiinf * l2 / t3 - T(2) * l2 * lam / t3 - chi0 / t2;
    const T f_l = -lamdot * lamdot / l2 - T(2) * chiinf * lam / t2 + T(3) * l2 / t2 + T(1) / l2;
    const T f_ld = T(2) * lamdot / lam - T(1) / t;
    return f_t + f_l * lamdot + f_ld * f;
}

inline double hamiltonian(const PhasePoint& pt, const EquationParams& p, SignSwitch s) {
    detail::require_nonzero(pt.t, "t");
    const double l = pt.lambda, m = pt.mu, sg = s;
    return (l * l * m * m - (l * l - l + sg * (p.chi0 * l - pt.t)) * m +
            0.5 * (p.chi_inf + sg * p.chi0 - 1.0) * l) /
           pt.t;
}

inline std::pair<double, double> hamilton_rhs(const PhasePoint& pt, const EquationParams& p,
                                              SignSwitch s) {
    detail::require_nonzero(pt.t, "t");
    const double l = pt.lambda, m = pt.mu, sg = s, t = pt.t;
    const double ldot = (sg * t - (sg * p.chi0 - 1.0) * l + (2.0 * m - 1.0) * l * l) / t;
    const double mdot = (-0.5 * (p.chi_inf + sg * p.chi0 - 1.0) + (sg * p.chi0 - 1.0 + 2.0 * l) * m -
                         2.0 * l * m * m) /
                        t;
    return {ldot, mdot};
}

// Momentum recovered from (lambda, lambda_dot); inverse of the first Hamilton equation.
inline double mu_from_lambda(double t, double lam, double lamdot, const EquationParams& p,
                             SignSwitch s) {
    detail::require_nonzero(lam, "lambda");
    const double sg = s;
    return ((sg * p.chi0 - 1.0) * lam + lam * lam + (lamdot - sg) * t) / (2.0 * lam * lam);
}

// Right-hand sides of t * d(uplam)/dt and t * d(mu)/dt for the cubic coefficient function
// uplam(t) of lambda = sgn dt + (sgn - chi0) dt^2 / (2 t0) + dt^3 uplam.
template <class T>
T w_lambda(const T& dt, const T& /*t*/, const T& uplam, const T& mu, const RootAnchor& a,
           const EquationParams& p) {
    detail::require_nonzero(dt, "dt");
    const T sg(int(a.sgn)), t0(a.t0), chi0(p.chi0);
    const T two_mu = T(2) * mu - T(1);
    const T q = (sg - chi0) / (T(2) * t0) + dt * uplam;
    return (sg * (chi0 * chi0 - T(1)) / (T(2) * t0) - T(1) + T(2) * mu - T(3) * t0 * uplam) / dt +
           (T(1) - sg * chi0) * two_mu / t0 - (T(2) + sg * chi0) * uplam +
           dt * two_mu * (T(2) * sg * uplam + q * q);
}

template <class T>
T w_mu(const T& dt, const T& /*t*/, const T& uplam, const T& mu, const RootAnchor& a,
       const EquationParams& p) {
    const T sg(int(a.sgn)), t0(a.t0), chi0(p.chi0), chiinf(p.chi_inf);
    return -(chiinf + sg * chi0 - T(1)) / T(2) - (T(1) - sg * chi0) * mu -
           T(2) * dt * (mu - T(1)) * mu * (sg + dt * (sg - chi0) / (T(2) * t0) + dt * dt * uplam);
}

// Change of variables between the two-constant and four-constant forms:
//   lambda4(s) = fun_scale * t^(-1/2) * lambda(t),  s = arg_scale * t^(1/2).
struct P3Conversion {
    EquationParams params;
    double fun_scale = 1.0;
    double arg_scale = 1.0;

    double to_p3_time(double t) const { return arg_scale * std::sqrt(t); }
    double from_p3_time(double s) const { return (s / arg_scale) * (s / arg_scale); }
    double to_p3_value(double t, double lam) const { return fun_scale * lam / std::sqrt(t); }
    double from_p3_value(double t, double lam4) const { return lam4 * std::sqrt(t) / fun_scale; }
};

inline P3Conversion convert_p3_to_p3prime(const P3FormParams& q) {
    if (q.gamma == 0.0 || q.delta == 0.0)
        throw std::invalid_argument("gamma and delta must be nonzero");
    if (q.delta >= 0.0 || q.gamma * q.delta >= 0.0)
        throw std::invalid_argument("real conversion requires delta < 0 and gamma*delta < 0");
    const double md = -q.delta, mgd = -q.gamma * q.delta;
    P3Conversion c;
    c.params.chi_inf = q.alpha / (2.0 * std::sqrt(mgd / md));
    c.params.chi0 = -q.beta / (2.0 * std::sqrt(md));
    // negative branch of (-delta)^(1/2)
    c.fun_scale = -std::pow(mgd, -0.25) * std::sqrt(md);
    c.arg_scale = 2.0 * std::pow(mgd, -0.25);
    return c;
}

// Inverse parameter relations for given gamma, delta.
inline P3FormParams convert_p3prime_to_p3(const EquationParams& p, double gamma, double delta) {
    if (gamma == 0.0 || delta == 0.0) throw std::invalid_argument("gamma and delta must be nonzero");
    if (delta >= 0.0 || gamma * delta >= 0.0)
        throw std::invalid_argument("real conversion requires delta < 0 and gamma*delta < 0");
    const double md = -delta, mgd = -gamma * delta;
    return {2.0 * std::sqrt(mgd / md) * p.chi_inf, -2.0 * std::sqrt(md) * p.chi0, gamma, delta};
}

// Right-hand side of the four-constant form.
inline double rhs_p3(double s, double lam, double lamdot, const P3FormParams& q) {
    return lamdot * lamdot / lam - lamdot / s + (q.alpha * lam * lam + q.beta) / s +
           q.gamma * lam * lam * lam + q.delta / lam;
}

}  // namespace p3root
