#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fit.hpp"
#include "scheme.hpp"

namespace p3root {

// residue / dt + sum_k regular[k] dt^k around a simple pole at t0.
template <class T>
struct LaurentExpansion {
    double t0 = 1.0;
    int sgn = 1;
    T residue = T(0);
    std::vector<T> regular;
    int valid_order = 0;
    double lam3_swapped = 0.0;  // free parameter of the swapped-problem root expansion
    EquationParams params;

    T d(int k) const { return k >= 0 && k < static_cast<int>(regular.size()) ? regular[k] : T(0); }
};

// t / lambda_root as a Laurent series, for lambda_root with a simple zero at its anchor.
template <class T>
LaurentExpansion<T> series_reciprocal_times_t(const DtSeries<T>& lam_root) {
    using std::abs;
    const T c1 = lam_root.coeff(1);
    if (lam_root.coeff(0) != T(0) || abs(abs(c1) - T(1)) > T(1e-12))
        throw std::invalid_argument("series does not have a simple root with unit slope at its anchor");
    if (lam_root.valid_order < 2) throw std::invalid_argument("root series must be trusted through order 2");
    const int v = lam_root.valid_order - 2;
    std::vector<T> u(lam_root.coeffs.begin() + 1, lam_root.coeffs.end());
    const auto inv = poly::reciprocal(u, v + 1);
    const T t0(lam_root.anchor.t0);
    LaurentExpansion<T> le;
    le.t0 = lam_root.anchor.t0;
    le.sgn = lam_root.anchor.sgn;
    le.residue = t0 * inv[0];
    le.regular.resize(v + 1);
    for (int k = 0; k <= v; ++k) le.regular[k] = t0 * inv[k + 1] + inv[k];
    le.valid_order = v;
    le.lam3_swapped = lam_root.anchor.lam3;
    return le;
}

// Pole expansion of the solution whose reciprocal image (t/lambda, chi0 <-> chi_inf) has
// the root described by `a`.
template <class T>
LaurentExpansion<T> root_to_pole(const RootAnchor& a, const EquationParams& p, int order) {
    if (order < 0) throw std::invalid_argument("order must be nonnegative");
    const EquationParams sw = swapped(p);
    const auto lam3 = run_scheme<T>(a, sw, std::max(order - 1, 0)).lam;
    auto le = series_reciprocal_times_t(truncated(assemble_lambda(lam3, sw), order + 2));
    le.params = p;
    return le;
}

// Closed form through dt^4; a.lam3 is the swapped-problem cubic coefficient.
template <class T>
LaurentExpansion<T> pole_b5_reference(const RootAnchor& a, const EquationParams& p) {
    const T s(int(a.sgn)), t0(a.t0), c0(p.chi0), ci(p.chi_inf), L(a.lam3);
    const T w = T(1) - ci * ci;
    LaurentExpansion<T> le;
    le.t0 = a.t0;
    le.sgn = a.sgn;
    le.residue = s * t0;
    le.regular = {
        (s + ci) / T(2),
        -(s * w / (T(4) * t0) + t0 * L),
        ((s - ci) * w / (T(2) * t0) + c0 + (T(2) - T(3) * s * ci) * t0 * L) / (T(4) * t0),
        -(s + (T(3) - T(2) * s * ci) / (T(2) * t0) * c0 + T(5) * (s * (T(1) + ci * ci) - T(2) * ci) * w / (T(8) * t0 * t0) +
          (T(1) - T(5) * (T(3) * s - T(2) * ci) * ci / T(2)) * L - T(7) * s * t0 * t0 * L * L) /
            (T(10) * t0),
        (T(7) * s / T(9) + T(5) * w * (s * (T(1) + T(3) * ci * ci) - (T(3) + ci * ci) * ci) / (T(8) * t0 * t0) +
         (T(47) + T(45) * ci * ci - T(88) * s * ci) * c0 / (T(36) * t0) -
         ((T(2) - T(15) * ci * ci) + T(5) * s * (T(7) + T(5) * ci * ci) * ci / T(4) + T(5) * s * t0 * c0) * L -
         T(3) * (T(7) * s - T(5) * ci) * t0 * t0 * L * L) /
            (T(20) * t0 * t0)};
    le.valid_order = 4;
    le.lam3_swapped = a.lam3;
    le.params = p;
    return le;
}

template <class T>
struct LaurentValue {
    T lam, lamdot, lamddot;
};

template <class T>
LaurentValue<T> laurent_eval(const LaurentExpansion<T>& le, const T& dt) {
    T v(0), d1(0), d2(0);
    for (int k = le.valid_order; k >= 0; --k) {
        v = v * dt + le.d(k);
        if (k >= 1) d1 = d1 * dt + T(k) * le.d(k);
        if (k >= 2) d2 = d2 * dt + T(k * (k - 1)) * le.d(k);
    }
    const T r = le.residue;
    return {r / dt + v, -r / (dt * dt) + d1, T(2) * r / (dt * dt * dt) + d2};
}

template <class T>
T pole_residual(const LaurentExpansion<T>& le, const T& dt) {
    const auto v = laurent_eval(le, dt);
    return v.lamddot - rhs_scalar(T(le.t0) + dt, v.lam, v.lamdot, le.params);
}

template <class T>
double pole_residual_order(const LaurentExpansion<T>& le, const std::vector<T>& dt_grid) {
    std::vector<double> x, y;
    for (const auto& dt : dt_grid) {
        using std::abs;
        const T r = pole_residual(le, dt);
        x.push_back(static_cast<double>(abs(dt)));
        y.push_back(static_cast<double>(abs(r)));
    }
    return loglog_slope(x, y);
}

}  // namespace p3root
