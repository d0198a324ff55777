#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "params.hpp"

namespace p3root {

// Truncated power series in dt = t - t0. Coefficients above valid_order are kept
// but are not trusted.
template <class T>
struct DtSeries {
    RootAnchor anchor;
    std::vector<T> coeffs;
    int valid_order = 0;

    DtSeries() = default;
    DtSeries(const RootAnchor& a, std::vector<T> c, int v)
        : anchor(a), coeffs(std::move(c)), valid_order(v) {
        if (coeffs.empty()) coeffs.push_back(T(0));
        if (v < 0) throw std::invalid_argument("valid_order must be nonnegative");
        if (static_cast<std::size_t>(v) >= coeffs.size()) coeffs.resize(v + 1, T(0));
    }

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    T coeff(int k) const { return k >= 0 && k <= degree() ? coeffs[k] : T(0); }
};

template <class T>
T series_eval(const DtSeries<T>& s, const T& dt) {
    T r(0);
    for (int k = s.valid_order; k >= 0; --k) r = r * dt + s.coeff(k);
    return r;
}

// Horner over every stored coefficient, trusted or not.
template <class T>
T series_eval_all(const DtSeries<T>& s, const T& dt) {
    T r(0);
    for (int k = s.degree(); k >= 0; --k) r = r * dt + s.coeffs[k];
    return r;
}

// Derivative of the trusted part.
template <class T>
T series_eval_deriv(const DtSeries<T>& s, const T& dt, int order = 1) {
    T r(0);
    for (int k = s.valid_order; k >= order; --k) {
        T f(1);
        for (int j = 0; j < order; ++j) f *= T(k - j);
        r = r * dt + f * s.coeff(k);
    }
    return r;
}

template <class T>
DtSeries<T> truncated(DtSeries<T> s, int order) {
    s.coeffs.resize(order + 1, T(0));
    s.valid_order = std::min(s.valid_order, order);
    return s;
}

inline void check_same_anchor(const RootAnchor& a, const RootAnchor& b) {
    if (!(a == b)) throw std::invalid_argument("series anchored at different roots");
}

// Dense coefficient arithmetic in a single variable, truncated at degree n.
namespace poly {

template <class T>
std::vector<T> mul(const std::vector<T>& a, const std::vector<T>& b, int n) {
    std::vector<T> r(n + 1, T(0));
    const int na = std::min<int>(a.size() - 1, n);
    for (int i = 0; i <= na; ++i) {
        if (a[i] == T(0)) continue;
        const int nb = std::min<int>(b.size() - 1, n - i);
        for (int j = 0; j <= nb; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

template <class T>
std::vector<T> add(const std::vector<T>& a, const std::vector<T>& b) {
    std::vector<T> r(std::max(a.size(), b.size()), T(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

template <class T>
std::vector<T> scale(std::vector<T> a, const std::type_identity_t<T>& c) {
    for (auto& x : a) x *= c;
    return a;
}

template <class T>
std::vector<T> add_const(std::vector<T> a, const std::type_identity_t<T>& c) {
    if (a.empty()) a.push_back(T(0));
    a[0] += c;
    return a;
}

// Multiply by x^k.
template <class T>
std::vector<T> shift(const std::vector<T>& a, int k) {
    std::vector<T> r(k, T(0));
    r.insert(r.end(), a.begin(), a.end());
    return r;
}

template <class T>
std::vector<T> trunc(std::vector<T> a, int n) {
    a.resize(n + 1, T(0));
    return a;
}

// Reciprocal of a series with nonzero constant term.
template <class T>
std::vector<T> reciprocal(const std::vector<T>& a, int n) {
    if (a.empty() || a[0] == T(0)) throw std::domain_error("series reciprocal needs a nonzero constant term");
    std::vector<T> r(n + 1, T(0));
    r[0] = T(1) / a[0];
    for (int k = 1; k <= n; ++k) {
        T s(0);
        for (int j = 1; j <= std::min<int>(k, a.size() - 1); ++j) s += a[j] * r[k - j];
        r[k] = -s / a[0];
    }
    return r;
}

template <class T>
std::vector<T> derivative(const std::vector<T>& a) {
    if (a.size() <= 1) return {T(0)};
    std::vector<T> r(a.size() - 1);
    for (std::size_t k = 1; k < a.size(); ++k) r[k - 1] = T(static_cast<int>(k)) * a[k];
    return r;
}

}  // namespace poly

// Polynomial in (sigma, dt): rows[k][m] is the coefficient of sigma^m dt^k.
template <class T>
struct SigmaDtPoly {
    std::vector<std::vector<T>> rows;

    T coeff(int m, int k) const {
        if (k < 0 || k >= static_cast<int>(rows.size())) return T(0);
        const auto& r = rows[k];
        return m >= 0 && m < static_cast<int>(r.size()) ? r[m] : T(0);
    }
    int dt_degree() const { return static_cast<int>(rows.size()) - 1; }

    // Each coefficient c_k of a function of eta = sigma*dt becomes c_k sigma^(k+extra) dt^k.
    static SigmaDtPoly from_eta(const std::vector<T>& c, int extra_sigma = 0) {
        SigmaDtPoly q;
        q.rows.resize(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) {
            q.rows[k].assign(k + extra_sigma + 1, T(0));
            q.rows[k][k + extra_sigma] = c[k];
        }
        return q;
    }

    SigmaDtPoly& operator+=(const SigmaDtPoly& o) {
        if (o.rows.size() > rows.size()) rows.resize(o.rows.size());
        for (std::size_t k = 0; k < o.rows.size(); ++k) {
            auto& r = rows[k];
            if (o.rows[k].size() > r.size()) r.resize(o.rows[k].size(), T(0));
            for (std::size_t m = 0; m < o.rows[k].size(); ++m) r[m] += o.rows[k][m];
        }
        return *this;
    }
    SigmaDtPoly& operator*=(const T& c) {
        for (auto& r : rows)
            for (auto& x : r) x *= c;
        return *this;
    }
};

// Integral over sigma in [0,1] of sigma^p q(sigma, dt).
template <class T>
DtSeries<T> sigma_average(const SigmaDtPoly<T>& q, int p, const RootAnchor& a = {}, int valid = -1) {
    if (p < 0) throw std::invalid_argument("sigma power must be nonnegative");
    std::vector<T> c(std::max<std::size_t>(q.rows.size(), 1), T(0));
    for (std::size_t k = 0; k < q.rows.size(); ++k)
        for (std::size_t m = 0; m < q.rows[k].size(); ++m)
            c[k] += q.rows[k][m] / T(static_cast<int>(m) + p + 1);
    const int v = valid < 0 ? static_cast<int>(c.size()) - 1 : valid;
    return DtSeries<T>(a, std::move(c), v);
}

}  // namespace p3root
