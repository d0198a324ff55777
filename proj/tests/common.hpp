#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "p3root/series.hpp"

namespace testing_util {

using Rational = boost::multiprecision::cpp_rational;
using Wide = boost::multiprecision::cpp_bin_float_50;

class Draws {
public:
    explicit Draws(std::uint64_t seed) : g_(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(g_); }
    // Dyadic rationals: exactly representable, so double and rational inputs coincide.
    double dyadic(double a, double b) { return std::ldexp(std::round(std::ldexp(uniform(a, b), 20)), -20); }
    int sign() { return uniform(0, 1) < 0.5 ? -1 : 1; }

private:
    std::mt19937_64 g_;
};

template <class T>
T eval_sigma_dt(const p3root::SigmaDtPoly<T>& q, const T& sigma, const T& dt) {
    T r(0), dk(1);
    for (const auto& row : q.rows) {
        T s(0), sm(1);
        for (const auto& c : row) {
            s += c * sm;
            sm *= sigma;
        }
        r += s * dk;
        dk *= dt;
    }
    return r;
}

template <class T>
T eval_poly(const std::vector<T>& c, const T& x) {
    T r(0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
}

template <class To, class From>
std::vector<To> convert(const std::vector<From>& v) {
    std::vector<To> r;
    for (const auto& x : v) r.push_back(To(x));
    return r;
}

}  // namespace testing_util
