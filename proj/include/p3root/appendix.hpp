#pragma once

#include <array>
#include <vector>

#include "ode.hpp"

namespace p3root::appendix {

// The numerical experiment: one solution fixed by Cauchy data at tc.
inline constexpr EquationParams params{-0.811597, -0.0550042};
inline constexpr double tc = 0.833651, lam_c = 0.288298, lamdot_c = 0.374531;
inline constexpr double span_lo = 0.01, span_hi = 2.0;
inline constexpr std::array<double, 6> roots{0.0159082, 0.0427774, 0.0901638, 0.242530, 0.511115, 1.38175};
inline constexpr double lam3_plus = -9.01149;  // at 0.511115, sgn +1
inline constexpr double lam3_minus = 1.24246;  // at 1.38175, sgn -1

struct Run {
    DenseSolution sol;
    std::vector<RootInfo> roots;  // lam3 filled
};

inline Run run(const OdeOptions& opts = {}) {
    Run r{integrate(params, tc, lam_c, lamdot_c, span_lo, span_hi, opts), {}};
    r.roots = find_roots(r.sol);
    for (auto& root : r.roots) root.lam3 = lam3_at_root(r.sol, root, params);
    return r;
}

}  // namespace p3root::appendix
