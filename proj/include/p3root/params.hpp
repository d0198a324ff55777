#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace p3root {

struct EquationParams {
    double chi0 = 0.0;
    double chi_inf = 0.0;
};

// The sign of the slope at a root; only +1 and -1 are representable.
class SignSwitch {
public:
    SignSwitch() = default;
    explicit SignSwitch(int s) : s_(s) {
        if (s != 1 && s != -1)
            throw std::invalid_argument("sgn must be +1 or -1, got " + std::to_string(s));
    }
    int value() const { return s_; }
    operator int() const { return s_; }
    SignSwitch flipped() const { return SignSwitch(-s_); }
    friend bool operator==(SignSwitch a, SignSwitch b) { return a.s_ == b.s_; }

private:
    int s_ = 1;
};

struct RootAnchor {
    double t0 = 1.0;
    SignSwitch sgn{1};
    double lam3 = 0.0;

    RootAnchor() = default;
    RootAnchor(double t0_, SignSwitch sgn_, double lam3_) : t0(t0_), sgn(sgn_), lam3(lam3_) {
        if (t0 == 0.0 || !std::isfinite(t0))
            throw std::invalid_argument("root location t0 must be finite and nonzero");
    }
    friend bool operator==(const RootAnchor& a, const RootAnchor& b) {
        return a.t0 == b.t0 && a.sgn == b.sgn && a.lam3 == b.lam3;
    }
};

// Parameters of the four-constant form of the equation.
struct P3FormParams {
    double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;
};

struct PhasePoint {
    double t = 1.0;
    double lambda = 0.0;
    double mu = 0.0;
};

inline EquationParams swapped(const EquationParams& p) { return {p.chi_inf, p.chi0}; }

}  // namespace p3root
