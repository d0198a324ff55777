#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ode.hpp"
#include "pole.hpp"

namespace p3root::io {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(std::ostream& os, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << num(r[i]);
        os << '\n';
    }
}

inline void write_dense_csv(std::ostream& os, const DenseSolution& sol, const std::vector<double>& grid) {
    std::vector<std::vector<double>> rows;
    for (double t : grid) {
        const auto [l, ld] = sol.eval(t);
        rows.push_back({t, l, ld});
    }
    write_csv(os, {"t", "lambda", "lambda_dot"}, rows);
}

inline nlohmann::json series_json(const DtSeries<double>& lam3, const EquationParams& p) {
    const auto& a = lam3.anchor;
    std::vector<double> c(lam3.coeffs.begin(), lam3.coeffs.begin() + lam3.valid_order + 1);
    return {{"t0", a.t0},           {"sgn", int(a.sgn)}, {"lam3", a.lam3}, {"chi0", p.chi0},
            {"chi_inf", p.chi_inf}, {"valid_order", lam3.valid_order}, {"coeffs", c}};
}

inline nlohmann::json laurent_json(const LaurentExpansion<double>& le) {
    return {{"t0", le.t0},
            {"sgn", le.sgn},
            {"residue", le.residue},
            {"chi0", le.params.chi0},
            {"chi_inf", le.params.chi_inf},
            {"lam3_swapped", le.lam3_swapped},
            {"valid_order", le.valid_order},
            {"regular_coeffs", le.regular}};
}

inline nlohmann::json roots_json(const std::vector<RootInfo>& roots) {
    auto j = nlohmann::json::array();
    for (const auto& r : roots) j.push_back({{"t0", r.t0}, {"sgn", r.sgn}, {"lam3", r.lam3}});
    return j;
}

inline DtSeries<double> series_from_json(const nlohmann::json& j) {
    const RootAnchor a(j.at("t0").get<double>(), SignSwitch(j.at("sgn").get<int>()), j.at("lam3").get<double>());
    return DtSeries<double>(a, j.at("coeffs").get<std::vector<double>>(), j.at("valid_order").get<int>());
}

}  // namespace p3root::io
