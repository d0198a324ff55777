// Command-line front end: expansions, integration, verification and the reference-solution datasets.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "p3root/acceptance.hpp"
#include "p3root/io.hpp"

namespace fs = std::filesystem;
using namespace p3root;

namespace {

enum Exit { kOk = 0, kCompute = 1, kUsage = 2, kAcceptance = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Span {
    double lo = 0, hi = 0;
};

Span parse_span(const std::string& s) {
    const auto c = s.find(':');
    if (c == std::string::npos) throw UsageError("span must be A:B, got '" + s + "'");
    try {
        std::size_t used = 0;
        Span r{std::stod(s.substr(0, c), &used), 0};
        if (used != c) throw std::invalid_argument(s);
        const std::string rest = s.substr(c + 1);
        r.hi = std::stod(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(s);
        if (!(r.lo < r.hi)) throw UsageError("span must satisfy A < B, got '" + s + "'");
        return r;
    } catch (const std::logic_error&) {
        throw UsageError("span must be A:B with numeric ends, got '" + s + "'");
    }
}

struct RunConfig {
    std::string command;
    double chi0 = appendix::params.chi0, chi_inf = appendix::params.chi_inf;
    std::optional<double> t0, lam3;
    std::optional<std::string> sgn;
    int order = 5;
    std::optional<std::string> span, window;
    double rel_tol = 1e-10, abs_tol = 1e-12;
    double alpha = 0.5;
    std::uint64_t seed = acceptance::default_seed;
    std::string out, format;
    double t_init = appendix::tc, lam_init = appendix::lam_c, lamdot_init = appendix::lamdot_c;
    int samples = 0;

    EquationParams params() const { return {chi0, chi_inf}; }
    OdeOptions ode() const {
        OdeOptions o;
        o.rel_tol = rel_tol;
        o.abs_tol = abs_tol;
        return o;
    }
    Span span_or(Span d) const { return span ? parse_span(*span) : d; }
    RootAnchor anchor() const { return RootAnchor(*t0, sign(), *lam3); }
    SignSwitch sign() const {
        const std::string& s = *sgn;
        if (s == "+1" || s == "1" || s == "+") return SignSwitch(1);
        if (s == "-1" || s == "-") return SignSwitch(-1);
        throw UsageError("--sgn must be +1 or -1, got '" + s + "'");
    }
};

bool needs_anchor(const std::string& c) { return c == "expand-root" || c == "expand-pole" || c == "bounds"; }

void validate(RunConfig& cfg) {
    if (cfg.t0 && (*cfg.t0 == 0.0 || !std::isfinite(*cfg.t0))) throw UsageError("--t0 must be finite and nonzero");
    if (cfg.sgn) cfg.sign();
    if (needs_anchor(cfg.command)) {
        std::string missing;
        if (!cfg.t0) missing += " --t0";
        if (!cfg.sgn) missing += " --sgn";
        if (!cfg.lam3) missing += " --lam3";
        if (!missing.empty()) throw UsageError(cfg.command + " requires" + missing);
    }
    if (cfg.command == "expand-root" || cfg.command == "expand-pole") {
        if (cfg.order < 0) throw UsageError("--order must be nonnegative");
    }
    if (cfg.command == "reproduce-appendix" && cfg.format == "json")
        throw UsageError("reproduce-appendix writes CSV and JSON files; --format does not apply");
    if (!(cfg.rel_tol > 0) || !(cfg.abs_tol > 0)) throw UsageError("tolerances must be positive");
    if (!(cfg.alpha > 0 && cfg.alpha < 1)) throw UsageError("--alpha must lie in (0, 1)");
    if (cfg.span) parse_span(*cfg.span);
    if (cfg.window) parse_span(*cfg.window);
    if (cfg.samples < 0) throw UsageError("--samples must be nonnegative");
}

// Writes to --out when given, otherwise to standard output.
void emit(const RunConfig& cfg, const std::string& text, const std::string& path_override = {}) {
    const std::string path = path_override.empty() ? cfg.out : path_override;
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    spdlog::info("wrote {}", path);
}

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    io::write_csv(os, header, rows);
    return os.str();
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string sibling(const std::string& path, const std::string& ext) {
    return fs::path(path).replace_extension(ext).string();
}

int cmd_expand(const RunConfig& cfg) {
    const auto p = cfg.params();
    const auto a = cfg.anchor();
    const double w = 0.2 * std::abs(a.t0);
    const Span sp = cfg.span_or({a.t0 - w, a.t0 + w});
    const int n = cfg.samples > 0 ? cfg.samples : 201;
    std::vector<std::vector<double>> rows;
    nlohmann::json j;
    if (cfg.command == "expand-root") {
        const auto lam3 = run_scheme<double>(a, p, cfg.order).lam;
        const auto lam = assemble_lambda(lam3, p);
        j = io::series_json(lam3, p);
        j["lambda_coeffs"] = std::vector<double>(lam.coeffs.begin(), lam.coeffs.begin() + lam.valid_order + 1);
        for (double t : linspace(sp.lo, sp.hi, n))
            rows.push_back({t, series_eval(lam, t - a.t0), series_eval_deriv(lam, t - a.t0)});
    } else {
        const auto le = root_to_pole<double>(a, p, cfg.order);
        j = io::laurent_json(le);
        for (double t : linspace(sp.lo, sp.hi, n)) {
            if (t == a.t0) continue;
            const auto v = laurent_eval(le, t - a.t0);
            rows.push_back({t, v.lam, v.lamdot});
        }
    }
    const std::string csv = csv_text({"t", "lambda", "lambda_dot"}, rows);
    const bool as_csv = cfg.format == "csv";
    emit(cfg, as_csv ? csv : json_text(j));
    if (!cfg.out.empty()) emit(cfg, as_csv ? json_text(j) : csv, sibling(cfg.out, as_csv ? ".json" : ".csv"));
    return kOk;
}

DenseSolution integrate_cfg(const RunConfig& cfg) {
    const Span sp = cfg.span_or({appendix::span_lo, appendix::span_hi});
    spdlog::info("integrating over [{}, {}] from t={}", sp.lo, sp.hi, cfg.t_init);
    auto sol = integrate(cfg.params(), cfg.t_init, cfg.lam_init, cfg.lamdot_init, sp.lo, sp.hi, cfg.ode());
    spdlog::debug("{} mesh nodes, {} root crossings", sol.mesh.size(), sol.crossings.size());
    if (sol.pole_lo) spdlog::info("pole reached below, solution covers from {}", sol.lo());
    if (sol.pole_hi) spdlog::info("pole reached above, solution covers up to {}", sol.hi());
    return sol;
}

std::vector<RootInfo> roots_with_lam3(const DenseSolution& sol, const EquationParams& p) {
    auto roots = find_roots(sol);
    for (auto& r : roots) r.lam3 = lam3_at_root(sol, r, p);
    return roots;
}

std::string roots_text(const RunConfig& cfg, const std::vector<RootInfo>& roots) {
    if (cfg.format == "csv") {
        std::vector<std::vector<double>> rows;
        for (const auto& r : roots) rows.push_back({r.t0, double(r.sgn), r.lam3});
        return csv_text({"t0", "sgn", "lam3"}, rows);
    }
    return json_text(io::roots_json(roots));
}

std::vector<double> grid_for(const RunConfig& cfg, const DenseSolution& sol, int def) {
    return linspace(sol.lo(), sol.hi(), cfg.samples > 0 ? cfg.samples : def);
}

int cmd_analyze(const RunConfig& cfg) {
    const auto p = cfg.params();
    const auto sol = integrate_cfg(cfg);
    if (cfg.command == "integrate") {
        if (cfg.format == "json") {
            nlohmann::json j{{"chi0", p.chi0}, {"chi_inf", p.chi_inf}, {"lo", sol.lo()}, {"hi", sol.hi()},
                             {"pole_lo", sol.pole_lo}, {"pole_hi", sol.pole_hi}};
            std::vector<double> t, l, ld;
            for (const auto& m : sol.mesh) {
                t.push_back(m.t);
                l.push_back(m.lam);
                ld.push_back(m.lamdot);
            }
            j["t"] = t;
            j["lambda"] = l;
            j["lambda_dot"] = ld;
            auto cr = nlohmann::json::array();
            for (const auto& c : sol.crossings)
                cr.push_back({{"t0", c.t0}, {"sgn", c.sgn}, {"lam3", c.lam3}, {"t_enter", c.t_enter}, {"t_exit", c.t_exit}});
            j["crossings"] = cr;
            emit(cfg, json_text(j));
        } else if (cfg.samples > 0) {
            std::ostringstream os;
            io::write_dense_csv(os, sol, grid_for(cfg, sol, 0));
            emit(cfg, os.str());
        } else {
            std::vector<std::vector<double>> rows;
            for (const auto& m : sol.mesh) rows.push_back({m.t, m.lam, m.lamdot});
            emit(cfg, csv_text({"t", "lambda", "lambda_dot"}, rows));
        }
        return kOk;
    }
    if (cfg.command == "find-roots") {
        emit(cfg, roots_text(cfg, roots_with_lam3(sol, p)));
        return kOk;
    }
    if (cfg.command == "lam3") {
        auto roots = roots_with_lam3(sol, p);
        if (cfg.t0) {
            if (roots.empty()) throw std::runtime_error("no roots in the integrated span");
            auto best = roots.front();
            for (const auto& r : roots)
                if (std::abs(r.t0 - *cfg.t0) < std::abs(best.t0 - *cfg.t0)) best = r;
            roots = {best};
        }
        emit(cfg, roots_text(cfg, roots));
        return kOk;
    }
    if (cfg.command == "residual") {
        std::vector<std::vector<double>> rows;
        const double h = 1e-5;
        // keep the difference stencil inside the span
        const double lo = sol.lo() + 2 * h * std::max(1.0, std::abs(sol.lo()));
        const double hi = sol.hi() - 2 * h * std::max(1.0, std::abs(sol.hi()));
        for (double t : linspace(lo, hi, cfg.samples > 0 ? cfg.samples : 2000)) {
            const auto r = residual_scan(sol, {t}, h * std::max(1.0, std::abs(t)));
            rows.push_back({t, r.front().second});
        }
        emit(cfg, csv_text({"t", "residual"}, rows));
        return kOk;
    }
    // symmetry
    const Span w = cfg.window ? parse_span(*cfg.window) : Span{0.6, 1.3};
    const double dev = symmetry_check(sol, p, linspace(w.lo, w.hi, cfg.samples > 0 ? cfg.samples : 71), cfg.ode());
    if (cfg.format == "json")
        emit(cfg, json_text({{"window_lo", w.lo}, {"window_hi", w.hi}, {"deviation", dev}}));
    else
        emit(cfg, csv_text({"window_lo", "window_hi", "deviation"}, {{w.lo, w.hi, dev}}));
    return kOk;
}

void print_results(const std::vector<acceptance::Result>& results) {
    for (const auto& r : results) {
        std::printf("[%s] %d %-52s %s (%.2fs)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(),
                    r.seconds);
        if (!r.pass) std::fprintf(stderr, "criterion %d failed: %s: %s\n", r.id, r.name.c_str(), r.detail.c_str());
    }
    std::fflush(stdout);
}

int cmd_verify(const RunConfig& cfg) {
    const auto results = acceptance::run_all(cfg.seed);
    print_results(results);
    for (const auto& r : results)
        if (!r.pass) return kAcceptance;
    return kOk;
}

int cmd_bounds(const RunConfig& cfg) {
    const auto b = convergence_bounds(cfg.anchor(), cfg.params(), cfg.alpha);
    const std::vector<std::pair<std::string, double>> f{
        {"M_lambda", b.M_lambda}, {"M_mu", b.M_mu},     {"B_mu_lambda", b.B_mu_lambda}, {"B_mu_mu", b.B_mu_mu},
        {"B_xi_lambda", b.B_xi_lambda}, {"B_xi_mu", b.B_xi_mu}, {"Q1", b.Q1}, {"Q2", b.Q2},
        {"beta", b.beta},       {"alpha", b.alpha},    {"alpha_tilde", b.alpha_tilde}};
    if (cfg.format == "csv") {
        std::vector<std::string> h;
        std::vector<double> v;
        for (const auto& [k, x] : f) {
            h.push_back(k);
            v.push_back(x);
        }
        emit(cfg, csv_text(h, {v}));
    } else {
        nlohmann::json j;
        for (const auto& [k, x] : f) j[k] = x;
        emit(cfg, json_text(j));
    }
    const bool ok = b.beta >= std::max(b.Q1, b.Q2) && b.alpha_tilde * b.beta <= 0.5 + 1e-15;
    if (!ok) std::fprintf(stderr, "bound set violates beta >= max(Q1, Q2) or alpha_tilde * beta <= 1/2\n");
    return ok ? kOk : kAcceptance;
}

int cmd_reproduce(const RunConfig& cfg) {
    const fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
    fs::create_directories(dir);
    const auto run = appendix::run(cfg.ode());
    const auto& sol = run.sol;
    const auto& p = appendix::params;
    const int n = cfg.samples > 0 ? cfg.samples : 2000;
    auto write = [&](const std::string& name, const std::string& text) { emit(cfg, text, (dir / name).string()); };

    std::ostringstream f1;
    io::write_dense_csv(f1, sol, linspace(sol.lo(), sol.hi(), n));
    write("fig1.csv", f1.str());

    std::vector<std::vector<double>> r2, r3;
    const double h = 1e-5;
    for (double t : linspace(sol.lo() + 2 * h * std::max(1.0, sol.lo()), sol.hi() - 2 * h * std::max(1.0, sol.hi()), n)) {
        r2.push_back({t, residual_scan(sol, {t}, h * std::max(1.0, t)).front().second});
        const auto [l, ld] = sol.eval(t);
        if (l != 0.0) r3.push_back({t, third_derivative(t, l, ld, p)});
    }
    write("fig2.csv", csv_text({"t", "residual"}, r2));
    write("fig3.csv", csv_text({"t", "lambda_third"}, r3));

    std::vector<std::vector<double>> r4;
    if (run.roots.size() >= 6) {
        const auto sp = acceptance::reference_series(run.roots[4]);
        const auto sm = acceptance::reference_series(run.roots[5]);
        for (double t : linspace(0.45, 1.45, n))
            r4.push_back({t, sol.lambda(t), series_eval(sp, t - sp.anchor.t0), series_eval(sm, t - sm.anchor.t0)});
    }
    write("fig4.csv", csv_text({"t", "lambda", "series_plus", "series_minus"}, r4));
    write("roots.json", json_text({{"chi0", p.chi0}, {"chi_inf", p.chi_inf}, {"roots", io::roots_json(run.roots)}}));

    const std::vector<acceptance::Result> checks{acceptance::reference_reproduction(run),
                                                  acceptance::series_overlap(run)};
    print_results(checks);
    for (const auto& c : checks)
        if (!c.pass) return kAcceptance;
    return kOk;
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("p3root");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("%l: %v");
    const char* env = std::getenv("P3_LOG");
    const std::string level = env ? env : "error";
    if (level == "debug")
        spdlog::set_level(spdlog::level::debug);
    else if (level == "info")
        spdlog::set_level(spdlog::level::info);
    else
        spdlog::set_level(spdlog::level::err);
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Roots, poles and solutions of the third Painleve equation (primed form)"};
    RunConfig cfg;
    const std::vector<std::string> commands{"expand-root", "expand-pole", "integrate", "find-roots",      "lam3",
                                            "residual",    "symmetry",    "verify",    "bounds", "reproduce-appendix"};
    app.add_option("command", cfg.command, "Command to run")->required()->check(CLI::IsMember(commands));
    app.add_option("--chi0", cfg.chi0, "Equation parameter chi0");
    app.add_option("--chiinf", cfg.chi_inf, "Equation parameter chi_inf");
    app.add_option("--t0", cfg.t0, "Root location (nonzero)");
    app.add_option("--sgn", cfg.sgn, "Sign switch, +1 or -1");
    app.add_option("--lam3", cfg.lam3, "Free cubic coefficient at the root");
    app.add_option("--order", cfg.order, "Validity order of the cubic coefficient series");
    app.add_option("--span", cfg.span, "Interval A:B");
    app.add_option("--window", cfg.window, "Symmetry check window A:B");
    app.add_option("--rel-tol", cfg.rel_tol, "Relative tolerance");
    app.add_option("--abs-tol", cfg.abs_tol, "Absolute tolerance");
    app.add_option("--alpha", cfg.alpha, "Domain fraction for the convergence bounds");
    app.add_option("--seed", cfg.seed, "Seed for the random draws of verify");
    app.add_option("--out", cfg.out, "Output path (directory for reproduce-appendix)");
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--t-init", cfg.t_init, "Time of the Cauchy data");
    app.add_option("--lam-init", cfg.lam_init, "lambda at --t-init");
    app.add_option("--lamdot-init", cfg.lamdot_init, "lambda_dot at --t-init");
    app.add_option("--samples", cfg.samples, "Number of output samples");
    app.set_config("--config", "", "Read key=value options from a file");
    app.get_config_ptr()->check(CLI::ExistingFile);
    app.config_formatter(std::make_shared<CLI::ConfigTOML>());

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    try {
        validate(cfg);
        if (cfg.format.empty())
            cfg.format = (cfg.command == "find-roots" || cfg.command == "lam3" || cfg.command == "bounds" ||
                          cfg.command.rfind("expand", 0) == 0)
                             ? "json"
                             : "csv";
        spdlog::debug("command {}", cfg.command);
        if (cfg.command == "expand-root" || cfg.command == "expand-pole") return cmd_expand(cfg);
        if (cfg.command == "verify") return cmd_verify(cfg);
        if (cfg.command == "bounds") return cmd_bounds(cfg);
        if (cfg.command == "reproduce-appendix") return cmd_reproduce(cfg);
        return cmd_analyze(cfg);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const IntegrationError& e) {
        std::fprintf(stderr, "integration failed at t = %.17g: %s\n", e.where(), e.what());
        return kCompute;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "computation failed: %s\n", e.what());
        return kCompute;
    }
}
