// Acceptance checks, one PASS/FAIL line per criterion.
//
//   fraclab_acceptance                 run every criterion
//   fraclab_acceptance --criterion 7   run one
//
// Exit status is 0 when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fraclab/kernels.hpp"
#include "fraclab/lab/config.hpp"
#include "fraclab/lab/experiments.hpp"
#include "fraclab/lab/report.hpp"
#include "fraclab/operator.hpp"
#include "oracles.hpp"

using namespace fraclab;
using namespace fraclab::lab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SweepReport run(const std::string& config) {
    return run_experiment(load_config(std::string(FRACLAB_CONFIG_DIR) + "/" + config + ".ini"));
}

const Verdict& verdict(const SweepReport& r, const std::string& name) {
    for (const auto& v : r.verdicts)
        if (v.name == name) return v;
    throw std::logic_error(r.name + ": no verdict '" + name + "'");
}

double estimate(const SweepReport& r, const std::string& name) {
    const Cell& c = r.estimates.at(name);
    if (const auto* d = std::get_if<double>(&c)) return *d;
    return static_cast<double>(std::get<long long>(c));
}

// Collects named verdicts from reports into one outcome.
struct Gather {
    Outcome out{true, ""};
    void add(const SweepReport& r, const std::string& name) {
        const Verdict& v = verdict(r, name);
        out.pass = out.pass && v.pass;
        out.detail += fmt("%s%s.%s=%s(%.4g)", out.detail.empty() ? "" : " ", r.name.c_str(), name.c_str(), v.pass ? "ok" : "FAIL", v.value);
    }
    void add(bool ok, const std::string& text) {
        out.pass = out.pass && ok;
        out.detail += (out.detail.empty() ? "" : " ") + text + (ok ? "" : "(FAIL)");
    }
};

// Per_s(E, (-1,1)) for a union of intervals, summing hand-integrated pair
// interactions over the elementary pieces cut by the set and omega ends.
double perimeter_by_hand(const std::vector<std::pair<double, double>>& E, double s) {
    std::vector<double> cuts{-kInf, -1, 1, kInf};
    for (auto [a, b] : E) cuts.insert(cuts.end(), {a, b});
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    struct Piece {
        double a, b;
        bool in_e, in_omega;
    };
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const double x = std::isinf(a) ? b - 1 : std::isinf(b) ? a + 1 : (a + b) / 2;
        bool in_e = false;
        for (auto [p, q] : E) in_e = in_e || (p < x && x < q);
        pieces.push_back({a, b, in_e, -1 < x && x < 1});
    }
    double per = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i)
        for (std::size_t j = i + 1; j < pieces.size(); ++j) {
            const Piece &P = pieces[i], &Q = pieces[j];
            if (P.in_e != Q.in_e && (P.in_omega || Q.in_omega)) per += oracle::pair_by_hand(P.a, P.b, Q.a, Q.b, s);
        }
    return per;
}

Outcome c01() {
    const auto t0 = std::chrono::steady_clock::now();
    const double v = interaction(interval(-1, 0), interval(0, 1), {0.25, 1});
    const double closed = 8 - 4 * std::sqrt(2.0);
    const double mid = oracle::refined_midpoint_pair(-1, 0, 0, 1, 0.25, 1000);
    const double dt = seconds_since(t0);
    Gather g;
    g.add(std::abs(v - closed) <= 1e-10, fmt("|K-(8-4sqrt2)|=%.2e", std::abs(v - closed)));
    g.add(std::abs(v - mid) <= 1e-3, fmt("|K-midpoint(h=1e-3)|=%.2e", std::abs(v - mid)));
    g.add(dt < 1, fmt("runtime=%.3fs", dt));
    return g.out;
}

Outcome c02() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto lim = rescaled_perimeter_limit(interval(0, kInf), interval(-1, 1), {0.30, 0.40, 0.45, 0.49});
    const double dt = seconds_since(t0);
    Gather g;
    g.add(std::abs(lim.limit - 1) <= 0.05, fmt("limit=%.5f", lim.limit));
    g.add(dt < 10, fmt("runtime=%.3fs", dt));
    return g.out;
}

Outcome c03() {
    const auto r = run("sweep_s_massari");
    Gather g;
    g.add(r, "minimizer_limit");
    g.add(r, "energy_limit");
    g.out.detail += fmt(" rescaled_J_limit=%.4f classical=%.4f", estimate(r, "rescaled_J_limit"), estimate(r, "classical_value"));
    return g.out;
}

Outcome c04() {
    const auto grid = build_grid(interval(-1, 1), 0.005, 4);
    const std::vector<std::vector<std::pair<double, double>>> sets{{{0, kInf}}, {{-0.5, 0.5}}, {{0.25, kInf}}};
    Gather g;
    for (const auto& E : sets) {
        std::vector<Interval> parts;
        for (auto [a, b] : E) parts.push_back({a, b});
        const double K = gagliardo_K(indicator(interval_union(parts), grid), interval(-1, 1), {0.25, 1});
        const double per = perimeter_by_hand(E, 0.25);
        const double rel = std::abs(K / (4 * per) - 1);
        g.add(rel <= 5e-3, fmt("(%g,%g):rel=%.2e", E[0].first, E[0].second, rel));
    }
    return g.out;
}

Outcome c05() {
    Gather g;
    for (const char* c : {"sweep_eps_s025_m03", "sweep_eps_s025_m0", "sweep_eps_s075", "minimize"}) g.add(run(c), "mass_constraint");
    return g.out;
}

Outcome c06() {
    const auto r = run("neumann_s025_m03");
    Gather g;
    g.add(r, "minimizer_converged");
    g.add(r, "neumann_residual");
    g.add(r, "constant_field_exact");
    return g.out;
}

Outcome c07() {
    Gather g;
    g.add(run("sweep_eps_s025_m03"), "euler_lagrange");
    const auto sym = run("sweep_eps_s025_m0");
    g.add(sym, "euler_lagrange");
    g.add(sym, "symmetric_multiplier");
    return g.out;
}

Outcome c08() {
    const auto r = run("sweep_eps_s025_m03");
    Gather g;
    g.add(r, "multiplier_bounded");
    g.add(r, "multiplier_cauchy");
    std::string mus;
    for (std::size_t i = 0; i < r.table.rows.size(); ++i) mus += fmt("%s%.4f", i ? "," : "", r.table.number(i, "mu"));
    g.out.detail += " mu=" + mus;
    return g.out;
}

Outcome c09() {
    const auto low = run("sweep_eps_s025_m03");
    const auto high = run("sweep_eps_s075");
    Gather g;
    g.add(low, "energy_limit");
    g.add(high, "energy_limit");
    g.out.detail += fmt(" s=0.25:F=%.4g,K=%.4g s=0.75:F_extrap=%.4g,target=%.4g", estimate(low, "F_smallest_eps"), estimate(low, "F_target"),
                        estimate(high, "F_extrapolated"), estimate(high, "F_target"));
    return g.out;
}

double tail_constant(const ProfileTable& p) {
    double C = 0;
    for (std::size_t i = 0; i < p.t.size(); ++i)
        if (p.t[i] >= p.L / 2 && p.t[i] <= p.L) C = std::max(C, std::abs(1 - p.u[i]) * std::pow(1 + p.t[i], 2 * p.s));
    return C;
}

Outcome c10() {
    const auto p = solve_profile(0.75, 20, 0.05);
    const auto q = solve_profile(0.75, 40, 0.05);
    Gather g;
    for (const auto* pr : {&p, &q}) {
        const std::size_t n = pr->u.size();
        double odd = 0;
        bool monotone = true;
        for (std::size_t i = 0; i < n; ++i) odd = std::max(odd, std::abs(pr->u[i] + pr->u[n - 1 - i]));
        for (std::size_t i = 1; i < n; ++i) monotone = monotone && pr->u[i] > pr->u[i - 1];
        const double res = profile_residual(*pr);
        g.add(odd <= 1e-12, fmt("L=%g:odd=%.1e", pr->L, odd));
        g.add(monotone, "monotone");
        g.add(res <= 1e-6, fmt("residual=%.2e", res));
    }
    const double ratio = tail_constant(q) / tail_constant(p);
    g.add(ratio >= 0.5 && ratio <= 2, fmt("C(40)/C(20)=%.4f", ratio));
    return g.out;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]) / x.size();
        my += std::log(y[i]) / y.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

Outcome c11() {
    const double s = 0.75;
    const auto p = solve_profile(s, 20, 0.05);
    const auto grid = build_grid(interval(-1, 1), 0.005, 4);
    const std::vector<double> eps{0.1, 0.05, 0.025};
    std::vector<double> c;
    for (double e : eps) c.push_back(std::abs(build_recovery_sequence(grid, interval(0, kInf), p, e, 0.1, 2, {0.6, 0, 0.2, 0.05}).c_eps));
    const double slope = fitted_slope(eps, c);
    Gather g;
    g.add(std::abs(slope - s) <= 0.15, fmt("slope=%.4f |c|=%.4g,%.4g,%.4g", slope, c[0], c[1], c[2]));
    return g.out;
}

Outcome c12() {
    const auto r = run("curvature_s025_m03");
    const auto z = run("curvature_s025_m0");
    Gather g;
    g.add(r, "ratio_constancy");
    g.add(r, "first_variation_linear");
    g.add(z, "ratios_vanish");
    g.add(z, "first_variation_linear");
    g.out.detail += fmt(" included=%g degenerate=%g", estimate(r, "included"), estimate(r, "degenerate"));
    return g.out;
}

Outcome c13() {
    const auto r = run("counterexample_classical");
    Gather g;
    g.add(r, "no_solution");
    g.add(r, "first_integral");
    g.add(r, "constant_solution_rejected");
    return g.out;
}

Outcome c14() {
    const auto r = run("counterexample_fractional");
    Gather g;
    g.add(r, "odd_profile_mass");
    g.add(r, "unique_solution");
    g.add(r, "mass_eta_infeasible");
    return g.out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome c15() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "fraclab_acceptance_determinism";
    Gather g;
    for (const char* c : {"sweep_eps_s025_m03", "counterexample_fractional", "sweep_s_massari"})
        for (const char* format : {"csv", "json"}) {
            std::vector<std::string> files[2];
            for (int k = 0; k < 2; ++k) {
                const fs::path dir = base / (std::string(c) + "_" + format + "_" + std::to_string(k));
                fs::remove_all(dir);
                files[k] = emit(run(c), format, dir.string());
            }
            bool same = files[0].size() == files[1].size();
            for (std::size_t i = 0; same && i < files[0].size(); ++i) same = slurp(files[0][i]) == slurp(files[1][i]);
            g.add(same, fmt("%s.%s", c, format));
        }
    fs::remove_all(base);
    return g.out;
}

struct Criterion {
    const char* title;
    std::function<Outcome()> check;
};

const std::vector<Criterion> kCriteria{
    {"kernel closed form", c01},
    {"perimeter limit as s -> 1/2", c02},
    {"Massari minimizers and energies as s -> 1/2", c03},
    {"signed indicator energy is 4 Per_s", c04},
    {"mass constraint", c05},
    {"Neumann exterior condition", c06},
    {"Euler-Lagrange and multiplier", c07},
    {"multiplier boundedness", c08},
    {"energy continuity", c09},
    {"profile properties", c10},
    {"recovery mass correction", c11},
    {"hybrid curvature constancy", c12},
    {"classical counterexample", c13},
    {"fractional counterexample", c14},
    {"determinism", c15},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraclab acceptance checks"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-15)")->check(CLI::Range(1, static_cast<int>(kCriteria.size())));
    CLI11_PARSE(app, argc, argv);
    bool all = true;
    for (std::size_t i = 0; i < kCriteria.size(); ++i) {
        if (only && static_cast<int>(i + 1) != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = kCriteria[i].check();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        std::printf("criterion %02zu %s  %s [%.1fs]: %s\n", i + 1, o.pass ? "PASS" : "FAIL", kCriteria[i].title, seconds_since(t0), o.detail.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
