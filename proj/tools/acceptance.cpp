// Runs the desk-scale acceptance checks and prints one PASS/FAIL line each.

#include "nudged_ns/config.hpp"
#include "nudged_ns/error.hpp"
#include "nudged_ns/experiments.hpp"
#include "nudged_ns/props.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace nudged_ns;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool passed = false;
    std::string detail;
};

std::string sci(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3e", v);
    return b;
}

std::string fix(double v, int digits = 2) {
    char b[32];
    std::snprintf(b, sizeof b, "%.*f", digits, v);
    return b;
}

Config config_for(Experiment e, const fs::path& out) {
    Config c = Config::defaults(e);
    c.set("out.dir", out.string());
    return c;
}

const Ladder& only_ladder(const Exp1Result& r) {
    if (r.ladders.size() != 1) throw Error("expected exactly one ladder");
    return r.ladders.front();
}

Verdict coupled_convergence(const fs::path& out, std::ostream& log) {
    Config c = config_for(Experiment::exp1_convergence, out / "coupled");
    c.set("exp1.ladders=coupled");
    const Exp1Result res = exp1_convergence(c, &log);
    const Ladder& l = only_ladder(res);
    bool ok = true;
    std::ostringstream d;
    d << "rates";
    double last = 0.0;
    for (const auto& row : l.rows) {
        if (!row.rate) continue;
        d << ' ' << fix(*row.rate);
        ok = ok && *row.rate >= 1.8 && *row.rate <= 3.5;
        last = *row.rate;
    }
    ok = ok && std::abs(last - 2.0) <= 0.4;
    d << " (need all in [1.8, 3.5], final within 2.0 +- 0.4)";
    return {ok, d.str()};
}

Verdict temporal_convergence(const fs::path& out, std::ostream& log) {
    Config c = config_for(Experiment::exp1_convergence, out / "temporal");
    c.set("exp1.ladders=temporal");
    const Exp1Result res = exp1_convergence(c, &log);
    const Ladder& l = only_ladder(res);
    // Spatial floor: same mesh, a step four times below the finest rung.
    const int n = c.get_int("exp1.temporal_n");
    const auto dts = c.get_doubles("exp1.temporal_dt");
    const double floor_dt = *std::min_element(dts.begin(), dts.end()) / 4.0;
    const double floor = exp1_single(c, n, floor_dt, &log);
    std::ostringstream d;
    d << "floor " << sci(floor) << " at dt " << floor_dt << "; rates";
    bool ok = true;
    int checked = 0;
    for (const auto& row : l.rows) {
        if (row.error <= 3.0 * floor) {
            d << " | plateau from dt " << row.step;
            break;
        }
        if (!row.rate) continue;
        d << ' ' << fix(*row.rate);
        ok = ok && *row.rate >= 1.8;
        ++checked;
    }
    ok = ok && checked >= 1;
    d << " (need >= 1.8 before the plateau)";
    return {ok, d.str()};
}

double value_near(const TimeSeries& ts, const std::string& channel, double t) {
    std::vector<double> times;
    const auto v = ts.channel(channel, &times);
    std::size_t best = 0;
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
    return v.at(best);
}

Verdict mu_sweep(const fs::path& out, std::ostream& log) {
    const MuSweepResult r = exp1_mu_sweep(config_for(Experiment::exp1_mu_sweep, out / "mu_sweep"), &log);
    auto at = [&](double mu, double t) {
        for (std::size_t k = 0; k < r.mu.size(); ++k)
            if (r.mu[k] == mu) return value_near(r.series[k], "l2_error", t);
        throw Error("mu = " + std::to_string(mu) + " missing from the sweep");
    };
    const double e1 = at(1.0, 1.0), e100 = at(100.0, 1.0);
    double lo = INFINITY, hi = 0.0;
    for (const auto& s : r.series) {
        const double e = s.channel("l2_error").back();
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    const bool ok = e100 <= 0.1 * e1 && hi <= 3.0 * lo;
    std::ostringstream d;
    d << "t=1: mu=100 " << sci(e100) << " vs mu=1 " << sci(e1) << " (ratio " << fix(e100 / e1, 3)
      << ", need <= 0.1); final spread " << fix(hi / lo) << " (need <= 3)";
    return {ok, d.str()};
}

Verdict noflow(const fs::path& out, std::ostream& log) {
    const NoflowResult r = exp2_noflow(config_for(Experiment::exp2_noflow, out / "noflow"), &log);
    const NoflowVariant *sv = nullptr, *th0 = nullptr;
    for (const auto& v : r.variants) {
        if (v.name == "SV") sv = &v;
        if (v.name == "TH_gamma0") th0 = &v;
    }
    if (!sv || !th0) throw Error("noflow run lacks the SV or TH_gamma0 variant");
    const bool ok = sv->final_error <= 1e-5 && th0->final_error >= 1e-2 &&
                    th0->final_error >= 1e3 * sv->final_error && sv->max_div_l2 <= 1e-8;
    std::ostringstream d;
    d << "SV " << sci(sv->final_error) << " (need <= 1e-5), TH gamma=0 " << sci(th0->final_error)
      << " (need >= 1e-2), SV max div " << sci(sv->max_div_l2) << " (need <= 1e-8)";
    return {ok, d.str()};
}

Verdict cylinder(const fs::path& out, std::ostream& log) {
    const fs::path dir = out / "cylinder";
    fs::remove(dir / "dns_trajectory.bin");
    const CylinderDaResult r = exp3_cylinder_da(config_for(Experiment::exp3_cylinder_da, dir), &log);
    const double drop = r.diff_first / r.diff_last;
    const bool ok = drop >= 100.0 && r.decay.rate < 0.0 && r.lift_diff_end < 0.01 * r.lift_amplitude &&
                    r.drag_diff_end < 0.01 * r.drag_amplitude;
    std::ostringstream d;
    d << "difference " << sci(r.diff_first) << " -> " << sci(r.diff_last) << " (drop " << sci(drop)
      << ", need >= 100), fitted rate " << fix(r.decay.rate, 3) << "; lift diff " << sci(r.lift_diff_end)
      << " vs 1% amplitude " << sci(0.01 * r.lift_amplitude) << ", drag diff " << sci(r.drag_diff_end)
      << " vs " << sci(0.01 * r.drag_amplitude);
    return {ok, d.str()};
}

Verdict properties(const fs::path& out, std::ostream& log) {
    const PropsReport r = run_props(config_for(Experiment::props, out / "props"), &log);
    std::ostringstream d;
    int failed = 0;
    for (const auto& p : r.results) {
        if (p.passed) continue;
        d << (failed++ ? ", " : "failed: ") << p.name;
    }
    if (!failed) d << r.results.size() << " properties pass";
    return {r.all_passed(), d.str()};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Verdict(const fs::path&, std::ostream&)> check;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks for the nudged Navier-Stokes solver"};
    std::string out = "out/acceptance";
    std::vector<int> only;
    bool verbose = false;
    app.add_option("--out", out, "output directory");
    app.add_option("--only", only, "run only these criteria (1-6)")->check(CLI::Range(1, 6));
    app.add_flag("--verbose", verbose, "stream experiment logs");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all = {
        {1, "coupled convergence", 300, coupled_convergence},
        {2, "temporal convergence", 300, temporal_convergence},
        {3, "nudging strength sweep", 300, mu_sweep},
        {4, "no-flow pressure robustness", 180, noflow},
        {5, "cylinder tracking", 900, cylinder},
        {6, "property suites", 120, properties},
    };
    const std::set<int> wanted(only.begin(), only.end());
    fs::create_directories(out);
    std::ofstream logfile(fs::path(out) / "acceptance.log");
    std::ostream& log = verbose ? std::cout : static_cast<std::ostream&>(logfile);

    int failures = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check(out, log);
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = v.passed && in_time;
        failures += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << v.detail << "; "
                  << fix(secs, 1) << " s of " << c.budget_s << " s" << (in_time ? "" : " OVER BUDGET") << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
