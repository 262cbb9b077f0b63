#pragma once

#include "nudged_ns/config.hpp"
#include "nudged_ns/diagnostics.hpp"
#include "nudged_ns/timeloop.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nudged_ns {

struct Ladder {
    std::string name;  // spatial, temporal or coupled
    std::vector<RateRow> rows;
};

struct Exp1Result {
    std::vector<Ladder> ladders;
};

/// Final-time L2 errors of the BDF2 nudged scheme against the manufactured
/// solution, with observed rates. Writes rates_<ladder>.csv per ladder.
Exp1Result exp1_convergence(const Config& cfg, std::ostream* log = nullptr);

/// Final-time L2 error of one manufactured-solution run.
double exp1_single(const Config& cfg, int n, double dt, std::ostream* log = nullptr);

struct MuSweepResult {
    std::vector<double> mu;
    std::vector<TimeSeries> series;
};

/// Error history for each nudging strength. Writes mu_<value>.csv.
MuSweepResult exp1_mu_sweep(const Config& cfg, std::ostream* log = nullptr);

struct NoflowVariant {
    std::string name;
    ElementPair element = ElementPair::TaylorHood;
    double gamma = 0.0;
    TimeSeries series;
    double final_error = 0.0;
    double max_div_l2 = 0.0;
};

struct NoflowResult {
    std::vector<NoflowVariant> variants;
};

/// No-flow test on the barycenter-refined square. Writes <variant>.csv.
NoflowResult exp2_noflow(const Config& cfg, std::ostream* log = nullptr);

struct CylinderDnsResult {
    TimeSeries series;
    std::filesystem::path trajectory;
    long steps = 0;
};

/// Unnudged run from rest; stores the trajectory from just before the
/// spin-up time onward. Writes dns.csv and the trajectory file.
CylinderDnsResult exp3_cylinder_dns(const Config& cfg, std::ostream* log = nullptr);

struct CylinderDaResult {
    /// l2_error is ||v_DA - u_DNS||; lift and drag of the nudged run.
    TimeSeries da;
    /// Lift and drag of the stored run at the same times.
    TimeSeries dns;
    DecayMetrics decay;
    double diff_first = 0.0;    // at t = dt
    double diff_last = 0.0;     // at the end of the window
    double lift_amplitude = 0.0;
    double drag_amplitude = 0.0;
    double lift_diff_end = 0.0; // max over the last tenth of the window
    double drag_diff_end = 0.0;
};

/// Nudged run from zero observing the stored trajectory. Runs the DNS first
/// when the trajectory file does not exist. Writes da.csv, dns_window.csv
/// and summary.txt.
CylinderDaResult exp3_cylinder_da(const Config& cfg, std::ostream* log = nullptr);

/// Output directory of a configuration, created on demand, with
/// resolved-config.txt written into it.
std::filesystem::path prepare_output(const Config& cfg);

} // namespace nudged_ns
