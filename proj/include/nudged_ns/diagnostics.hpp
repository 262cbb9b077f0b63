#pragma once

#include "nudged_ns/fespace.hpp"
#include "nudged_ns/linalg.hpp"
#include "nudged_ns/timeloop.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nudged_ns {

/// Velocity gradient of a closed-form field; row k is grad u_k.
using GradientFunction = std::function<std::array<Vec2, 2>(double x, double y, double t)>;

/// ||v_h - u|| in L2 by the degree-10 rule.
double l2_error(const FESpace& s, std::span<const double> coeffs, const VectorFunction& exact, double t);
double l2_error(const FESpace& s, std::span<const double> coeffs, const ScalarFunction& exact, double t);
/// sqrt(d^T M d) with d = a - b, for two fields on the same space.
double l2_error(const SparseMatrix& mass, std::span<const double> a, std::span<const double> b);
double l2_norm(const SparseMatrix& mass, std::span<const double> a);

/// ||grad(v_h - u)|| in L2 by the degree-10 rule.
double h1_error(const FESpace& s, std::span<const double> coeffs, const GradientFunction& exact, double t);
/// sqrt(d^T K d) with d = a - b.
double h1_error(const SparseMatrix& stiffness, std::span<const double> a, std::span<const double> b);

/// ||div v_h|| in L2.
double div_l2(const FESpace& s, std::span<const double> coeffs);

struct LiftDrag {
    double drag = 0.0;
    double lift = 0.0;
};

/// Drag and lift coefficients from the momentum residual tested with the
/// field equal to e_1 (drag) or e_2 (lift) at cylinder nodes and zero at all
/// other nodes, scaled by -20. `prev` is the state before the step that
/// produced `cur`; `scheme` is the scheme of that step. The nudging term is
/// not part of the residual.
LiftDrag lift_drag(const FlowSolver& solver, const StepState& prev, const StepState& cur, Scheme scheme);

struct RateRow {
    double step = 0.0;
    double error = 0.0;
    std::optional<double> rate;
};

/// rate_k = log(e_{k-1} / e_k) / log(step_{k-1} / step_k)
std::vector<RateRow> convergence_rates(std::span<const double> errors, std::span<const double> steps);

struct DecayMetrics {
    double plateau = 0.0;
    double rate = 0.0;
    std::optional<double> time_to_threshold;
};

/// Plateau: median of the last 10% of samples (at least one). Rate: least
/// squares slope of log(value) over samples above 3x the plateau. Time to
/// threshold: first time with value <= 3x the plateau.
DecayMetrics decay_metrics(std::span<const double> times, std::span<const double> values);

struct SeriesRow {
    double time = 0.0;
    std::optional<double> l2_error, h1_error, div_l2, lift, drag, l2_norm;
};

class TimeSeries {
public:
    /// Times must be strictly increasing.
    void push(const SeriesRow& r);
    const std::vector<SeriesRow>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    std::vector<double> times() const;
    /// Values of one channel by column name; rows without the channel are skipped.
    std::vector<double> channel(const std::string& name, std::vector<double>* times = nullptr) const;

    std::string to_csv() const;
    void write_csv(const std::filesystem::path& path) const;

private:
    std::vector<SeriesRow> rows_;
};

extern const char* const kCsvHeader;

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

} // namespace nudged_ns
