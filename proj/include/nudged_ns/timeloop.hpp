#pragma once

#include "nudged_ns/fespace.hpp"
#include "nudged_ns/linalg.hpp"
#include "nudged_ns/observe.hpp"
#include "nudged_ns/operators.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nudged_ns {

enum class Scheme { BE, BDF2 };

const char* to_string(Scheme s);
Scheme parse_scheme(std::string_view name);
ElementPair parse_element(std::string_view name);

struct RunConfig {
    ElementPair element = ElementPair::TaylorHood;
    Scheme scheme = Scheme::BDF2;
    double nu = 1.0;
    double gamma = 0.0;
    double mu = 0.0;
    double dt = 0.01;
    double t_end = 1.0;
    /// Multiplies the time derivative and the convection term.
    double c_t = 1.0;
    ObserverKind observer = ObserverKind::identity;
    std::shared_ptr<const Mesh> coarse_mesh;
    DirichletBC bc{{BoundaryTag::wall}, {}};
    /// Body force; empty means zero.
    VectorFunction forcing;
    /// Record diagnostics every `cadence` steps (and always at the last step).
    int cadence = 1;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

/// Solution history. v is v^n, v_prev is v^{n-1} (unused by BE).
struct StepState {
    double t = 0.0;
    long n = 0;
    std::vector<double> v;
    std::vector<double> v_prev;
    std::vector<double> q;
};

/// Per-step solver output besides the new state.
struct StepInfo {
    double discrete_div = 0.0;  // ||B v^{n+1}||_inf
    double lagrange = 0.0;      // multiplier of the mean-pressure constraint
};

/// Coupled velocity-pressure solver for one mesh and configuration.
///
/// Unknowns are ordered [velocity | pressure | multiplier]. The sparsity
/// pattern of the coupled matrix is built once; each step copies the static
/// values, scatters the convection block into fixed positions, eliminates
/// Dirichlet dofs and refactorizes with the stored symbolic analysis.
class FlowSolver {
public:
    FlowSolver(std::shared_ptr<const Mesh> mesh, RunConfig cfg);

    const RunConfig& config() const { return cfg_; }
    const FESpace& velocity_space() const { return v_space_; }
    const FESpace& pressure_space() const { return p_space_; }
    const Observer& observer() const { return observer_; }

    const SparseMatrix& mass() const { return mass_; }
    const SparseMatrix& stiffness() const { return stiffness_; }
    const SparseMatrix& graddiv() const { return graddiv_; }
    const SparseMatrix& div() const { return div_; }
    const SparseMatrix& nudging() const { return nudging_; }
    /// Transpose of div(), the pressure-gradient block.
    const SparseMatrix& div_transpose() const { return div_t_; }
    const std::vector<double>& pressure_mean() const { return mean_; }
    const DirichletDofs& dirichlet() const { return bc_dofs_; }

    int n_system() const { return n_v_ + n_p_ + 1; }

    /// State at time t with v^n = v and, for BDF2, v^{n-1} = v_prev.
    StepState make_state(double t, std::vector<double> v, std::vector<double> v_prev = {}) const;

    /// One backward-Euler step; u_obs holds the coefficients of u^{n+1} on
    /// the velocity space and may be empty when mu = 0.
    StepState step_be(const StepState& s, std::span<const double> u_obs, StepInfo* info = nullptr);
    /// One BDF2 step using v^n and v^{n-1}.
    StepState step_bdf2(const StepState& s, std::span<const double> u_obs, StepInfo* info = nullptr);
    /// v^1 from one BE step; the returned state carries v^0 as history.
    StepState bootstrap(const StepState& s0, std::span<const double> u_obs, StepInfo* info = nullptr);

    /// Number of linear solves performed so far.
    long solve_count() const { return solves_; }

    /// Load vector of the configured forcing at time t (zeros without forcing).
    std::vector<double> load(double t) const;

    /// Coupled matrix with velocity block mass_coef*c_t*M + c_t*C(w) + nu*K +
    /// gamma*G + mu*N, before boundary conditions.
    SparseMatrix system_matrix(double mass_coef, std::span<const double> w) const;

private:
    enum Kind { kBE = 0, kBDF2 = 1 };
    StepState advance(const StepState& s, Kind kind, std::span<const double> u_obs, StepInfo* info);
    std::vector<double> static_part(double mass_coef) const;

    RunConfig cfg_;
    std::shared_ptr<const Mesh> mesh_;
    FESpace v_space_;
    FESpace p_space_;
    Observer observer_;
    int n_v_ = 0;
    int n_p_ = 0;

    SparseMatrix mass_, stiffness_, graddiv_, div_, div_t_, nudging_;
    std::vector<double> mean_;
    DirichletDofs bc_dofs_;

    SparseMatrix pattern_;
    std::array<std::vector<double>, 2> static_values_;
    std::vector<std::ptrdiff_t> conv_pos_;  // per cell, 36 entries per component
    DirichletConstraint constraint_;
    SparseMatrix work_;
    LuFactorization lu_;
    long solves_ = 0;
};

/// Source of the reference solution u^{n+1} that is observed.
class ReferenceSource {
public:
    virtual ~ReferenceSource() = default;
    /// Velocity coefficients of the reference at step index n (time t).
    virtual std::vector<double> velocity(long n, double t) const = 0;
};

/// Interpolant of a closed-form velocity field.
class AnalyticReference : public ReferenceSource {
public:
    AnalyticReference(const FESpace& v, VectorFunction u) : space_(&v), u_(std::move(u)) {}
    std::vector<double> velocity(long n, double t) const override;

private:
    const FESpace* space_;
    VectorFunction u_;
};

/// Trajectory file: magic, header, then fixed-size records.
struct TrajectoryHeader {
    std::uint32_t n_v = 0;
    std::uint32_t n_p = 0;
    double dt = 0.0;
    double t0 = 0.0;
    std::uint32_t n_records = 0;
};

struct TrajectoryRecord {
    double t = 0.0;
    std::vector<double> v;
    std::vector<double> q;
};

/// Streams records to disk; the record count in the header is patched on close.
class TrajectoryWriter {
public:
    TrajectoryWriter(const std::filesystem::path& path, std::uint32_t n_v, std::uint32_t n_p, double dt, double t0);
    ~TrajectoryWriter();
    void append(double t, std::span<const double> v, std::span<const double> q);
    void close();
    std::uint32_t records() const { return count_; }

private:
    std::ofstream out_;
    std::uint32_t n_v_, n_p_;
    std::uint32_t count_ = 0;
};

/// Random-access reader over a trajectory file. Not safe for concurrent reads.
class TrajectoryReader {
public:
    explicit TrajectoryReader(const std::filesystem::path& path);
    const TrajectoryHeader& header() const { return h_; }
    TrajectoryRecord read(std::uint32_t k) const;

private:
    mutable std::ifstream in_;
    TrajectoryHeader h_;
};

/// Observations from a stored run: step n of the assimilating run observes
/// record offset + n.
class TrajectoryReference : public ReferenceSource {
public:
    TrajectoryReference(std::shared_ptr<const TrajectoryReader> traj, const FESpace& v, double dt, std::uint32_t offset);
    std::vector<double> velocity(long n, double t) const override;

private:
    std::shared_ptr<const TrajectoryReader> traj_;
    std::uint32_t offset_;
};

/// Hook payload. For n = 0 only `state` is set.
struct Sample {
    const StepState* state = nullptr;
    const StepState* prev = nullptr;
    const StepInfo* info = nullptr;
    Scheme scheme = Scheme::BE;  // scheme of the step just taken
};

using SampleFn = std::function<void(const FlowSolver&, const Sample&)>;

struct RunOptions {
    /// Optional v^1 for BDF2; otherwise one BE step is taken.
    std::optional<std::vector<double>> v1;
    /// For BDF2: take the first step with BDF2 using the initial history
    /// directly instead of a BE bootstrap.
    bool bdf2_from_history = false;
    /// Called after every step whose index is a multiple of the cadence, at
    /// the final step, and for the initial state (n = 0).
    SampleFn on_sample;
    /// Called after every step.
    SampleFn on_step;
};

struct RunResult {
    StepState final_state;
    long steps = 0;
    long solves = 0;
    double max_discrete_div = 0.0;
};

/// Iterate from initial state s0 to cfg.t_end.
RunResult run(FlowSolver& solver, StepState s0, const ReferenceSource* ref, const RunOptions& opt = {});

/// Number of steps to reach t_end from t0 with step dt (rounded to nearest).
long step_count(double t0, double t_end, double dt);

struct Estimates {
    double c_i = 1.0;
    double c_p = 1.0;
    double m = 1.0;
};

struct ParameterDiagnostics {
    double h = 0.0;
    double alpha = 0.0;
    double lambda = 0.0;
    double mu_upper = 0.0;   // nu / (2 C_I^2 h^2)
    bool mu_admissible = true;
    bool alpha_negative = false;
    std::vector<std::string> warnings;
};

ParameterDiagnostics parameter_report(const RunConfig& cfg, double h, const Estimates& est);

} // namespace nudged_ns
