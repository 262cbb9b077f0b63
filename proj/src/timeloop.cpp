#include "nudged_ns/timeloop.hpp"

#include "nudged_ns/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

namespace nudged_ns {

static_assert(std::endian::native == std::endian::little, "trajectory IO assumes a little-endian host");

const char* to_string(Scheme s) { return s == Scheme::BE ? "BE" : "BDF2"; }

Scheme parse_scheme(std::string_view name) {
    if (name == "BE" || name == "be") return Scheme::BE;
    if (name == "BDF2" || name == "bdf2") return Scheme::BDF2;
    throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

ElementPair parse_element(std::string_view name) {
    if (name == "TH" || name == "TaylorHood") return ElementPair::TaylorHood;
    if (name == "SV" || name == "ScottVogelius") return ElementPair::ScottVogelius;
    throw ConfigError("unknown element pair '" + std::string(name) + "'");
}

void RunConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(nu > 0.0)) throw ConfigError("nu must be positive");
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be nonnegative");
    if (!(mu >= 0.0)) throw ConfigError("mu must be nonnegative");
    if (!(c_t > 0.0)) throw ConfigError("c_t must be positive");
    if (cadence < 1) throw ConfigError("cadence must be at least 1");
}

namespace {

const RunConfig& checked(const RunConfig& cfg, const Mesh& m) {
    cfg.validate();
    if (requires_barycentric(cfg.element) && !m.is_barycentric_refinement()) {
        throw ConfigError("Scott-Vogelius elements need a barycenter-refined mesh");
    }
    for (BoundaryTag tag : cfg.bc.tags) {
        if (!m.has_tag(tag)) throw UnknownTagError(std::string("boundary tag '") + to_string(tag) + "' not present on the mesh");
    }
    return cfg;
}

// Without nudging the observer is never applied, so no coarse mesh is needed.
ObserverKind effective_kind(const RunConfig& cfg) { return cfg.mu > 0.0 ? cfg.observer : ObserverKind::identity; }

void accumulate(std::vector<double>& vals, const SparseMatrix& pattern, const SparseMatrix& x, double coef,
                int row_off, int col_off, bool transpose) {
    if (coef == 0.0) return;
    for (int i = 0; i < x.rows(); ++i) {
        for (int k = x.row_ptr()[i]; k < x.row_ptr()[i + 1]; ++k) {
            const int r = (transpose ? x.col_idx()[k] + col_off : i + row_off);
            const int c = (transpose ? i + row_off : x.col_idx()[k] + col_off);
            vals[static_cast<std::size_t>(pattern.find(r, c))] += coef * x.values()[k];
        }
    }
}

void add_pattern(std::vector<Triplet>& t, const SparseMatrix& x, int row_off, int col_off, bool transpose) {
    for (int i = 0; i < x.rows(); ++i) {
        for (int k = x.row_ptr()[i]; k < x.row_ptr()[i + 1]; ++k) {
            if (transpose) t.push_back({x.col_idx()[k] + col_off, i + row_off, 0.0});
            else t.push_back({i + row_off, x.col_idx()[k] + col_off, 0.0});
        }
    }
}

} // namespace

FlowSolver::FlowSolver(std::shared_ptr<const Mesh> mesh, RunConfig cfg)
    : cfg_(checked(cfg, *mesh)),
      mesh_(std::move(mesh)),
      v_space_(mesh_, Family::P2, 2),
      p_space_(mesh_, pressure_family(cfg_.element), 1),
      observer_(effective_kind(cfg_), v_space_, cfg_.coarse_mesh) {
    n_v_ = v_space_.n_dofs();
    n_p_ = p_space_.n_dofs();
    mass_ = assemble_mass(v_space_);
    stiffness_ = assemble_stiffness(v_space_);
    graddiv_ = assemble_graddiv(v_space_);
    div_ = assemble_div(v_space_, p_space_);
    div_t_ = div_.transpose();
    if (cfg_.mu > 0.0) nudging_ = assemble_nudging(v_space_, observer_);
    mean_ = pressure_mean_vector(p_space_);
    bc_dofs_ = v_space_.dirichlet_dofs(cfg_.bc.tags);

    const int n = n_system();
    const int lam = n_v_ + n_p_;
    std::vector<Triplet> t;
    add_pattern(t, mass_, 0, 0, false);
    add_pattern(t, graddiv_, 0, 0, false);
    if (cfg_.mu > 0.0) add_pattern(t, nudging_, 0, 0, false);
    add_pattern(t, div_, n_v_, 0, false);
    add_pattern(t, div_, n_v_, 0, true);
    for (int i = 0; i < n_p_; ++i) {
        t.push_back({n_v_ + i, lam, 0.0});
        t.push_back({lam, n_v_ + i, 0.0});
    }
    pattern_ = from_triplets(n, n, std::move(t));

    static_values_[kBE] = static_part(1.0 / cfg_.dt);
    static_values_[kBDF2] = static_part(1.5 / cfg_.dt);

    const int nc = mesh_->num_cells();
    conv_pos_.resize(static_cast<std::size_t>(nc) * 72);
    for (int c = 0; c < nc; ++c) {
        const auto dofs = v_space_.cell_dofs(c);
        for (int a = 0; a < 6; ++a) {
            for (int b = 0; b < 6; ++b) {
                for (int k = 0; k < 2; ++k) {
                    conv_pos_[static_cast<std::size_t>(c) * 72 + static_cast<std::size_t>((a * 6 + b) * 2 + k)] =
                        pattern_.find(2 * dofs[static_cast<std::size_t>(a)] + k, 2 * dofs[static_cast<std::size_t>(b)] + k);
                }
            }
        }
    }
    constraint_ = DirichletConstraint(pattern_, bc_dofs_.dofs);
    work_ = pattern_;
}

StepState FlowSolver::make_state(double t, std::vector<double> v, std::vector<double> v_prev) const {
    if (static_cast<int>(v.size()) != n_v_) throw DimensionError("make_state: velocity has the wrong size");
    if (!v_prev.empty() && static_cast<int>(v_prev.size()) != n_v_) throw DimensionError("make_state: history has the wrong size");
    StepState s;
    s.t = t;
    s.v = std::move(v);
    s.v_prev = std::move(v_prev);
    s.q.assign(static_cast<std::size_t>(n_p_), 0.0);
    return s;
}

std::vector<double> FlowSolver::load(double t) const {
    if (!cfg_.forcing) return std::vector<double>(static_cast<std::size_t>(n_v_), 0.0);
    return assemble_load(v_space_, cfg_.forcing, t);
}

SparseMatrix FlowSolver::system_matrix(double mass_coef, std::span<const double> w) const {
    SparseMatrix a = pattern_;
    a.values() = static_part(mass_coef);
    accumulate(a.values(), pattern_, assemble_convection(v_space_, w), cfg_.c_t, 0, 0, false);
    return a;
}

std::vector<double> FlowSolver::static_part(double mass_coef) const {
    std::vector<double> vals(pattern_.nnz(), 0.0);
    const int lam = n_v_ + n_p_;
    accumulate(vals, pattern_, mass_, mass_coef * cfg_.c_t, 0, 0, false);
    accumulate(vals, pattern_, stiffness_, cfg_.nu, 0, 0, false);
    accumulate(vals, pattern_, graddiv_, cfg_.gamma, 0, 0, false);
    if (cfg_.mu > 0.0) accumulate(vals, pattern_, nudging_, cfg_.mu, 0, 0, false);
    accumulate(vals, pattern_, div_, -1.0, n_v_, 0, false);
    accumulate(vals, pattern_, div_, -1.0, n_v_, 0, true);
    for (int i = 0; i < n_p_; ++i) {
        vals[static_cast<std::size_t>(pattern_.find(n_v_ + i, lam))] += mean_[static_cast<std::size_t>(i)];
        vals[static_cast<std::size_t>(pattern_.find(lam, n_v_ + i))] += mean_[static_cast<std::size_t>(i)];
    }
    return vals;
}

StepState FlowSolver::advance(const StepState& s, Kind kind, std::span<const double> u_obs, StepInfo* info) {
    const long step = s.n + 1;
    if (static_cast<int>(s.v.size()) != n_v_) throw DimensionError("step: state has the wrong size");
    if (kind == kBDF2 && static_cast<int>(s.v_prev.size()) != n_v_) throw DimensionError("step_bdf2: v^{n-1} missing");
    if (cfg_.mu > 0.0 && static_cast<int>(u_obs.size()) != n_v_) throw DimensionError("step: observation has the wrong size");

    const double t1 = s.t + cfg_.dt;
    std::vector<double> w = s.v;
    std::vector<double> hist = s.v;
    double hist_coef = cfg_.c_t / cfg_.dt;
    if (kind == kBDF2) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] = 2.0 * s.v[i] - s.v_prev[i];
            hist[i] = 4.0 * s.v[i] - s.v_prev[i];
        }
        hist_coef = cfg_.c_t / (2.0 * cfg_.dt);
    }

    auto& vals = work_.values();
    vals = static_values_[static_cast<std::size_t>(kind)];
    std::array<double, 36> local{};
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        convection_cell_matrix(v_space_, w, c, local);
        const std::ptrdiff_t* pos = conv_pos_.data() + static_cast<std::size_t>(c) * 72;
        for (std::size_t e = 0; e < 36; ++e) {
            const double v = cfg_.c_t * local[e];
            vals[static_cast<std::size_t>(pos[2 * e])] += v;
            vals[static_cast<std::size_t>(pos[2 * e + 1])] += v;
        }
    }

    std::vector<double> rhs(static_cast<std::size_t>(n_system()), 0.0);
    const auto mh = matvec(mass_, hist);
    const auto f = load(t1);
    for (int i = 0; i < n_v_; ++i) rhs[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(i)] + hist_coef * mh[static_cast<std::size_t>(i)];
    if (cfg_.mu > 0.0) axpy(cfg_.mu, matvec(nudging_, u_obs), std::span<double>(rhs.data(), static_cast<std::size_t>(n_v_)));
    constraint_.apply(work_, rhs, boundary_values(bc_dofs_, cfg_.bc.value, t1));

    std::vector<double> x;
    try {
        lu_.factorize(work_);
        x = lu_.solve(rhs);
    } catch (const SingularMatrixError& e) {
        throw SolverError(e.what(), step);
    }
    ++solves_;
    if (!residual_ok(work_, x, rhs)) throw SolverError("linear solve residual above tolerance", step);

    StepState out;
    out.t = t1;
    out.n = step;
    out.v.assign(x.begin(), x.begin() + n_v_);
    out.q.assign(x.begin() + n_v_, x.begin() + n_v_ + n_p_);
    out.v_prev = s.v;
    if (info) {
        info->discrete_div = norm_linf(matvec(div_, out.v));
        info->lagrange = x.back();
    }
    return out;
}

StepState FlowSolver::step_be(const StepState& s, std::span<const double> u_obs, StepInfo* info) {
    return advance(s, kBE, u_obs, info);
}

StepState FlowSolver::step_bdf2(const StepState& s, std::span<const double> u_obs, StepInfo* info) {
    return advance(s, kBDF2, u_obs, info);
}

StepState FlowSolver::bootstrap(const StepState& s0, std::span<const double> u_obs, StepInfo* info) {
    return advance(s0, kBE, u_obs, info);
}

std::vector<double> AnalyticReference::velocity(long, double t) const { return interpolate_function(*space_, u_, t); }

namespace {

constexpr char kMagic[8] = {'N', 'S', 'T', 'R', 'A', 'J', '0', '1'};
constexpr std::streamoff kHeaderSize = 8 + 4 + 4 + 8 + 8 + 4;
constexpr std::streamoff kCountOffset = 8 + 4 + 4 + 8 + 8;

template <class T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw TrajectoryError("trajectory: unexpected end of file");
    return v;
}

} // namespace

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path, std::uint32_t n_v, std::uint32_t n_p, double dt,
                                   double t0)
    : out_(path, std::ios::binary | std::ios::trunc), n_v_(n_v), n_p_(n_p) {
    if (!out_) throw TrajectoryError("cannot open " + path.string() + " for writing");
    out_.write(kMagic, 8);
    put(out_, n_v);
    put(out_, n_p);
    put(out_, dt);
    put(out_, t0);
    put(out_, std::uint32_t{0});
}

TrajectoryWriter::~TrajectoryWriter() {
    try {
        close();
    } catch (...) {
    }
}

void TrajectoryWriter::append(double t, std::span<const double> v, std::span<const double> q) {
    if (v.size() != n_v_ || q.size() != n_p_) throw TrajectoryError("trajectory record has the wrong size");
    put(out_, t);
    out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
    out_.write(reinterpret_cast<const char*>(q.data()), static_cast<std::streamsize>(q.size_bytes()));
    ++count_;
}

void TrajectoryWriter::close() {
    if (!out_.is_open()) return;
    out_.seekp(kCountOffset);
    put(out_, count_);
    out_.close();
    if (out_.fail()) throw TrajectoryError("trajectory write failed");
}

TrajectoryReader::TrajectoryReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw TrajectoryError("cannot open trajectory " + path.string());
    char magic[8];
    in_.read(magic, 8);
    if (!in_ || std::memcmp(magic, kMagic, 8) != 0) throw TrajectoryError(path.string() + " is not a trajectory file");
    h_.n_v = get<std::uint32_t>(in_);
    h_.n_p = get<std::uint32_t>(in_);
    h_.dt = get<double>(in_);
    h_.t0 = get<double>(in_);
    h_.n_records = get<std::uint32_t>(in_);
    const auto size = std::filesystem::file_size(path);
    const auto expect = static_cast<std::uintmax_t>(kHeaderSize) +
                        static_cast<std::uintmax_t>(h_.n_records) * 8u * (1u + h_.n_v + h_.n_p);
    if (size != expect) throw TrajectoryError(path.string() + ": size does not match the record count");
}

TrajectoryRecord TrajectoryReader::read(std::uint32_t k) const {
    if (k >= h_.n_records) throw TrajectoryError("trajectory exhausted at record " + std::to_string(k));
    const std::streamoff rec = 8 * static_cast<std::streamoff>(1 + h_.n_v + h_.n_p);
    in_.clear();
    in_.seekg(kHeaderSize + rec * k);
    TrajectoryRecord r;
    r.t = get<double>(in_);
    r.v.resize(h_.n_v);
    r.q.resize(h_.n_p);
    in_.read(reinterpret_cast<char*>(r.v.data()), static_cast<std::streamsize>(8 * r.v.size()));
    in_.read(reinterpret_cast<char*>(r.q.data()), static_cast<std::streamsize>(8 * r.q.size()));
    if (!in_) throw TrajectoryError("trajectory: unexpected end of file");
    return r;
}

TrajectoryReference::TrajectoryReference(std::shared_ptr<const TrajectoryReader> traj, const FESpace& v, double dt,
                                         std::uint32_t offset)
    : traj_(std::move(traj)), offset_(offset) {
    const auto& h = traj_->header();
    if (static_cast<int>(h.n_v) != v.n_dofs()) throw TrajectoryError("trajectory velocity space does not match the run");
    if (std::abs(h.dt - dt) > 1e-12 * dt) throw TrajectoryError("trajectory dt does not match the run dt");
}

std::vector<double> TrajectoryReference::velocity(long n, double) const {
    return traj_->read(offset_ + static_cast<std::uint32_t>(n)).v;
}

long step_count(double t0, double t_end, double dt) {
    return std::max(0L, std::lround((t_end - t0) / dt));
}

RunResult run(FlowSolver& solver, StepState s0, const ReferenceSource* ref, const RunOptions& opt) {
    const RunConfig& cfg = solver.config();
    if (cfg.mu > 0.0 && !ref) throw ConfigError("nudging needs a reference source");
    const long steps = step_count(s0.t, cfg.t_end, cfg.dt);
    const long solves0 = solver.solve_count();
    RunResult res;
    StepState cur = std::move(s0);
    if (opt.on_sample) opt.on_sample(solver, Sample{&cur, nullptr, nullptr, cfg.scheme});
    for (long k = 0; k < steps; ++k) {
        std::vector<double> u_obs;
        if (cfg.mu > 0.0) u_obs = ref->velocity(cur.n + 1, cur.t + cfg.dt);
        StepInfo info;
        StepState next;
        Scheme used = cfg.scheme;
        if (cfg.scheme == Scheme::BE) {
            next = solver.step_be(cur, u_obs, &info);
        } else if (k == 0 && opt.v1) {
            next = solver.make_state(cur.t + cfg.dt, *opt.v1, cur.v);
            next.n = cur.n + 1;
        } else if (k == 0 && !opt.bdf2_from_history) {
            next = solver.bootstrap(cur, u_obs, &info);
            used = Scheme::BE;
        } else {
            next = solver.step_bdf2(cur, u_obs, &info);
        }
        res.max_discrete_div = std::max(res.max_discrete_div, info.discrete_div);
        const Sample sample{&next, &cur, &info, used};
        if (opt.on_step) opt.on_step(solver, sample);
        if (opt.on_sample && ((k + 1) % cfg.cadence == 0 || k + 1 == steps)) opt.on_sample(solver, sample);
        cur = std::move(next);
    }
    res.steps = steps;
    res.solves = solver.solve_count() - solves0;
    res.final_state = std::move(cur);
    return res;
}

ParameterDiagnostics parameter_report(const RunConfig& cfg, double h, const Estimates& est) {
    ParameterDiagnostics d;
    d.h = h;
    d.alpha = cfg.nu - 2.0 * cfg.mu * est.c_i * est.c_i * h * h;
    d.lambda = d.alpha / (est.c_p * est.c_p);
    d.mu_upper = cfg.nu / (2.0 * est.c_i * est.c_i * h * h);
    d.alpha_negative = d.alpha < 0.0;
    d.mu_admissible = cfg.mu == 0.0 || (cfg.mu >= 1.0 && cfg.mu < d.mu_upper);
    std::ostringstream msg;
    if (d.alpha_negative) {
        msg << "alpha = " << d.alpha << " is negative; the stability estimates do not apply";
        d.warnings.push_back(msg.str());
    }
    if (!d.mu_admissible) {
        std::ostringstream m2;
        m2 << "mu = " << cfg.mu << " lies outside [1, " << d.mu_upper << ")";
        d.warnings.push_back(m2.str());
    }
    return d;
}

} // namespace nudged_ns
