#include "nudged_ns/experiments.hpp"

#include "nudged_ns/error.hpp"
#include "nudged_ns/mesh.hpp"
#include "nudged_ns/problems.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace nudged_ns {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

RunConfig base_run(const Config& c) {
    RunConfig r;
    r.nu = c.get_double("run.nu");
    if (c.has("run.gamma")) r.gamma = c.get_double("run.gamma");
    if (c.has("run.mu")) r.mu = c.get_double("run.mu");
    if (c.has("run.dt")) r.dt = c.get_double("run.dt");
    if (c.has("run.t_end")) r.t_end = c.get_double("run.t_end");
    if (c.has("run.cadence")) r.cadence = c.get_int("run.cadence");
    if (c.has("run.element")) r.element = parse_element(c.get("run.element"));
    r.scheme = parse_scheme(c.get("run.scheme"));
    r.observer = parse_observer_kind(c.get("obs.kind"));
    return r;
}

void report_parameters(const RunConfig& r, double h, std::ostream* log) {
    if (!log) return;
    const auto d = parameter_report(r, h, Estimates{});
    for (const auto& w : d.warnings) *log << "  warning: " << w << " (C_I = 1, h = " << num(h) << ")\n";
}

std::shared_ptr<const Mesh> square(int n) {
    if (n < 1) throw ConfigError("mesh size must be positive");
    return std::make_shared<const Mesh>(gen_unit_square(n));
}

void write_rates(const fs::path& path, const char* step_name, const std::vector<RateRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << step_name << ",error,rate\n";
    for (const auto& r : rows) {
        out << format_double(r.step) << ',' << format_double(r.error) << ',';
        if (r.rate) out << format_double(*r.rate);
        out << '\n';
    }
}

void write_summary(const fs::path& path, const std::vector<std::pair<std::string, double>>& kv) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& [k, v] : kv) out << k << " = " << format_double(v) << '\n';
}

StepState zero_state(const FlowSolver& s) {
    const std::vector<double> z(static_cast<std::size_t>(s.velocity_space().n_dofs()), 0.0);
    return s.make_state(0.0, z, z);
}

} // namespace

fs::path prepare_output(const Config& cfg) {
    const fs::path dir = cfg.get("out.dir");
    if (dir.empty()) throw ConfigError("out.dir is empty");
    fs::create_directories(dir);
    cfg.write_resolved(dir / "resolved-config.txt");
    return dir;
}

double exp1_single(const Config& cfg, int n, double dt, std::ostream* log) {
    const auto t0 = Clock::now();
    auto mesh = square(n);
    RunConfig r = base_run(cfg);
    r.dt = dt;
    r.coarse_mesh = mesh;
    r.forcing = problems::mms_forcing(r.nu);
    r.bc = {{BoundaryTag::wall}, problems::mms_velocity};
    FlowSolver solver(mesh, r);
    AnalyticReference ref(solver.velocity_space(), problems::mms_velocity);
    const auto res = run(solver, zero_state(solver), &ref);
    const double e = l2_error(solver.velocity_space(), res.final_state.v, VectorFunction(problems::mms_velocity),
                              res.final_state.t);
    if (log) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  h = 1/%d  dt = %g  steps = %ld  error = %.4e  (%.1f s)\n", n, dt, res.steps, e,
                      seconds_since(t0));
        *log << buf;
    }
    return e;
}

Exp1Result exp1_convergence(const Config& cfg, std::ostream* log) {
    const fs::path dir = prepare_output(cfg);
    Exp1Result out;
    for (const auto& name : cfg.get_strings("exp1.ladders")) {
        std::vector<double> errors, steps;
        const char* step_name = "h";
        if (log) *log << name << " ladder\n";
        if (name == "spatial") {
            const double dt = cfg.get_double("exp1.spatial_dt");
            for (int n : cfg.get_ints("exp1.spatial_n")) {
                errors.push_back(exp1_single(cfg, n, dt, log));
                steps.push_back(1.0 / n);
            }
        } else if (name == "temporal") {
            const int n = cfg.get_int("exp1.temporal_n");
            step_name = "dt";
            for (double dt : cfg.get_doubles("exp1.temporal_dt")) {
                errors.push_back(exp1_single(cfg, n, dt, log));
                steps.push_back(dt);
            }
        } else if (name == "coupled") {
            const double ratio = cfg.get_double("exp1.coupled_ratio");
            for (int n : cfg.get_ints("exp1.coupled_n")) {
                errors.push_back(exp1_single(cfg, n, ratio / n, log));
                steps.push_back(1.0 / n);
            }
        } else {
            throw ConfigError("exp1.ladders: unknown ladder '" + name + "'");
        }
        Ladder l{name, convergence_rates(errors, steps)};
        write_rates(dir / ("rates_" + name + ".csv"), step_name, l.rows);
        if (log) {
            for (const auto& row : l.rows) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "  %s = %-10g error = %.3e  rate = %s\n", step_name, row.step, row.error,
                              row.rate ? num(*row.rate).c_str() : "-");
                *log << buf;
            }
        }
        out.ladders.push_back(std::move(l));
    }
    return out;
}

MuSweepResult exp1_mu_sweep(const Config& cfg, std::ostream* log) {
    const fs::path dir = prepare_output(cfg);
    const int n = cfg.get_int("mesh.n");
    const int nc = cfg.get_int("obs.coarse_n");
    auto mesh = square(n);
    auto coarse = nc == n ? mesh : square(nc);
    MuSweepResult out;
    for (double mu : cfg.get_doubles("exp1.mu_list")) {
        const auto t0 = Clock::now();
        RunConfig r = base_run(cfg);
        r.mu = mu;
        r.coarse_mesh = coarse;
        r.forcing = problems::mms_forcing(r.nu);
        r.bc = {{BoundaryTag::wall}, problems::mms_velocity};
        report_parameters(r, mesh->h_max(), log);
        FlowSolver solver(mesh, r);
        AnalyticReference ref(solver.velocity_space(), problems::mms_velocity);
        TimeSeries ts;
        RunOptions opt;
        opt.on_sample = [&ts](const FlowSolver& s, const Sample& sm) {
            SeriesRow row;
            row.time = sm.state->t;
            row.l2_error = l2_error(s.velocity_space(), sm.state->v, VectorFunction(problems::mms_velocity), sm.state->t);
            row.h1_error = h1_error(s.velocity_space(), sm.state->v, GradientFunction(problems::mms_gradient), sm.state->t);
            row.l2_norm = l2_norm(s.mass(), sm.state->v);
            ts.push(row);
        };
        run(solver, zero_state(solver), &ref, opt);
        ts.write_csv(dir / ("mu_" + num(mu) + ".csv"));
        if (log) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "  mu = %g  final error = %.4e  (%.1f s)\n", mu, *ts.rows().back().l2_error,
                          seconds_since(t0));
            *log << buf;
        }
        out.mu.push_back(mu);
        out.series.push_back(std::move(ts));
    }
    return out;
}

NoflowResult exp2_noflow(const Config& cfg, std::ostream* log) {
    const fs::path dir = prepare_output(cfg);
    auto base = square(cfg.get_int("mesh.n"));
    auto mesh = std::make_shared<const Mesh>(barycentric_refine(*base));
    const double ra = cfg.get_double("exp2.ra");
    const double pr = cfg.get_double("exp2.pr");
    if (!(pr > 0.0)) throw ConfigError("exp2.pr must be positive");

    std::vector<std::pair<ElementPair, double>> variants;
    if (cfg.get_bool("exp2.sv")) variants.emplace_back(ElementPair::ScottVogelius, 0.0);
    for (double g : cfg.get_doubles("exp2.th_gammas")) variants.emplace_back(ElementPair::TaylorHood, g);

    NoflowResult out;
    for (const auto& [element, gamma] : variants) {
        const auto t0 = Clock::now();
        RunConfig r = base_run(cfg);
        r.element = element;
        r.gamma = gamma;
        r.c_t = 1.0 / pr;
        r.coarse_mesh = base;
        r.forcing = problems::noflow_forcing(ra);
        r.bc = {{BoundaryTag::wall}, {}};
        FlowSolver solver(mesh, r);
        const VectorFunction zero = [](double, double, double) { return Vec2{0.0, 0.0}; };
        AnalyticReference ref(solver.velocity_space(), zero);

        NoflowVariant v;
        v.name = element == ElementPair::ScottVogelius ? "SV" : "TH_gamma" + num(gamma);
        v.element = element;
        v.gamma = gamma;
        const auto v0 = interpolate_function(solver.velocity_space(), VectorFunction(problems::noflow_initial), 0.0);
        RunOptions opt;
        opt.on_step = [&v](const FlowSolver& s, const Sample& sm) {
            v.max_div_l2 = std::max(v.max_div_l2, div_l2(s.velocity_space(), sm.state->v));
        };
        opt.on_sample = [&v](const FlowSolver& s, const Sample& sm) {
            SeriesRow row;
            row.time = sm.state->t;
            // The true velocity is zero.
            row.l2_error = l2_norm(s.mass(), sm.state->v);
            row.div_l2 = div_l2(s.velocity_space(), sm.state->v);
            v.series.push(row);
        };
        run(solver, solver.make_state(0.0, v0), &ref, opt);
        v.final_error = *v.series.rows().back().l2_error;
        v.series.write_csv(dir / (v.name + ".csv"));
        if (log) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "  %-12s final error = %.4e  max div = %.3e  (%.1f s)\n", v.name.c_str(),
                          v.final_error, v.max_div_l2, seconds_since(t0));
            *log << buf;
        }
        out.variants.push_back(std::move(v));
    }
    return out;
}

namespace {

struct ChannelSetup {
    std::shared_ptr<const Mesh> base;
    std::shared_ptr<const Mesh> fine;
    RunConfig run;
    double spinup = 0.0;
    double window = 0.0;
};

ChannelSetup channel_setup(const Config& cfg) {
    ChannelSetup s;
    s.base = std::make_shared<const Mesh>(
        gen_channel_cylinder(cfg.get_int("mesh.nx"), cfg.get_int("mesh.ny"), cfg.get_int("mesh.n_circ")));
    s.fine = std::make_shared<const Mesh>(barycentric_refine(*s.base));
    s.run = base_run(cfg);
    s.run.coarse_mesh = s.base;
    s.run.bc = {{BoundaryTag::wall, BoundaryTag::inflow, BoundaryTag::outflow, BoundaryTag::cylinder},
                problems::channel_boundary(cfg.get_double("bc.inflow_peak"))};
    s.spinup = cfg.get_double("exp3.spinup");
    s.window = cfg.get_double("exp3.window");
    if (!(s.window > 0.0)) throw ConfigError("exp3.window must be positive");
    if (s.spinup < 2.0 * s.run.dt - 1e-12) throw ConfigError("exp3.spinup must be at least two time steps");
    return s;
}

fs::path trajectory_path(const Config& cfg) {
    const auto& t = cfg.get("exp3.trajectory");
    return t.empty() ? fs::path(cfg.get("out.dir")) / "dns_trajectory.bin" : fs::path(t);
}

SeriesRow force_row(double t, const LiftDrag& ld, double norm) {
    SeriesRow row;
    row.time = t;
    row.lift = ld.lift;
    row.drag = ld.drag;
    row.l2_norm = norm;
    return row;
}

} // namespace

CylinderDnsResult exp3_cylinder_dns(const Config& cfg, std::ostream* log) {
    const fs::path dir = prepare_output(cfg);
    const auto t0 = Clock::now();
    ChannelSetup cs = channel_setup(cfg);
    cs.run.mu = 0.0;
    cs.run.t_end = cs.spinup + cs.window;
    FlowSolver solver(cs.fine, cs.run);
    if (log) {
        *log << "  mesh: " << cs.base->num_cells() << " coarse cells, " << cs.fine->num_cells() << " fine cells, "
             << solver.n_system() << " unknowns\n";
    }

    CylinderDnsResult out;
    out.trajectory = trajectory_path(cfg);
    if (out.trajectory.has_parent_path()) fs::create_directories(out.trajectory.parent_path());
    const long first = std::lround(cs.spinup / cs.run.dt) - 2;
    const auto nv = static_cast<std::uint32_t>(solver.velocity_space().n_dofs());
    const auto np = static_cast<std::uint32_t>(solver.pressure_space().n_dofs());
    TrajectoryWriter writer(out.trajectory, nv, np, cs.run.dt, static_cast<double>(first) * cs.run.dt);

    StepState s0 = zero_state(solver);
    s0.q.assign(np, 0.0);
    if (first == 0) writer.append(s0.t, s0.v, s0.q);
    RunOptions opt;
    opt.bdf2_from_history = true;
    opt.on_step = [&](const FlowSolver& s, const Sample& sm) {
        if (sm.state->n >= first) writer.append(sm.state->t, sm.state->v, sm.state->q);
        if (sm.state->n % s.config().cadence == 0 || sm.state->t >= s.config().t_end - 0.5 * s.config().dt) {
            out.series.push(force_row(sm.state->t, lift_drag(s, *sm.prev, *sm.state, sm.scheme), l2_norm(s.mass(), sm.state->v)));
        }
        if (log && sm.state->n % 100 == 0) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "  t = %.3f  (%.1f s)\n", sm.state->t, seconds_since(t0));
            *log << buf << std::flush;
        }
    };
    const auto res = run(solver, s0, nullptr, opt);
    writer.close();
    out.steps = res.steps;
    out.series.write_csv(dir / "dns.csv");
    if (log) *log << "  " << res.steps << " steps, " << writer.records() << " trajectory records\n";
    return out;
}

CylinderDaResult exp3_cylinder_da(const Config& cfg, std::ostream* log) {
    const fs::path traj = trajectory_path(cfg);
    if (!fs::exists(traj)) {
        if (log) *log << "trajectory " << traj.string() << " missing; running the DNS first\n";
        exp3_cylinder_dns(cfg, log);
    }
    const fs::path dir = prepare_output(cfg);
    const auto t0 = Clock::now();
    ChannelSetup cs = channel_setup(cfg);
    cs.run.t_end = cs.window;
    FlowSolver solver(cs.fine, cs.run);
    report_parameters(cs.run, cs.fine->h_max(), log);

    auto reader = std::make_shared<const TrajectoryReader>(traj);
    const auto& h = reader->header();
    if (std::abs(h.dt - cs.run.dt) > 1e-12 * cs.run.dt) throw TrajectoryError("trajectory time step differs from run.dt");
    const long offset = std::lround((cs.spinup - h.t0) / h.dt);
    if (offset < 2 || std::abs(h.t0 + static_cast<double>(offset) * h.dt - cs.spinup) > 1e-9)
        throw TrajectoryError("trajectory does not hold the spin-up time with two records of history");
    const long steps = step_count(0.0, cs.window, cs.run.dt);
    if (offset + steps >= static_cast<long>(h.n_records))
        throw TrajectoryError("trajectory too short for the assimilation window");
    TrajectoryReference ref(reader, solver.velocity_space(), cs.run.dt, static_cast<std::uint32_t>(offset));

    auto dns_state = [&](long k, double t) {
        const auto r = reader->read(static_cast<std::uint32_t>(k));
        StepState s = solver.make_state(t, r.v);
        s.q = r.q;
        return s;
    };
    auto dns_forces = [&](long k, double t) {
        StepState cur = dns_state(k, t);
        StepState prev = solver.make_state(t - cs.run.dt, reader->read(static_cast<std::uint32_t>(k - 1)).v,
                                           reader->read(static_cast<std::uint32_t>(k - 2)).v);
        return lift_drag(solver, prev, cur, Scheme::BDF2);
    };

    CylinderDaResult out;
    auto record = [&](const FlowSolver& s, const StepState& st, const StepState* prev, Scheme used) {
        const long k = offset + st.n;
        const StepState ref_state = dns_state(k, st.t);
        SeriesRow da;
        da.time = st.t;
        da.l2_error = l2_error(s.mass(), st.v, ref_state.v);
        da.l2_norm = l2_norm(s.mass(), st.v);
        if (prev) {
            const auto ld = lift_drag(s, *prev, st, used);
            da.lift = ld.lift;
            da.drag = ld.drag;
        }
        out.da.push(da);
        out.dns.push(force_row(st.t, dns_forces(k, st.t), l2_norm(s.mass(), ref_state.v)));
    };

    StepState s0 = zero_state(solver);
    RunOptions opt;
    opt.bdf2_from_history = true;
    opt.on_step = [&](const FlowSolver& s, const Sample& sm) {
        record(s, *sm.state, sm.prev, sm.scheme);
        if (log && sm.state->n % 100 == 0) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "  t = %.3f  difference = %.4e  (%.1f s)\n", sm.state->t,
                          *out.da.rows().back().l2_error, seconds_since(t0));
            *log << buf << std::flush;
        }
    };
    record(solver, s0, nullptr, cs.run.scheme);
    run(solver, s0, &ref, opt);

    // Metrics over t > 0.
    std::vector<double> times, diffs, lift_da, drag_da, lift_dns, drag_dns;
    for (std::size_t i = 1; i < out.da.size(); ++i) {
        times.push_back(out.da.rows()[i].time);
        diffs.push_back(*out.da.rows()[i].l2_error);
        lift_da.push_back(*out.da.rows()[i].lift);
        drag_da.push_back(*out.da.rows()[i].drag);
        lift_dns.push_back(*out.dns.rows()[i].lift);
        drag_dns.push_back(*out.dns.rows()[i].drag);
    }
    out.decay = decay_metrics(times, diffs);
    out.diff_first = diffs.front();
    out.diff_last = diffs.back();
    auto amplitude = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return 0.5 * (*hi - *lo);
    };
    out.lift_amplitude = amplitude(lift_dns);
    out.drag_amplitude = amplitude(drag_dns);
    const double tail_start = 0.9 * cs.window;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < tail_start - 1e-12) continue;
        out.lift_diff_end = std::max(out.lift_diff_end, std::abs(lift_da[i] - lift_dns[i]));
        out.drag_diff_end = std::max(out.drag_diff_end, std::abs(drag_da[i] - drag_dns[i]));
    }

    out.da.write_csv(dir / "da.csv");
    out.dns.write_csv(dir / "dns_window.csv");
    write_summary(dir / "summary.txt", {{"difference_first", out.diff_first},
                                        {"difference_last", out.diff_last},
                                        {"decay_rate", out.decay.rate},
                                        {"decay_plateau", out.decay.plateau},
                                        {"lift_amplitude", out.lift_amplitude},
                                        {"drag_amplitude", out.drag_amplitude},
                                        {"lift_difference_end", out.lift_diff_end},
                                        {"drag_difference_end", out.drag_diff_end}});
    if (log) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "  difference %.3e -> %.3e, decay rate %.3f; lift diff %.3e (amplitude %.3e), drag diff %.3e "
                      "(amplitude %.3e)  (%.1f s)\n",
                      out.diff_first, out.diff_last, out.decay.rate, out.lift_diff_end, out.lift_amplitude,
                      out.drag_diff_end, out.drag_amplitude, seconds_since(t0));
        *log << buf;
    }
    return out;
}

} // namespace nudged_ns
