// Command-line harness: configuration assembly (preset < file < flags),
// experiment dispatch, CSV + sidecar emission.
//
// Exit codes: 0 success, 2 config error, 3 validation or simulation failure,
// 4 statistical-check failure, 1 I/O or unexpected error.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ecoevo/config.hpp"
#include "ecoevo/diagnostics.hpp"
#include "ecoevo/engine.hpp"
#include "ecoevo/ensemble.hpp"
#include "ecoevo/io.hpp"
#include "ecoevo/presets.hpp"
#include "ecoevo/solvers.hpp"
#include "ecoevo/tss.hpp"

namespace fs = std::filesystem;
using namespace ecoevo;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string preset;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
};

/// preset text, then config file, then individual flag overrides.
ExperimentConfig assemble(const GlobalArgs& g) {
    ExperimentConfig cfg;
    if (!g.preset.empty())
        cfg = ExperimentConfig::parse(preset_text(g.preset), "preset:" + g.preset);
    if (!g.config_path.empty()) {
        ExperimentConfig file = ExperimentConfig::from_file(g.config_path);
        cfg.merge(file);
    }
    if (g.seed) cfg.set("run", "seed", std::to_string(*g.seed));
    if (g.workers) cfg.set("run", "workers", std::to_string(*g.workers));
    return cfg;
}

fs::path ensure_out_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    return p;
}

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void emit_sidecar(const fs::path& out, const std::string& name, ExperimentConfig& cfg,
                  const std::map<std::string, std::string>& extra,
                  const std::vector<double>& bin_edges,
                  const std::vector<std::string>& warnings) {
    std::map<std::string, std::string> meta = extra;
    meta["timestamp"] = timestamp_now();
    write_sidecar((out / name).string(), cfg.entries(), meta, bin_edges, warnings);
}

// ---------------------------------------------------------------------------
// commands; each returns the process exit code
// ---------------------------------------------------------------------------

int cmd_simulate(const GlobalArgs& g) {
    ExperimentConfig cfg = assemble(g);
    RunSetup run = build_run(cfg);
    cfg.require_all_consumed();
    if (run.replicates != 1)
        throw ConfigError(
            "simulate emits a single trajectory; use martingale or compare for ensembles");
    const fs::path out = ensure_out_dir(g.out_dir);
    Trajectory traj = simulate(run.model, run.scaling, run.init, run.sim, run.rec);
    if (run.renormalize) renormalize(traj);
    write_heatmap_csv((out / "heatmap.csv").string(), traj);
    write_mass_csv((out / "mass.csv").string(), traj);
    if (run.rec.log_events) write_events_csv((out / "events.csv").string(), traj);
    emit_sidecar(out, "run.json", cfg,
                 {{"command", "simulate"},
                  {"engine", traj.engine},
                  {"events", std::to_string(traj.stats.events)},
                  {"final_time", format_double(traj.t_end)},
                  {"renormalized", traj.renormalized ? "true" : "false"}},
                 traj.bin_edges, traj.warnings);
    std::cout << "simulate: " << traj.stats.events << " events, final mass "
              << format_double(traj.mass.empty() ? 0.0 : traj.mass.back()) << "\n";
    return 0;
}

int cmd_limits(const GlobalArgs& g, const std::string& solver_flag, double t_end_flag) {
    ExperimentConfig cfg = assemble(g);
    if (!solver_flag.empty()) cfg.set("limits", "solver", solver_flag);
    if (t_end_flag == t_end_flag) cfg.set("limits", "t_end", format_double(t_end_flag));
    ModelSpec model = build_model(cfg);
    const std::string solver = cfg.get_string("limits", "solver");
    // Horizon and starting trait fall back to the run section, so a full
    // preset solves the matching limit without a dedicated [limits] block.
    const double t_end = !cfg.has("limits", "t_end") && cfg.has("run", "t_end")
                             ? cfg.get_double("run", "t_end")
                             : cfg.get_double("limits", "t_end");
    const double x0 = cfg.get_double(
        "limits", "x0", cfg.has("run", "x0") ? cfg.get_double("run", "x0") : 1.2);
    for (const char* sec : {"scaling", "run", "output"}) cfg.ignore_section(sec);
    const fs::path out = ensure_out_dir(g.out_dir);

    if (solver == "ode-mono") {
        OdeOptions oo;
        oo.record_points = static_cast<int>(cfg.get_int("limits", "record_points", 200));
        const double n0 = cfg.get_double("limits", "n0", equilibrium_nbar(model, x0));
        cfg.require_all_consumed();
        OdeSeries s = solve_monomorphic(model, x0, n0, t_end, oo);
        write_ode_csv((out / "ode.csv").string(), s);
        emit_sidecar(out, "limits.json", cfg, {{"command", "limits"}, {"solver", solver}}, {}, {});
        std::cout << "ode-mono: n(" << format_double(t_end)
                  << ") = " << format_double(s.values.back()[0]) << "\n";
        return 0;
    }
    if (solver == "ode-di") {
        OdeOptions oo;
        oo.record_points = static_cast<int>(cfg.get_int("limits", "record_points", 200));
        const double x1 = cfg.get_double("limits", "x1");
        const double n0 = cfg.get_double("limits", "n0", equilibrium_nbar(model, x0));
        const double n1 = cfg.get_double("limits", "n1", 1e-4);
        cfg.require_all_consumed();
        OdeSeries s = solve_dimorphic(model, x0, x1, n0, n1, t_end, oo);
        write_ode_csv((out / "ode.csv").string(), s);
        emit_sidecar(out, "limits.json", cfg, {{"command", "limits"}, {"solver", solver}}, {}, {});
        std::cout << "ode-di: n1 = " << format_double(s.values.back()[0])
                  << ", n2 = " << format_double(s.values.back()[1]) << "\n";
        return 0;
    }

    // Field solvers share grid and initial-bump keys.
    if (!model.space.bounded) throw ConfigError("field solvers need a bounded trait space");
    TraitGrid grid(model.space.lo, model.space.hi,
                   static_cast<int>(cfg.get_int("limits", "cells", 256)));
    FieldOptions fo;
    fo.record_points = static_cast<int>(cfg.get_int("limits", "record_points", 100));
    if (cfg.has("limits", "dt")) fo.forced_dt = cfg.get_double("limits", "dt");
    const double init_mass = cfg.get_double("limits", "init_mass", equilibrium_nbar(model, x0));
    const double init_width = cfg.get_double("limits", "init_width", 0.05);
    std::vector<double> xi0(static_cast<std::size_t>(grid.nodes()), 0.0);
    {
        // Normalized Gaussian bump of the requested mass, trapezoid-exact.
        double raw = 0.0;
        for (int i = 0; i < grid.nodes(); ++i) {
            const double z = (grid.node(i) - x0) / init_width;
            xi0[static_cast<std::size_t>(i)] = std::exp(-0.5 * z * z);
            raw += grid.weight(i) * xi0[static_cast<std::size_t>(i)];
        }
        for (double& v : xi0) v *= init_mass / raw;
    }

    if (solver == "ide" || solver == "ide-rare") {
        const IdeMode mode = solver == "ide" ? IdeMode::standard : IdeMode::rare_mutation;
        cfg.require_all_consumed();
        FieldSolution sol = solve_ide(model, grid, xi0, t_end, mode, fo);
        write_field_csv((out / "field.csv").string(), sol);
        emit_sidecar(out, "limits.json", cfg,
                     {{"command", "limits"},
                      {"solver", solver},
                      {"dt_used", format_double(sol.dt_used)},
                      {"final_mass", format_double(sol.mass_at(sol.times.size() - 1))}},
                     {}, {});
        std::cout << solver << ": final mass " << format_double(sol.mass_at(sol.times.size() - 1))
                  << ", dt " << format_double(sol.dt_used) << "\n";
        return 0;
    }
    if (solver == "pde") {
        // Diffusion coefficient: explicit constant, or the paper's sigma^2 r mu.
        std::function<double(double)> c;
        const std::string cs = cfg.get_string("limits", "c", "auto");
        if (cs == "auto") {
            const double s2 = model.mutation.sigma() * model.mutation.sigma();
            auto mu = model.mu;
            c = [s2, mu](double x) { return s2 * mu(x); };
        } else {
            const double cv = std::stod(cs);
            c = [cv](double) { return cv; };
        }
        cfg.require_all_consumed();
        FieldSolution sol = solve_rd_pde(model, grid, xi0, t_end, c, fo);
        write_field_csv((out / "field.csv").string(), sol);
        emit_sidecar(out, "limits.json", cfg,
                     {{"command", "limits"},
                      {"solver", solver},
                      {"dt_used", format_double(sol.dt_used)},
                      {"final_mass", format_double(sol.mass_at(sol.times.size() - 1))}},
                     {}, {});
        std::cout << "pde: final mass " << format_double(sol.mass_at(sol.times.size() - 1))
                  << ", dt " << format_double(sol.dt_used) << "\n";
        return 0;
    }
    throw ConfigError("[limits] solver must be one of ide, ide-rare, pde, ode-mono, ode-di");
}

int cmd_tss(const GlobalArgs& g, double x0_flag, double t_end_flag) {
    ExperimentConfig cfg = assemble(g);
    if (x0_flag == x0_flag) cfg.set("tss", "x0", format_double(x0_flag));
    if (t_end_flag == t_end_flag) cfg.set("tss", "t_end", format_double(t_end_flag));
    ModelSpec model = build_model(cfg);
    const double x0 = cfg.get_double(
        "tss", "x0", cfg.has("run", "x0") ? cfg.get_double("run", "x0") : 1.2);
    const double t_end = cfg.get_double("tss", "t_end");
    const std::uint64_t seed = cfg.get_seed();
    for (const char* sec : {"scaling", "run", "output"}) cfg.ignore_section(sec);
    cfg.require_all_consumed();
    const fs::path out = ensure_out_dir(g.out_dir);
    TssPath path = simulate_tss(model, x0, t_end, seed);
    write_tss_csv((out / "tss.csv").string(), path);
    std::vector<std::string> warnings;
    if (path.stalled)
        warnings.push_back("substitution sequence stalled: " +
                           std::to_string(path.proposals) +
                           " proposals ended in a long rejected streak (ESS reached)");
    emit_sidecar(out, "tss.json", cfg,
                 {{"command", "tss"},
                  {"jumps", std::to_string(path.jumps.size())},
                  {"final_trait", format_double(path.final_trait)}},
                 {}, warnings);
    std::cout << "tss: " << path.jumps.size() << " substitutions, final trait "
              << format_double(path.final_trait) << "\n";
    return 0;
}

int cmd_invade(const GlobalArgs& g, double flag_x, double flag_y, double flag_K,
               int flag_reps) {
    ExperimentConfig cfg = assemble(g);
    if (flag_x == flag_x) cfg.set("invade", "x", format_double(flag_x));
    if (flag_y == flag_y) cfg.set("invade", "y", format_double(flag_y));
    if (flag_K == flag_K) cfg.set("scaling", "K", format_double(flag_K));
    if (flag_reps > 0) cfg.set("invade", "replicates", std::to_string(flag_reps));
    if (!cfg.has("model", "preset")) {
        // Default to the asymmetric-competition model; mutation is off in the
        // experiment, so only sigma matters for validation.
        cfg.set("model", "preset", "kisdi");
        cfg.set("model", "sigma", "0.1");
        cfg.set("model", "mu", "0.03");
    }
    ModelSpec model = build_model(cfg);
    ScalingSpec scaling;
    scaling.mode = ScalingMode::capacity;
    scaling.K = cfg.get_double("scaling", "K");
    if (cfg.has("scaling", "mode"))
        scaling.mode = scaling_mode_from_string(cfg.get_string("scaling", "mode"));
    const double x = cfg.get_double("invade", "x");
    const double y = cfg.get_double("invade", "y");
    const int replicates = static_cast<int>(cfg.get_int("invade", "replicates", 1000));
    InvasionOptions io;
    io.workers = static_cast<int>(cfg.get_int("run", "workers", 1));
    if (cfg.has("invade", "event_cap"))
        io.event_cap = static_cast<std::uint64_t>(cfg.get_int("invade", "event_cap"));
    const std::uint64_t seed = cfg.get_seed();
    for (const char* sec : {"scaling", "run", "output"}) cfg.ignore_section(sec);
    cfg.require_all_consumed();
    const fs::path out = ensure_out_dir(g.out_dir);
    InvasionReport rep = invasion_experiment(model, scaling, y, x, replicates, seed, io);
    write_invasion_csv((out / "invasion.csv").string(), rep);
    emit_sidecar(out, "invasion.json", cfg, {{"command", "invade"}}, {}, {});
    std::cout << "invade: fixation " << rep.fixations << "/" << rep.completed << " = "
              << format_double(rep.fix_freq) << ", predicted " << format_double(rep.predicted)
              << " (sigma " << format_double(rep.sigma) << ", timeouts " << rep.timeouts
              << ")\n";
    const double dev = std::abs(rep.fix_freq - rep.predicted);
    if (rep.completed == 0 || dev > 3.0 * rep.sigma) {
        std::cout << "invade: FAIL deviation " << format_double(dev) << " exceeds 3 sigma\n";
        return 4;
    }
    std::cout << "invade: OK within 3 binomial sigma\n";
    return 0;
}

int cmd_compare(const GlobalArgs& g, bool ide_flag) {
    ExperimentConfig cfg = assemble(g);
    ModelSpec model = build_model(cfg);
    std::vector<double> Ks;
    {
        std::string list = cfg.get_string("compare", "Ks", "50,100,200,400");
        std::size_t pos = 0;
        while (pos < list.size()) {
            std::size_t comma = list.find(',', pos);
            if (comma == std::string::npos) comma = list.size();
            Ks.push_back(std::stod(list.substr(pos, comma - pos)));
            pos = comma + 1;
        }
    }
    ScalingStudyOptions so;
    so.replicates = static_cast<int>(cfg.get_int("compare", "replicates", 200));
    so.t_probe = cfg.get_double("compare", "t_probe", 10.0);
    so.workers = static_cast<int>(cfg.get_int("run", "workers", 1));
    so.seed = cfg.get_seed();
    const double x0 = cfg.get_double("run", "x0", 1.2);
    const IdeMode mode = IdeMode::standard;
    (void)ide_flag;  // the IDE is the only implemented comparison limit
    // The capacity ladder replaces whatever run a preset describes.
    for (const char* sec : {"scaling", "run", "output"}) cfg.ignore_section(sec);
    cfg.require_all_consumed();
    const fs::path out = ensure_out_dir(g.out_dir);
    ScalingReport rep = scaling_study(model, Ks, x0, mode, so);
    write_scaling_csv((out / "scaling.csv").string(), rep);
    emit_sidecar(out, "compare.json", cfg,
                 {{"command", "compare"}, {"slope", format_double(rep.slope)}}, {}, {});
    std::cout << "compare: log-log variance slope " << format_double(rep.slope) << "\n";
    for (const ScalingRow& r : rep.rows)
        std::cout << "  K=" << format_double(r.K) << " var=" << format_double(r.var_mass)
                  << " mean=" << format_double(r.mean_mass)
                  << " W1=" << format_double(r.w1_vs_limit) << "\n";
    return 0;
}

int cmd_martingale(const GlobalArgs& g) {
    ExperimentConfig cfg = assemble(g);
    RunSetup run = build_run(cfg);
    const double t_eval = cfg.get_double("martingale", "t_eval", run.sim.t_end);
    const int replicates = static_cast<int>(cfg.get_int("martingale", "replicates",
                                                        std::max(run.replicates, 200)));
    cfg.require_all_consumed();
    const fs::path out = ensure_out_dir(g.out_dir);
    std::vector<Trajectory> ensemble(static_cast<std::size_t>(replicates));
    run_ensemble(replicates, run.workers,
                 [&](int r, std::uint64_t rep_seed) {
                     SimOptions so = run.sim;
                     so.seed = rep_seed;
                     so.validate = r == 0;
                     ensemble[static_cast<std::size_t>(r)] =
                         simulate(run.model, run.scaling, run.init, so, run.rec);
                 },
                 run.sim.seed);
    MartingaleReport rep = martingale_residual(ensemble, "1", t_eval);
    {
        std::ofstream mart((out / "martingale.csv").string(), std::ios::binary);
        if (!mart) throw IoError("cannot open martingale.csv");
        mart << "probe,t_eval,replicates,mean_residual,se_residual,zscore,var_residual,"
                "predicted_bracket,ratio,ratio_low,ratio_high\n";
        mart << rep.probe << "," << format_double(rep.t_eval) << "," << rep.replicates << ","
             << format_double(rep.mean_residual) << "," << format_double(rep.se_residual) << ","
             << format_double(rep.zscore) << "," << format_double(rep.var_residual) << ","
             << format_double(rep.predicted_bracket) << "," << format_double(rep.ratio) << ","
             << format_double(rep.ratio_low) << "," << format_double(rep.ratio_high) << "\n";
    }
    emit_sidecar(out, "martingale.json", cfg, {{"command", "martingale"}}, {}, {});
    std::cout << "martingale: mean residual " << format_double(rep.mean_residual) << " (z = "
              << format_double(rep.zscore) << "), var/bracket ratio " << format_double(rep.ratio)
              << "\n";
    if (!rep.zero_mean_pass) {
        std::cout << "martingale: FAIL zero-mean test at 3 sigma\n";
        return 4;
    }
    std::cout << "martingale: OK zero mean at 3 sigma\n";
    return 0;
}

int cmd_validate(const GlobalArgs& g) {
    ExperimentConfig cfg = assemble(g);
    ModelSpec model = build_model(cfg);
    ScalingSpec scaling;
    if (cfg.has("scaling", "mode"))
        scaling.mode = scaling_mode_from_string(cfg.get_string("scaling", "mode"));
    if (cfg.has("scaling", "K")) scaling.K = cfg.get_double("scaling", "K");
    if (cfg.has("scaling", "eta")) scaling.eta = cfg.get_double("scaling", "eta");
    if (cfg.has("scaling", "u_K")) scaling.u_K = cfg.get_double("scaling", "u_K");
    // A full run preset may be passed here; [run]/[output] keys are not probed.
    ValidationReport mr = validate_model(model);
    ValidationReport sr = validate_scaling(model, scaling);
    std::cout << "validate: model ok (" << mr.probes << " probes, worst kernel mass deviation "
              << format_double(mr.worst_mass_deviation) << ")\n";
    for (const std::string& w : mr.warnings) std::cout << "  warning: " << w << "\n";
    std::cout << "validate: scaling ok (" << to_string(scaling.mode) << ", K = "
              << format_double(scaling.K) << ")\n";
    for (const std::string& w : sr.warnings) std::cout << "  warning: " << w << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    GlobalArgs g;
    double inv_x = std::numeric_limits<double>::quiet_NaN();
    double inv_y = std::numeric_limits<double>::quiet_NaN();
    double inv_K = std::numeric_limits<double>::quiet_NaN();
    int inv_reps = 0;
    bool compare_ide = false;
    double tss_x0 = std::numeric_limits<double>::quiet_NaN();
    double tss_t_end = std::numeric_limits<double>::quiet_NaN();
    double limits_t_end = std::numeric_limits<double>::quiet_NaN();
    std::string limits_solver;

    CLI::App app{"Birth-death-mutation-competition particle simulator and its "
                 "macroscopic limits"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    app.add_option("--config", g.config_path, "Configuration file (sectioned key = value)");
    app.add_option("--preset", g.preset, "Named preset (fig1a..fig2d, kisdi-base)");
    app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
    std::uint64_t seed_flag = 0;
    int workers_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "Random seed override");
    auto* workers_opt = app.add_option("--workers", workers_flag, "Replicate worker threads");

    CLI::App* simulate_cmd = app.add_subcommand("simulate", "Run one trajectory, emit heatmap + mass track");
    CLI::App* limits_cmd = app.add_subcommand("limits", "Solve a macroscopic limit equation");
    limits_cmd->add_option("--solver", limits_solver, "ide | ide-rare | pde | ode-mono | ode-di");
    limits_cmd->add_option("--t-end", limits_t_end, "Horizon (defaults to the run section's)");
    CLI::App* tss_cmd = app.add_subcommand("tss", "Simulate the trait substitution sequence");
    tss_cmd->add_option("--x0", tss_x0, "Initial resident trait");
    tss_cmd->add_option("--t-end", tss_t_end, "Rescaled time horizon");
    CLI::App* invade_cmd = app.add_subcommand("invade", "Mutant fixation experiment");
    invade_cmd->add_option("--x", inv_x, "Resident trait");
    invade_cmd->add_option("--y", inv_y, "Mutant trait");
    invade_cmd->add_option("--K", inv_K, "Carrying capacity");
    invade_cmd->add_option("--replicates", inv_reps, "Replicate count");
    CLI::App* compare_cmd = app.add_subcommand("compare", "Micro ensembles against the field limit");
    compare_cmd->add_flag("--ide", compare_ide, "Compare against the nonlocal field equation");
    CLI::App* martingale_cmd = app.add_subcommand("martingale", "Residual and bracket diagnostics");
    CLI::App* validate_cmd = app.add_subcommand("validate", "Check a model + scaling configuration");
    // Global flags remain usable after the subcommand name.
    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    }

    if (seed_opt->count() > 0) g.seed = seed_flag;
    if (workers_opt->count() > 0) g.workers = workers_flag;

    try {
        if (simulate_cmd->parsed()) return cmd_simulate(g);
        if (limits_cmd->parsed()) return cmd_limits(g, limits_solver, limits_t_end);
        if (tss_cmd->parsed()) return cmd_tss(g, tss_x0, tss_t_end);
        if (invade_cmd->parsed()) return cmd_invade(g, inv_x, inv_y, inv_K, inv_reps);
        if (compare_cmd->parsed()) return cmd_compare(g, compare_ide);
        if (martingale_cmd->parsed()) return cmd_martingale(g);
        if (validate_cmd->parsed()) return cmd_validate(g);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const SimulationFault& e) {
        std::cerr << "simulation fault: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
