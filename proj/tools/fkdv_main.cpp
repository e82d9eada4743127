// Command-line driver: time-evolution runs with windowed-energy diagnostics,
// operator and weight-family verification, ladder planning, inequality
// probes, and snapshot-based restarts.

#include "CLI11.hpp"
#include "json.hpp"

#include "fkdv/commutators.hpp"
#include "fkdv/diagnostics.hpp"
#include "fkdv/errors.hpp"
#include "fkdv/experiment_io.hpp"
#include "fkdv/kernels.hpp"
#include "fkdv/rng.hpp"
#include "fkdv/solver.hpp"
#include "fkdv/weights.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

using namespace fkdv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBlowUp = 3;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

PropagationConfig propagation_config(const ExperimentConfig& cfg) {
    PropagationConfig pc;
    pc.solver = cfg.solver_config();
    pc.grid = make_grid(cfg.n_points, cfg.half_length);
    pc.m = cfg.m;
    pc.windows = cfg.windows;
    if (cfg.initial_data.kind == "one_sided") {
        OneSidedProfile prof;
        prof.gamma = cfg.initial_data.gamma;
        prof.x_s = cfg.initial_data.x_s;
        prof.amplitude = cfg.initial_data.amplitude;
        prof.bump_radius = cfg.initial_data.bump_radius;
        prof.background_width = cfg.initial_data.width;
        prof.background_center = cfg.initial_data.center;
        pc.profile = prof;
    }
    pc.mollify_mu = cfg.initial_data.mollify_mu;
    return pc;
}

void write_run_outputs(const ExperimentConfig& cfg, const PropagationResult& result,
                       const fs::path& outdir) {
    fs::create_directories(outdir);

    // conserved-quantity series
    const auto& log = result.final_state->conserved_log;
    std::vector<double> t;
    std::vector<double> mass, l2, ham, strich;
    for (const auto& s : log) {
        t.push_back(s.t);
        mass.push_back(s.mass);
        l2.push_back(s.l2);
        ham.push_back(s.hamiltonian);
        strich.push_back(s.strichartz_accum);
    }
    write_csv(outdir / "conserved.csv", t,
              {{"mass", mass}, {"l2", l2}, {"hamiltonian", ham}, {"strichartz", strich}});

    // one column per (window, exponent) pair
    if (!result.energies.empty()) {
        std::vector<std::pair<std::string, std::vector<double>>> cols;
        for (const auto& track : result.energies) {
            char name[64];
            std::snprintf(name, sizeof(name), "w%zu_e%.6g", track.window_index, track.exponent);
            cols.emplace_back(name, track.values);
        }
        write_csv(outdir / "diagnostics.csv", result.energies.front().times, cols);
    }

    JsonlWriter report(outdir / "report.jsonl");
    json meta;
    meta["record"] = "run";
    meta["alpha"] = cfg.alpha;
    meta["m"] = cfg.m;
    meta["s_alpha"] = cfg.s_alpha();
    meta["s_of_alpha"] = cfg.s_of_alpha();
    meta["verdict"] = result.pass ? "PASS" : "FAIL";
    meta["right_bounded"] = result.right_bounded;
    meta["smoothing_stable"] = result.smoothing_stable;
    meta["left_check_applicable"] = result.left_check_applicable;
    meta["left_retained"] = result.left_retained;
    meta["max_boundary_fraction"] = result.max_boundary_fraction;
    meta["contamination_warning"] = result.final_state->contamination_warning;
    report.write_line(meta.dump());
    for (const auto& track : result.energies) {
        json j;
        j["record"] = "energy";
        j["window"] = track.window_index;
        j["exponent"] = track.exponent;
        j["initial"] = track.initial;
        j["sup"] = track.sup;
        report.write_line(j.dump());
    }
    for (const auto& rec : result.smoothing) {
        json j;
        j["record"] = "smoothing";
        j["deriv_order"] = rec.deriv_order;
        j["riesz_order"] = rec.riesz_order;
        j["accum"] = rec.accum;
        j["accum_hilbert"] = rec.accum_hilbert;
        j["accum_sharp_strip"] = rec.accum_sharp_strip;
        const double full = smoothing_total(rec, 1);
        const double half = smoothing_total(rec, 2);
        j["refinement_delta"] =
            std::abs(full) > 0 ? std::abs(full - half) / std::abs(full) : 0.0;
        report.write_line(j.dump());
    }
    if (!result.left_octave_energy.empty()) {
        json j;
        j["record"] = "left_octave";
        j["initial"] = result.left_octave_energy.front();
        j["final"] = result.left_octave_energy.back();
        report.write_line(j.dump());
    }

    write_snapshot(make_snapshot(*result.final_state, cfg.alpha), outdir / "final.fkdv");
}

int do_run(const ExperimentConfig& cfg) {
    const fs::path outdir = resolve_output_dir(cfg.output);
    if (cfg.windows.empty()) {
        // plain evolution: conserved series + final snapshot only
        auto grid = make_grid(cfg.n_points, cfg.half_length);
        Field u0 = cfg.initial_data.kind == "one_sided"
                       ? one_sided_data(propagation_config(cfg).profile.value(), cfg.m, cfg.alpha,
                                        grid)
                       : sample_field(grid, [&](double x) {
                             const double w = cfg.initial_data.width;
                             const double c = cfg.initial_data.center;
                             return cfg.initial_data.amplitude *
                                    std::exp(-std::pow((x - c) / w, 2));
                         });
        SolverState st = run(u0, cfg.solver_config());
        fs::create_directories(outdir);
        std::vector<double> t, mass, l2, ham, strich;
        for (const auto& s : st.conserved_log) {
            t.push_back(s.t);
            mass.push_back(s.mass);
            l2.push_back(s.l2);
            ham.push_back(s.hamiltonian);
            strich.push_back(s.strichartz_accum);
        }
        write_csv(outdir / "conserved.csv", t,
                  {{"mass", mass}, {"l2", l2}, {"hamiltonian", ham}, {"strichartz", strich}});
        write_snapshot(make_snapshot(st, cfg.alpha), outdir / "final.fkdv");
        std::cout << "run complete: t = " << st.t << ", steps = " << st.step_count << "\n";
        return kExitPass;
    }
    const auto result = run_propagation_experiment(propagation_config(cfg));
    write_run_outputs(cfg, result, outdir);
    std::cout << "propagation experiment: " << (result.pass ? "PASS" : "FAIL") << "\n"
              << "  right-window energies bounded: " << (result.right_bounded ? "yes" : "no")
              << "\n"
              << "  smoothing accumulators stable: " << (result.smoothing_stable ? "yes" : "no")
              << "\n"
              << "  left-octave retention: "
              << (result.left_check_applicable ? (result.left_retained ? "yes" : "no") : "n/a")
              << "\n"
              << "  outputs in " << fs::absolute(resolve_output_dir(cfg.output)).string() << "\n";
    return result.pass ? kExitPass : kExitFail;
}

int do_resume(const fs::path& snapshot_path, const ExperimentConfig& cfg) {
    const Snapshot snap = read_snapshot(snapshot_path);
    if (snap.n_points != cfg.n_points || snap.half_length != cfg.half_length)
        throw ConfigError("snapshot grid does not match the configuration");
    if (snap.alpha != cfg.alpha) throw ConfigError("snapshot alpha does not match the configuration");
    SolverState st = state_from_snapshot(snap);
    st = resume_run(std::move(st), cfg.solver_config());
    const fs::path outdir = resolve_output_dir(cfg.output);
    fs::create_directories(outdir);
    std::vector<double> t, mass, l2, ham, strich;
    for (const auto& s : st.conserved_log) {
        t.push_back(s.t);
        mass.push_back(s.mass);
        l2.push_back(s.l2);
        ham.push_back(s.hamiltonian);
        strich.push_back(s.strichartz_accum);
    }
    write_csv(outdir / "conserved.csv", t,
              {{"mass", mass}, {"l2", l2}, {"hamiltonian", ham}, {"strichartz", strich}});
    write_snapshot(make_snapshot(st, cfg.alpha), outdir / "final.fkdv");
    std::cout << "resumed to t = " << st.t << " (step " << st.step_count << ")\n";
    return kExitPass;
}

int do_verify_weights(const fs::path& outdir) {
    fs::create_directories(outdir);
    JsonlWriter report(outdir / "weights_report.jsonl");
    bool all_pass = true;
    for (double eps : {0.05, 0.1, 0.5}) {
        for (double b : {5.0 * eps, 10.0 * eps, 1.0 + 5.0 * eps}) {
            WeightFamily fam(WeightParams{eps, b});
            const auto rep = verify_weight_properties(fam);
            all_pass = all_pass && rep.overall_pass;
            std::printf("family eps=%-5g b=%-5g : %s\n", eps, b,
                        rep.overall_pass ? "pass" : "FAIL");
            for (const auto& check : rep.checks) {
                json j;
                j["record"] = "weight_property";
                j["epsilon"] = eps;
                j["b"] = b;
                j["id"] = check.id;
                j["description"] = check.description;
                j["pass"] = check.pass;
                j["worst_residual"] = check.worst_residual;
                j["worst_x"] = check.worst_x;
                if (!check.constants.empty()) j["constants"] = check.constants;
                report.write_line(j.dump());
                if (!check.pass)
                    std::printf("    %-4s FAIL  %s (worst residual %.3e at x = %.4f)\n",
                                check.id.c_str(), check.description.c_str(),
                                check.worst_residual, check.worst_x);
            }
        }
    }
    std::printf("weight families: %s\n", all_pass ? "all properties hold" : "FAILURES present");
    return all_pass ? kExitPass : kExitFail;
}

int do_verify_operators(const fs::path& outdir, std::uint64_t seed) {
    fs::create_directories(outdir);
    JsonlWriter report(outdir / "operators_report.jsonl");
    bool all_pass = true;
    auto g = make_grid(1024, 30.0);

    // coefficient table against an extended-precision product evaluation
    {
        double worst = 0.0;
        for (double a = 1.0; a <= 4.0 + 1e-9; a += 0.05) {
            for (unsigned j = 0; j <= 6; ++j) {
                long double prod = 1.0L;
                for (unsigned k = 0; k < j; ++k)
                    prod *= static_cast<long double>(a) * a - (2.0L * k + 1) * (2.0L * k + 1);
                long double fact = 1.0L;
                for (unsigned k = 2; k <= 2 * j + 1; ++k) fact *= k;
                const long double expect = j == 0 ? 1.0L : prod / fact;
                const double got = expansion_coefficient(a, j);
                if (expect != 0.0L)
                    worst = std::max(worst,
                                     static_cast<double>(std::abs(got / expect - 1.0L)));
                else if (got != 0.0)
                    worst = 1.0;
            }
        }
        const bool pass = worst < 1e-14;
        all_pass = all_pass && pass;
        std::printf("coefficient table vs extended precision: %s (worst rel %.2e)\n",
                    pass ? "pass" : "FAIL", worst);
        json j;
        j["record"] = "coefficients";
        j["worst_relative_error"] = worst;
        j["pass"] = pass;
        report.write_line(j.dump());
    }

    // closed-form remainder at a = 1, n = 0
    {
        auto gf = make_grid(8192, 30.0);
        WeightFamily fam(WeightParams{1.0, 5.0});
        OperatorWeight fw = periodic_ramp_weight(gf, fam, 0.0);
        CommutatorExpansion exp = make_expansion(1.0, 0, fw);
        auto rng = substream(seed, "verify-closed-form");
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            Field u = random_band_limited(gf, 256, rng);
            Field out = apply_remainder(exp, u);
            Field hfhu = hilbert(multiply_pointwise(hilbert(u), fw.derivs[0]));
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double expect = 0.5 * (fw.derivs[0][i] * u.value(i) + hfhu.value(i));
                worst = std::max(worst, std::abs(out.value(i) - expect));
            }
        }
        const bool pass = worst < 1e-10;
        all_pass = all_pass && pass;
        std::printf("closed-form remainder (a=1, n=0): %s (worst %.2e)\n",
                    pass ? "pass" : "FAIL", worst);
        json j;
        j["record"] = "closed_form_remainder";
        j["worst_abs_error"] = worst;
        j["pass"] = pass;
        report.write_line(j.dump());
    }

    // remainder bound: unit-constant triples assert, dispersive triples record
    {
        WeightFamily fam(WeightParams{0.1, 1.0});
        OperatorWeight fw = periodic_ramp_weight(g, fam, 0.0);
        struct Triple { double a; unsigned n; double sigma; };
        for (const Triple c : {Triple{1.0, 0, 0.0}, Triple{1.75, 0, 0.0}, Triple{3.0, 0, 0.0},
                               Triple{3.0, 1, 0.0}, Triple{3.0, 1, 1.0}, Triple{5.0, 2, 0.0}}) {
            CommutatorExpansion exp = make_expansion(c.a, c.n, fw);
            BoundCheckSpec spec;
            spec.sigma = c.sigma;
            spec.ensemble_size = 100;
            spec.seed = seed;
            const auto rep = check_remainder_bound(exp, spec);
            const bool pass = rep.pass.value_or(false);
            all_pass = all_pass && pass;
            std::printf("remainder bound a=%-4g n=%u sigma=%-4g : ratio %.4f %s\n", c.a, c.n,
                        c.sigma, rep.max_ratio, pass ? "<= 1.05 pass" : "FAIL");
            json j;
            j["record"] = "remainder_bound";
            j["a"] = c.a;
            j["n"] = c.n;
            j["sigma"] = c.sigma;
            j["max_ratio"] = rep.max_ratio;
            j["rhs_constant"] = rep.rhs_constant;
            j["unit_constant_applies"] = true;
            j["pass"] = pass;
            report.write_line(j.dump());
        }
        for (double alpha : {0.3, 0.5, 0.75}) {
            struct Rec { unsigned n; double sigma; };
            std::vector<Rec> recs = {{2, 2.0}, {2, 2.0 + alpha / 2.0}};
            for (int m : {2, 3}) {
                recs.push_back({static_cast<unsigned>(m),
                                static_cast<double>(m) + alpha / 2.0});
                recs.push_back({static_cast<unsigned>(m),
                                static_cast<double>(m) + 1.0 - alpha / 2.0});
            }
            for (const auto& r : recs) {
                CommutatorExpansion exp = make_expansion(alpha + 1.0, r.n, fw);
                BoundCheckSpec spec;
                spec.sigma = r.sigma;
                spec.ensemble_size = 100;
                spec.seed = seed;
                const auto rep = check_remainder_bound(exp, spec);
                std::printf(
                    "remainder bound a=%-4g n=%u sigma=%-5g : ratio %.4f (recorded; C=1 n/a)\n",
                    alpha + 1.0, r.n, r.sigma, rep.max_ratio);
                json j;
                j["record"] = "remainder_bound";
                j["a"] = alpha + 1.0;
                j["n"] = r.n;
                j["sigma"] = r.sigma;
                j["max_ratio"] = rep.max_ratio;
                j["rhs_constant"] = rep.rhs_constant;
                j["unit_constant_applies"] = false;
                report.write_line(j.dump());
                if (!std::isfinite(rep.max_ratio)) all_pass = false;
            }
        }
    }
    std::printf("operator verification: %s\n", all_pass ? "pass" : "FAIL");
    return all_pass ? kExitPass : kExitFail;
}

int do_ladder(double alpha, int m) {
    const auto plan = ladder_plan(alpha, m);
    std::printf("regularity ladder for alpha = %g, m = %d\n", alpha, m);
    std::printf("  case: %s steps (k = %d, %zu fractional rungs)\n",
                plan.tag == LadderCase::OddSteps ? "odd" : "even", plan.k,
                plan.step_exponents.size());
    std::printf("  %-6s %-12s %-12s\n", "rung", "energy exp", "smoothing exp");
    for (std::size_t r = 0; r < plan.step_exponents.size(); ++r)
        std::printf("  %-6zu %-12s %-12s\n", r, fmt(plan.step_exponents[r]).c_str(),
                    fmt(static_cast<double>(m) + alpha * (static_cast<double>(r) + 1.0) / 2.0)
                        .c_str());
    std::printf("  %-6s %-12s %-12s\n", "final", fmt(plan.final_exponent).c_str(),
                fmt(static_cast<double>(m) + 1.0).c_str());
    return kExitPass;
}

int do_probe(const std::string& kind_name, const fs::path& outdir, std::uint64_t seed) {
    const ProbeKind kind = probe_kind_from_name(kind_name);
    fs::create_directories(outdir);
    JsonlWriter report(outdir / "probe_report.jsonl");
    ProbeParams params;
    params.ensemble_size = 40;
    params.seed = seed;
    params.band_limit = 170; // same function class on both grids
    if (kind == ProbeKind::KatoPonceB) params.s = 1.4;
    auto coarse = inequality_probe(kind, make_grid(2048, 30.0), params);
    auto fine = inequality_probe(kind, make_grid(4096, 30.0), params);
    const double drift = std::abs(fine.best_constant - coarse.best_constant) /
                         std::max(coarse.best_constant, 1e-300);
    const bool pass = std::isfinite(coarse.best_constant) && std::isfinite(fine.best_constant) &&
                      drift <= 0.20;
    std::printf("probe %s: constant %.4f (N=2048), %.4f (N=4096), drift %.1f%% -> %s\n",
                kind_name.c_str(), coarse.best_constant, fine.best_constant, 100.0 * drift,
                pass ? "stable" : "FAIL");
    json j;
    j["record"] = "probe";
    j["kind"] = kind_name;
    j["constant_coarse"] = coarse.best_constant;
    j["constant_fine"] = fine.best_constant;
    j["relative_drift"] = drift;
    j["pass"] = pass;
    report.write_line(j.dump());
    return pass ? kExitPass : kExitFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional KdV pseudo-spectral laboratory"};
    app.require_subcommand(1);
    bool serial = false;
    app.add_flag("--serial", serial, "run all kernels on the serial reference path");
    std::string output_dir;
    app.add_option("--output", output_dir, "output directory (overrides config and env)");
    std::uint64_t seed = 0x5eed;
    app.add_option("--seed", seed, "root seed for ensembles");

    std::string config_path, snapshot_path, ladder_alpha, probe_kind;
    int ladder_m = 2;
    double ladder_alpha_val = 0.5;

    auto* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
    run_cmd->add_option("config", config_path, "experiment config")->required();

    auto* resume_cmd = app.add_subcommand("resume", "continue a run from a snapshot");
    resume_cmd->add_option("snapshot", snapshot_path, "snapshot file")->required();
    resume_cmd->add_option("config", config_path, "experiment config")->required();

    auto* vw_cmd = app.add_subcommand("verify-weights", "verify the weight-family properties");
    auto* vo_cmd = app.add_subcommand("verify-operators", "verify commutator operators");

    auto* ladder_cmd = app.add_subcommand("ladder", "print the regularity ladder");
    ladder_cmd->add_option("alpha", ladder_alpha_val, "dispersion exponent in (0,1)")->required();
    ladder_cmd->add_option("m", ladder_m, "base regularity (>= 2)")->required();

    auto* probe_cmd = app.add_subcommand("probe", "run an inequality probe");
    probe_cmd->add_option("inequality", probe_kind,
                          "calderon | leibniz | kato-ponce-a | kato-ponce-b | "
                          "gagliardo-nirenberg | disjoint-support")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    kernels::set_execution(serial ? kernels::Exec::Serial : kernels::Exec::Parallel);
    if (!output_dir.empty()) setenv("FKDV_OUTPUT_DIR", output_dir.c_str(), 1);

    try {
        const fs::path fallback_out =
            output_dir.empty() ? fs::path("out") : fs::path(output_dir);
        if (run_cmd->parsed()) return do_run(load_config(config_path));
        if (resume_cmd->parsed()) return do_resume(snapshot_path, load_config(config_path));
        if (vw_cmd->parsed()) return do_verify_weights(fallback_out);
        if (vo_cmd->parsed()) return do_verify_operators(fallback_out, seed);
        if (ladder_cmd->parsed()) return do_ladder(ladder_alpha_val, ladder_m);
        if (probe_cmd->parsed()) return do_probe(probe_kind, fallback_out, seed);
    } catch (const SolverBlowUp& e) {
        std::cerr << "blow-up: " << e.what() << "\n";
        return kExitBlowUp;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const LookupError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitConfig;
}
