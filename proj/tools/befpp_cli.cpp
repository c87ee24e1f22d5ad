// Command-line driver for the Bernoulli-exponential FPP toolkit.
//
// Verbs: constants, simulate fpp, simulate pushtasep, cluster-snapshot,
// exact, tw, compare tw-fit, compare equivalence, compare exact-mc.
// Exit codes: 0 on success, 2 when a statistical suite fails, 1 on error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "befpp/experiments.hpp"

using namespace befpp;
using nlohmann::json;

namespace {

int default_threads() {
    if (const char* env = std::getenv("BEFPP_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

std::string sig15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

void emit(std::ostream& os, const std::vector<std::string>& lines) {
    for (const auto& l : lines) os << l << "\n";
}

void write_output(const std::string& out, const std::vector<std::string>& lines) {
    if (out.empty()) {
        emit(std::cout, lines);
    } else {
        std::ofstream os(out, std::ios::binary);
        if (!os) throw config_error("cannot open output file: " + out);
        emit(os, lines);
    }
}

void apply_config_file(const std::string& path, ExperimentConfig& cfg) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open config file: " + path);
    json j;
    is >> j;
    if (j.contains("a")) cfg.params.a = j["a"].get<double>();
    if (j.contains("b")) cfg.params.b = j["b"].get<double>();
    if (j.contains("t")) cfg.params.t = j["t"].get<double>();
    if (j.contains("n_list")) cfg.n_list = j["n_list"].get<std::vector<int64_t>>();
    if (j.contains("reps")) cfg.reps = j["reps"].get<int64_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("method")) cfg.method = parse_method(j["method"].get<std::string>());
    if (j.contains("offset")) cfg.offset = j["offset"].get<int64_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bernoulli-exponential first passage percolation toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags (--seed, --threads, ...) work after subcommands too

    ModelParams params;
    uint64_t seed = 1;
    int threads = default_threads();
    std::string out;
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (compare verbs)");
    app.add_option("--seed", seed, "base random seed");
    app.add_option("--threads", threads, "worker threads (overrides BEFPP_THREADS)");
    app.add_option("--out", out, "output file (default: stdout)");

    auto add_params = [&params](CLI::App* cmd) {
        cmd->add_option("--a", params.a, "vertical clock rate a");
        cmd->add_option("--b", params.b, "horizontal clock rate b");
        cmd->add_option("--t", params.t, "observation time t");
    };

    // ---- constants ----------------------------------------------------------
    auto* c_const = app.add_subcommand("constants", "print scaling constants and limit functions");
    add_params(c_const);
    std::optional<double> theta_opt;
    std::optional<int64_t> n_opt;
    std::optional<double> x_opt;
    c_const->add_option("--theta", theta_opt, "free parameter theta");
    c_const->add_option("--n", n_opt, "column index n (sets theta = theta(n))");
    c_const->add_option("--x", x_opt, "fluctuation coordinate x (enables m)");

    // ---- simulate -----------------------------------------------------------
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo samplers");
    c_sim->require_subcommand(1);
    int64_t sim_n = 10, sim_reps = 1000, sim_offset = 1;
    std::string sim_method = "event", sim_variant = "geom";
    double sim_lambda = 1.0;

    auto* c_fpp = c_sim->add_subcommand("fpp", "percolation height function samples");
    add_params(c_fpp);
    c_fpp->add_option("--n", sim_n, "column index");
    c_fpp->add_option("--reps", sim_reps, "number of replicas");
    c_fpp->add_option("--seed", seed, "base random seed");
    c_fpp->add_option("--method", sim_method, "event or dp")
        ->check(CLI::IsMember({"event", "dp"}));
    c_fpp->add_option("--out", out, "output CSV");

    auto* c_push = c_sim->add_subcommand("pushtasep", "particle system samples");
    add_params(c_push);
    c_push->add_option("--n", sim_n, "particle index");
    c_push->add_option("--reps", sim_reps, "number of replicas");
    c_push->add_option("--seed", seed, "base random seed");
    c_push->add_option("--offset", sim_offset, "height index offset (0 or 1)")
        ->check(CLI::IsMember({"0", "1"}));
    c_push->add_option("--variant", sim_variant, "geom, push or continuous")
        ->check(CLI::IsMember({"geom", "push", "continuous"}));
    c_push->add_option("--lambda", sim_lambda, "rate for the continuous variant");
    c_push->add_option("--out", out, "output CSV");

    // ---- cluster-snapshot ---------------------------------------------------
    auto* c_snap = app.add_subcommand("cluster-snapshot", "emit cluster vertices with timestamps");
    add_params(c_snap);
    int64_t snap_size = 100;
    c_snap->add_option("--size", snap_size, "window size (max column)");
    c_snap->add_option("--seed", seed, "base random seed");
    c_snap->add_option("--out", out, "output CSV");

    // ---- exact --------------------------------------------------------------
    auto* c_exact = app.add_subcommand("exact", "Fredholm-determinant law P(H_t(n) < m)");
    add_params(c_exact);
    int64_t ex_n = 1;
    std::optional<int64_t> ex_m;
    std::optional<double> ex_x;
    std::string ex_preset = "saddle";
    int ex_nodes = 64;
    c_exact->add_option("--n", ex_n, "column index");
    c_exact->add_option("--m", ex_m, "height threshold");
    c_exact->add_option("--x", ex_x, "fluctuation coordinate (sets m = m(n,x))");
    c_exact->add_option("--preset", ex_preset, "contour preset")
        ->check(CLI::IsMember({"small-circle", "saddle"}));
    c_exact->add_option("--nodes", ex_nodes, "u-contour nodes per piece");
    c_exact->add_option("--out", out, "output CSV");

    // ---- tw -----------------------------------------------------------------
    auto* c_tw = app.add_subcommand("tw", "Tracy-Widom GUE distribution function");
    std::optional<double> tw_x;
    std::string tw_method = "airy", tw_grid;
    c_tw->add_option("--x", tw_x, "evaluation point");
    c_tw->add_option("--method", tw_method, "airy or contour")
        ->check(CLI::IsMember({"airy", "contour"}));
    c_tw->add_option("--grid", tw_grid, "lo:hi:step grid specification");
    c_tw->add_option("--out", out, "output CSV");

    // ---- compare ------------------------------------------------------------
    auto* c_cmp = app.add_subcommand("compare", "statistical verification suites");
    c_cmp->require_subcommand(1);
    ExperimentConfig cmp_cfg;
    auto* c_fit = c_cmp->add_subcommand("tw-fit", "KS distance of rescaled heights to F_GUE");
    auto* c_equiv = c_cmp->add_subcommand("equivalence", "three-way sampler equivalence");
    auto* c_exmc = c_cmp->add_subcommand("exact-mc", "exact law vs Monte Carlo");
    for (CLI::App* cmd : {c_fit, c_equiv, c_exmc}) {
        cmd->add_option("--a", cmp_cfg.params.a, "vertical clock rate a");
        cmd->add_option("--b", cmp_cfg.params.b, "horizontal clock rate b");
        cmd->add_option("--t", cmp_cfg.params.t, "observation time t");
        cmd->add_option("--n", cmp_cfg.n_list, "column indices");
        cmd->add_option("--reps", cmp_cfg.reps, "replicas per n");
        cmd->add_option("--seed", cmp_cfg.seed, "base random seed");
        cmd->add_option("--out", out, "output CSV");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        // ---- constants ------------------------------------------------------
        if (c_const->parsed()) {
            params.validate();
            const ScalingConstants sc = scaling_constants(params);
            std::vector<std::string> lines;
            lines.push_back("lambda=" + sig15(sc.lambda));
            lines.push_back("d=" + sig15(sc.d));
            lines.push_back("sigma=" + sig15(sc.sigma));
            double theta = theta_opt.value_or(0.0);
            if (!theta_opt && n_opt) theta = theta_for(params, *n_opt);
            if (theta > 0.0) {
                const LargeTimeFunctions f = large_time_functions(params, theta);
                lines.push_back("theta=" + sig15(theta));
                lines.push_back("kappa=" + sig15(f.kappa));
                lines.push_back("tau=" + sig15(f.tau));
                lines.push_back("rho=" + sig15(f.rho));
                lines.push_back("rho_tilde=" + sig15(f.rho_tilde));
            }
            if (n_opt) {
                const double x = x_opt.value_or(0.0);
                lines.push_back("m=" + std::to_string(m_for(params, *n_opt, x)));
            }
            write_output(out, lines);
            return 0;
        }

        // ---- simulate fpp ---------------------------------------------------
        if (c_fpp->parsed()) {
            params.validate();
            const SimMethod method = parse_method(sim_method);
            const auto hs = simulate_heights(params, sim_n, sim_reps, method, 1, seed, threads);
            std::vector<std::string> lines{"replica,n,height,chi"};
            for (int64_t r = 0; r < sim_reps; ++r)
                lines.push_back(std::to_string(r) + "," + std::to_string(sim_n) + "," +
                                std::to_string(hs[r]) + "," +
                                csv_double(chi_from_height(params, sim_n, hs[r])));
            write_output(out, lines);
            return 0;
        }

        // ---- simulate pushtasep --------------------------------------------
        if (c_push->parsed()) {
            params.validate();
            std::vector<std::string> lines{"replica,n,position,height_equiv,chi"};
            for (int64_t r = 0; r < sim_reps; ++r) {
                int64_t position = 0, height = 0;
                if (sim_variant == "geom") {
                    StreamKey key{seed, static_cast<uint64_t>(r),
                                  sim_label(sim_kind::push_geom, sim_n)};
                    ParticleConfig cfg = init_particles(params, sim_n + sim_offset, key);
                    run_pushtasep(cfg, params, params.t, key);
                    position = cfg.particle(sim_n + sim_offset);
                    height = height_from_particles(cfg, sim_n, sim_offset);
                } else if (sim_variant == "push") {
                    StreamKey key{seed, static_cast<uint64_t>(r),
                                  sim_label(sim_kind::push_limit, sim_n)};
                    const ParticleConfig cfg =
                        run_pushtasep_limit(sim_n + sim_offset, params.t, key);
                    position = cfg.particle(sim_n + sim_offset);
                    height = position - (sim_n + sim_offset);
                } else {
                    StreamKey key{seed, static_cast<uint64_t>(r),
                                  sim_label(sim_kind::push_continuous, sim_n)};
                    const auto pos =
                        run_continuous_pushtasep(sim_lambda, sim_n + sim_offset, params.t, key);
                    lines.push_back(std::to_string(r) + "," + std::to_string(sim_n) + "," +
                                    csv_double(pos[sim_n + sim_offset - 1]) + ",," );
                    continue;
                }
                lines.push_back(std::to_string(r) + "," + std::to_string(sim_n) + "," +
                                std::to_string(position) + "," + std::to_string(height) + "," +
                                csv_double(chi_from_height(params, sim_n, height)));
            }
            write_output(out, lines);
            return 0;
        }

        // ---- cluster-snapshot ----------------------------------------------
        if (c_snap->parsed()) {
            params.validate();
            StreamKey key{seed, 0, sim_label(sim_kind::snapshot, snap_size)};
            const auto verts = cluster_snapshot(params, snap_size, params.t, key);
            std::vector<std::string> lines{"x,y,time"};
            for (const auto& v : verts)
                lines.push_back(std::to_string(v.x) + "," + std::to_string(v.y) + "," +
                                csv_double(v.time));
            write_output(out, lines);
            return 0;
        }

        // ---- exact ----------------------------------------------------------
        if (c_exact->parsed()) {
            params.validate();
            ExactLawRequest req;
            req.params = params;
            req.n = ex_n;
            if (ex_m) {
                req.m = *ex_m;
            } else if (ex_x) {
                req.m = std::max<int64_t>(1, m_for(params, ex_n, *ex_x));
            } else {
                throw config_error("exact: provide --m or --x");
            }
            req.preset =
                ex_preset == "saddle" ? ContourPreset::saddle : ContourPreset::small_circle;
            req.u_nodes = ex_nodes;
            const ExactLawResult r = prob_height_below(req);
            std::vector<std::string> lines{"n,m,p,imag_residual,doubling_error"};
            lines.push_back(std::to_string(ex_n) + "," + std::to_string(req.m) + "," +
                            csv_double(r.p) + "," + csv_double(r.imag_residual) + "," +
                            csv_double(r.doubling_error));
            write_output(out, lines);
            return 0;
        }

        // ---- tw -------------------------------------------------------------
        if (c_tw->parsed()) {
            const TWMethod method = tw_method == "airy" ? TWMethod::airy : TWMethod::contour;
            std::vector<std::string> lines{"x,F,doubling_error"};
            if (!tw_grid.empty()) {
                double lo, hi, step;
                if (std::sscanf(tw_grid.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 ||
                    step <= 0.0)
                    throw config_error("tw: --grid expects lo:hi:step with step > 0");
                for (double x = lo; x <= hi + 1e-12; x += step) {
                    const TWResult r = F_gue(x, method);
                    lines.push_back(csv_double(x) + "," + csv_double(r.F) + "," +
                                    csv_double(r.doubling_error));
                }
            } else if (tw_x) {
                const TWResult r = F_gue(*tw_x, method);
                lines.push_back(csv_double(*tw_x) + "," + csv_double(r.F) + "," +
                                csv_double(r.doubling_error));
            } else {
                throw config_error("tw: provide --x or --grid");
            }
            write_output(out, lines);
            return 0;
        }

        // ---- compare --------------------------------------------------------
        if (c_cmp->parsed()) {
            if (!config_path.empty()) apply_config_file(config_path, cmp_cfg);
            if (cmp_cfg.out.empty()) cmp_cfg.out = out;
            cmp_cfg.threads = threads;
            cmp_cfg.params.validate();
            bool pass = true;
            std::vector<std::string> lines;
            if (c_fit->parsed()) {
                if (cmp_cfg.n_list.empty()) cmp_cfg.n_list = {1000, 10000, 100000};
                const FGueTable table = FGueTable::build();
                const auto rows = tw_convergence_study(cmp_cfg, table);
                lines.push_back("n,reps,ks_to_fgue,mean_chi,sd_chi");
                for (const auto& r : rows)
                    lines.push_back(std::to_string(r.n) + "," + std::to_string(r.reps) + "," +
                                    csv_double(r.ks_to_fgue) + "," + csv_double(r.mean_chi) +
                                    "," + csv_double(r.sd_chi));
                for (size_t i = 1; i < rows.size(); ++i)
                    pass = pass && rows[i].ks_to_fgue < rows[i - 1].ks_to_fgue;
                if (rows.empty()) std::fprintf(stderr, "warning: empty study (reps = 0?)\n");
            } else if (c_equiv->parsed()) {
                if (cmp_cfg.n_list.empty()) cmp_cfg.n_list = {10, 50};
                const auto rows = law_equivalence_suite(cmp_cfg);
                lines.push_back("pair,n,ks,critical,pass");
                for (const auto& r : rows) {
                    lines.push_back(r.pair + "," + std::to_string(r.n) + "," + csv_double(r.ks) +
                                    "," + csv_double(r.critical) + "," + (r.pass ? "1" : "0"));
                    pass = pass && r.pass;
                }
            } else {
                if (cmp_cfg.n_list.empty()) cmp_cfg.n_list = {1, 2, 3, 4, 5, 6, 7, 8};
                cmp_cfg.method = SimMethod::event;
                const auto rows = exact_vs_mc_suite(cmp_cfg);
                lines.push_back("n,m,p_exact,p_mc,se_mc,z_score");
                for (const auto& r : rows) {
                    lines.push_back(std::to_string(r.n) + "," + std::to_string(r.m) + "," +
                                    csv_double(r.p_exact) + "," + csv_double(r.p_mc) + "," +
                                    csv_double(r.se_mc) + "," + csv_double(r.z_score));
                    pass = pass && std::abs(r.z_score) <= 4.0;
                }
            }
            write_output(cmp_cfg.out, lines);
            return pass ? 0 : 2;
        }
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
